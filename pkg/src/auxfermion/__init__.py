"""Jordan-Wigner and auxiliary-fermion local encodings of fermionic Hamiltonians."""

from .auxenc import (
    EncodedHamiltonian,
    EncodingError,
    Stabilizer,
    bogoliubov_operator,
    build_stabilizer,
    build_stabilizers,
    encode_hamiltonian,
    encode_hop,
    encode_jordan_wigner,
    encode_term,
)
from .fermion import (
    FermionHamiltonian,
    FockState,
    LadderOperator,
    LadderTerm,
    ann,
    apply_ladder,
    build_fock_matrix,
    cdag,
    hermitian_closure,
    normal_reorder,
)
from .jw import jw_encode_hamiltonian, jw_encode_term, jw_ladder
from .layout import (
    EncodingLayout,
    InfeasibleLayoutError,
    InteractionGraph,
    LinearOrder,
    assign_couplings,
    break_loops,
    build_graph,
    build_layout,
    nonlocal_degree,
    place_aux,
    snake_order,
)
from .pauli import PauliString, PauliSum, adjoint, commutes, multiply, weight

__all__ = [name for name in dir() if not name.startswith("_")]
