"""Jordan-Wigner encoding over an explicit mode-to-qubit placement.

A placement is the sequence of mode labels in qubit order: ``placement[q]`` is
the mode stored on qubit ``q``.  The natural encoding uses ``range(n_modes)``;
the auxiliary encoding passes its enlarged, interleaved register instead.
"""

from __future__ import annotations

from typing import Sequence

from .fermion import FermionHamiltonian, LadderOperator, LadderTerm
from .pauli import DEFAULT_TOL, PauliString, PauliSum, prune


def natural_placement(n_modes: int) -> tuple[int, ...]:
    return tuple(range(n_modes))


def _qubit_of(mode: int, placement: Sequence[int]) -> int:
    try:
        return list(placement).index(mode)
    except ValueError:
        raise KeyError(f"mode {mode} is not placed on any qubit") from None


def jw_ladder(j: int, placement: Sequence[int], creation: bool) -> PauliSum:
    """``Z...Z (X -/+ iY)/2`` with the Z chain over all qubits preceding mode ``j``."""
    q = _qubit_of(j, placement)
    n = len(placement)
    chain = (1 << q) - 1
    x_part = PauliString(n, 1 << q, chain)
    y_part = PauliString(n, 1 << q, chain | (1 << q))
    y_coeff = -0.5j if creation else 0.5j
    return PauliSum(n, {x_part.key: 0.5, y_part.key: y_coeff})


def jw_operator(op: LadderOperator, placement: Sequence[int]) -> PauliSum:
    return jw_ladder(op.mode, placement, op.creation)


def jw_encode_term(t: LadderTerm, placement: Sequence[int]) -> PauliSum:
    n = len(placement)
    out = PauliSum.identity(n, t.coefficient)
    for op in t.factors:
        out = out * jw_operator(op, placement)
    return out


def jw_encode_hamiltonian(
    h: FermionHamiltonian, placement: Sequence[int] | None = None, tol: float = DEFAULT_TOL
) -> PauliSum:
    if placement is None:
        placement = natural_placement(h.n_modes)
    total = PauliSum(len(placement))
    for t in h.terms:
        total = total + jw_encode_term(t, placement)
    return prune(total, tol)
