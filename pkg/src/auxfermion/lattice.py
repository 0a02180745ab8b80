"""Model generators: the complete graph on four modes, chains and square lattices.

Lattice sites are labelled row-major, ``r * cols + c``; the boustrophedon
backbone is returned alongside the Hamiltonian.
"""

from __future__ import annotations

from .fermion import FermionHamiltonian, LadderTerm, ann, cdag, hermitian_closure
from .layout import LinearOrder, snake_order


def _hops(n_modes: int, edges, t: complex) -> FermionHamiltonian:
    terms = [LadderTerm(t, (cdag(p), ann(q))) for p, q in edges]
    return hermitian_closure(FermionHamiltonian(n_modes, terms))


def k4(t: complex = 1.0) -> FermionHamiltonian:
    """All six hops of the complete graph on modes 0..3, Hermitian-closed."""
    edges = [(p, q) for p in range(4) for q in range(p + 1, 4)]
    return _hops(4, edges, t)


def chain(n: int, t: complex = 1.0) -> FermionHamiltonian:
    if n < 1:
        raise ValueError("chain length must be positive")
    return _hops(n, [(i, i + 1) for i in range(n - 1)], t)


def lattice_edges(rows: int, cols: int) -> list[tuple[tuple[int, int], str]]:
    if rows < 1 or cols < 1:
        raise ValueError(f"invalid lattice dimensions {rows}x{cols}")
    out = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                out.append(((i, i + 1), "horizontal"))
            if r + 1 < rows:
                out.append(((i, i + cols), "vertical"))
    return out


def hubbard_hops(
    rows: int, cols: int, t: complex = 1.0, U: float = 0.0, mu: float = 0.0
) -> tuple[FermionHamiltonian, LinearOrder]:
    """Spinless nearest-neighbour hopping on a ``rows x cols`` grid.

    ``U`` adds ``U n_i n_j`` on every grid edge, ``mu`` adds ``mu n_i`` on every
    site.  Returns the Hamiltonian and its snake backbone.
    """
    edges = [e for e, _ in lattice_edges(rows, cols)]
    n = rows * cols
    h = _hops(n, edges, t)
    terms = list(h.terms)
    if U:
        terms += [LadderTerm(U, (cdag(p), ann(p), cdag(q), ann(q))) for p, q in edges]
    if mu:
        terms += [LadderTerm(mu, (cdag(i), ann(i))) for i in range(n)]
    return FermionHamiltonian(n, terms), snake_order(rows, cols)


def generate_lattice(kind: str, dims: tuple[int, ...] = (), t: complex = 1.0, U: float = 0.0, mu: float = 0.0):
    """Dispatch used by the CLI; returns ``(hamiltonian, order, grid_dims)``."""
    if kind == "k4":
        return k4(t), LinearOrder.natural(4), None
    if kind == "chain":
        if len(dims) != 1 or dims[0] < 1:
            raise ValueError(f"chain needs one positive length, got {dims}")
        return chain(dims[0], t), LinearOrder.natural(dims[0]), None
    if kind == "hubbard_hops":
        if len(dims) != 2 or min(dims) < 1:
            raise ValueError(f"hubbard_hops needs positive rows and cols, got {dims}")
        h, order = hubbard_hops(dims[0], dims[1], t, U, mu)
        return h, order, (dims[0], dims[1])
    raise ValueError(f"unknown lattice kind {kind!r}")
