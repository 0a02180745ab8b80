"""Ladder-operator terms, fermionic Hamiltonians and the Fock-space oracle.

Basis convention for every matrix built here: the basis index is the
occupation bitstring read with mode 0 as the least significant bit, and
``|n>`` is defined by applying ``a_i^dagger`` in ascending mode order from the
left, so ``a_j`` picks up ``(-1)**(n_0 + ... + n_{j-1})``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

ORACLE_MODE_LIMIT = 12


class OracleSizeError(ValueError):
    """Raised when a dense oracle would exceed the configured mode limit."""


@dataclass(frozen=True, order=True)
class LadderOperator:
    mode: int
    creation: bool

    def __post_init__(self) -> None:
        if self.mode < 0:
            raise ValueError("mode index must be non-negative")

    def dagger(self) -> LadderOperator:
        return LadderOperator(self.mode, not self.creation)

    def __str__(self) -> str:
        return f"{self.mode}^" if self.creation else f"{self.mode}"


def cdag(mode: int) -> LadderOperator:
    return LadderOperator(mode, True)


def ann(mode: int) -> LadderOperator:
    return LadderOperator(mode, False)


@dataclass(frozen=True)
class LadderTerm:
    """``coefficient`` times the ordered product of ``factors`` (leftmost acts last)."""

    coefficient: complex
    factors: tuple[LadderOperator, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def modes(self) -> set[int]:
        return {f.mode for f in self.factors}

    def adjoint(self) -> LadderTerm:
        return LadderTerm(
            self.coefficient.conjugate(), tuple(f.dagger() for f in reversed(self.factors))
        )

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        adj = self.adjoint()
        return adj.factors == self.factors and abs(adj.coefficient - self.coefficient) <= tol

    def __str__(self) -> str:
        ops = " ".join(str(f) for f in self.factors)
        return f"{self.coefficient} {ops}".rstrip()


@dataclass
class FermionHamiltonian:
    n_modes: int
    terms: list[LadderTerm] = field(default_factory=list)

    def __post_init__(self) -> None:
        for t in self.terms:
            for f in t.factors:
                if f.mode >= self.n_modes:
                    raise ValueError(f"mode {f.mode} out of range for {self.n_modes} modes")

    def merged(self, tol: float = 1e-12) -> dict[tuple[LadderOperator, ...], complex]:
        """Coefficients accumulated per identical factor sequence."""
        out: dict[tuple[LadderOperator, ...], complex] = {}
        for t in self.terms:
            out[t.factors] = out.get(t.factors, 0) + t.coefficient
        return {k: c for k, c in out.items() if abs(c) > tol}

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class FockState:
    occupations: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "occupations", tuple(int(n) for n in self.occupations))
        if any(n not in (0, 1) for n in self.occupations):
            raise ValueError("occupations must be 0 or 1")

    @classmethod
    def from_index(cls, index: int, n_modes: int) -> FockState:
        return cls(tuple((index >> j) & 1 for j in range(n_modes)))

    @property
    def index(self) -> int:
        return sum(n << j for j, n in enumerate(self.occupations))

    def __len__(self) -> int:
        return len(self.occupations)


def apply_ladder(op: LadderOperator, s: FockState) -> tuple[int, FockState] | None:
    """Action of one ladder operator; ``None`` when the result vanishes."""
    if op.mode >= len(s):
        raise ValueError(f"mode {op.mode} out of range for {len(s)} modes")
    res = _apply_index(op, s.index)
    if res is None:
        return None
    sign, idx = res
    return sign, FockState.from_index(idx, len(s))


def _apply_index(op: LadderOperator, index: int) -> tuple[int, int] | None:
    bit = 1 << op.mode
    occupied = bool(index & bit)
    if occupied == op.creation:
        return None
    gamma = bin(index & (bit - 1)).count("1")
    return (-1) ** gamma, index ^ bit


def _apply_term(term: LadderTerm, index: int) -> tuple[complex, int] | None:
    amp = term.coefficient
    for op in reversed(term.factors):
        res = _apply_index(op, index)
        if res is None:
            return None
        sign, index = res
        amp *= sign
    return amp, index


def build_fock_matrix(
    h: FermionHamiltonian | Iterable[LadderTerm],
    n_modes: int | None = None,
    *,
    limit: int = ORACLE_MODE_LIMIT,
    sparse: bool = False,
) -> np.ndarray | sp.csr_matrix:
    """Matrix ``<m|H|n>`` over the ``2**n_modes`` occupation basis.

    Dense up to ``limit`` modes.  ``sparse=True`` lifts the limit and returns a
    CSR matrix assembled column by column.
    """
    if isinstance(h, FermionHamiltonian):
        terms, n = h.terms, h.n_modes
    else:
        terms = list(h)
        if n_modes is None:
            raise ValueError("n_modes is required for a bare term list")
        n = n_modes
    if n_modes is not None:
        n = n_modes
    if not sparse and n > limit:
        raise OracleSizeError(f"{n} modes exceeds the dense oracle limit of {limit}")
    dim = 2**n
    rows, cols, vals = [], [], []
    for col in range(dim):
        for t in terms:
            res = _apply_term(t, col)
            if res is not None:
                amp, row = res
                rows.append(row)
                cols.append(col)
                vals.append(amp)
    mat = sp.coo_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(dim, dim)
    ).tocsr()
    return mat if sparse else mat.toarray()


def ladder_matrix(op: LadderOperator, n_modes: int) -> np.ndarray:
    return build_fock_matrix([LadderTerm(1.0, (op,))], n_modes)


def _default_rank(op: LadderOperator) -> tuple[int, int]:
    # creations left in ascending mode, annihilations right in descending mode
    return (0, op.mode) if op.creation else (1, -op.mode)


def normal_reorder(
    t: LadderTerm, target: Sequence[int] | None = None
) -> list[LadderTerm]:
    """Rewrite ``t`` so its factors appear in the order ``target``.

    ``target`` is a permutation of factor positions: ``target[k]`` is the
    position in ``t.factors`` of the operator that should end up at slot ``k``.
    Adjacent transpositions flip the sign; swapping ``a_j`` with ``a_j^dagger``
    also emits the contracted term.  Without ``target`` the usual normal order
    (creations left) is produced.  The returned terms sum to ``t``.
    """
    n = len(t.factors)
    if target is None:
        target = sorted(range(n), key=lambda i: (_default_rank(t.factors[i]), i))
    if sorted(target) != list(range(n)):
        raise ValueError(f"target {list(target)} is not a permutation of {n} positions")
    rank = {pos: k for k, pos in enumerate(target)}
    keyed = [(rank[i], f) for i, f in enumerate(t.factors)]
    out: list[LadderTerm] = []
    _bubble(t.coefficient, keyed, out)
    return out


def _bubble(coeff: complex, keyed: list[tuple[int, LadderOperator]], out: list[LadderTerm]) -> None:
    keyed = list(keyed)
    i = 0
    while i < len(keyed) - 1:
        (ra, a), (rb, b) = keyed[i], keyed[i + 1]
        if ra <= rb:
            i += 1
            continue
        if a.mode == b.mode and a.creation != b.creation:
            # a b = delta - b a
            _bubble(coeff, keyed[:i] + keyed[i + 2 :], out)
        keyed[i], keyed[i + 1] = keyed[i + 1], keyed[i]
        coeff = -coeff
        i = max(i - 1, 0)
    out.append(LadderTerm(coeff, tuple(f for _, f in keyed)))


def hermitian_closure(h: FermionHamiltonian, tol: float = 1e-12) -> FermionHamiltonian:
    """Append the conjugate of every term whose partner is missing.

    Terms are first merged per factor sequence; a term counts as matched when
    its adjoint sequence already carries the conjugate coefficient.
    """
    merged = h.merged(tol)
    out = dict(merged)
    for factors, c in merged.items():
        adj = LadderTerm(c, factors).adjoint()
        partner = merged.get(adj.factors)
        if partner is not None and abs(partner - adj.coefficient) <= tol:
            continue
        out[adj.factors] = out.get(adj.factors, 0) + adj.coefficient
    terms = [LadderTerm(c, k) for k, c in out.items() if abs(c) > tol]
    return FermionHamiltonian(h.n_modes, terms)


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def all_fock_states(n_modes: int) -> Iterable[FockState]:
    for bits in itertools.product((0, 1), repeat=n_modes):
        yield FockState(tuple(reversed(bits)))
