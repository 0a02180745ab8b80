"""Phase-tracked Pauli strings and complex-weighted Pauli sums.

A :class:`PauliString` is stored symplectically: an X bit mask, a Z bit mask and
a power ``k`` of the global factor ``i**k``.  Letters follow the usual
convention ``Y = i X Z``, so a qubit with both bits set carries a genuine ``Y``
and the stored phase is the phase in front of the *letter* product.  Qubit 0 is
the least significant bit everywhere, including the dense matrices returned by
:func:`to_matrix`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

DEFAULT_TOL = 1e-12

_PHASES = (1, 1j, -1, -1j)
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_TOKEN = re.compile(r"^([XYZ])(\d+)$")

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _check_register(n_a: int, n_b: int) -> None:
    if n_a != n_b:
        raise ValueError(f"register size mismatch: {n_a} vs {n_b} qubits")


@dataclass(frozen=True, slots=True)
class PauliString:
    """``i**phase`` times a tensor product of single-qubit Pauli letters."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        if (self.x | self.z) >> self.n_qubits:
            raise ValueError(f"support exceeds register of {self.n_qubits} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_letters(
        cls, n_qubits: int, letters: Mapping[int, str], phase: int = 0
    ) -> PauliString:
        x = z = 0
        for q, letter in letters.items():
            if letter == "I":
                continue
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} outside register of {n_qubits}")
            bx, bz = _LETTER_BITS[letter]
            x |= bx << q
            z |= bz << q
        return cls(n_qubits, x, z, phase)

    @classmethod
    def parse(cls, n_qubits: int, label: str, phase: int = 0) -> PauliString:
        """Parse ``"X0 Z3 Y5"`` (``"I"`` or ``""`` for the identity)."""
        letters: dict[int, str] = {}
        for tok in label.split():
            if tok == "I":
                continue
            m = _TOKEN.match(tok)
            if m is None:
                raise ValueError(f"bad Pauli token {tok!r}")
            q = int(m.group(2))
            if q in letters:
                raise ValueError(f"qubit {q} repeated in {label!r}")
            letters[q] = m.group(1)
        return cls.from_letters(n_qubits, letters, phase)

    @property
    def letters(self) -> dict[int, str]:
        out = {}
        support = self.x | self.z
        q = 0
        while support >> q:
            if (support >> q) & 1:
                bx, bz = (self.x >> q) & 1, (self.z >> q) & 1
                out[q] = "Y" if bx and bz else ("X" if bx else "Z")
            q += 1
        return out

    @property
    def coefficient(self) -> complex:
        return _PHASES[self.phase]

    @property
    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    def label(self) -> str:
        letters = self.letters
        if not letters:
            return "I"
        return " ".join(f"{letters[q]}{q}" for q in sorted(letters))

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __str__(self) -> str:
        prefix = ("", "i*", "-", "-i*")[self.phase]
        return prefix + self.label()


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact product ``a @ b`` with the phase tracked mod 4."""
    _check_register(a.n_qubits, b.n_qubits)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # letters -> X^x Z^z form costs i per Y; moving Z_a past X_b costs -1 per overlap
    k = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliString(a.n_qubits, x, z, k)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_register(a.n_qubits, b.n_qubits)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def adjoint(a: PauliString) -> PauliString:
    # letters are Hermitian, only the phase conjugates
    return PauliString(a.n_qubits, a.x, a.z, -a.phase)


def weight(a: PauliString | tuple[int, int]) -> int:
    x, z = a.key if isinstance(a, PauliString) else a
    return _popcount(x | z)


class PauliSum:
    """Sum of Pauli letter patterns with complex coefficients.

    Instances are treated as immutable; every operation returns a new sum.
    Coefficients below ``tol`` in magnitude are dropped on construction.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[tuple[int, int], complex] | None = None,
        tol: float = DEFAULT_TOL,
    ) -> None:
        if tol < 0:
            raise ValueError("prune tolerance must be non-negative")
        self.n_qubits = n_qubits
        clean: dict[tuple[int, int], complex] = {}
        for (x, z), c in (terms or {}).items():
            if (x | z) >> n_qubits:
                raise ValueError(f"support exceeds register of {n_qubits} qubits")
            if abs(c) > tol:
                clean[(x, z)] = complex(c)
        self._terms = clean

    @classmethod
    def from_string(cls, p: PauliString, coeff: complex = 1.0) -> PauliSum:
        return cls(p.n_qubits, {p.key: coeff * p.coefficient})

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> PauliSum:
        return cls(n_qubits, {(0, 0): coeff})

    @classmethod
    def parse(cls, n_qubits: int, items: Iterable[tuple[str, complex]]) -> PauliSum:
        total: dict[tuple[int, int], complex] = {}
        for label, c in items:
            p = PauliString.parse(n_qubits, label)
            total[p.key] = total.get(p.key, 0) + c
        return cls(n_qubits, total)

    @property
    def terms(self) -> Mapping[tuple[int, int], complex]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliString(self.n_qubits, x, z), c

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def coefficient(self, p: PauliString | str) -> complex:
        if isinstance(p, str):
            p = PauliString.parse(self.n_qubits, p)
        return self._terms.get(p.key, 0j) / p.coefficient

    def __add__(self, other: PauliSum) -> PauliSum:
        return add(self, other)

    def __sub__(self, other: PauliSum) -> PauliSum:
        return add(self, scale(other, -1))

    def __neg__(self) -> PauliSum:
        return scale(self, -1)

    def __mul__(self, other: PauliSum | complex) -> PauliSum:
        if isinstance(other, PauliSum):
            return product(self, other)
        return scale(self, other)

    def __rmul__(self, other: complex) -> PauliSum:
        return scale(self, other)

    def adjoint(self) -> PauliSum:
        return PauliSum(self.n_qubits, {k: c.conjugate() for k, c in self._terms.items()})

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def max_weight(self) -> int:
        return max((weight(k) for k in self._terms), default=0)

    def distance(self, other: PauliSum) -> float:
        """Largest coefficient deviation between two sums."""
        _check_register(self.n_qubits, other.n_qubits)
        keys = self._terms.keys() | other._terms.keys()
        return max(
            (abs(self._terms.get(k, 0) - other._terms.get(k, 0)) for k in keys),
            default=0.0,
        )

    def sorted_terms(self) -> list[tuple[str, complex]]:
        """Terms as ``(label, coeff)`` sorted by letter pattern (ascending qubits)."""
        rows = [(p.label(), c) for p, c in self]
        return sorted(rows, key=lambda r: _label_sort_key(r[0]))

    def render(self) -> str:
        if not self._terms:
            return "0"
        return "\n".join(f"{_fmt_complex(c)} * {lbl}" for lbl, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"PauliSum(n_qubits={self.n_qubits}, terms={len(self)})"


def _label_sort_key(label: str) -> tuple:
    if label == "I":
        return ()
    return tuple((int(tok[1:]), tok[0]) for tok in label.split())


def _fmt_complex(c: complex) -> str:
    return f"({c.real:.12g}{c.imag:+.12g}j)"


def add(a: PauliSum, b: PauliSum) -> PauliSum:
    _check_register(a.n_qubits, b.n_qubits)
    total = dict(a._terms)
    for k, c in b._terms.items():
        total[k] = total.get(k, 0) + c
    return PauliSum(a.n_qubits, total)


def scale(a: PauliSum, factor: complex) -> PauliSum:
    return PauliSum(a.n_qubits, {k: factor * c for k, c in a._terms.items()})


def product(a: PauliSum, b: PauliSum) -> PauliSum:
    _check_register(a.n_qubits, b.n_qubits)
    n = a.n_qubits
    total: dict[tuple[int, int], complex] = {}
    for (xa, za), ca in a._terms.items():
        pa = PauliString(n, xa, za)
        for (xb, zb), cb in b._terms.items():
            p = multiply(pa, PauliString(n, xb, zb))
            total[p.key] = total.get(p.key, 0) + ca * cb * p.coefficient
    return PauliSum(n, total)


def prune(a: PauliSum, tol: float = DEFAULT_TOL) -> PauliSum:
    return PauliSum(a.n_qubits, a._terms, tol=tol)


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    return product(a, b) - product(b, a)


def sum_commutes(a: PauliSum, b: PauliSum, tol: float = DEFAULT_TOL) -> bool:
    """Exact commutation test for sums; symplectic when both are single strings."""
    if len(a) == 1 and len(b) == 1:
        (pa, _), (pb, _) = next(iter(a)), next(iter(b))
        return commutes(pa, pb)
    return not prune(commutator(a, b), tol)


def to_matrix(p: PauliString | PauliSum) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix built from Kronecker products (qubit 0 = LSB)."""
    if isinstance(p, PauliString):
        letters = p.letters
        mat = np.ones((1, 1), dtype=complex)
        for q in reversed(range(p.n_qubits)):
            mat = np.kron(mat, _PAULI_MATRICES[letters.get(q, "I")])
        return p.coefficient * mat
    dim = 2**p.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for s, c in p:
        out += c * to_matrix(s)
    return out
