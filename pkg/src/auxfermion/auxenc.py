"""Stabilizer construction and local compilation on the enlarged register.

A coupling between auxiliaries ``p'`` and ``q'`` yields the stabilizer
``M = i b_{p'} c_{q'}`` where ``b`` and ``c`` are Bogoliubov strings over the
interleaved placement.  Sign convention: the letter recorded for ``p'`` is the
one that appears in ``M`` itself, ``L = +i B Z``, so ``b_{p'}`` is built with
gauge angle ``theta_L + pi/2``.  With this branch the default X/Y letters give
stabilizers with coefficient exactly ``+1``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .fermion import FermionHamiltonian, LadderOperator, LadderTerm, normal_reorder
from .jw import jw_encode_term, jw_operator
from .layout import (
    AuxPlacement,
    Coupling,
    CouplingAssignment,
    EncodingLayout,
    LinearOrder,
    _edge,
    build_graph,
    build_layout,
    pair_factors,
    placement_from_counts,
)
from .pauli import DEFAULT_TOL, PauliString, PauliSum, commutes, prune, sum_commutes


class EncodingError(ValueError):
    """A term cannot be compiled with the given layout."""


def _trig(theta: float) -> tuple[float, float]:
    """cos/sin, exact at multiples of pi/2."""
    k = theta / (math.pi / 2)
    if abs(k - round(k)) < 1e-12:
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[round(k) % 4]
    return math.cos(theta), math.sin(theta)


def letter_sum(n_qubits: int, qubit: int, theta: float) -> PauliSum:
    """``cos(theta) X - sin(theta) Y`` on one qubit."""
    c, s = _trig(theta)
    x = PauliString(n_qubits, 1 << qubit, 0)
    y = PauliString(n_qubits, 1 << qubit, 1 << qubit)
    return PauliSum(n_qubits, {x.key: c, y.key: -s})


def bogoliubov_operator(m: int, theta: float, placement: AuxPlacement) -> PauliSum:
    """``alpha^-1 a_m + alpha a_m^dagger`` with ``alpha = exp(-i theta)``.

    Reduces to a Z chain over every qubit before ``m`` times
    ``cos(theta) X - sin(theta) Y`` on ``m``.
    """
    if not placement.is_aux(m):
        raise EncodingError(f"mode {m} is not an auxiliary mode")
    n = placement.n_qubits
    q = placement.qubit(m)
    chain = PauliSum.from_string(PauliString(n, 0, (1 << q) - 1))
    return chain * letter_sum(n, q, theta)


@dataclass(frozen=True)
class Stabilizer:
    edge: tuple[int, int]
    operator: PauliSum
    serves: tuple[tuple[int, int], ...] = ()
    endpoints: tuple[int, int] = (-1, -1)
    angles: tuple[float, float] = (0.0, 0.0)

    @property
    def is_pauli(self) -> bool:
        return len(self.operator) == 1

    @property
    def string(self) -> PauliString:
        """The stabilizer as a phased Pauli string (default X/Y gauge only)."""
        if not self.is_pauli:
            raise ValueError("stabilizer is a sum of strings under a general gauge")
        (p, c), = self.operator
        for k, ph in enumerate((1, 1j, -1, -1j)):
            if abs(c - ph) < 1e-12:
                return PauliString(p.n_qubits, p.x, p.z, k)
        raise ValueError(f"coefficient {c} is not a unit phase")

    def commutes_with(self, other: PauliSum | Stabilizer) -> bool:
        op = other.operator if isinstance(other, Stabilizer) else other
        if self.is_pauli:
            # distinct patterns cannot cancel in [S, P], so termwise is exact
            s = self.string
            return all(commutes(s, p) for p, _ in op)
        return sum_commutes(self.operator, op)


def build_stabilizer(coupling: Coupling, placement: AuxPlacement, tol: float = DEFAULT_TOL) -> Stabilizer:
    b = bogoliubov_operator(coupling.p_aux, coupling.p_angle + math.pi / 2, placement)
    c = bogoliubov_operator(coupling.q_aux, coupling.q_angle, placement)
    m = prune(1j * (b * c), tol)
    if m.distance(m.adjoint()) > 1e-10:
        raise EncodingError(f"stabilizer for {coupling.edge} is not Hermitian")
    if prune(m * m - PauliSum.identity(m.n_qubits), 1e-10):
        raise EncodingError(f"stabilizer for {coupling.edge} does not square to one")
    endpoints = (placement.qubit(coupling.p_aux), placement.qubit(coupling.q_aux))
    return Stabilizer(
        coupling.edge,
        m,
        tuple(coupling.serves),
        endpoints,
        (coupling.p_angle, coupling.q_angle),
    )


def build_stabilizers(assignment: CouplingAssignment) -> list[Stabilizer]:
    return [build_stabilizer(c, assignment.placement) for c in assignment.couplings]


def _stabilizer_for(p: int, q: int, stabilizers: Sequence[Stabilizer]) -> Stabilizer | None:
    e = _edge(p, q)
    for s in stabilizers:
        if e in {_edge(*x) for x in s.serves} or _edge(*s.edge) == e:
            return s
    return None


def encode_pair(
    a: LadderOperator,
    b: LadderOperator,
    layout: EncodingLayout,
    stabilizers: Sequence[Stabilizer],
) -> PauliSum:
    """``a b`` with a coupling inserted between them when the pair is non-local."""
    qo = layout.qubit_order
    left, right = jw_operator(a, qo), jw_operator(b, qo)
    if layout.order.is_local(a.mode, b.mode):
        return left * right
    s = _stabilizer_for(a.mode, b.mode, stabilizers)
    if s is None:
        raise EncodingError(f"no coupling available for non-local pair ({a.mode}, {b.mode})")
    return left * s.operator * right


def encode_hop(
    p: int,
    q: int,
    coeff: complex,
    layout: EncodingLayout,
    stabilizers: Sequence[Stabilizer],
    hermitian: bool = True,
) -> PauliSum:
    """``coeff a_p^dagger M a_q`` plus its adjoint (unless ``hermitian=False``)."""
    if p == q:
        raise EncodingError("diagonal terms go through encode_term")
    out = coeff * encode_pair(LadderOperator(p, True), LadderOperator(q, False), layout, stabilizers)
    if hermitian:
        out = out + out.adjoint()
    return prune(out)


def number_operator(k: int, layout: EncodingLayout) -> PauliSum:
    qo = layout.qubit_order
    return jw_operator(LadderOperator(k, True), qo) * jw_operator(LadderOperator(k, False), qo)


def encode_term(
    t: LadderTerm, layout: EncodingLayout, stabilizers: Sequence[Stabilizer]
) -> PauliSum:
    """Compile one term: reorder into pairs, encode each pair, multiply.

    Contraction terms produced by the reordering are compiled recursively.
    """
    n = layout.n_qubits
    if len(t.factors) % 2:
        raise EncodingError(
            f"term with {len(t.factors)} ladder operators breaks parity; only even terms are encoded"
        )
    for f in t.factors:
        if f.mode >= layout.order.n_modes:
            raise EncodingError(f"mode {f.mode} is not part of the layout")
    if not t.factors:
        return PauliSum.identity(n, t.coefficient)
    pairs = pair_factors(t, layout.order)
    target = [i for pair in pairs for i in pair]
    total = PauliSum(n)
    for piece in normal_reorder(t, target):
        if len(piece.factors) < len(t.factors):
            total = total + encode_term(piece, layout, stabilizers)
            continue
        enc = PauliSum.identity(n, piece.coefficient)
        for k in range(0, len(piece.factors), 2):
            enc = enc * encode_pair(piece.factors[k], piece.factors[k + 1], layout, stabilizers)
        total = total + enc
    return prune(total)


def term_class(t: LadderTerm, order: LinearOrder) -> str:
    f = t.factors
    if not f:
        return "constant"
    if len(f) == 2:
        if f[0].mode == f[1].mode:
            return "number"
        return "local_hop" if order.is_local(f[0].mode, f[1].mode) else "nonlocal_hop"
    if len(f) == 4:
        return "two_body"
    return "many_body"


@dataclass
class EncodedHamiltonian:
    operator: PauliSum
    stabilizers: list[Stabilizer]
    layout: EncodingLayout
    stats: dict = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        return self.operator.n_qubits

    def stabilizers_commute(self) -> bool:
        s = self.stabilizers
        return all(s[i].commutes_with(s[j]) for i in range(len(s)) for j in range(i + 1, len(s)))

    def operator_commutes(self) -> bool:
        return all(s.commutes_with(self.operator) for s in self.stabilizers)


def weight_histogram(weights: Mapping[str, Sequence[int]]) -> dict[str, dict[int, int]]:
    return {cls: dict(sorted(Counter(ws).items())) for cls, ws in sorted(weights.items())}


def encode_hamiltonian(
    h: FermionHamiltonian,
    layout: EncodingLayout | None = None,
    *,
    order: LinearOrder | None = None,
    gauge: Mapping[int, float] | None = None,
    tol: float = DEFAULT_TOL,
) -> EncodedHamiltonian:
    if layout is None:
        layout = build_layout(h, order=order, gauge=gauge)
    stabilizers = build_stabilizers(layout.assignment)
    total = PauliSum(layout.n_qubits)
    weights: dict[str, list[int]] = {}
    for t in h.terms:
        enc = encode_term(t, layout, stabilizers)
        weights.setdefault(term_class(t, layout.order), []).append(enc.max_weight())
        total = total + enc
    total = prune(total, tol)
    stats = {
        "n_modes": h.n_modes,
        "n_aux": layout.placement.n_aux,
        "n_qubits": layout.n_qubits,
        "n_stabilizers": len(stabilizers),
        "n_terms": len(total),
        "max_weight": total.max_weight(),
        "term_weights": weight_histogram(weights),
    }
    return EncodedHamiltonian(total, stabilizers, layout, stats)


def encode_jordan_wigner(
    h: FermionHamiltonian, order: LinearOrder | None = None, tol: float = DEFAULT_TOL
) -> EncodedHamiltonian:
    """Plain JW along ``order`` packaged like an auxiliary encoding with no auxiliaries."""
    order = order or LinearOrder.natural(h.n_modes)
    placement = placement_from_counts(order, [0] * h.n_modes)
    layout = EncodingLayout(build_graph(h, order), CouplingAssignment(placement))
    total = PauliSum(placement.n_qubits)
    weights: dict[str, list[int]] = {}
    for t in h.terms:
        enc = jw_encode_term(t, placement.qubit_order)
        weights.setdefault(term_class(t, order), []).append(enc.max_weight())
        total = total + enc
    total = prune(total, tol)
    stats = {
        "n_modes": h.n_modes,
        "n_aux": 0,
        "n_qubits": placement.n_qubits,
        "n_stabilizers": 0,
        "n_terms": len(total),
        "max_weight": total.max_weight(),
        "term_weights": weight_histogram(weights),
    }
    return EncodedHamiltonian(total, [], layout, stats)
