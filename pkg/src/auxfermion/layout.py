"""Interaction-graph analysis and auxiliary-mode layout.

Pipeline: :func:`build_graph` collects the mode pairs that terms couple,
:func:`nonlocal_degree` compares them with the linear backbone,
:func:`place_aux` interleaves ``ceil(D_nl / 2)`` auxiliary modes after each
host, :func:`assign_couplings` picks auxiliary endpoints and letters for every
non-local edge, and :func:`break_loops` removes closed loops of couplings.

Letters are unit vectors in the XY plane, ``cos(theta) X - sin(theta) Y``:
``theta = 0`` is X and ``theta = -pi/2`` is Y.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .fermion import FermionHamiltonian, LadderOperator, LadderTerm
from .pauli import PauliString, commutes

X_ANGLE = 0.0
Y_ANGLE = -math.pi / 2
MATCHING_LIMIT = 12


class InfeasibleLayoutError(RuntimeError):
    """No valid coupling assignment exists for the given auxiliary placement."""


Edge = tuple[int, int]


def _edge(p: int, q: int) -> Edge:
    return (p, q) if p < q else (q, p)


@dataclass(frozen=True)
class InteractionGraph:
    n_modes: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self) -> None:
        clean = set()
        for p, q in self.edges:
            if p == q:
                raise ValueError(f"self-loop on mode {p}")
            if not (0 <= p < self.n_modes and 0 <= q < self.n_modes):
                raise ValueError(f"edge ({p}, {q}) out of range")
            clean.add(_edge(p, q))
        object.__setattr__(self, "edges", frozenset(clean))

    def degree(self) -> list[int]:
        deg = [0] * self.n_modes
        for p, q in self.edges:
            deg[p] += 1
            deg[q] += 1
        return deg


@dataclass(frozen=True)
class LinearOrder:
    """The backbone: ``order[k]`` is the k-th mode along the chain."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(self.order))
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError(f"order {self.order} is not a permutation")

    @classmethod
    def natural(cls, n_modes: int) -> LinearOrder:
        return cls(tuple(range(n_modes)))

    @property
    def n_modes(self) -> int:
        return len(self.order)

    @property
    def position(self) -> dict[int, int]:
        return {m: k for k, m in enumerate(self.order)}

    def backbone(self) -> frozenset[Edge]:
        return frozenset(_edge(a, b) for a, b in zip(self.order, self.order[1:]))

    def is_local(self, p: int, q: int) -> bool:
        pos = self.position
        return p == q or abs(pos[p] - pos[q]) == 1

    def successor(self, mode: int) -> int | None:
        k = self.position[mode]
        return self.order[k + 1] if k + 1 < len(self.order) else None

    def oriented(self, p: int, q: int) -> Edge:
        """The pair with the earlier backbone mode first."""
        pos = self.position
        return (p, q) if pos[p] < pos[q] else (q, p)


def snake_order(rows: int, cols: int) -> LinearOrder:
    """Boustrophedon order over row-major site labels ``r * cols + c``."""
    order = []
    for r in range(rows):
        cs = range(cols) if r % 2 == 0 else reversed(range(cols))
        order.extend(r * cols + c for c in cs)
    return LinearOrder(tuple(order))


# -- factor pairing ----------------------------------------------------------


def _pair_cost(a: LadderOperator, b: LadderOperator, order: LinearOrder) -> int:
    return 0 if order.is_local(a.mode, b.mode) else 1


def _matchings(items: list[int]) -> Iterable[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    # nearest partner first so ties resolve to the most compact grouping
    for k in range(len(rest)):
        partner = rest[k]
        for tail in _matchings(rest[:k] + rest[k + 1 :]):
            yield [(first, partner)] + tail


def pair_factors(t: LadderTerm, order: LinearOrder) -> list[tuple[int, int]]:
    """Group the factors of an even-length term into pairs.

    Returns position pairs ``(i, j)`` with ``i < j``.  The matching minimises
    the number of non-local pairs (each needs one coupling insertion); ties go
    to the first matching that pairs every leftmost factor with its nearest
    admissible partner.  Terms longer than ``MATCHING_LIMIT`` fall back to the
    greedy leftmost-first rule.
    """
    n = len(t.factors)
    if n % 2:
        raise ValueError(f"odd number of ladder operators ({n}) cannot be paired")
    f = t.factors
    if n > MATCHING_LIMIT:
        remaining = list(range(n))
        pairs = []
        while remaining:
            i = remaining.pop(0)
            j = min(remaining, key=lambda r: (_pair_cost(f[i], f[r], order), r))
            remaining.remove(j)
            pairs.append((i, j))
        return pairs
    best, best_cost = None, None
    for m in _matchings(list(range(n))):
        cost = sum(_pair_cost(f[i], f[j], order) for i, j in m)
        if best_cost is None or cost < best_cost:
            best, best_cost = m, cost
            if cost == 0:
                break
    return best or []


def build_graph(h: FermionHamiltonian, order: LinearOrder | None = None) -> InteractionGraph:
    """Edges between modes that a term pairs together (see :func:`pair_factors`)."""
    order = order or LinearOrder.natural(h.n_modes)
    edges = set()
    for t in h.terms:
        if len(t.factors) % 2:
            # odd terms are rejected by the encoder; record every co-occurrence
            for a, b in itertools.combinations(sorted(t.modes), 2):
                edges.add(_edge(a, b))
            continue
        for i, j in pair_factors(t, order):
            p, q = t.factors[i].mode, t.factors[j].mode
            if p != q:
                edges.add(_edge(p, q))
    return InteractionGraph(h.n_modes, frozenset(edges))


def nonlocal_edges(g: InteractionGraph, order: LinearOrder) -> list[Edge]:
    """Non-backbone edges oriented and sorted by backbone position."""
    pos = order.position
    bb = order.backbone()
    out = [order.oriented(p, q) for p, q in g.edges if (p, q) not in bb]
    return sorted(out, key=lambda e: (pos[e[0]], pos[e[1]]))


def nonlocal_degree(g: InteractionGraph, order: LinearOrder) -> list[int]:
    d = [0] * g.n_modes
    for p, q in nonlocal_edges(g, order):
        d[p] += 1
        d[q] += 1
    return d


def backbone_degree(order: LinearOrder) -> list[int]:
    d = [0] * order.n_modes
    for p, q in order.backbone():
        d[p] += 1
        d[q] += 1
    return d


# -- auxiliary placement -----------------------------------------------------


@dataclass(frozen=True)
class AuxPlacement:
    """Auxiliary modes per host and the interleaved qubit order.

    Auxiliary mode ids start at ``n_modes``; ``qubit_order`` lists each host
    followed immediately by its auxiliaries, hosts in backbone order.
    """

    order: LinearOrder
    aux: tuple[tuple[int, ...], ...]
    qubit_order: tuple[int, ...]

    @property
    def n_modes(self) -> int:
        return self.order.n_modes

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_order)

    @property
    def n_aux(self) -> int:
        return sum(len(a) for a in self.aux)

    @property
    def host(self) -> dict[int, int]:
        return {a: m for m, auxes in enumerate(self.aux) for a in auxes}

    def is_aux(self, mode: int) -> bool:
        return mode >= self.n_modes

    def qubit(self, mode: int) -> int:
        return self.qubit_order.index(mode)

    def counts(self) -> list[int]:
        return [len(a) for a in self.aux]

    def label(self, mode: int) -> str:
        if mode < self.n_modes:
            return str(mode)
        h = self.host[mode]
        siblings = self.aux[h]
        if len(siblings) == 1:
            return f"{h}'"
        return f"{h}'{siblings.index(mode)}"


def placement_from_counts(order: LinearOrder, counts: Sequence[int]) -> AuxPlacement:
    n = order.n_modes
    aux: list[tuple[int, ...]] = [()] * n
    qubits = []
    next_id = n
    for m in order.order:
        ids = tuple(range(next_id, next_id + counts[m]))
        next_id += counts[m]
        aux[m] = ids
        qubits.append(m)
        qubits.extend(ids)
    return AuxPlacement(order, tuple(aux), tuple(qubits))


def place_aux(g: InteractionGraph, order: LinearOrder) -> AuxPlacement:
    counts = [math.ceil(d / 2) for d in nonlocal_degree(g, order)]
    return placement_from_counts(order, counts)


# -- coupling assignment -----------------------------------------------------


@dataclass(frozen=True)
class Coupling:
    """One stabilizer coupling between auxiliaries of ``edge[0]`` and ``edge[1]``.

    ``edge`` is oriented along the backbone.  ``serves`` lists the hopping pairs
    that borrow this coupling (more than the edge itself after loop breaking).
    """

    edge: Edge
    p_aux: int
    q_aux: int
    p_angle: float
    q_angle: float
    serves: tuple[Edge, ...] = ()


@dataclass(frozen=True)
class CouplingAssignment:
    placement: AuxPlacement
    couplings: tuple[Coupling, ...] = ()
    gauge: Mapping[int, float] = field(default_factory=dict)

    @property
    def order(self) -> LinearOrder:
        return self.placement.order

    def by_edge(self) -> dict[Edge, Coupling]:
        return {_edge(*c.edge): c for c in self.couplings}

    def serving(self) -> dict[Edge, Coupling]:
        out = {}
        for c in self.couplings:
            for e in c.serves:
                out[_edge(*e)] = c
        return out

    def slot_usage(self) -> dict[int, list[Edge]]:
        usage: dict[int, list[Edge]] = {}
        for c in self.couplings:
            usage.setdefault(c.p_aux, []).append(c.edge)
            usage.setdefault(c.q_aux, []).append(c.edge)
        return usage

    def coupling_graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.placement.n_modes))
        g.add_edges_from(c.edge for c in self.couplings)
        return g


def letter_name(angle: float) -> str:
    """``"X"``/``"Y"`` for the two default letters, otherwise ``"B(theta)"``."""
    a = math.remainder(angle, 2 * math.pi)
    if abs(a - X_ANGLE) < 1e-12:
        return "X"
    if abs(a - Y_ANGLE) < 1e-12:
        return "Y"
    return f"B({angle:.6g})"


def _pattern(placement: AuxPlacement, p_aux: int, q_aux: int, lp: str, lq: str) -> PauliString:
    n = placement.n_qubits
    qa, qb = placement.qubit(p_aux), placement.qubit(q_aux)
    letters = {q: "Z" for q in range(qa + 1, qb)}
    letters[qa] = lp
    letters[qb] = lq
    return PauliString.from_letters(n, letters)


_LETTER_PREFERENCE = (("X", "X"), ("Y", "Y"), ("X", "Y"), ("Y", "X"))


def assign_couplings(
    placement: AuxPlacement,
    edges: Iterable[Edge],
    gauge: Mapping[int, float] | None = None,
    serves: Mapping[Edge, Sequence[Edge]] | None = None,
) -> CouplingAssignment:
    """Attach every non-local edge to auxiliary slots and choose endpoint letters.

    Edges are processed sorted by backbone position of (earlier, later)
    endpoint.  Each takes the first auxiliary of either host that still has a
    free slot (two per auxiliary), then the first letter pair from
    ``(X,X), (Y,Y), (X,Y), (Y,X)`` whose stabilizer pattern commutes with all
    patterns chosen so far.  ``gauge`` rotates every letter on an auxiliary by
    a fixed angle, which preserves all commutation relations.
    """
    order = placement.order
    pos = order.position
    gauge = dict(gauge or {})
    serves = {_edge(*k): tuple(_edge(*e) for e in v) for k, v in (serves or {}).items()}
    oriented = sorted({order.oriented(*e) for e in edges}, key=lambda e: (pos[e[0]], pos[e[1]]))
    used: dict[int, int] = {}
    chosen: list[PauliString] = []
    couplings = []

    def take_slot(mode: int, edge: Edge) -> int:
        for a in placement.aux[mode]:
            if used.get(a, 0) < 2:
                used[a] = used.get(a, 0) + 1
                return a
        raise InfeasibleLayoutError(
            f"mode {mode} has {len(placement.aux[mode])} auxiliary mode(s), "
            f"no free slot left for edge {edge}"
        )

    for p, q in oriented:
        if order.is_local(p, q) and not serves.get(_edge(p, q)):
            continue
        pa = take_slot(p, (p, q))
        qa = take_slot(q, (p, q))
        for lp, lq in _LETTER_PREFERENCE:
            cand = _pattern(placement, pa, qa, lp, lq)
            if all(commutes(cand, s) for s in chosen):
                break
        else:
            raise InfeasibleLayoutError(f"no commuting letter choice for edge {(p, q)}")
        chosen.append(cand)
        angles = {"X": X_ANGLE, "Y": Y_ANGLE}
        couplings.append(
            Coupling(
                edge=(p, q),
                p_aux=pa,
                q_aux=qa,
                p_angle=angles[lp] + gauge.get(pa, 0.0),
                q_angle=angles[lq] + gauge.get(qa, 0.0),
                serves=serves.get(_edge(p, q), ((p, q),)),
            )
        )
    return CouplingAssignment(placement, tuple(couplings), gauge)


def _cycle_edges(g: nx.MultiGraph) -> list[Edge] | None:
    try:
        cyc = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return None
    return [(u, v) for u, v, *_ in cyc]


def break_loops(assignment: CouplingAssignment, max_iter: int = 1000) -> CouplingAssignment:
    """Re-anchor couplings until the coupling graph on modes is a forest.

    For each cycle the lexicographically smallest coupling ``(p, q)`` (by
    backbone positions) whose earlier end can move is re-anchored to
    ``(succ(p), q)``; if that coupling already exists the two merge.  The
    placement grows wherever an anchor runs out of slots.
    """
    order = assignment.order
    pos = order.position
    anchors: dict[Edge, list[Edge]] = {
        c.edge: list(c.serves) for c in assignment.couplings
    }
    changed = False
    for _ in range(max_iter):
        g = nx.MultiGraph()
        g.add_nodes_from(range(order.n_modes))
        g.add_edges_from(anchors)
        cyc = _cycle_edges(g)
        if cyc is None:
            break
        changed = True
        cands = sorted(
            (order.oriented(u, v) for u, v in cyc), key=lambda e: (pos[e[0]], pos[e[1]])
        )
        for p, q in cands:
            s = order.successor(p)
            if s is not None and s != q:
                break
        else:
            raise InfeasibleLayoutError(f"cannot re-anchor any coupling of cycle {cyc}")
        served = anchors.pop((p, q))
        target = order.oriented(s, q)
        anchors.setdefault(target, []).extend(served)
    else:
        raise InfeasibleLayoutError(f"loop breaking did not converge in {max_iter} steps")
    if not changed:
        return assignment
    load = [0] * order.n_modes
    for p, q in anchors:
        load[p] += 1
        load[q] += 1
    counts = [
        max(math.ceil(l / 2), c) for l, c in zip(load, assignment.placement.counts())
    ]
    placement = placement_from_counts(order, counts)
    # auxiliary ids shift when counts grow; keep gauge keyed by (host, index)
    old = assignment.placement
    gauge = {}
    for a, theta in assignment.gauge.items():
        h = old.host[a]
        k = old.aux[h].index(a)
        gauge[placement.aux[h][k]] = theta
    serves = {e: tuple(v) for e, v in anchors.items()}
    return assign_couplings(placement, anchors, gauge=gauge, serves=serves)


def is_forest(assignment: CouplingAssignment) -> bool:
    g = assignment.coupling_graph()
    return g.number_of_edges() == g.number_of_nodes() - nx.number_connected_components(g)


# -- full layout -------------------------------------------------------------


@dataclass(frozen=True)
class EncodingLayout:
    graph: InteractionGraph
    assignment: CouplingAssignment

    @property
    def order(self) -> LinearOrder:
        return self.assignment.order

    @property
    def placement(self) -> AuxPlacement:
        return self.assignment.placement

    @property
    def qubit_order(self) -> tuple[int, ...]:
        return self.placement.qubit_order

    @property
    def n_qubits(self) -> int:
        return self.placement.n_qubits


def build_layout(
    h: FermionHamiltonian,
    order: LinearOrder | None = None,
    gauge: Mapping[int, float] | None = None,
    break_cycles: bool = True,
) -> EncodingLayout:
    order = order or LinearOrder.natural(h.n_modes)
    g = build_graph(h, order)
    placement = place_aux(g, order)
    assignment = assign_couplings(placement, nonlocal_edges(g, order), gauge=gauge)
    if break_cycles:
        assignment = break_loops(assignment)
    return EncodingLayout(g, assignment)


def grid(values: Sequence[int], rows: int, cols: int) -> list[list[int]]:
    """Arrange per-mode values on a row-major ``rows x cols`` lattice."""
    return [[values[r * cols + c] for c in range(cols)] for r in range(rows)]


def layout_report(layout: EncodingLayout, dims: tuple[int, int] | None = None) -> dict:
    """Degree data, auxiliary counts and qubit order as plain JSON-ready values."""
    g, order, placement = layout.graph, layout.order, layout.placement
    deg = g.degree()
    d1 = backbone_degree(order)
    dnl = nonlocal_degree(g, order)
    report = {
        "n_modes": g.n_modes,
        "order": list(order.order),
        "degree": deg,
        "backbone_degree": d1,
        "nonlocal_degree": dnl,
        "n_aux": placement.counts(),
        "total_aux": placement.n_aux,
        "n_qubits": placement.n_qubits,
        "qubit_order": [placement.label(m) for m in placement.qubit_order],
        "couplings": [
            {
                "edge": list(c.edge),
                "aux": [placement.label(c.p_aux), placement.label(c.q_aux)],
                "letters": [letter_name(c.p_angle), letter_name(c.q_angle)],
                "serves": [list(e) for e in c.serves],
            }
            for c in layout.assignment.couplings
        ],
    }
    if dims is not None:
        r, c = dims
        report["grids"] = {
            "D": grid(deg, r, c),
            "D1": grid(d1, r, c),
            "D_nl": grid(dnl, r, c),
            "N_aux": grid(placement.counts(), r, c),
        }
    return report


def with_gauge(assignment: CouplingAssignment, gauge: Mapping[int, float]) -> CouplingAssignment:
    """Reassign the same couplings with a different per-auxiliary gauge rotation."""
    edges = [c.edge for c in assignment.couplings]
    serves = {c.edge: c.serves for c in assignment.couplings}
    return assign_couplings(assignment.placement, edges, gauge=gauge, serves=serves)
