from __future__ import annotations

import math

import networkx as nx
import pytest

from auxfermion.fermion import FermionHamiltonian, LadderTerm, ann, cdag
from auxfermion.lattice import chain, hubbard_hops, k4
from auxfermion.layout import (
    InfeasibleLayoutError,
    LinearOrder,
    assign_couplings,
    break_loops,
    build_graph,
    build_layout,
    is_forest,
    layout_report,
    letter_name,
    nonlocal_degree,
    nonlocal_edges,
    pair_factors,
    place_aux,
    placement_from_counts,
    snake_order,
)

from conftest import random_graph_hamiltonian

# degree tables for the 3x3 lattice along the snake backbone, as published
FIG_D = [[2, 3, 2], [3, 4, 3], [2, 3, 2]]
FIG_D1 = [[1, 2, 2], [2, 2, 2], [2, 2, 1]]
FIG_NAUX = [[1, 1, 0], [1, 1, 1], [0, 1, 1]]


def hops(n, edges):
    terms = []
    for p, q in edges:
        terms += [LadderTerm(1.0, (cdag(p), ann(q))), LadderTerm(1.0, (cdag(q), ann(p)))]
    return FermionHamiltonian(n, terms)


class TestOrder:
    def test_snake(self):
        assert snake_order(3, 3).order == (0, 1, 2, 5, 4, 3, 6, 7, 8)

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            LinearOrder((0, 0, 1))

    def test_locality(self):
        o = snake_order(2, 2)
        assert o.is_local(1, 3) and not o.is_local(0, 3)


class TestGraph:
    def test_number_terms_have_no_edges(self):
        h = FermionHamiltonian(2, [LadderTerm(1.0, (cdag(0), ann(0))), LadderTerm(1.0, (cdag(1), ann(1)))])
        assert build_graph(h).edges == frozenset()

    def test_k4_complete(self):
        assert len(build_graph(k4()).edges) == 6

    def test_chain_path(self):
        assert build_graph(chain(5)).edges == {(0, 1), (1, 2), (2, 3), (3, 4)}

    def test_k4_nonlocal_degree(self):
        g = build_graph(k4())
        assert nonlocal_degree(g, LinearOrder.natural(4)) == [2, 1, 1, 2]
        assert nonlocal_edges(g, LinearOrder.natural(4)) == [(0, 2), (0, 3), (1, 3)]

    def test_four_point_pairs_locally(self):
        t = LadderTerm(1.0, (cdag(0), cdag(3), ann(1), ann(2)))
        pairs = pair_factors(t, LinearOrder.natural(4))
        modes = sorted(tuple(sorted(t.factors[i].mode for i in p)) for p in pairs)
        assert modes == [(0, 1), (2, 3)]
        g = build_graph(FermionHamiltonian(4, [t]))
        assert nonlocal_edges(g, LinearOrder.natural(4)) == []


class TestPlacement:
    def test_fig2_tables(self):
        h, order = hubbard_hops(3, 3)
        rep = layout_report(build_layout(h, order), (3, 3))
        assert rep["grids"]["D"] == FIG_D
        assert rep["grids"]["D1"] == FIG_D1
        assert rep["grids"]["N_aux"] == FIG_NAUX
        assert rep["total_aux"] == 7 and rep["n_qubits"] == 16

    def test_k4_one_aux_each(self):
        layout = build_layout(k4())
        assert layout.placement.counts() == [1, 1, 1, 1]
        assert [layout.placement.label(m) for m in layout.qubit_order] == ["0", "0'", "1", "1'", "2", "2'", "3", "3'"]

    def test_chain_no_aux(self):
        assert build_layout(chain(6)).placement.n_aux == 0

    def test_ceil_rule(self):
        h = hops(6, [(0, 2), (0, 3), (0, 4), (0, 5)])
        g = build_graph(h)
        assert place_aux(g, LinearOrder.natural(6)).counts()[0] == math.ceil(4 / 2)


class TestCouplings:
    def test_k4_letters(self):
        a = build_layout(k4()).assignment
        got = {c.edge: (letter_name(c.p_angle), letter_name(c.q_angle)) for c in a.couplings}
        assert got == {(0, 2): ("X", "X"), (0, 3): ("Y", "Y"), (1, 3): ("X", "X")}

    def test_single_edge_defaults_to_xx(self):
        a = build_layout(hops(3, [(0, 2)])).assignment
        (c,) = a.couplings
        assert (letter_name(c.p_angle), letter_name(c.q_angle)) == ("X", "X")

    def test_pigeonhole(self):
        order = LinearOrder.natural(5)
        placement = placement_from_counts(order, [1, 0, 1, 1, 1])
        with pytest.raises(InfeasibleLayoutError):
            assign_couplings(placement, [(0, 2), (0, 3), (0, 4)])

    def test_k4_tree_unchanged(self):
        a = build_layout(k4(), break_cycles=False).assignment
        assert is_forest(a)
        assert break_loops(a) is a

    def test_triangle_is_broken(self):
        h = hops(6, [(0, 2), (2, 4), (0, 4)])
        before = build_layout(h, break_cycles=False).assignment
        assert not is_forest(before)
        after = break_loops(before)
        assert nx.is_forest(nx.Graph(after.coupling_graph()))
        assert is_forest(after)
        served = {tuple(e) for c in after.couplings for e in c.serves}
        assert served == {(0, 2), (2, 4), (0, 4)}

    def test_empty(self):
        a = build_layout(chain(3)).assignment
        assert a.couplings == () and break_loops(a) is a

    @pytest.mark.parametrize("seed", range(20))
    def test_random_graphs_become_forests(self, seed):
        h = random_graph_hamiltonian(4 + seed % 7, seed)
        layout = build_layout(h)
        g = nx.Graph()
        g.add_nodes_from(range(h.n_modes))
        for c in layout.assignment.couplings:
            assert not g.has_edge(*c.edge)
            g.add_edge(*c.edge)
        assert nx.is_forest(g)
        for aux, edges in layout.assignment.slot_usage().items():
            assert len(edges) <= 2
