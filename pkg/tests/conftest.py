from __future__ import annotations

from functools import reduce

import networkx as nx
import numpy as np
import pytest

from auxfermion.fermion import FermionHamiltonian, LadderTerm, ann, cdag

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
LETTER = {"I": I2, "X": X, "Y": Y, "Z": Z}


def dense_letters(n_qubits: int, letters: dict[int, str]) -> np.ndarray:
    """Textbook Kronecker product with qubit 0 as the least significant bit."""
    mats = [LETTER[letters.get(q, "I")] for q in reversed(range(n_qubits))]
    return reduce(np.kron, mats)


def expand_sites(site_ops: dict[int, dict[str, complex]]) -> dict[str, complex]:
    """Expand a tensor product of one-qubit letter sums into ``{label: coeff}``.

    Each factor lives on its own qubit, so no letter products are needed.
    """
    out = {"": 1.0 + 0j}
    for q in sorted(site_ops):
        nxt = {}
        for label, c in out.items():
            for letter, d in site_ops[q].items():
                lbl = f"{label} {letter}{q}".strip()
                nxt[lbl] = nxt.get(lbl, 0) + c * d
        out = nxt
    return {k: v for k, v in out.items() if abs(v) > 1e-15}


A_LOWER = {"X": 0.5, "Y": 0.5j}
A_RAISE = {"X": 0.5, "Y": -0.5j}


def random_graph_hamiltonian(n: int, seed: int, p: float = 0.5) -> FermionHamiltonian:
    g = nx.gnp_random_graph(n, p, seed=seed)
    rng = np.random.default_rng(seed)
    terms = []
    for a, b in g.edges:
        t = float(rng.normal())
        terms += [LadderTerm(t, (cdag(a), ann(b))), LadderTerm(t, (cdag(b), ann(a)))]
    return FermionHamiltonian(n, terms)


@pytest.fixture
def k4_h():
    from auxfermion.lattice import k4

    return k4()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
