"""End-to-end acceptance checks, one pass/fail line per criterion.

Run with pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from auxfermion import cli
from auxfermion.auxenc import build_stabilizers, encode_hamiltonian, encode_hop
from auxfermion.fermion import (
    FermionHamiltonian,
    LadderOperator,
    LadderTerm,
    anticommutator,
    ann,
    build_fock_matrix,
    cdag,
    ladder_matrix,
    normal_reorder,
)
from auxfermion.jw import jw_operator
from auxfermion.lattice import hubbard_hops, k4
from auxfermion.layout import build_layout, layout_report
from auxfermion.textio import parse_hamiltonian, render_hamiltonian
from auxfermion.verify import (
    endpoint_correlation,
    equivalence_report,
    fast_prepare_fock,
    fidelity,
    prepare_fock,
    reordering_sign,
    simulate_measured_prep,
    vacuum_state,
    weight_scaling_report,
)

from conftest import A_LOWER, A_RAISE, expand_sites, random_graph_hamiltonian

RESULTS: list[str] = []
GOLDEN = Path(__file__).parent / "golden"


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def max_eigen_dev(stabs, v):
    from auxfermion.verify import apply_operator

    return max((float(np.max(np.abs(apply_operator(s.operator, v) - v))) for s in stabs), default=0.0)


def test_criterion_1_k4_stabilizers():
    start = time.perf_counter()
    stabs = build_stabilizers(build_layout(k4()).assignment)
    got = {s.edge: dict(s.operator.sorted_terms()) for s in stabs}
    elapsed = time.perf_counter() - start
    expected = {
        (0, 2): {"X1 Z2 Z3 Z4 X5": 1},
        (0, 3): {"Y1 Z2 Z3 Z4 Z5 Z6 Y7": 1},
        (1, 3): {"X3 Z4 Z5 Z6 X7": 1},
    }
    ok = got == expected and elapsed < 1.0
    report(1, "K4 stabilizer letters", ok, f"3/3 rows exact, sign +1, {elapsed:.3f}s")


def test_criterion_2_k4_one_body_table():
    layout = build_layout(k4())
    stabs = build_stabilizers(layout.assignment)
    rows = {
        (0, 2): {0: A_RAISE, 1: {"Y": -1j}, 4: A_LOWER, 5: {"X": 1}},
        (1, 3): {2: A_RAISE, 3: {"Y": -1j}, 6: A_LOWER, 7: {"X": 1}},
        (0, 3): {0: A_RAISE, 1: {"X": 1j}, 6: A_LOWER, 7: {"Y": 1}},
    }
    worst = 0.0
    ok = True
    for (p, q), sites in rows.items():
        got = dict(encode_hop(p, q, 1.0, layout, stabs, hermitian=False).sorted_terms())
        want = expand_sites(sites)
        ok &= got.keys() == want.keys()
        worst = max([worst] + [abs(got.get(k, 0) - want[k]) for k in want])
    ok &= worst <= 1e-12
    report(2, "K4 one-body table", ok, f"3 rows, max coefficient deviation {worst:.1e}")


def test_criterion_3_algebra_suite():
    cases = [("K4", k4(), None)]
    for size in (3, 4, 5):
        h, order = hubbard_hops(size, size)
        cases.append((f"{size}x{size}", h, order))
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        cases.append((f"random{seed}", random_graph_hamiltonian(int(rng.integers(4, 11)), seed), None))
    failures = []
    for name, h, order in cases:
        enc = encode_hamiltonian(h, order=order)
        ladders = [jw_operator(LadderOperator(m, c), enc.layout.qubit_order) for m in range(h.n_modes) for c in (True, False)]
        good = enc.stabilizers_commute() and all(s.commutes_with(a) for s in enc.stabilizers for a in ladders)
        if not good:
            failures.append(name)
    report(3, "stabilizer algebra", not failures, f"{len(cases)} models, failures: {failures or 'none'}")


def test_criterion_4_vacuum_suite():
    start = time.perf_counter()
    dev = 0.0
    h4, o4 = hubbard_hops(2, 2)
    models = {"K4": encode_hamiltonian(k4()), "2x2": encode_hamiltonian(h4, order=o4)}
    vacua = {}
    for name, enc in models.items():
        vac = vacuum_state(enc.stabilizers, enc.n_qubits)
        vacua[name] = vac
        dev = max(dev, abs(np.linalg.norm(vac) - 1), max_eigen_dev(enc.stabilizers, vac))
        filled = prepare_fock((1,) * enc.layout.order.n_modes, enc.layout, vac)
        dev = max(dev, max_eigen_dev(enc.stabilizers, filled))
    enc = models["2x2"]
    worst_fid = 1.0
    for seed in range(100):
        v, _ = simulate_measured_prep(enc.stabilizers, enc.n_qubits, seed=seed)
        worst_fid = min(worst_fid, fidelity(v, vacua["2x2"]))
    v, _ = simulate_measured_prep(models["K4"].stabilizers, 8, forced={0: -1, 1: -1, 2: -1})
    worst_fid = min(worst_fid, fidelity(v, vacua["K4"]))
    elapsed = time.perf_counter() - start
    qubits = (models["K4"].n_qubits, models["2x2"].n_qubits)
    ok = qubits == (8, 6) and dev <= 1e-12 and worst_fid >= 1 - 1e-10 and elapsed < 10
    report(
        4,
        "vacuum and measured preparation",
        ok,
        f"qubits {qubits}, norm/eigen dev {dev:.1e}, min fidelity over 100 seeds {worst_fid:.12f}, {elapsed:.2f}s",
    )


def test_criterion_5_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    terms = []
    for p, q in itertools.combinations(range(4), 2):
        t = rng.normal()
        terms += [LadderTerm(t, (cdag(p), ann(q))), LadderTerm(t, (cdag(q), ann(p)))]
    h_a = FermionHamiltonian(4, terms)
    h_b, order_b = hubbard_hops(2, 2, t=1.0, mu=0.37)
    four = LadderTerm(0.8, (cdag(0), cdag(3), ann(1), ann(2)))
    h_c = FermionHamiltonian(4, list(k4().terms) + [four, four.adjoint()])
    rep_a = equivalence_report(h_a, encode_hamiltonian(h_a))
    rep_b = equivalence_report(h_b, encode_hamiltonian(h_b, order=order_b))
    rep_c = equivalence_report(h_c, encode_hamiltonian(h_c))
    dev = max(rep_a.deviation, rep_b.deviation, rep_c.deviation)
    elapsed = time.perf_counter() - start
    ok = dev <= 1e-10 and rep_b.spectrum_deviation <= 1e-9 and elapsed < 120
    report(
        5,
        "Fock-oracle equivalence",
        ok,
        f"matrix dev {dev:.1e} (K4 {rep_a.deviation:.1e}, 2x2 {rep_b.deviation:.1e}, four-point {rep_c.deviation:.1e}), "
        f"2x2 spectrum dev {rep_b.spectrum_deviation:.1e}, {elapsed:.2f}s",
    )


def test_criterion_6_state_preparation():
    enc = encode_hamiltonian(k4())
    vac = vacuum_state(enc.stabilizers, enc.n_qubits)
    worst = 0.0
    parity_ok = True
    for occ in itertools.product((0, 1), repeat=4):
        slow = prepare_fock(occ, enc.layout, vac)
        worst = max(worst, 1 - fidelity(slow, fast_prepare_fock(occ, enc.layout, vac)))
        for s in enc.stabilizers:
            corr = endpoint_correlation(slow, s, enc.layout)
            parity_ok &= abs(corr - reordering_sign(occ, s, enc.layout)) <= 1e-12
    ok = worst <= 1e-12 and parity_ok
    report(6, "fast vs sequential preparation", ok, f"16 occupations, max 1-fidelity {worst:.1e}, parity correlations {'match' if parity_ok else 'mismatch'}")


def test_criterion_7_locality_scaling():
    rows = weight_scaling_report((3, 4, 5))
    aux_bulk, jw_max = {}, {}
    for r in rows:
        if r.encoding == "aux" and r.term_class.startswith("bulk"):
            aux_bulk[r.size] = max(aux_bulk.get(r.size, 0), r.max_weight)
        if r.encoding == "jw":
            jw_max[r.size] = max(jw_max.get(r.size, 0), r.max_weight)
    h, order = hubbard_hops(3, 3)
    grids = layout_report(build_layout(h, order), (3, 3))["grids"]
    fig_ok = (
        grids["D"] == [[2, 3, 2], [3, 4, 3], [2, 3, 2]]
        and grids["D1"] == [[1, 2, 2], [2, 2, 2], [2, 2, 1]]
        and grids["N_aux"] == [[1, 1, 0], [1, 1, 1], [0, 1, 1]]
    )
    ok = len(set(aux_bulk.values())) == 1 and jw_max[3] < jw_max[4] < jw_max[5] and fig_ok
    report(7, "locality scaling", ok, f"aux bulk max weight {aux_bulk}, JW max weight {jw_max}, 3x3 degree tables {'exact' if fig_ok else 'differ'}")


def test_criterion_8_fermion_oracle():
    ok = True
    for n in range(1, 7):
        a = [ladder_matrix(ann(j), n) for j in range(n)]
        ad = [ladder_matrix(cdag(j), n) for j in range(n)]
        eye = np.eye(2**n)
        for i, j in itertools.product(range(n), repeat=2):
            ok &= np.array_equal(anticommutator(a[i], ad[j]), eye * (i == j))
            ok &= not anticommutator(a[i], a[j]).any()
    reorder_ok = True
    for seed in range(200):
        rng = np.random.default_rng(seed)
        ops = tuple(LadderOperator(int(rng.integers(4)), bool(rng.integers(2))) for _ in range(4))
        t = LadderTerm(complex(rng.normal(), rng.normal()), ops)
        for target in (None, list(rng.permutation(4))):
            reorder_ok &= np.allclose(build_fock_matrix(normal_reorder(t, target), 4), build_fock_matrix([t], 4))
    report(8, "fermion oracle self-test", ok and reorder_ok, f"anticommutators exact for n<=6, 200 random reorderings {'match' if reorder_ok else 'differ'}")


def test_criterion_9_cli_contract(capsys):
    problems = []
    text = (GOLDEN / "k4.ham").read_text()
    if render_hamiltonian(parse_hamiltonian(text)) != text:
        problems.append("render round-trip")
    for argv, golden in [
        (["encode", "--lattice", "k4"], "k4_aux.json"),
        (["encode", "--lattice", "chain", "--dims", "4"], "chain4_aux.json"),
    ]:
        for _ in range(2):
            code = cli.main(argv)
            out = capsys.readouterr().out
            if code != 0 or out != (GOLDEN / golden).read_text():
                problems.append(f"golden {golden}")
        if json.dumps(json.loads(out), indent=2) + "\n" != out:
            problems.append(f"reserialize {golden}")
    codes = {
        "verify chain": cli.main(["verify", "--lattice", "chain", "--dims", "4"]),
        "parse error": cli.main(["encode", str(GOLDEN / "missing.ham")]),
        "verification failure": cli.main(["verify", "--lattice", "k4", "--tol-matrix", "1e-300"]),
    }
    with pytest.raises(SystemExit) as exc:
        cli.main(["encode", "--bogus"])
    codes["usage"] = exc.value.code
    capsys.readouterr()
    expected = {"verify chain": 0, "parse error": 1, "verification failure": 2, "usage": 1}
    if codes != expected:
        problems.append(f"exit codes {codes}")
    report(9, "CLI contract", not problems, f"round-trip, golden k4/chain, exit codes {sorted(codes.values())}; problems: {problems or 'none'}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
