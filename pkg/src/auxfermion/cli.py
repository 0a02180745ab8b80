"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure,
3 infeasible layout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .auxenc import EncodedHamiltonian, EncodingError, encode_hamiltonian, encode_jordan_wigner
from .fermion import FermionHamiltonian, LadderOperator, all_fock_states, hermitian_closure
from .jw import jw_operator
from .lattice import generate_lattice
from .layout import (
    InfeasibleLayoutError,
    LinearOrder,
    build_layout,
    is_forest,
    layout_report,
    snake_order,
)
from .textio import (
    ParseError,
    _stringify_keys,
    dump_json,
    encoded_to_dict,
    parse_hamiltonian,
    render_hamiltonian,
)
from .verify import (
    EIG_TOL,
    MATRIX_TOL,
    STATE_TOL,
    VerificationError,
    equivalence_report,
    fast_prepare_fock,
    fidelity,
    prepare_fock,
    simulate_measured_prep,
    vacuum_state,
    weight_scaling_report,
)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_LAYOUT = 0, 1, 2, 3
FAST_PREP_SAMPLE = 32


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    encoding: str = "aux"
    ordering: str | None = None
    gauge: list[float] = field(default_factory=list)
    tol_state: float = STATE_TOL
    tol_matrix: float = MATRIX_TOL
    tol_eig: float = EIG_TOL
    seed: int = 0
    add_hc: bool = False
    fmt: str = "json"

    def __post_init__(self) -> None:
        if min(self.tol_state, self.tol_matrix, self.tol_eig) <= 0:
            raise UsageError("tolerances must be positive")
        if self.encoding not in ("jw", "aux"):
            raise UsageError(f"unknown encoding {self.encoding!r}")


def _dims(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad dims {text!r}; use e.g. 3x3 or 6") from None


def resolve_order(text: str | None, n_modes: int, default: LinearOrder, dims: tuple[int, ...]) -> LinearOrder:
    if text is None:
        return default
    if text == "natural":
        return LinearOrder.natural(n_modes)
    if text.startswith("snake"):
        d = _dims(text.split(":", 1)[1]) if ":" in text else dims
        if len(d) != 2 or d[0] * d[1] != n_modes:
            raise UsageError(f"snake order needs RxC dims matching {n_modes} modes")
        return snake_order(*d)
    try:
        perm = tuple(int(x) for x in text.split(","))
        return LinearOrder(perm)
    except ValueError as exc:
        raise UsageError(f"bad --order {text!r}: {exc}") from None


def load_input(args) -> tuple[FermionHamiltonian, LinearOrder, tuple[int, ...]]:
    dims = _dims(args.dims)
    if args.lattice:
        try:
            h, order, gdims = generate_lattice(args.lattice, dims, t=args.t, U=args.U, mu=args.mu)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return h, order, gdims or dims
    if not args.input:
        raise UsageError("give an input file (or '-') or --lattice")
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
    h = parse_hamiltonian(text)
    return h, LinearOrder.natural(h.n_modes), dims


def _gauge_map(h_layout, values: Sequence[float]) -> dict[int, float]:
    aux_ids = [m for m in h_layout.placement.qubit_order if h_layout.placement.is_aux(m)]
    if len(values) > len(aux_ids):
        raise UsageError(f"{len(values)} gauge angles for {len(aux_ids)} auxiliary modes")
    return dict(zip(aux_ids, values))


def encode(h: FermionHamiltonian, order: LinearOrder, cfg: RunConfig) -> EncodedHamiltonian:
    if cfg.encoding == "jw":
        return encode_jordan_wigner(h, order)
    layout = build_layout(h, order)
    if cfg.gauge:
        layout = build_layout(h, order, gauge=_gauge_map(layout, cfg.gauge))
    return encode_hamiltonian(h, layout)


def _record(name: str, passed: bool, value=None, tolerance=None, note: str = "") -> dict:
    rec = {"check": name, "passed": bool(passed)}
    if value is not None:
        rec["value"] = float(value)
    if tolerance is not None:
        rec["tolerance"] = float(tolerance)
    if note:
        rec["note"] = note
    return rec


def verification_suite(h: FermionHamiltonian, enc: EncodedHamiltonian, cfg: RunConfig) -> list[dict]:
    """Algebra, state-preparation and equivalence checks as pass/fail records."""
    out = []
    stabs = enc.stabilizers
    layout = enc.layout
    out.append(_record("stabilizers_commute", enc.stabilizers_commute()))
    ladders = [
        jw_operator(LadderOperator(r, c), layout.qubit_order)
        for r in range(h.n_modes)
        for c in (True, False)
    ]
    out.append(
        _record("stabilizers_commute_with_ladders", all(s.commutes_with(a) for s in stabs for a in ladders))
    )
    out.append(_record("operator_commutes_with_stabilizers", enc.operator_commutes()))
    out.append(_record("coupling_graph_is_forest", is_forest(layout.assignment)))
    if enc.n_qubits > 20 or h.n_modes > 10:
        out.append(_record("state_checks", True, note="skipped: register above 20 qubits"))
        return out
    try:
        vac = vacuum_state(stabs, enc.n_qubits, tol=cfg.tol_state)
        out.append(_record("vacuum_stabilized", True, abs(np.linalg.norm(vac) - 1), cfg.tol_state))
    except VerificationError as exc:
        out.append(_record("vacuum_stabilized", False, note=str(exc)))
        return out
    try:
        measured, _ = simulate_measured_prep(stabs, enc.n_qubits, seed=cfg.seed, tol=cfg.tol_state)
        dev = 1 - fidelity(measured, vac)
        out.append(_record("measured_prep_matches_vacuum", dev <= cfg.tol_matrix, dev, cfg.tol_matrix))
    except VerificationError as exc:
        out.append(_record("measured_prep_matches_vacuum", False, note=str(exc)))
    states = list(all_fock_states(h.n_modes))
    if len(states) > FAST_PREP_SAMPLE:
        rng = np.random.default_rng(cfg.seed)
        states = [states[i] for i in sorted(rng.choice(len(states), FAST_PREP_SAMPLE, replace=False))]
    dev = max(1 - fidelity(prepare_fock(s, layout, vac), fast_prepare_fock(s, layout, vac)) for s in states)
    out.append(_record("fast_prep_matches_prep", dev <= cfg.tol_state, dev, cfg.tol_state))
    try:
        rep = equivalence_report(h, enc, tol=cfg.tol_matrix)
    except VerificationError as exc:
        out.append(_record("encoded_basis_orthonormal", False, note=str(exc)))
        return out
    out.append(_record("encoded_basis_orthonormal", rep.gram_deviation <= cfg.tol_matrix, rep.gram_deviation, cfg.tol_matrix))
    out.append(_record("matrix_elements_match_oracle", rep.deviation <= cfg.tol_matrix, rep.deviation, cfg.tol_matrix))
    if rep.spectrum_deviation is not None:
        out.append(
            _record("spectrum_matches_oracle", rep.spectrum_deviation <= cfg.tol_eig, rep.spectrum_deviation, cfg.tol_eig)
        )
    return out


def _emit(obj, text: str, cfg: RunConfig) -> None:
    sys.stdout.write(dump_json(obj) if cfg.fmt == "json" else text)


def _grid_text(name: str, rows: list[list[int]]) -> str:
    body = "\n".join("  [" + " ".join(str(v) for v in r) + "]" for r in rows)
    return f"{name} =\n{body}\n"


def cmd_encode(h, order, dims, cfg) -> int:
    enc = encode(h, order, cfg)
    data = encoded_to_dict(enc, cfg.encoding)
    lines = [f"# encoding {cfg.encoding}, {enc.n_qubits} qubits", "# qubits: " + " ".join(data["mode_map"])]
    for s in enc.stabilizers:
        lines.append(f"# stabilizer {s.edge}: " + s.operator.render().replace("\n", " + "))
    lines.append(enc.operator.render())
    _emit(data, "\n".join(lines) + "\n", cfg)
    return EXIT_OK


def cmd_layout(h, order, dims, cfg) -> int:
    layout = build_layout(h, order)
    rep = layout_report(layout, dims if len(dims) == 2 and dims[0] * dims[1] == h.n_modes else None)
    lines = [f"order: {rep['order']}", f"qubit order: {' '.join(rep['qubit_order'])}"]
    if "grids" in rep:
        for name in ("D", "D1", "D_nl", "N_aux"):
            lines.append(_grid_text(name, rep["grids"][name]).rstrip())
    else:
        lines += [f"D = {rep['degree']}", f"D1 = {rep['backbone_degree']}",
                  f"D_nl = {rep['nonlocal_degree']}", f"N_aux = {rep['n_aux']}"]
    for c in rep["couplings"]:
        lines.append(f"coupling {c['edge']}: {c['aux'][0]}={c['letters'][0]} {c['aux'][1]}={c['letters'][1]}")
    _emit(rep, "\n".join(lines) + "\n", cfg)
    return EXIT_OK


def cmd_verify(h, order, dims, cfg) -> int:
    enc = encode(h, order, cfg)
    records = verification_suite(h, enc, cfg)
    passed = all(r["passed"] for r in records)
    text = "".join(
        f"{'PASS' if r['passed'] else 'FAIL'} {r['check']}"
        + (f" value={r['value']:.3g}" if "value" in r else "")
        + (f" ({r['note']})" if "note" in r else "")
        + "\n"
        for r in records
    )
    _emit({"passed": passed, "n_aux": enc.stats["n_aux"], "checks": records}, text, cfg)
    return EXIT_OK if passed else EXIT_VERIFY


def cmd_stats(h, order, dims, cfg, sizes=None) -> int:
    data = {}
    for name in ("jw", "aux"):
        enc = encode(h, order, RunConfig(**{**cfg.__dict__, "encoding": name}))
        data[name] = {k: enc.stats[k] for k in ("n_qubits", "max_weight", "term_weights")}
    if sizes:
        data["scaling"] = [r.__dict__ for r in weight_scaling_report(sizes)]
    lines = []
    for name in ("jw", "aux"):
        d = data[name]
        lines.append(f"{name}: {d['n_qubits']} qubits, max weight {d['max_weight']}")
        for cls, hist in d["term_weights"].items():
            lines.append(f"  {cls}: " + ", ".join(f"w{w}x{n}" for w, n in hist.items()))
    for r in data.get("scaling", []):
        lines.append(f"L={r['size']} {r['encoding']:>3} {r['term_class']:<16} max={r['max_weight']} mean={r['mean_weight']:.3f}")
    _emit(_stringify_keys(data), "\n".join(lines) + "\n", cfg)
    return EXIT_OK


def cmd_render(h, order, dims, cfg) -> int:
    sys.stdout.write(render_hamiltonian(h))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("input", nargs="?", help="Hamiltonian text file, or '-' for stdin")
    common.add_argument("--lattice", choices=["k4", "chain", "hubbard_hops"])
    common.add_argument("--dims", help="lattice dims, e.g. 3x3 (hubbard_hops) or 6 (chain)")
    common.add_argument("--t", type=float, default=1.0, help="hopping amplitude")
    common.add_argument("--U", type=float, default=0.0, help="nearest-neighbour n_i n_j strength")
    common.add_argument("--mu", type=float, default=0.0, help="on-site number term")
    common.add_argument("--encoding", choices=["jw", "aux"], default="aux")
    common.add_argument("--order", help="natural, snake[:RxC] or a comma-separated permutation")
    common.add_argument("--gauge", help="comma-separated angles, one per auxiliary mode")
    common.add_argument("--tol-state", type=float, default=STATE_TOL)
    common.add_argument("--tol-matrix", type=float, default=MATRIX_TOL)
    common.add_argument("--tol-eig", type=float, default=EIG_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--add-hc", action="store_true", help="append missing Hermitian conjugates")
    common.add_argument("--format", choices=["json", "text"], default="json")

    parser = _Parser(prog="auxfermion", description="Local fermion-to-qubit encodings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("encode", parents=[common], help="compile to a Pauli sum")
    sub.add_parser("layout", parents=[common], help="degree and auxiliary placement report")
    sub.add_parser("verify", parents=[common], help="run the invariant and equivalence suite")
    stats = sub.add_parser("stats", parents=[common], help="weight histograms per encoding")
    stats.add_argument("--scaling", help="comma-separated L values for the L x L weight report")
    sub.add_parser("render", parents=[common], help="print the Hamiltonian in canonical text form")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        gauge = [float(x) for x in args.gauge.split(",")] if args.gauge else []
        cfg = RunConfig(
            encoding=args.encoding,
            ordering=args.order,
            gauge=gauge,
            tol_state=args.tol_state,
            tol_matrix=args.tol_matrix,
            tol_eig=args.tol_eig,
            seed=args.seed,
            add_hc=args.add_hc,
            fmt=args.format,
        )
        h, default_order, dims = load_input(args)
        if cfg.add_hc:
            h = hermitian_closure(h)
        order = resolve_order(args.order, h.n_modes, default_order, dims)
        if args.command == "stats":
            sizes = [int(x) for x in args.scaling.split(",")] if args.scaling else None
            return cmd_stats(h, order, dims, cfg, sizes)
        handler = {"encode": cmd_encode, "layout": cmd_layout, "verify": cmd_verify, "render": cmd_render}
        return handler[args.command](h, order, dims, cfg)
    except InfeasibleLayoutError as exc:
        print(f"infeasible layout: {exc}", file=sys.stderr)
        return EXIT_LAYOUT
    except (UsageError, ParseError, EncodingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
