"""Plain-text Hamiltonian format and JSON serialization of encodings.

Hamiltonian files are UTF-8 text.  ``#`` starts a comment.  The first
non-comment line is ``modes N``; each further line is ``re im tok ...`` where a
token is ``<mode>`` (annihilation) or ``<mode>^`` (creation), listed in
product order.
"""

from __future__ import annotations

import json
from typing import Any

from .auxenc import EncodedHamiltonian
from .fermion import FermionHamiltonian, LadderOperator, LadderTerm
from .pauli import PauliSum


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _parse_token(tok: str, lineno: int) -> LadderOperator:
    creation = tok.endswith("^")
    body = tok[:-1] if creation else tok
    if not body.isdigit():
        raise ParseError(lineno, f"bad ladder token {tok!r}")
    return LadderOperator(int(body), creation)


def parse_hamiltonian(text: str) -> FermionHamiltonian:
    n_modes = None
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n_modes is None:
            if len(fields) != 2 or fields[0] != "modes" or not fields[1].isdigit():
                raise ParseError(lineno, "expected header 'modes N'")
            n_modes = int(fields[1])
            continue
        if len(fields) < 2:
            raise ParseError(lineno, "expected 're im tok ...'")
        try:
            coeff = complex(float(fields[0]), float(fields[1]))
        except ValueError:
            raise ParseError(lineno, f"bad coefficient {fields[0]!r} {fields[1]!r}") from None
        ops = tuple(_parse_token(tok, lineno) for tok in fields[2:])
        for op in ops:
            if op.mode >= n_modes:
                raise ParseError(lineno, f"mode {op.mode} overflows 'modes {n_modes}'")
        terms.append(LadderTerm(coeff, ops))
    if n_modes is None:
        raise ParseError(0, "missing 'modes N' header")
    return FermionHamiltonian(n_modes, terms)


def render_hamiltonian(h: FermionHamiltonian) -> str:
    lines = [f"modes {h.n_modes}"]
    for t in h.terms:
        c = t.coefficient
        ops = " ".join(str(f) for f in t.factors)
        lines.append(f"{c.real!r} {c.imag!r} {ops}".rstrip())
    return "\n".join(lines) + "\n"


def _num(x: float) -> float:
    # -0.0 would otherwise survive as a distinct byte pattern
    return 0.0 if x == 0 else float(x)


def _sum_json(p: PauliSum) -> list[dict[str, Any]]:
    return [{"pauli": lbl, "coeff": [_num(c.real), _num(c.imag)]} for lbl, c in p.sorted_terms()]


def pauli_sum_from_json(n_qubits: int, rows: list[dict[str, Any]]) -> PauliSum:
    return PauliSum.parse(n_qubits, [(r["pauli"], complex(*r["coeff"])) for r in rows])


def _stringify_keys(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _stringify_keys(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify_keys(v) for v in obj]
    return obj


def encoded_to_dict(enc: EncodedHamiltonian, encoding: str = "aux") -> dict[str, Any]:
    placement = enc.layout.placement
    return {
        "encoding": encoding,
        "n_qubits": enc.n_qubits,
        "mode_map": [placement.label(m) for m in placement.qubit_order],
        "stabilizers": [
            {
                "edge": list(s.edge),
                "serves": [list(e) for e in s.serves],
                "terms": _sum_json(s.operator),
            }
            for s in enc.stabilizers
        ],
        "terms": _sum_json(enc.operator),
        "stats": _stringify_keys(enc.stats),
    }


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"
