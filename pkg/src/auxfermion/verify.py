"""Desk-scale numerical checks of the auxiliary encoding.

State vectors live on the enlarged register with qubit 0 as the least
significant bit of the amplitude index.  Pauli sums act matrix-free: each
string permutes indices by its X mask and multiplies by the phases of its Y
and Z letters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .auxenc import EncodedHamiltonian, Stabilizer, encode_hamiltonian, encode_hop
from .fermion import (
    FermionHamiltonian,
    FockState,
    LadderOperator,
    LadderTerm,
    ann,
    build_fock_matrix,
    cdag,
)
from .jw import jw_encode_term, jw_operator
from .lattice import hubbard_hops, lattice_edges
from .layout import EncodingLayout
from .pauli import PauliString, PauliSum, to_matrix

STATE_TOL = 1e-12
MATRIX_TOL = 1e-10
EIG_TOL = 1e-9
CODE_SPACE_QUBIT_LIMIT = 10

_I_POWERS = np.array([1, 1j, -1, -1j])


class VerificationError(RuntimeError):
    pass


def _signs(idx: np.ndarray, mask: int) -> np.ndarray:
    """``(-1)**popcount(idx & mask)`` as floats."""
    return 1.0 - 2.0 * (np.bitwise_count(idx & mask) & 1).astype(np.float64)


def basis_state(n_qubits: int, index: int = 0) -> np.ndarray:
    v = np.zeros(2**n_qubits, dtype=complex)
    v[index] = 1.0
    return v


def apply_operator(p: PauliSum | PauliString, v: np.ndarray) -> np.ndarray:
    if isinstance(p, PauliString):
        p = PauliSum.from_string(p)
    dim = 2**p.n_qubits
    if v.shape[0] != dim:
        raise ValueError(f"state of length {v.shape[0]} does not match {p.n_qubits} qubits")
    idx = np.arange(dim, dtype=np.int64)
    out = np.zeros_like(v, dtype=complex)
    for s, c in p:
        # P|b> = i^{|x&z|} (-1)^{|z&b|} |b ^ x>; read the source index b = j ^ x
        src = idx ^ s.x
        signs = _signs(src, s.z)
        out += c * _I_POWERS[bin(s.x & s.z).count("1") % 4] * signs * v[src]
    return out


def expectation(p: PauliSum, v: np.ndarray) -> complex:
    return complex(np.vdot(v, apply_operator(p, v)))


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    return float(abs(np.vdot(u, v)))


def _check_eigenstate(stabilizers: Sequence[Stabilizer], v: np.ndarray, tol: float) -> float:
    dev = 0.0
    for s in stabilizers:
        dev = max(dev, float(np.max(np.abs(apply_operator(s.operator, v) - v), initial=0.0)))
    if dev > tol:
        raise VerificationError(f"state is not a +1 eigenstate of all stabilizers (dev {dev:.3g})")
    return dev


def vacuum_state(
    stabilizers: Sequence[Stabilizer], n_qubits: int, tol: float = STATE_TOL
) -> np.ndarray:
    """Projected vacuum ``prod (1 + M) / sqrt(2) |0...0>``, normalised."""
    v = basis_state(n_qubits)
    for s in stabilizers:
        v = (v + apply_operator(s.operator, v)) / math.sqrt(2)
    norm = np.linalg.norm(v)
    if norm < tol:
        raise VerificationError("projection annihilated |0...0>; stabilizer set is inconsistent")
    v = v / norm
    _check_eigenstate(stabilizers, v, tol)
    return v


def apply_z(v: np.ndarray, qubits: Iterable[int]) -> np.ndarray:
    mask = 0
    for q in qubits:
        mask ^= 1 << q
    idx = np.arange(v.shape[0], dtype=np.int64)
    return v * _signs(idx, mask)


def correction_chain(k: int, stabilizers: Sequence[Stabilizer]) -> list[int]:
    """Auxiliary qubits whose Z flips stabilizer ``k`` alone.

    Walks from one endpoint of ``k`` through the stabilizers sharing each
    auxiliary qubit until a free end; the shorter of the two directions wins.
    """
    touching: dict[int, list[int]] = {}
    for j, s in enumerate(stabilizers):
        for q in s.endpoints:
            touching.setdefault(q, []).append(j)
    best = None
    for start in stabilizers[k].endpoints:
        chain, cur, q, seen = [start], k, start, {k}
        ok = True
        while True:
            others = [j for j in touching[q] if j != cur]
            if not others:
                break
            nxt = others[0]
            if nxt in seen:
                ok = False
                break
            seen.add(nxt)
            a, b = stabilizers[nxt].endpoints
            q = b if a == q else a
            chain.append(q)
            cur = nxt
        if ok and (best is None or len(chain) < len(best)):
            best = chain
    if best is None:
        raise VerificationError(f"stabilizer {k} sits on a closed loop; no free chain end")
    return best


def simulate_measured_prep(
    stabilizers: Sequence[Stabilizer],
    n_qubits: int,
    seed: int | None = None,
    forced: Mapping[int, int] | None = None,
    tol: float = STATE_TOL,
) -> tuple[np.ndarray, list[dict]]:
    """Measure each stabilizer on ``|0...0>`` in turn, fixing ``-1`` outcomes.

    Outcomes follow the Born rule from ``numpy.random.default_rng(seed)``;
    ``forced`` pins chosen outcomes (index -> +1/-1).  Returns the final state
    and a log of outcomes and applied corrections.
    """
    rng = np.random.default_rng(seed)
    forced = dict(forced or {})
    v = basis_state(n_qubits)
    log = []
    for k, s in enumerate(stabilizers):
        mv = apply_operator(s.operator, v)
        plus = (v + mv) / 2
        p_plus = float(np.vdot(plus, plus).real)
        outcome = forced.get(k)
        if outcome is None:
            outcome = 1 if rng.random() < p_plus else -1
        post = plus if outcome == 1 else (v - mv) / 2
        norm = np.linalg.norm(post)
        if norm < tol:
            raise VerificationError(f"outcome {outcome} of stabilizer {k} has zero probability")
        v = post / norm
        chain: list[int] = []
        if outcome == -1:
            chain = correction_chain(k, stabilizers)
            v = apply_z(v, chain)
        log.append({"stabilizer": k, "p_plus": p_plus, "outcome": outcome, "corrected": chain})
    _check_eigenstate(stabilizers, v, tol)
    return v, log


def prepare_fock(occ: FockState | Sequence[int], layout: EncodingLayout, vacuum: np.ndarray) -> np.ndarray:
    """Apply the enlarged-register creation strings, highest mode first."""
    occ = occ if isinstance(occ, FockState) else FockState(tuple(occ))
    v = vacuum
    for j in reversed(range(len(occ))):
        if occ.occupations[j]:
            v = apply_operator(jw_operator(LadderOperator(j, True), layout.qubit_order), v)
    norm = np.linalg.norm(v)
    if abs(norm - 1) > 1e-10:
        raise VerificationError(f"prepared state has norm {norm}")
    return v


def stored_parities(occ: Sequence[int], layout: EncodingLayout) -> dict[int, int]:
    """Parity of occupied original modes placed after each auxiliary qubit."""
    qo = layout.qubit_order
    placement = layout.placement
    out = {}
    for q, m in enumerate(qo):
        if placement.is_aux(m):
            out[q] = sum(occ[r] for r in qo[q + 1 :] if not placement.is_aux(r)) % 2
    return out


def fast_prepare_fock(occ: FockState | Sequence[int], layout: EncodingLayout, vacuum: np.ndarray) -> np.ndarray:
    """X on occupied mode qubits and ``Z^parity`` on every auxiliary qubit."""
    occ = occ.occupations if isinstance(occ, FockState) else tuple(occ)
    placement = layout.placement
    x = sum(1 << placement.qubit(j) for j, n in enumerate(occ) if n)
    z = sum(1 << q for q, par in stored_parities(occ, layout).items() if par)
    return apply_operator(PauliString(layout.n_qubits, x, z), vacuum)


def apply_single_qubit(v: np.ndarray, qubit: int, u: np.ndarray) -> np.ndarray:
    n = int(round(math.log2(v.shape[0])))
    t = v.reshape((2,) * n)
    axis = n - 1 - qubit
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def letter_eigenbasis(angle: float) -> np.ndarray:
    """Rows ``<+_b|`` and ``<-_b|`` for ``|+-_b> = (|0> +- alpha |1>)/sqrt(2)``, alpha = e^{-i angle}."""
    alpha = np.exp(-1j * angle)
    plus = np.array([1, alpha]) / math.sqrt(2)
    minus = np.array([1, -alpha]) / math.sqrt(2)
    return np.array([plus.conj(), minus.conj()])


def endpoint_correlation(v: np.ndarray, s: Stabilizer, layout: EncodingLayout) -> float:
    """``<s_p s_q (-1)^{aux Z chain}>`` read out in the endpoint letters' eigenbases.

    Projects both auxiliary endpoints onto their letter eigenvectors and the
    auxiliaries strictly between them onto Z; the mode qubits are not read.
    """
    qa, qb = s.endpoints
    w = apply_single_qubit(v, qa, letter_eigenbasis(s.angles[0]))
    w = apply_single_qubit(w, qb, letter_eigenbasis(s.angles[1]))
    aux_mask = sum(
        1 << q
        for q in range(qa + 1, qb)
        if layout.placement.is_aux(layout.qubit_order[q])
    )
    mask = (1 << qa) | (1 << qb) | aux_mask
    idx = np.arange(w.shape[0], dtype=np.int64)
    signs = _signs(idx, mask)
    return float(np.sum(np.abs(w) ** 2 * signs))


def reordering_sign(occ: Sequence[int], s: Stabilizer, layout: EncodingLayout) -> int:
    """``(-1)`` to the number of occupied modes strictly between the endpoints."""
    qa, qb = s.endpoints
    qo = layout.qubit_order
    count = sum(occ[m] for m in qo[qa + 1 : qb] if not layout.placement.is_aux(m))
    return -1 if count % 2 else 1


@dataclass(frozen=True)
class SparseState:
    """Amplitudes on a sorted set of basis indices (all others zero)."""

    n_qubits: int
    idx: np.ndarray
    amp: np.ndarray

    @classmethod
    def from_dense(cls, v: np.ndarray, cutoff: float = 0.0) -> SparseState:
        n = int(round(math.log2(v.shape[0])))
        nz = np.flatnonzero(np.abs(v) > cutoff)
        return cls(n, nz.astype(np.int64), v[nz].astype(complex))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(2**self.n_qubits, dtype=complex)
        out[self.idx] = self.amp
        return out

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))


def apply_sparse(p: PauliSum | PauliString, v: SparseState) -> SparseState:
    if isinstance(p, PauliString):
        p = PauliSum.from_string(p)
    if p.n_qubits != v.n_qubits:
        raise ValueError(f"operator on {p.n_qubits} qubits applied to {v.n_qubits}-qubit state")
    idx_parts, amp_parts = [], []
    for s, c in p:
        idx_parts.append(v.idx ^ s.x)
        phase = c * _I_POWERS[bin(s.x & s.z).count("1") % 4]
        amp_parts.append(phase * _signs(v.idx, s.z) * v.amp)
    if not idx_parts:
        return SparseState(v.n_qubits, np.zeros(0, np.int64), np.zeros(0, complex))
    idx = np.concatenate(idx_parts)
    amp = np.concatenate(amp_parts)
    uniq, inv = np.unique(idx, return_inverse=True)
    out = np.zeros(uniq.shape[0], dtype=complex)
    np.add.at(out, inv, amp)
    return SparseState(v.n_qubits, uniq, out)


@dataclass
class EncodedBasis:
    """Prepared images of every Fock state, keyed by Fock index."""

    n_modes: int
    states: list[SparseState]

    def dense(self) -> np.ndarray:
        return np.column_stack([s.to_dense() for s in self.states])

    def overlaps(self, w: SparseState) -> np.ndarray:
        """``<V_m|w>`` for every basis vector ``m`` at once."""
        if not hasattr(self, "_flat"):
            idx = np.concatenate([s.idx for s in self.states])
            amp = np.concatenate([s.amp for s in self.states])
            owner = np.concatenate(
                [np.full(s.idx.shape[0], m, dtype=np.int64) for m, s in enumerate(self.states)]
            )
            if np.unique(idx).shape[0] != idx.shape[0]:
                raise VerificationError("encoded basis vectors share support")
            order = np.argsort(idx)
            self._flat = (idx[order], amp[order], owner[order])
        idx, amp, owner = self._flat
        dim = len(self.states)
        if idx.shape[0] == 0 or w.idx.shape[0] == 0:
            return np.zeros(dim, dtype=complex)
        pos = np.minimum(np.searchsorted(idx, w.idx), idx.shape[0] - 1)
        hit = idx[pos] == w.idx
        contrib = np.conj(amp[pos[hit]]) * w.amp[hit]
        out = np.zeros(dim, dtype=complex)
        np.add.at(out, owner[pos[hit]], contrib)
        return out

    def gram(self) -> np.ndarray:
        return np.column_stack([self.overlaps(s) for s in self.states])

    def gram_deviation(self) -> float:
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(g.shape[0]))))


def encoded_basis(n_modes: int, layout: EncodingLayout, vacuum: np.ndarray) -> EncodedBasis:
    """Sparse ``prepare_fock`` images of all ``2**n_modes`` occupations."""
    vac = SparseState.from_dense(vacuum)
    creators = [jw_operator(LadderOperator(j, True), layout.qubit_order) for j in range(n_modes)]
    states = []
    for index in range(2**n_modes):
        v = vac
        for j in reversed(range(n_modes)):
            if (index >> j) & 1:
                v = apply_sparse(creators[j], v)
        if abs(v.norm() - 1) > 1e-10:
            raise VerificationError(f"prepared state {index} has norm {v.norm()}")
        states.append(v)
    return EncodedBasis(n_modes, states)


def restricted_matrix(op: PauliSum, basis: EncodedBasis) -> np.ndarray:
    """``<V_m|op|V_n>`` over the prepared basis."""
    return np.column_stack([basis.overlaps(apply_sparse(op, v)) for v in basis.states])


@dataclass
class EquivalenceReport:
    deviation: float
    gram_deviation: float
    spectrum_deviation: float | None = None
    code_space_dim: int | None = None
    spectrum_contained: bool | None = None
    details: dict = field(default_factory=dict)


def _spectrum_distance(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.sort(a), np.sort(b)
    if a.shape != b.shape:
        return math.inf
    return float(np.max(np.abs(a - b), initial=0.0))


def equivalence_report(
    h: FermionHamiltonian,
    encoded: EncodedHamiltonian,
    *,
    code_space: bool = False,
    tol: float = MATRIX_TOL,
) -> EquivalenceReport:
    if h.n_modes > 10 or encoded.n_qubits > 20:
        raise ValueError("equivalence check is limited to 10 modes and 20 qubits")
    vac = vacuum_state(encoded.stabilizers, encoded.n_qubits)
    basis = encoded_basis(h.n_modes, encoded.layout, vac)
    gram = basis.gram_deviation()
    if gram > tol:
        raise VerificationError(f"encoded basis is not orthonormal (dev {gram:.3g})")
    fock = build_fock_matrix(h)
    restricted = restricted_matrix(encoded.operator, basis)
    report = EquivalenceReport(float(np.max(np.abs(restricted - fock), initial=0.0)), gram)
    if np.allclose(fock, fock.conj().T, atol=tol):
        report.spectrum_deviation = _spectrum_distance(
            np.linalg.eigvalsh(restricted), np.linalg.eigvalsh(fock)
        )
        if code_space and encoded.n_qubits <= CODE_SPACE_QUBIT_LIMIT:
            dim, contained = _code_space_spectrum(encoded, np.linalg.eigvalsh(fock))
            report.code_space_dim = dim
            report.spectrum_contained = contained
    return report


def equivalence_check(h: FermionHamiltonian, encoded: EncodedHamiltonian) -> float:
    """Largest ``|<V m|H_enc|V n> - <m|H|n>|`` over the prepared basis."""
    return equivalence_report(h, encoded).deviation


def _code_space_spectrum(encoded: EncodedHamiltonian, fock_eigs: np.ndarray) -> tuple[int, bool]:
    dim = 2**encoded.n_qubits
    proj = np.eye(dim, dtype=complex)
    for s in encoded.stabilizers:
        proj = proj @ (np.eye(dim) + to_matrix(s.operator)) / 2
    w, vecs = np.linalg.eigh((proj + proj.conj().T) / 2)
    basis = vecs[:, w > 0.5]
    h = basis.conj().T @ to_matrix(encoded.operator) @ basis
    eigs = np.linalg.eigvalsh((h + h.conj().T) / 2)
    contained = all(np.min(np.abs(eigs - e)) <= EIG_TOL for e in fock_eigs)
    return basis.shape[1], contained


# -- locality scaling --------------------------------------------------------


@dataclass(frozen=True)
class WeightRow:
    size: int
    encoding: str
    term_class: str
    max_weight: int
    mean_weight: float
    count: int


def weight_scaling_report(sizes: Sequence[int] = (3, 4, 5), t: float = 1.0) -> list[WeightRow]:
    """Letter weights of encoded ``L x L`` hops under JW and the auxiliary encoding.

    Hops are classed as ``horizontal`` (along the snake backbone) or
    ``vertical`` and additionally tagged ``bulk`` when either end is an
    interior site.  Both encodings use the snake order.
    """
    rows: list[WeightRow] = []
    for size in sizes:
        h, order = hubbard_hops(size, size, t=t)
        enc = encode_hamiltonian(h, order=order)
        stabs = enc.stabilizers
        weights: dict[tuple[str, str], list[int]] = {}
        for (p, q), direction in lattice_edges(size, size):
            classes = [direction]
            if _interior(p, size) or _interior(q, size):
                classes.append(f"bulk_{direction}")
            jw_w = jw_encode_term(LadderTerm(t, (cdag(p), ann(q))), order.order)
            jw_w = (jw_w + jw_w.adjoint()).max_weight()
            aux_w = encode_hop(p, q, t, enc.layout, stabs).max_weight()
            for cls in classes:
                weights.setdefault(("jw", cls), []).append(jw_w)
                weights.setdefault(("aux", cls), []).append(aux_w)
        for (encoding, cls), ws in sorted(weights.items()):
            rows.append(WeightRow(size, encoding, cls, max(ws), float(np.mean(ws)), len(ws)))
    return rows


def _interior(mode: int, size: int) -> bool:
    r, c = divmod(mode, size)
    return 0 < r < size - 1 and 0 < c < size - 1
