"""Decoupling via random instruments: analytic error bounds, Monte Carlo
verification, split-transfer errors, and the Haar-twirl identity check."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import entropy, qcore
from .qcore import LabeledState, StateError

ZERO_PROB = 1e-14
MAX_SIM_DIM = qcore.MAX_TOTAL_DIM


@dataclass(frozen=True)
class SenderSpec:
    """One sender's instrument shape: system dim, ancilla dim K, output rank L."""

    label: str
    dim: int
    ancilla: int = 1
    rank: int = 1

    def __post_init__(self):
        if self.rank < 1 or self.ancilla < 1 or self.dim < 1:
            raise StateError("sender dimensions must be positive")
        if self.rank > self.dim * self.ancilla:
            raise StateError(f"rank {self.rank} exceeds d*K = {self.dim * self.ancilla} for {self.label!r}")

    @property
    def blocks(self) -> int:
        return (self.dim * self.ancilla) // self.rank

    @property
    def remainder(self) -> int:
        return self.dim * self.ancilla - self.blocks * self.rank


@dataclass(frozen=True)
class InstrumentSpec:
    senders: tuple[SenderSpec, ...]
    seed: int = qcore.DEFAULT_SEED
    samples: int = 200

    def __post_init__(self):
        if self.samples < 1:
            raise StateError("samples must be >= 1")

    def validate_against(self, state: LabeledState) -> None:
        for s in self.senders:
            if state.dim_of(s.label) != s.dim:
                raise StateError(f"sender {s.label!r} dim {s.dim} mismatches the state ({state.dim_of(s.label)})")


def sender(label: str, dim: int, ancilla: int = 1, rank: int = 1) -> SenderSpec:
    return SenderSpec(label=label, dim=dim, ancilla=ancilla, rank=rank)


@dataclass(frozen=True)
class DecouplingResult:
    empirical_q: float
    stderr: float
    analytic_bound: float
    minentropy_bound: float | None
    samples: int
    per_sample: np.ndarray
    outcome_rows: tuple[dict, ...] = ()


def swap_operator(d: int) -> np.ndarray:
    """Swap on C^d x C^d: F |i>|j> = |j>|i>."""
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[j * d + i, i * d + j] = 1.0
    return f


def symmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) + swap_operator(d)) / 2.0


def antisymmetric_projector(d: int) -> np.ndarray:
    return (np.eye(d * d) - swap_operator(d)) / 2.0


def purity(state: LabeledState, part: Iterable[str] | str | None = None, check_swap_trick: bool = False) -> float:
    """Tr[rho_part^2]; optionally cross-checked against Tr[(rho x rho) F]."""
    reduced = state if part is None else qcore.partial_trace(state, part)
    m = reduced.matrix
    direct = float(np.real(np.trace(m @ m)))
    if check_swap_trick:
        d = m.shape[0]
        via_swap = float(np.real(np.trace(np.kron(m, m) @ swap_operator(d))))
        if abs(direct - via_swap) > 1e-10:
            raise StateError(f"swap-trick purity {via_swap!r} disagrees with direct value {direct!r}")
    return direct


def _subsets(items: Sequence) -> list[tuple]:
    out = []
    for r in range(1, len(items) + 1):
        out.extend(itertools.combinations(items, r))
    return out


def decoupling_bound_purity(state: LabeledState, spec: InstrumentSpec, reference: Iterable[str] | str) -> float:
    """Average-case decoupling error bound from subset purities:

    2 sum_T prod_{i in T} L_i/(d_i K_i)
      + 2 sqrt(d_R sum_T prod_{i in T} (L_i/K_i) Tr[psi^2_{R T}]).
    """
    spec.validate_against(state)
    ref_labels = qcore._normalize_labels(state, reference)
    if set(ref_labels) & {s.label for s in spec.senders}:
        raise StateError("reference overlaps the sender systems")
    d_ref = int(np.prod([state.dim_of(x) for x in ref_labels]))
    linear = 0.0
    quad = 0.0
    for subset in _subsets(spec.senders):
        linear += math.prod(s.rank / (s.dim * s.ancilla) for s in subset)
        pur = purity(state, list(ref_labels) + [s.label for s in subset])
        quad += math.prod(s.rank / s.ancilla for s in subset) * pur
    return 2.0 * linear + 2.0 * math.sqrt(d_ref * quad)


def decoupling_bound_minentropy(
    state: LabeledState,
    spec: InstrumentSpec,
    reference: Iterable[str] | str,
    sigma: LabeledState | None = None,
) -> float:
    """Min-entropy form of the decoupling bound, ancillas included:

    prefactor * sqrt(sum_T 2^{-(H_min(psi^{T R}|sigma^R) + log K_T - log L_T)})
    with prefactor prod_i N_i L_i / (d_i K_i) <= 1.
    """
    spec.validate_against(state)
    ref_labels = qcore._normalize_labels(state, reference)
    if sigma is None:
        sigma = qcore.partial_trace(state, ref_labels)
    prefactor = math.prod(s.blocks * s.rank / (s.dim * s.ancilla) for s in spec.senders)
    total = 0.0
    for subset in _subsets(spec.senders):
        joint = qcore.partial_trace(state, [s.label for s in subset] + list(ref_labels))
        hmin = entropy.min_entropy_relative(joint, sigma)
        log_k = sum(math.log2(s.ancilla) for s in subset)
        log_l = sum(math.log2(s.rank) for s in subset)
        total += 2.0 ** (-(hmin + log_k - log_l))
    return prefactor * math.sqrt(total)


def _working_state(state: LabeledState, spec: InstrumentSpec, ref_labels: Sequence[str]) -> tuple[np.ndarray, list[int], int]:
    """Marginal on senders + reference with per-sender ancillas appended.

    Returns the density tensor grouped as (g_1, ..., g_m, ref) on both index
    sides, where g_i = d_i * K_i, plus the grouped dims and reference dim.
    """
    sender_labels = [s.label for s in spec.senders]
    marginal = qcore.partial_trace(state, sender_labels + list(ref_labels))
    marginal = qcore.permute_systems(marginal, sender_labels + list(ref_labels))
    work = marginal
    for s in spec.senders:
        if s.ancilla > 1:
            work = qcore.tensor(work, qcore.max_mixed(s.ancilla, label=f"_{s.label}0"))
    order: list[str] = []
    for s in spec.senders:
        order.append(s.label)
        if s.ancilla > 1:
            order.append(f"_{s.label}0")
    order.extend(ref_labels)
    work = qcore.permute_systems(work, order)
    if work.total_dim > MAX_SIM_DIM:
        raise StateError(f"simulation dimension {work.total_dim} exceeds the cap {MAX_SIM_DIM}")
    grouped = [s.dim * s.ancilla for s in spec.senders]
    d_ref = int(np.prod([state.dim_of(x) for x in ref_labels])) if ref_labels else 1
    tensor = work.matrix.reshape(tuple(grouped) + (d_ref,) + tuple(grouped) + (d_ref,))
    return tensor, grouped, d_ref


def _outcome_blocks(s: SenderSpec) -> list[np.ndarray]:
    """Computational-basis index blocks: N rank-L blocks plus a possible remainder."""
    blocks = [np.arange(j * s.rank, (j + 1) * s.rank) for j in range(s.blocks)]
    if s.remainder:
        blocks.append(np.arange(s.blocks * s.rank, s.dim * s.ancilla))
    return blocks


def simulate_random_instrument(
    state: LabeledState,
    spec: InstrumentSpec,
    reference: Iterable[str] | str,
    sigma: LabeledState | None = None,
    with_minentropy_bound: bool = False,
    keep_outcomes: bool = False,
) -> DecouplingResult:
    """Monte Carlo estimate of Q = sum_J p_J || psi_J^{C1 R} - tau x psi^R ||_1.

    Each sample draws one Haar unitary per sender on its system + ancilla,
    partitions the rotated space into rank-L blocks, and accumulates the
    probability-weighted distance of every outcome's reduced state from the
    decoupled target.  Remainder-rank outcomes are charged the worst-case
    distance 2, matching the quantity the analytic bound controls.
    """
    if state.norm_mode != "normalized":
        raise StateError("decoupling simulation requires a normalized input state")
    spec.validate_against(state)
    ref_labels = qcore._normalize_labels(state, reference)
    if set(ref_labels) & {s.label for s in spec.senders}:
        raise StateError("reference overlaps the sender systems")

    work, grouped, d_ref = _working_state(state, spec, ref_labels)
    m = len(spec.senders)
    ref_state = qcore.partial_trace(state, ref_labels).matrix if ref_labels else np.ones((1, 1))
    ranks = [s.rank for s in spec.senders]
    l_total = math.prod(ranks)
    target = np.kron(np.eye(l_total) / l_total, ref_state)
    blocks_per_sender = [_outcome_blocks(s) for s in spec.senders]

    rngs = qcore.spawn_rngs(spec.seed, spec.samples)
    per_sample = np.zeros(spec.samples)
    outcome_rows: list[dict] = []
    for idx, rng in enumerate(rngs):
        rotated = work
        for i, s in enumerate(spec.senders):
            u = qcore.haar_unitary(s.dim * s.ancilla, rng)
            rotated = np.tensordot(u, rotated, axes=([1], [i]))
            rotated = np.moveaxis(rotated, 0, i)
            rotated = np.tensordot(rotated, u.conj(), axes=([m + 1 + i], [1]))
            rotated = np.moveaxis(rotated, -1, m + 1 + i)
        total_q = 0.0
        total_p = 0.0
        for combo in itertools.product(*[range(len(b)) for b in blocks_per_sender]):
            idx_rows = [blocks_per_sender[i][j] for i, j in enumerate(combo)]
            sub = rotated[np.ix_(*idx_rows, np.arange(d_ref), *idx_rows, np.arange(d_ref))]
            side = math.prod(len(r) for r in idx_rows) * d_ref
            omega = sub.reshape(side, side)
            p = float(np.real(np.trace(omega)))
            total_p += p
            remainder_hit = any(
                spec.senders[i].remainder and j == spec.senders[i].blocks for i, j in enumerate(combo)
            )
            if p < ZERO_PROB:
                distance = 0.0
            elif remainder_hit:
                distance = 2.0
            else:
                distance = qcore.trace_norm(omega / p - target)
            total_q += distance * p
            if keep_outcomes:
                outcome_rows.append(
                    {
                        "sample": idx,
                        "outcome": "+".join(str(j) for j in combo),
                        "probability": p,
                        "distance": distance,
                        "remainder": remainder_hit,
                        "post_state": omega / p if p >= ZERO_PROB else None,
                    }
                )
        if abs(total_p - 1.0) > 1e-9:
            raise StateError(f"instrument outcome probabilities sum to {total_p!r}")
        per_sample[idx] = total_q

    mean = float(per_sample.mean())
    stderr = float(per_sample.std(ddof=1) / math.sqrt(spec.samples)) if spec.samples > 1 else 0.0
    bound = decoupling_bound_purity(state, spec, ref_labels)
    me_bound = None
    if with_minentropy_bound:
        me_bound = decoupling_bound_minentropy(state, spec, ref_labels, sigma)
    return DecouplingResult(
        empirical_q=mean,
        stderr=stderr,
        analytic_bound=bound,
        minentropy_bound=me_bound,
        samples=spec.samples,
        per_sample=per_sample,
        outcome_rows=tuple(outcome_rows),
    )


def split_transfer_errors(
    state: LabeledState,
    spec_t: InstrumentSpec,
    spec_tbar: InstrumentSpec,
    receivers: tuple[Sequence[str], Sequence[str]],
    extra_reference: Sequence[str] = (),
) -> tuple[DecouplingResult, DecouplingResult, float]:
    """Decoupling errors of the two halves of a split-transfer.

    Senders in ``spec_t`` decouple against T-bar + B + R, senders in
    ``spec_tbar`` against T + A + R; the merging-error surrogate
    2 sqrt(Q1 bound) + 2 sqrt(Q2 bound) is returned alongside.
    """
    a_labels, b_labels = (list(receivers[0]), list(receivers[1]))
    t_labels = [s.label for s in spec_t.senders]
    tbar_labels = [s.label for s in spec_tbar.senders]
    if set(t_labels) & set(tbar_labels):
        raise StateError("split-transfer cuts must partition the senders")
    ref1 = tbar_labels + b_labels + list(extra_reference)
    ref2 = t_labels + a_labels + list(extra_reference)
    q1 = simulate_random_instrument(state, spec_t, ref1) if t_labels else _empty_result()
    q2 = simulate_random_instrument(state, spec_tbar, ref2) if tbar_labels else _empty_result()
    surrogate = 2.0 * math.sqrt(q1.analytic_bound) + 2.0 * math.sqrt(q2.analytic_bound)
    return q1, q2, surrogate


def _empty_result() -> DecouplingResult:
    return DecouplingResult(
        empirical_q=0.0, stderr=0.0, analytic_bound=0.0, minentropy_bound=None,
        samples=0, per_sample=np.zeros(0),
    )


# ---------------------------------------------------------------------------
# Twirl identity
# ---------------------------------------------------------------------------


def twirl_coefficients(d: int, rank: int) -> tuple[Fraction, Fraction]:
    """Exact (r, s) in avg[(U+ x U+) F_sub (U x U)] = r I + s F."""
    denom = d * (d * d - 1)
    return Fraction(rank * (d - rank), denom), Fraction(rank * (rank * d - 1), denom)


@dataclass(frozen=True)
class TwirlReport:
    dim: int
    rank: int
    samples: int
    r: Fraction
    s: Fraction
    max_deviation: float


def twirl_average_check(d: int, rank: int, samples: int = 20000, seed: int = qcore.DEFAULT_SEED) -> TwirlReport:
    """Monte Carlo mean of the conjugated subspace swap against r I + s F."""
    if not 1 <= rank <= d:
        raise StateError("rank must lie in [1, d]")
    f_sub = np.zeros((d * d, d * d))
    for i in range(rank):
        for j in range(rank):
            f_sub[j * d + i, i * d + j] = 1.0
    rng = np.random.default_rng(seed)
    acc = np.zeros((d * d, d * d), dtype=complex)
    chunk = 2000
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        us = qcore.haar_unitaries(d, n, rng)
        # W = U+ x U+ per sample, built via the blockwise Kronecker product.
        ud = us.conj().transpose(0, 2, 1)
        w = np.einsum("nab,ncd->nacbd", ud, ud).reshape(n, d * d, d * d)
        acc += np.einsum("nij,jk,nlk->il", w, f_sub, w.conj())
        done += n
    mean = acc / samples
    r, s = twirl_coefficients(d, rank)
    predicted = float(r) * np.eye(d * d) + float(s) * swap_operator(d)
    deviation = float(np.max(np.abs(mean - predicted)))
    return TwirlReport(dim=d, rank=rank, samples=samples, r=r, s=s, max_deviation=deviation)


def conjectured_minentropy_rhs(
    state: LabeledState,
    spec: InstrumentSpec,
    reference: Iterable[str] | str,
    sigmas: dict[tuple[str, ...], LabeledState],
) -> float:
    """Evaluate the conjectured per-subset-sigma decoupling bound.

    Experimental: the per-subset form is an open conjecture and is never
    asserted as a bound anywhere in this package.
    """
    spec.validate_against(state)
    ref_labels = qcore._normalize_labels(state, reference)
    prefactor = math.prod(s.blocks * s.rank / (s.dim * s.ancilla) for s in spec.senders)
    total = 0.0
    for subset in _subsets(spec.senders):
        key = tuple(s.label for s in subset)
        sigma = sigmas.get(key) or qcore.partial_trace(state, ref_labels)
        joint = qcore.partial_trace(state, [s.label for s in subset] + list(ref_labels))
        hmin = entropy.min_entropy_relative(joint, sigma)
        log_k = sum(math.log2(s.ancilla) for s in subset)
        log_l = sum(math.log2(s.rank) for s in subset)
        total += 2.0 ** (-(hmin + log_k - log_l))
    return prefactor * math.sqrt(total)
