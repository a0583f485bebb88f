"""Executable small-scale protocols: entanglement swapping with Procrustean
conversion, the hashing method on Bell-pair strings, and Schmidt projection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import entropy, qcore
from .qcore import LabeledState, StateError

BELL_ORDER = ("phi_plus", "psi_plus", "phi_minus", "psi_minus")  # bit codes 00 01 10 11


@dataclass(frozen=True)
class BellString:
    """A sequence of Bell pairs encoded as two classical bits per pair."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) % 2 or any(b not in (0, 1) for b in self.bits):
            raise StateError("a Bell string needs an even number of 0/1 bits")

    @classmethod
    def from_symbols(cls, symbols) -> "BellString":
        return cls(bits=tuple(int(b) for b in _symbols_to_bits(np.asarray(symbols, dtype=np.uint8))))

    @property
    def symbols(self) -> tuple[int, ...]:
        return tuple(2 * self.bits[2 * i] + self.bits[2 * i + 1] for i in range(len(self.bits) // 2))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(BELL_ORDER[s] for s in self.symbols)


@dataclass(frozen=True)
class Outcome:
    label: str
    probability: float | Fraction
    post_state: LabeledState | None = None
    register: dict | None = None


@dataclass(frozen=True)
class ProtocolTrace:
    outcomes: tuple[Outcome, ...]
    aggregate: dict

    def total_probability(self) -> float:
        return float(sum(o.probability for o in self.outcomes))


# ---------------------------------------------------------------------------
# Entanglement swapping
# ---------------------------------------------------------------------------


def entanglement_swap(lambda1, lambda2) -> ProtocolTrace:
    """Swap two identical sqrt(l1)|00> + sqrt(l2)|11> links through a middle node.

    The middle node's Bell measurement yields outcomes 01/11 (already maximally
    entangled after a Pauli fix) with probability l1*l2 each, and 00/10 with
    probability (l1^2 + l2^2)/2 each, after which a two-outcome filter converts
    to a singlet with probability 2 l2^2/(l1^2 + l2^2).  The total singlet
    conversion probability is exactly 2 l2.  Rational inputs stay exact.
    """
    exact = isinstance(lambda1, (int, Fraction)) and isinstance(lambda2, (int, Fraction))
    l1 = Fraction(lambda1) if exact else float(lambda1)
    l2 = Fraction(lambda2) if exact else float(lambda2)
    sum_defect = abs(float(l1 + l2) - 1.0)
    if l1 < l2 or l2 < 0 or sum_defect > (0 if exact else 1e-12):
        raise StateError("need lambda1 >= lambda2 >= 0 with lambda1 + lambda2 = 1")

    p_bell = l1 * l2
    p_partial = (l1 * l1 + l2 * l2) / 2
    procrustean = 2 * l2 * l2 / (l1 * l1 + l2 * l2)

    singlet = qcore.bell("psi_minus")
    partial = _partial_pair(float(l1), float(l2))
    outcomes = (
        Outcome("01", p_bell, post_state=singlet, register={"correction": "Z"}),
        Outcome("11", p_bell, post_state=singlet, register={"correction": "I"}),
        Outcome("00", p_partial, post_state=partial, register={"procrustean_success": procrustean}),
        Outcome("10", p_partial, post_state=partial, register={"procrustean_success": procrustean}),
    )
    scp = 2 * p_bell + 2 * p_partial * procrustean
    return ProtocolTrace(
        outcomes=outcomes,
        aggregate={"scp": scp, "scp_closed_form": 2 * l2, "exact": exact},
    )


def _partial_pair(l1: float, l2: float) -> LabeledState:
    norm = math.sqrt(l1 * l1 + l2 * l2)
    amp = np.zeros(4, dtype=complex)
    amp[0] = l1 / norm
    amp[3] = l2 / norm
    return qcore.pure_state([("A", 2), ("B", 2)], amp)


# ---------------------------------------------------------------------------
# Hashing method
# ---------------------------------------------------------------------------


@dataclass
class HashingRound:
    subset_bits: np.ndarray  # indices into the 2n-bit string
    parity: int
    consumed_pair: int


@dataclass
class HashingTrial:
    hidden: np.ndarray  # n Bell symbols in {0,1,2,3}
    rounds: list[HashingRound] = field(default_factory=list)
    decoys_surviving: int = 0
    hidden_typical: bool = True

    @property
    def succeeded(self) -> bool:
        return self.decoys_surviving == 0 and self.hidden_typical


def bell_diagonal_state(p: Sequence[float]) -> LabeledState:
    """Two-qubit mixture of the four Bell states with weights p (code order 00,01,10,11)."""
    p = np.asarray(p, dtype=float)
    if p.size != 4 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise StateError("p must be a distribution over the four Bell states")
    m = np.zeros((4, 4), dtype=complex)
    for weight, kind in zip(p, BELL_ORDER):
        b = qcore.bell(kind)
        m = m + weight * b.matrix
    return qcore.make_state([("A", 2), ("B", 2)], m)


def _symbols_to_bits(symbols: np.ndarray) -> np.ndarray:
    bits = np.empty(2 * symbols.size, dtype=np.uint8)
    bits[0::2] = symbols >> 1
    bits[1::2] = symbols & 1
    return bits


def _sample_symbols(rng: np.random.Generator, p: np.ndarray, shape) -> np.ndarray:
    """I.i.d. Bell symbols in {0..3}; thresholded uniforms beat a generic sampler here."""
    cut = np.cumsum(p)[:3].astype(np.float32)
    u = rng.random(shape, dtype=np.float32)
    out = (u > cut[0]).astype(np.uint8)
    out += u > cut[1]
    out += u > cut[2]
    return out


def _typical_mask(symbols: np.ndarray, p: np.ndarray, delta: float) -> np.ndarray:
    n = symbols.shape[-1]
    counts = np.stack([(symbols == k).sum(axis=-1) for k in range(4)], axis=-1)
    return np.all(np.abs(counts / n - p) <= delta + 1e-12, axis=-1)


def hashing_simulation(
    p: Sequence[float],
    n: int,
    delta: float,
    trials: int = 50,
    seed: int = qcore.DEFAULT_SEED,
    decoys: int = 10_000,
) -> ProtocolTrace:
    """Simulate the parity-hashing identification of an unknown Bell string.

    The hidden n-pair string is drawn i.i.d. from p.  Instead of tracking the
    full candidate set, a panel of i.i.d. decoy strings restricted to the
    delta-typical set estimates the union-bound failure probability: a decoy
    survives a round only when its announced subset parity matches the hidden
    one.  Each round consumes one pair; the nominal round count
    ceil(n (S + 2 delta)) is capped at n, and a nominal count >= n marks the
    distillation infeasible (non-positive yield).  Failure modes per trial:
    surviving decoys, or an atypical hidden string (no candidate inside the
    typical search set).
    """
    p_arr = np.asarray(p, dtype=float)
    state = bell_diagonal_state(p_arr)
    s_bits = entropy.von_neumann(state)
    if n < 1 or n > 5000:
        raise StateError("n must lie in [1, 5000]")
    # A deterministic source leaves a single candidate: no parities needed.
    nominal_rounds = 0 if s_bits < 1e-9 else math.ceil(n * (s_bits + 2.0 * delta))
    feasible = nominal_rounds < n
    rounds_run = min(n, nominal_rounds)

    rngs = qcore.spawn_rngs(seed, trials)
    trial_records: list[HashingTrial] = []
    for trial_index, rng in enumerate(rngs):
        hidden = _sample_symbols(rng, p_arr, n)
        record = HashingTrial(hidden=hidden)
        record.hidden_typical = bool(_typical_mask(hidden, p_arr, delta))
        panel = _sample_typical_decoys(rng, p_arr, n, delta, decoys)
        distinct = np.any(panel != hidden[np.newaxis, :], axis=1)
        panel = panel[distinct]
        hidden_bits = _symbols_to_bits(hidden)
        decoy_bits = _symbols_to_bits_batch(panel)
        # Round bookkeeping is kept only for the first trial; the full subset
        # lists of every round of every trial would dominate memory otherwise.
        keep_rounds = trial_index == 0
        pair_alive = np.ones(n, dtype=bool)
        for _ in range(rounds_run):
            alive_pairs = np.flatnonzero(pair_alive)
            bit_pool = np.empty(2 * alive_pairs.size, dtype=np.int64)
            bit_pool[0::2] = 2 * alive_pairs
            bit_pool[1::2] = 2 * alive_pairs + 1
            while True:
                mask = rng.integers(0, 2, size=bit_pool.size, dtype=np.uint8).view(bool)
                if mask.any():
                    break
            subset = bit_pool[mask]
            parity = int(hidden_bits[subset].sum() & 1)
            if decoy_bits.shape[0]:
                keep = (decoy_bits[:, subset].sum(axis=1) & 1) == parity
                decoy_bits = decoy_bits[keep]
            consumed = int(subset.max() // 2)
            pair_alive[consumed] = False
            if keep_rounds:
                record.rounds.append(HashingRound(subset_bits=subset, parity=parity, consumed_pair=consumed))
        record.decoys_surviving = int(decoy_bits.shape[0])
        trial_records.append(record)

    successes = sum(1 for t in trial_records if t.succeeded)
    yield_per_pair = (n - rounds_run) / n
    aggregate = {
        "entropy_bits": s_bits,
        "nominal_rounds": nominal_rounds,
        "rounds_run": rounds_run,
        "feasible": feasible,
        "yield": yield_per_pair,
        "nominal_yield": 1.0 - nominal_rounds / n,
        "success_frequency": successes / trials,
        "trials": trials,
        "decoys": decoys,
        "atypical_hidden": sum(1 for t in trial_records if not t.hidden_typical),
        "trial_records": trial_records,
    }
    outcomes = tuple(
        Outcome(
            label=f"trial{i}",
            probability=Fraction(1, trials),
            register={
                "success": t.succeeded,
                "decoys_surviving": t.decoys_surviving,
                "hidden_typical": t.hidden_typical,
            },
        )
        for i, t in enumerate(trial_records)
    )
    return ProtocolTrace(outcomes=outcomes, aggregate=aggregate)


def _symbols_to_bits_batch(symbols: np.ndarray) -> np.ndarray:
    m, n = symbols.shape
    bits = np.empty((m, 2 * n), dtype=np.uint8)
    bits[:, 0::2] = symbols >> 1
    bits[:, 1::2] = symbols & 1
    return bits


def _sample_typical_decoys(rng: np.random.Generator, p: np.ndarray, n: int, delta: float, count: int) -> np.ndarray:
    out = np.empty((0, n), dtype=np.uint8)
    while out.shape[0] < count:
        batch = _sample_symbols(rng, p, (count, n))
        ok = _typical_mask(batch, p, delta)
        out = np.concatenate([out, batch[ok]])[:count]
    return out


def replay_hashing_trial(trial: HashingTrial) -> bool:
    """Recompute every announced parity from the hidden string; True when all match."""
    bits = _symbols_to_bits(trial.hidden)
    consumed: set[int] = set()
    for rnd in trial.rounds:
        if any(int(b) // 2 in consumed for b in rnd.subset_bits):
            return False
        if int(bits[rnd.subset_bits].sum() & 1) != rnd.parity:
            return False
        consumed.add(rnd.consumed_pair)
    return True


# ---------------------------------------------------------------------------
# Schmidt projection
# ---------------------------------------------------------------------------


def schmidt_projection(theta: float, n: int) -> ProtocolTrace:
    """Project n copies of cos(t)|00> + sin(t)|11> onto equal-coefficient blocks.

    Outcome k keeps a maximally entangled state of rank C(n, k) with probability
    C(n, k) c^(n-k) s^k.  Probabilities are exact rationals built from the float
    weights, so they sum to exactly one.
    """
    if not 0.0 < theta < math.pi / 2:
        raise StateError("theta must lie in (0, pi/2)")
    if not 1 <= n <= 64:
        raise StateError("n must lie in [1, 64]")
    c = Fraction(math.cos(theta) ** 2)
    s = 1 - c
    probs = [Fraction(math.comb(n, k)) * c ** (n - k) * s**k for k in range(n + 1)]
    assert sum(probs) == 1
    ranks = [math.comb(n, k) for k in range(n + 1)]
    expected_entanglement = sum(float(p) * math.log2(r) for p, r in zip(probs, ranks))
    outcome_entropy = qcore.shannon_entropy([float(p) for p in probs])
    per_copy = qcore.binary_entropy(float(s))
    outcomes = tuple(
        Outcome(label=f"k={k}", probability=probs[k], register={"rank": ranks[k]})
        for k in range(n + 1)
    )
    return ProtocolTrace(
        outcomes=outcomes,
        aggregate={
            "expected_entanglement": expected_entanglement,
            "n_times_entropy": n * per_copy,
            "outcome_entropy": outcome_entropy,
            "sandwich_ok": expected_entanglement - 1e-9
            <= n * per_copy
            <= outcome_entropy + expected_entanglement + 1e-9,
        },
    )
