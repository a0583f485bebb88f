"""Classical and quantum typical sets/subspaces and verification of their
standard mass, cardinality, and purity properties."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import qcore
from .qcore import LabeledState, StateError

ENUMERATION_CAP = 10_000_000
PROJECTOR_CAP = 4096


def typicality_constant(p: Sequence[float]) -> float:
    """The constant c = max_x |log2 p(x)| over the support, making bounds checkable."""
    support = [x for x in p if x > 0]
    return max(abs(math.log2(x)) for x in support)


@dataclass(frozen=True)
class TypicalSet:
    """Statistics of the delta-typical set of length-n sequences for p."""

    p: tuple[float, ...]
    n: int
    delta: float
    cardinality: int
    total_probability: float
    min_prob: float
    max_prob: float

    @property
    def alphabet(self) -> int:
        return len(self.p)

    def contains(self, sequence: Sequence[int]) -> bool:
        counts = np.bincount(np.asarray(sequence), minlength=self.alphabet)
        return bool(np.all(np.abs(counts / self.n - np.asarray(self.p)) <= self.delta + 1e-12))

    def members(self) -> Iterator[tuple[int, ...]]:
        """All typical sequences; only available below the enumeration cap."""
        if self.alphabet**self.n > ENUMERATION_CAP:
            raise StateError("typical-set enumeration exceeds the cap; use statistics only")
        for seq in itertools.product(range(self.alphabet), repeat=self.n):
            if self.contains(seq):
                yield seq


def _compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for rest in _compositions(n - head, parts - 1):
            yield (head,) + rest


def typical_set(p: Sequence[float], n: int, delta: float) -> TypicalSet:
    """Exact typical-set statistics via type classes (no sequence enumeration)."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr < -1e-12) or abs(p_arr.sum() - 1.0) > 1e-9:
        raise StateError("p must be a probability vector")
    d = p_arr.size
    cardinality = 0
    total = 0.0
    min_prob = math.inf
    max_prob = 0.0
    for counts in _compositions(n, d):
        freqs = np.asarray(counts) / n
        if np.any(np.abs(freqs - p_arr) > delta + 1e-12):
            continue
        if any(c > 0 and p_arr[i] == 0 for i, c in enumerate(counts)):
            continue
        size = math.factorial(n)
        for c in counts:
            size //= math.factorial(c)
        prob_one = math.prod(p_arr[i] ** c for i, c in enumerate(counts) if c > 0)
        cardinality += size
        total += size * prob_one
        min_prob = min(min_prob, prob_one)
        max_prob = max(max_prob, prob_one)
    if cardinality == 0:
        min_prob = 0.0
    return TypicalSet(
        p=tuple(float(x) for x in p_arr),
        n=n,
        delta=delta,
        cardinality=cardinality,
        total_probability=total,
        min_prob=min_prob,
        max_prob=max_prob,
    )


@dataclass(frozen=True)
class ProjectorReport:
    n: int
    delta: float
    epsilon: float  # 1 - typical mass
    mass_ok: bool
    eigenvalue_sandwich_ok: bool
    cardinality_sandwich_ok: bool
    purity_bound_ok: bool
    gentle_ok: bool
    purity: float
    purity_bound: float
    gentle_lhs: float
    gentle_rhs: float
    hoeffding_floor: float


def typical_projector_checks(state: LabeledState, n: int, delta: float) -> ProjectorReport:
    """Verify the typical-projector bounds for n copies of a single-system state.

    Everything is simultaneously diagonal in the eigenbasis, so the five checks
    reduce to arithmetic over the product spectrum.
    """
    if len(state.systems) != 1:
        raise StateError("typical projector checks take a single-system state")
    d = state.total_dim
    if d**n > PROJECTOR_CAP:
        raise StateError(f"d^n = {d ** n} exceeds the projector cap {PROJECTOR_CAP}")
    p = np.sort(qcore.clamped_eigenvalues(state.matrix))[::-1]
    c = typicality_constant(p)
    entropy_bits = -float(sum(qcore.xlog2x(float(x)) for x in p))

    sequences = np.array(list(itertools.product(range(d), repeat=n)))
    with np.errstate(divide="ignore"):
        log_p = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), -np.inf)
    seq_log_prob = log_p[sequences].sum(axis=1)
    counts = np.stack([(sequences == k).sum(axis=1) for k in range(d)], axis=-1)
    typical = np.all(np.abs(counts / n - p) <= delta + 1e-12, axis=-1)
    typical &= seq_log_prob > -np.inf

    probs = np.where(seq_log_prob > -np.inf, 2.0**seq_log_prob, 0.0)
    mass = float(probs[typical].sum())
    epsilon = max(0.0, 1.0 - mass)

    lo, hi = 2.0 ** (-n * (entropy_bits + c * delta)), 2.0 ** (-n * (entropy_bits - c * delta))
    typ_probs = probs[typical]
    # All member checks are vacuously true for an empty typical set.
    eig_ok = bool(np.all(typ_probs >= lo * (1 - 1e-9)) and np.all(typ_probs <= hi * (1 + 1e-9)))
    card = int(typical.sum())
    card_ok = (1 - epsilon) * 2.0 ** (n * (entropy_bits - c * delta)) * (1 - 1e-9) <= card <= 2.0 ** (
        n * (entropy_bits + c * delta)
    ) * (1 + 1e-9)

    if mass > 0:
        purity = float((typ_probs**2).sum() / mass**2)
        purity_bound = (1 - epsilon) ** -2 * 2.0 ** (-n * (entropy_bits - 3 * c * delta))
    else:
        purity = math.inf
        purity_bound = math.inf
    gentle_lhs = float(probs[~typical].sum())  # || P rho P - rho ||_1 for a diagonal projector
    gentle_rhs = 2.0 * math.sqrt(epsilon)
    hoeffding = 1.0 - 2.0 * d * math.exp(-2.0 * n * delta * delta)
    return ProjectorReport(
        n=n,
        delta=delta,
        epsilon=epsilon,
        mass_ok=mass >= hoeffding - 1e-12,
        eigenvalue_sandwich_ok=eig_ok,
        cardinality_sandwich_ok=bool(card_ok),
        purity_bound_ok=(purity <= purity_bound * (1 + 1e-9)) or math.isinf(purity_bound),
        gentle_ok=gentle_lhs <= gentle_rhs + 1e-12,
        purity=purity,
        purity_bound=purity_bound,
        gentle_lhs=gentle_lhs,
        gentle_rhs=gentle_rhs,
        hoeffding_floor=hoeffding,
    )


def gentle_measurement_defect(rho: np.ndarray, x_op: np.ndarray) -> tuple[float, float]:
    """(|| sqrt(X) rho sqrt(X) - rho ||_1, 2 sqrt(eps)) for eps = 1 - Tr[X rho]."""
    overlap = float(np.real(np.trace(x_op @ rho)))
    eps = max(0.0, 1.0 - overlap)
    root = qcore.psd_sqrt(x_op)
    defect = qcore.trace_norm(root @ rho @ root - rho)
    return defect, 2.0 * math.sqrt(eps)


def projector_union_bound_defect(projectors: Sequence[np.ndarray]) -> float:
    """Smallest eigenvalue of (x)Pi_i - (sum_i Pi_i - (m-1) I) for commuting projectors.

    Non-negative values certify the multi-projector union bound; inputs are the
    FULL-SPACE embeddings (same side), assumed simultaneously diagonalizable.
    """
    product = projectors[0]
    for pi in projectors[1:]:
        product = product @ pi
    total = sum(projectors) - (len(projectors) - 1) * np.eye(projectors[0].shape[0])
    return float(np.min(np.linalg.eigvalsh(product - total)))


def blocking_construction_bounds(
    s1: int,
    delta1: float,
    delta2: float,
    d1: int,
    d2: int,
    entropies: tuple[float, float, float],
) -> dict:
    """Closed-form parameters of the two-stage typical-projection construction.

    ``entropies`` are (S(C1 C2), S(C1), S(C2)) for the underlying mixed state.
    Returns the stage sizes, the trace-distance budget nu, and the exponents of
    the three purity bounds at total length n = s1 * s2.  No simulation: the
    parameter sizes are astronomical by design.
    """
    c = 2.0 * (d1 + d2)
    eps = c * math.exp(-2.0 * s1 * delta1 * delta1)
    ln_c = math.log(c)
    s2 = (s1 * (2.0 * delta1 * delta1 + ln_c) - ln_c) / (2.0 * delta2 * delta2)
    nu = (4.0 + (s1 * (2.0 * delta1 * delta1 + ln_c) - ln_c) / (delta2 * delta2)) * math.sqrt(c) * math.exp(
        -s1 * delta1 * delta1
    )
    s_joint, s_c1, s_c2 = entropies
    n = s1 * s2
    eta = eps - eps * math.log2(eps) if 0 < eps <= 1 / math.e else eps + math.log2(math.e) / math.e
    upsilon = eta * math.log2(d1 * d2) + 3.0 * delta2 / s1
    return {
        "epsilon": eps,
        "s2": s2,
        "n": n,
        "nu": nu,
        "joint_purity_exponent": -(s_joint - upsilon),
        "c1_purity_exponent": -(s_c1 - 3.0 * delta1),
        "c2_purity_exponent": -(s_c2 - 3.0 * delta1),
        "upsilon": upsilon,
    }


def multiparty_typicality_case(report: dict, n: int, entropies: dict[frozenset, float], slack: dict[frozenset, float]) -> dict:
    """Conjectured multiparty typicality predicate, evaluated but never asserted.

    For each subset the question is whether a nearby state could satisfy the
    purity bound 2^{-n(S(T) - slack_T)}; only the m = 2 instance has a proof,
    via the blocking construction above.  Returned for inspection only.
    """
    return {
        tuple(sorted(key)): {
            "target_exponent": -(n * (entropies[key] - slack[key])),
            "proved": len(key) <= 2,
        }
        for key in entropies
    }
