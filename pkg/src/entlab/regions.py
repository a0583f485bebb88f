"""Rate and entanglement-cost regions: subset-sum constraint generation,
membership tests, min-cut search, and the one-shot cost formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import entropy, qcore
from .qcore import LabeledState, StateError

MAX_REGION_PARTIES = 16
MAX_COST_PARTIES = 12
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class RegionSpec:
    """Linear subset-sum constraints sum_{i in mask} x_i >= rhs over the parties."""

    parties: tuple[str, ...]
    constraints: tuple[tuple[int, float], ...]
    kind: str

    def rhs_of(self, labels: Iterable[str]) -> float:
        mask = self.mask_of(labels)
        for m, rhs in self.constraints:
            if m == mask:
                return rhs
        raise KeyError(f"no constraint for subset {sorted(labels)!r}")

    def mask_of(self, labels: Iterable[str]) -> int:
        mask = 0
        for name in labels:
            mask |= 1 << self.parties.index(name)
        return mask

    def subset_labels(self, mask: int) -> tuple[str, ...]:
        return tuple(p for i, p in enumerate(self.parties) if mask >> i & 1)


@dataclass(frozen=True)
class CostVector:
    values: tuple[float, ...]


@dataclass(frozen=True)
class MembershipVerdict:
    verdict: str  # inside | boundary | outside
    violated: tuple[int, ...]
    tight: tuple[int, ...]
    slacks: dict[int, float] = field(default_factory=dict)


def _nonempty_masks(m: int):
    return range(1, 1 << m)


def _mask_labels(parties: Sequence[str], mask: int) -> list[str]:
    return [p for i, p in enumerate(parties) if mask >> i & 1]


def merging_rate_region(
    state: LabeledState,
    senders: Sequence[str],
    receiver_side: Sequence[str] = (),
) -> RegionSpec:
    """Asymptotic merging region: sum_{i in T} R_i >= S(T | T-bar, B) for all non-empty T."""
    senders = tuple(senders)
    if len(senders) > MAX_REGION_PARTIES:
        raise StateError(f"at most {MAX_REGION_PARTIES} senders supported")
    if set(senders) & set(receiver_side):
        raise qcore.LabelError("senders overlap the receiver side")
    constraints = []
    for mask in _nonempty_masks(len(senders)):
        t = _mask_labels(senders, mask)
        rest = [p for p in senders if p not in t] + list(receiver_side)
        if rest:
            rhs = entropy.conditional_entropy(state, t, rest)
        else:
            rhs = entropy.von_neumann(state, t)
        constraints.append((mask, rhs))
    return RegionSpec(parties=senders, constraints=tuple(constraints), kind="asymptotic_merge")


def split_transfer_region(
    state: LabeledState,
    t_side: Sequence[str],
    tbar_side: Sequence[str],
    a_labels: Sequence[str],
    b_labels: Sequence[str],
) -> tuple[RegionSpec, RegionSpec]:
    """Split-transfer regions: X <= T against A, Y <= T-bar against B.

    Cuts with conditional entropy exactly zero are flagged in the returned
    region kinds ("...:zero-cut") since negative rates then fail to exist.
    """
    if set(t_side) & set(tbar_side):
        raise StateError("cuts must partition the senders")

    def build(cut: Sequence[str], receiver: Sequence[str], tag: str) -> RegionSpec:
        cut = tuple(cut)
        constraints = []
        has_zero = False
        for mask in _nonempty_masks(len(cut)):
            x = _mask_labels(cut, mask)
            given = [p for p in cut if p not in x] + list(receiver)
            rhs = entropy.conditional_entropy(state, x, given) if given else entropy.von_neumann(state, x)
            if abs(rhs) <= BOUNDARY_TOL:
                has_zero = True
            constraints.append((mask, rhs))
        kind = f"split_transfer:{tag}" + (":zero-cut" if has_zero else "")
        return RegionSpec(parties=cut, constraints=tuple(constraints), kind=kind)

    empty = RegionSpec(parties=(), constraints=(), kind="split_transfer:empty")
    region_t = build(t_side, a_labels, "T") if t_side else empty
    region_tbar = build(tbar_side, b_labels, "Tbar") if tbar_side else empty
    return region_t, region_tbar


def one_shot_cost_rhs(hmin_bits: float, eps: float, m: int) -> float:
    """Cost threshold -H_min + 4 log2(1/eps) + 2m + 8 for one simultaneous-merge subset."""
    return -hmin_bits + 4.0 * math.log2(1.0 / eps) + 2.0 * m + 8.0


def one_shot_cost_region(
    state: LabeledState,
    senders: Sequence[str],
    reference: Sequence[str],
    eps: float,
) -> RegionSpec:
    """One-shot simultaneous-merging cost region over all non-empty sender subsets."""
    senders = tuple(senders)
    if len(senders) > MAX_COST_PARTIES:
        raise StateError(f"at most {MAX_COST_PARTIES} senders supported for cost regions")
    sigma = qcore.partial_trace(state, reference)
    m = len(senders)
    constraints = []
    for mask in _nonempty_masks(m):
        t = _mask_labels(senders, mask)
        joint = qcore.partial_trace(state, t + list(reference))
        hmin = entropy.min_entropy_relative(joint, sigma)
        constraints.append((mask, one_shot_cost_rhs(hmin, eps, m)))
    return RegionSpec(parties=senders, constraints=tuple(constraints), kind="one_shot_cost")


def analytic_cost_region(parties: Sequence[str], hmin_by_subset: dict[frozenset, float], eps: float) -> RegionSpec:
    """One-shot cost region from externally supplied min-entropy values.

    Used where the underlying state is too large to instantiate but its subset
    min-entropies have exact closed forms.
    """
    parties = tuple(parties)
    m = len(parties)
    constraints = []
    for mask in _nonempty_masks(m):
        key = frozenset(_mask_labels(parties, mask))
        constraints.append((mask, one_shot_cost_rhs(hmin_by_subset[key], eps, m)))
    return RegionSpec(parties=parties, constraints=tuple(constraints), kind="one_shot_cost")


@dataclass(frozen=True)
class SequentialCostEntry:
    """Cost bracket for one sender in a fixed-ordering sequential protocol.

    ``rhs_unsmoothed`` uses the exact unsmoothed conditional min-entropy (an
    upper bound on the true requirement); ``rhs_renes`` replaces the smoothed
    min-entropy by its plug-in upper bound, giving a certified lower bound on
    any achievable cost.
    """

    label: str
    relative_reference: tuple[str, ...]
    hmin_exact: float
    renes_upper: float
    rhs_unsmoothed: float
    rhs_renes: float


def sequential_cost_rhs(hmin_bits: float, eps: float, m: int) -> float:
    """Per-sender threshold -H_min + 4 log2(2m/eps) + 2 log2(13)."""
    return -hmin_bits + 4.0 * math.log2(2.0 * m / eps) + 2.0 * math.log2(13.0)


def sequential_cost(state: LabeledState, ordering: Sequence[str], reference: Sequence[str], eps: float) -> list[SequentialCostEntry]:
    """Sequential one-at-a-time merging costs for a sender ordering.

    The smoothing parameter is eps^2 / (52 m^2); the Renes plug-in uses the
    sender's own dimension, as in the worked cost comparisons.
    """
    m = len(ordering)
    delta = eps * eps / (52.0 * m * m)
    entries = []
    for pos, label in enumerate(ordering):
        rel_ref = tuple(ordering[pos + 1 :]) + tuple(reference)
        joint = qcore.partial_trace(state, [label] + list(rel_ref))
        hmin_exact = entropy.conditional_min_entropy(joint, rel_ref).hmin_bits
        s_cond = entropy.conditional_entropy(state, [label], rel_ref)
        renes = entropy.renes_smoothing_bound(s_cond, state.dim_of(label), delta, eps)
        entries.append(
            SequentialCostEntry(
                label=label,
                relative_reference=rel_ref,
                hmin_exact=hmin_exact,
                renes_upper=renes,
                rhs_unsmoothed=sequential_cost_rhs(hmin_exact, eps, m),
                rhs_renes=sequential_cost_rhs(renes, eps, m),
            )
        )
    return entries


def region_membership(region: RegionSpec, point: CostVector | Sequence[float]) -> MembershipVerdict:
    """Classify a point against all constraints (equality within 1e-9).

    The region is closed, so a point satisfying every constraint is ``inside``
    even when some hold with equality.  An infeasible point pinned on at least
    two active constraint hyperplanes reports ``boundary`` (the corner-point
    case); any other infeasible point is ``outside``.  The violated and tight
    constraint masks are always returned alongside the verdict.
    """
    values = point.values if isinstance(point, CostVector) else tuple(point)
    if len(values) != len(region.parties):
        raise StateError(f"point length {len(values)} mismatches {len(region.parties)} parties")
    violated = []
    tight = []
    slacks = {}
    for mask, rhs in region.constraints:
        total = sum(v for i, v in enumerate(values) if mask >> i & 1)
        slack = total - rhs
        slacks[mask] = slack
        if slack < -BOUNDARY_TOL:
            violated.append(mask)
        elif slack <= BOUNDARY_TOL:
            tight.append(mask)
    if not violated:
        verdict = "inside"
    elif len(tight) >= 2:
        verdict = "boundary"
    else:
        verdict = "outside"
    return MembershipVerdict(verdict=verdict, violated=tuple(violated), tight=tuple(tight), slacks=slacks)


# ---------------------------------------------------------------------------
# Min-cut search
# ---------------------------------------------------------------------------


def min_over_cuts(
    helpers: Sequence[str],
    value_of_cut: Callable[[tuple[str, ...]], float],
) -> tuple[float, tuple[str, ...]]:
    """Minimize over all 2^m helper subsets; ties broken by cardinality then lexicographically."""
    helpers = tuple(helpers)
    if len(helpers) > 20:
        raise StateError("at most 20 helpers supported")
    best_value = math.inf
    best_cut: tuple[str, ...] = ()
    masks = sorted(range(1 << len(helpers)), key=lambda m: (bin(m).count("1"), _mask_labels(helpers, m)))
    for mask in masks:
        cut = tuple(_mask_labels(helpers, mask))
        value = value_of_cut(cut)
        if value < best_value - BOUNDARY_TOL:
            best_value = value
            best_cut = cut
    return best_value, best_cut


def min_cut_entanglement(
    state: LabeledState,
    a_labels: Sequence[str],
    b_labels: Sequence[str],
    helpers: Sequence[str],
) -> tuple[float, tuple[str, ...]]:
    """min over cuts T of S(A, T): the optimal assisted EPR rate for pure states."""
    qcore._normalize_labels(state, list(a_labels) + list(b_labels) + list(helpers))
    return min_over_cuts(helpers, lambda cut: entropy.von_neumann(state, list(a_labels) + list(cut)))


def min_cut_entanglement_oracle(
    entropy_of: Callable[[frozenset], float],
    a_labels: Sequence[str],
    helpers: Sequence[str],
) -> tuple[float, tuple[str, ...]]:
    """Min-cut search against an external entropy oracle (for states past the dim cap)."""
    return min_over_cuts(helpers, lambda cut: entropy_of(frozenset(list(a_labels) + list(cut))))


# ---------------------------------------------------------------------------
# Worked one-shot comparison (distributed compression, three senders)
# ---------------------------------------------------------------------------


def compression_example_hmin(log2_d: float, log2_lambda1: float) -> dict[frozenset, float]:
    """Exact subset min-entropies for the two-pairs-plus-theta family.

    H_min for the C1/C2 cost-relevant subsets reduces by additivity to
    log d, log d - log lambda1, and -log lambda1.
    """
    return {
        frozenset({"C1"}): log2_d,
        frozenset({"C2"}): log2_d - log2_lambda1,
        frozenset({"C1", "C2"}): -log2_lambda1,
    }


def compression_example_negative_pair(log2_d: float, eps: float, theta_exponent: float | None = None) -> dict:
    """Whether the simultaneous-merge region admits E1 < 0 and E2 < 0.

    ``theta_exponent`` is the log-size of the theta pair relative to log d
    (default eps, the scaling that makes the sum constraint shrink with d).
    Returns the three analytic thresholds and the feasibility verdict; m = 3
    senders enter the constants even though only the (E1, E2) face is tested.
    """
    expo = eps if theta_exponent is None else theta_exponent
    log2_lambda1 = -expo * log2_d
    hmin = compression_example_hmin(log2_d, log2_lambda1)
    m = 3
    rhs1 = one_shot_cost_rhs(hmin[frozenset({"C1"})], eps, m)
    rhs2 = one_shot_cost_rhs(hmin[frozenset({"C2"})], eps, m)
    rhs12 = one_shot_cost_rhs(hmin[frozenset({"C1", "C2"})], eps, m)
    return {
        "rhs": {"C1": rhs1, "C2": rhs2, "C1C2": rhs12},
        "admits_negative_pair": rhs1 < 0 and rhs2 < 0 and rhs12 < 0,
        "log2_d_threshold": (4.0 * math.log2(1.0 / eps) + 2.0 * m + 8.0) / expo,
    }


def compression_example_sequential_bounds(log2_d: float, eps: float) -> dict:
    """Certified lower bounds on the first-mover costs of the two sequential orderings.

    Ordering (C3, C2, C1): the C2 cost is bounded via the smoothing plug-in;
    ordering (C3, C1, C2): the C1 cost via the max-entropy truncation bound.
    Both use smoothing parameter delta = eps^2 / 468 (m = 3).
    """
    m = 3
    delta = eps * eps / (52.0 * m * m)
    consts = 4.0 * math.log2(2.0 * m / eps) + 2.0 * math.log2(13.0)
    # Renes route: S(C2|C1 R) = (-1 + eps) log d for the theta of size d^eps.
    s_cond = (-1.0 + eps) * log2_d
    renes_upper = s_cond + 8.0 * delta * (eps + 1.0) * log2_d + 2.0 * qcore.binary_entropy(2.0 * delta)
    e2_bound = -renes_upper + consts
    e2_printed = (1.0 - 4.0 * eps * eps / 117.0 - eps) * log2_d + 4.0 * math.log2(6.0 / eps) + 5.0
    # Max-entropy truncation route on the maximally mixed d-level marginal.
    e1_bound = log2_d + 4.0 * math.log2(6.0 / eps) + 5.0
    return {
        "first_mover_c2": e2_bound,
        "first_mover_c2_printed": e2_printed,
        "first_mover_c1": e1_bound,
        "delta": delta,
    }


def corner_points(region: RegionSpec) -> dict[str, tuple[float, ...]]:
    """Sequential-ordering corner points of a region over all party orderings."""
    import itertools

    out = {}
    m = len(region.parties)
    for order in itertools.permutations(range(m)):
        values = [0.0] * m
        merged_mask = 0
        for i in order:
            # Tightest remaining constraint involving party i given the merged set.
            needed = -math.inf
            for mask, rhs in region.constraints:
                if mask >> i & 1 and (mask & ~(merged_mask | 1 << i)) == 0:
                    base = sum(values[j] for j in range(m) if mask >> j & 1 and j != i)
                    needed = max(needed, rhs - base)
            values[i] = needed
            merged_mask |= 1 << i
        out[",".join(region.parties[i] for i in order)] = tuple(values)
    return out
