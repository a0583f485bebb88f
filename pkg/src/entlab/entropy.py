"""Entropic quantities: the von Neumann family, one-shot min/max/collision
entropies, and the closed-form smoothing bounds used by the cost analyses.

All values are in bits (base-2 logarithms, 0 log 0 = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qcore
from .qcore import LabeledState, StateError

SUPPORT_TOL = 1e-12
FEASIBILITY_TOL = 1e-8
RESIDUAL_TOL = 1e-7


class SupportError(StateError):
    """Conditioning operator is rank-deficient on the support of the marginal."""


def von_neumann(state: LabeledState, part: Iterable[str] | str | None = None) -> float:
    """Von Neumann entropy of the reduced operator on ``part`` (whole state if None)."""
    reduced = state if part is None else qcore.partial_trace(state, part)
    eigs = qcore.clamped_eigenvalues(reduced.matrix)
    return -float(sum(qcore.xlog2x(float(x)) for x in eigs))


def conditional_entropy(state: LabeledState, part: Iterable[str] | str, given: Iterable[str] | str) -> float:
    """S(part | given) = S(part, given) - S(given); may be negative."""
    part_labels = qcore._normalize_labels(state, part)
    given_labels = qcore._normalize_labels(state, given)
    if set(part_labels) & set(given_labels):
        raise qcore.LabelError("conditional entropy needs disjoint label sets")
    joint = set(part_labels) | set(given_labels)
    return von_neumann(state, joint) - von_neumann(state, given_labels)


def coherent_information(state: LabeledState, frm: Iterable[str] | str, to: Iterable[str] | str) -> float:
    """I(frm > to) = S(to) - S(frm, to)."""
    return -conditional_entropy(state, frm, to)


def mutual_information(state: LabeledState, a: Iterable[str] | str, b: Iterable[str] | str) -> float:
    a_labels = qcore._normalize_labels(state, a)
    b_labels = qcore._normalize_labels(state, b)
    if set(a_labels) & set(b_labels):
        raise qcore.LabelError("mutual information needs disjoint label sets")
    return von_neumann(state, a_labels) + von_neumann(state, b_labels) - von_neumann(state, set(a_labels) | set(b_labels))


def zero_entropy(state: LabeledState, part: Iterable[str] | str | None = None) -> float:
    """H_0: log2 of the rank of the reduced operator."""
    reduced = state if part is None else qcore.partial_trace(state, part)
    eigs = np.linalg.eigvalsh(reduced.matrix)
    return math.log2(int(np.sum(eigs > 1e-10)))


@dataclass(frozen=True)
class EntropyReport:
    """Entropies of one state for one (T | U) bipartition."""

    entropy: float
    cond: dict[str, float]
    coherent: dict[str, float]
    mutual: dict[str, float]
    hmin_rel: float | None = None
    h2_rel: float | None = None
    hmax_cond: float | None = None
    h0: float | None = None


def entropy_report(
    state: LabeledState,
    left: Sequence[str],
    right: Sequence[str],
    one_shot: bool = False,
) -> EntropyReport:
    """Von Neumann family for the (left | right) split, plus one-shot values on request."""
    t = "".join(left)
    u = "".join(right)
    cond = {
        f"{t}|{u}": conditional_entropy(state, left, right),
        f"{u}|{t}": conditional_entropy(state, right, left),
    }
    coherent = {f"{t}>{u}": -cond[f"{t}|{u}"], f"{u}>{t}": -cond[f"{u}|{t}"]}
    mutual = {f"{t};{u}": mutual_information(state, left, right)}
    hmin_rel = h2_rel = hmax_cond = h0 = None
    if one_shot:
        sigma = qcore.partial_trace(state, right)
        joint = qcore.partial_trace(state, list(left) + list(right))
        hmin_rel = min_entropy_relative(joint, sigma)
        h2_rel = collision_entropy(joint, sigma)
        hmax_cond = conditional_max_entropy(joint, right)
        h0 = zero_entropy(state, left)
    return EntropyReport(
        entropy=von_neumann(state),
        cond=cond,
        coherent=coherent,
        mutual=mutual,
        hmin_rel=hmin_rel,
        h2_rel=h2_rel,
        hmax_cond=hmax_cond,
        h0=h0,
    )


# ---------------------------------------------------------------------------
# One-shot entropies
# ---------------------------------------------------------------------------


def _split_conditioning(rho: LabeledState, cond: Iterable[str] | str) -> tuple[LabeledState, tuple[str, ...], tuple[str, ...]]:
    """Permute ``rho`` so the conditioning systems sit last; return (state, a, b)."""
    b_labels = qcore._normalize_labels(rho, cond)
    a_labels = tuple(name for name in rho.labels if name not in b_labels)
    if not a_labels:
        raise qcore.LabelError("conditioning set covers the whole state")
    return qcore.permute_systems(rho, list(a_labels) + list(b_labels)), a_labels, b_labels


def _conditioner_roots(sigma: np.ndarray, power: float) -> tuple[np.ndarray, np.ndarray]:
    """(sigma^power on its support, kernel projector)."""
    eigs, vecs = np.linalg.eigh(sigma)
    support = eigs > SUPPORT_TOL
    inv = np.zeros_like(eigs)
    inv[support] = eigs[support] ** power
    root = (vecs * inv) @ vecs.conj().T
    kernel = (vecs * (~support)) @ vecs.conj().T
    return root, kernel


def _check_support(rho_b: np.ndarray, kernel: np.ndarray) -> None:
    leak = float(np.real(np.trace(kernel @ rho_b @ kernel)))
    if leak > 1e-10:
        raise SupportError(f"marginal leaks weight {leak:.3e} outside the conditioning support")


def min_entropy_relative(rho: LabeledState, sigma: LabeledState) -> float:
    """H_min(rho^{AB} | sigma^B): -log2 of the least lambda with lambda(I x sigma) >= rho.

    Computed as the top eigenvalue of rho conjugated by (I x sigma^{-1/2}) on the
    support of sigma; weight outside the support raises SupportError.
    """
    arranged, a_labels, b_labels = _split_conditioning(rho, sigma.labels)
    d_a = int(np.prod([arranged.dim_of(x) for x in a_labels]))
    sigma_m = qcore.permute_systems(sigma, b_labels).matrix
    inv_root, kernel = _conditioner_roots(sigma_m, -0.5)
    rho_b = qcore.partial_trace(arranged, b_labels).matrix
    _check_support(rho_b, kernel)
    conj = np.kron(np.eye(d_a), inv_root)
    m = conj @ arranged.matrix @ conj
    lam = float(np.max(qcore.clamped_eigenvalues(m)))
    return -math.log2(lam)


def min_entropy_unconditioned(rho: LabeledState) -> float:
    """H_min(rho) = -log2 of the largest eigenvalue."""
    return -math.log2(float(np.max(qcore.clamped_eigenvalues(rho.matrix))))


def collision_entropy(rho: LabeledState, sigma: LabeledState) -> float:
    """H_2(rho^{AB} | sigma^B) = -log2 Tr[((I x sigma^{-1/4}) rho (I x sigma^{-1/4}))^2]."""
    arranged, a_labels, b_labels = _split_conditioning(rho, sigma.labels)
    d_a = int(np.prod([arranged.dim_of(x) for x in a_labels]))
    sigma_m = qcore.permute_systems(sigma, b_labels).matrix
    inv_quarter, kernel = _conditioner_roots(sigma_m, -0.25)
    rho_b = qcore.partial_trace(arranged, b_labels).matrix
    _check_support(rho_b, kernel)
    conj = np.kron(np.eye(d_a), inv_quarter)
    tilde = conj @ arranged.matrix @ conj
    return -math.log2(float(np.real(np.trace(tilde @ tilde))))


@dataclass(frozen=True)
class ConeProgramResult:
    """Solution of min Tr(sigma) subject to I_A x sigma >= rho, sigma >= 0."""

    optimum: float
    certificate: np.ndarray
    iterations: int
    residual: float

    @property
    def hmin_bits(self) -> float:
        return -math.log2(self.optimum)


def conditional_min_entropy(rho: LabeledState, cond: Iterable[str] | str) -> ConeProgramResult:
    """H_min(A|B) for B = ``cond``, via the trace-minimization cone program.

    The conditioning system is first reduced to the support of its marginal
    (the optimizer never places weight outside it), then the barrier solver of
    :mod:`entlab.coneprog` runs there.  The certificate is the normalized
    optimizer; its feasibility and its agreement with the relative min-entropy
    are re-verified before returning.
    """
    from . import coneprog

    arranged, a_labels, b_labels = _split_conditioning(rho, cond)
    d_a = int(np.prod([arranged.dim_of(x) for x in a_labels]))
    d_b = arranged.total_dim // d_a
    rho_m = np.asarray(arranged.matrix)

    marginal_b = qcore.partial_trace(arranged, b_labels).matrix
    eigs, vecs = np.linalg.eigh(marginal_b)
    support = vecs[:, eigs > SUPPORT_TOL]
    r = support.shape[1]
    isometry = np.kron(np.eye(d_a), support)
    reduced = isometry.conj().T @ rho_m @ isometry

    solution = coneprog.solve_min_trace(reduced, d_a, r, rel_tol=1e-10)
    sig = support @ solution.sigma @ support.conj().T
    sig = (sig + sig.conj().T) / 2.0

    slack = np.kron(np.eye(d_a), sig) - rho_m
    infeasibility = max(0.0, -float(np.min(np.linalg.eigvalsh(slack))))
    if infeasibility > 0.0:
        # The interior path stays feasible up to roundoff; absorb it exactly.
        sig = sig + infeasibility * np.eye(d_b)
    if infeasibility > FEASIBILITY_TOL:
        raise StateError(f"cone program certificate infeasible by {infeasibility:.3e}")
    optimum = float(np.real(np.trace(sig)))
    certificate = sig / optimum

    cert_state = qcore.make_state([(name, arranged.dim_of(name)) for name in b_labels], certificate)
    cross = 2.0 ** (-min_entropy_relative(arranged, cert_state))
    residual = abs(optimum - cross)
    if residual > RESIDUAL_TOL * max(1.0, optimum):
        raise StateError(f"cone program residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    return ConeProgramResult(
        optimum=optimum,
        certificate=certificate,
        iterations=solution.newton_steps,
        residual=residual,
    )


def conditional_min_entropy_bits(rho: LabeledState, cond: Iterable[str] | str) -> float:
    return conditional_min_entropy(rho, cond).hmin_bits


def max_entropy_unconditioned(rho: LabeledState) -> float:
    """H_max(rho) = 2 log2 sum_i sqrt(lambda_i)."""
    eigs = np.clip(np.linalg.eigvalsh(rho.matrix), 0.0, None)
    return 2.0 * math.log2(float(np.sum(np.sqrt(eigs))))


def conditional_max_entropy(rho: LabeledState, cond: Iterable[str] | str) -> float:
    """H_max(A|B) via duality: -H_min(A|R) on the A,R marginal of a purification."""
    b_labels = qcore._normalize_labels(rho, cond)
    if not b_labels:
        return max_entropy_unconditioned(rho)
    a_labels = [x for x in rho.labels if x not in b_labels]
    purified = qcore.purify(rho, ref_label="_hmaxR")
    marginal_ar = qcore.partial_trace(purified, a_labels + ["_hmaxR"])
    return -conditional_min_entropy(marginal_ar, ["_hmaxR"]).hmin_bits


def max_entropy_fidelity_search(rho: LabeledState, cond: Iterable[str] | str, restarts: int = 6, seed: int = 11) -> float:
    """Direct maximization of log2 F^2(rho^{AB}, I x sigma^B); small dims only.

    Serves as the independent cross-check for the duality route.
    """
    from scipy.optimize import minimize

    arranged, a_labels, b_labels = _split_conditioning(rho, cond)
    d_a = int(np.prod([arranged.dim_of(x) for x in a_labels]))
    d_b = arranged.total_dim // d_a
    rho_m = arranged.matrix
    n_params = d_b * d_b

    def sigma_of(params: np.ndarray) -> np.ndarray:
        tril = np.zeros((d_b, d_b), dtype=complex)
        idx = np.tril_indices(d_b)
        half = len(idx[0])
        tril[idx] = params[:half]
        strict = np.tril_indices(d_b, -1)
        tril[strict] += 1j * params[half : half + len(strict[0])]
        m = tril @ tril.conj().T
        tr = np.real(np.trace(m))
        return m / tr if tr > 0 else np.eye(d_b) / d_b

    def objective(params: np.ndarray) -> float:
        sig = sigma_of(params)
        return -qcore.fidelity_ops(rho_m, np.kron(np.eye(d_a), sig))

    rng = np.random.default_rng(seed)
    best = -np.inf
    for _ in range(restarts):
        x0 = rng.standard_normal(n_params)
        res = minimize(objective, x0, method="Nelder-Mead", options={"maxiter": 4000, "fatol": 1e-12, "xatol": 1e-9})
        best = max(best, -res.fun)
    return 2.0 * math.log2(best)


# ---------------------------------------------------------------------------
# Closed-form smoothing bounds
# ---------------------------------------------------------------------------


def smooth_max_lower_bound(spectrum: Sequence[float], eps: float) -> float:
    """Truncation lower bound 2 log2 min{sum_{j<k} sqrt(r_j) : tail(k) <= 2 eps}.

    The spectrum must be non-increasing with total weight at most 1.  When the
    tail condition already holds at k = 1 the sum is empty and -inf is returned.
    """
    r = np.asarray(spectrum, dtype=float)
    if np.any(np.diff(r) > 1e-12):
        raise StateError("spectrum must be non-increasing")
    if r.sum() > 1.0 + 1e-10:
        raise StateError("spectrum weight exceeds 1")
    if not 0.0 <= eps < 0.5:
        raise StateError("eps must lie in [0, 1/2)")
    d = r.size
    tails = np.concatenate([np.cumsum(r[::-1])[::-1], [0.0]])  # tails[k] = sum_{j >= k}, 0-based
    # Smallest k (1-based) whose tail sum_{j=k+1..d} is within 2 eps.
    k = next((k for k in range(1, d + 1) if tails[k] <= 2.0 * eps + 1e-15), d)
    head = float(np.sum(np.sqrt(r[: k - 1])))
    if head <= 0.0:
        return float("-inf")
    return 2.0 * math.log2(head)


def fannes_bound(d: int, eps: float) -> float:
    """eta(eps) * log2(d) with eta(x) = x - x log2 x below 1/e, else x + log2(e)/e."""
    if eps < 0:
        raise StateError("eps must be non-negative")
    if eps == 0.0:
        return 0.0
    if eps <= 1.0 / math.e:
        eta = eps - eps * math.log2(eps)
    else:
        eta = eps + math.log2(math.e) / math.e
    return eta * math.log2(d)


def renes_smoothing_bound(s_cond: float, d: int, delta: float, eps: float) -> float:
    """Plug-in upper bound on the smoothed min-entropy:
    S_cond + 8 delta (eps + 1) log2(d) + 2 h2(2 delta)."""
    if not 0.0 <= delta < 0.25:
        raise StateError("delta must lie in [0, 1/4)")
    return s_cond + 8.0 * delta * (eps + 1.0) * math.log2(d) + 2.0 * qcore.binary_entropy(2.0 * delta)
