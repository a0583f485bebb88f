"""Interior-point solver for the min-entropy cone program

    minimize  Tr(sigma)  subject to  I_A x sigma >= rho,  sigma >= 0,

a log-barrier Newton method specialized to this constraint structure.  The
Hessian lives on the d_B^2 real parameters of sigma, so each centering step
costs one D x D inversion (D = d_A d_B) plus small tensor contractions; no
general-purpose SDP machinery is involved and the path is fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BARRIER_GROWTH = 20.0
NEWTON_DECREMENT_TOL = 1e-12
MAX_STAGES = 60
MAX_NEWTON_PER_STAGE = 60


class ConeProgramError(RuntimeError):
    """Solver failed to reach the requested duality gap."""


@dataclass(frozen=True)
class ConeSolution:
    optimum: float
    sigma: np.ndarray
    newton_steps: int
    gap_bound: float


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis: diagonal units, then real/imag pair modes."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1 / math.sqrt(2)
            basis.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[i, j] = -1j / math.sqrt(2)
            f[j, i] = 1j / math.sqrt(2)
            basis.append(f)
    return np.array(basis)


def _is_pd(matrix: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(matrix)
        return True
    except np.linalg.LinAlgError:
        return False


def solve_min_trace(rho: np.ndarray, d_a: int, d_b: int, rel_tol: float = 1e-9) -> ConeSolution:
    """Minimize Tr(sigma) over Hermitian sigma with I_{d_a} x sigma >= rho >= 0."""
    if d_b == 1:
        opt = float(np.max(np.linalg.eigvalsh(rho)))
        return ConeSolution(optimum=opt, sigma=np.array([[opt + 0j]]), newton_steps=0, gap_bound=0.0)

    basis = hermitian_basis(d_b)
    trace_vec = np.array([float(np.real(np.trace(h))) for h in basis])
    lam_max = float(np.max(np.linalg.eigvalsh(rho)))
    scale = max(lam_max, 1e-18)
    sigma = scale * 1.1 * np.eye(d_b, dtype=complex)
    nu = d_a * d_b + d_b  # combined barrier degree; the gap bound is nu / t
    t = nu / float(np.real(np.trace(sigma)))
    eye_a = np.eye(d_a)

    def barrier_value(sig: np.ndarray, tt: float) -> float:
        m = np.kron(eye_a, sig) - rho
        if not (_is_pd(m) and _is_pd(sig)):
            return np.inf
        return tt * float(np.real(np.trace(sig))) - np.linalg.slogdet(m)[1] - np.linalg.slogdet(sig)[1]

    steps = 0
    for _ in range(MAX_STAGES):
        for _ in range(MAX_NEWTON_PER_STAGE):
            m = np.kron(eye_a, sigma) - rho
            m_inv = np.linalg.inv(m)
            s_inv = np.linalg.inv(sigma)
            t4 = m_inv.reshape(d_a, d_b, d_a, d_b)
            partial = np.einsum("abad->bd", t4) + s_inv
            grad = t * trace_vec - np.real(np.einsum("kij,ji->k", basis, partial))
            kernel = np.einsum("aibj,bkal->ijkl", t4, t4) + np.einsum("ij,kl->ijkl", s_inv, s_inv)
            hess = np.real(np.einsum("ijkl,mjk,nli->mn", kernel, basis, basis, optimize=True))
            hess = (hess + hess.T) / 2.0
            step_dir, decrement = _newton_direction(hess, grad)
            if decrement / 2.0 < NEWTON_DECREMENT_TOL:
                break
            step = np.tensordot(step_dir, basis, axes=(0, 0))
            f0 = barrier_value(sigma, t)
            alpha = 1.0
            while alpha > 1e-14:
                if barrier_value(sigma + alpha * step, t) < f0 - 0.25 * alpha * decrement:
                    break
                alpha *= 0.5
            if alpha <= 1e-14:
                break
            sigma = sigma + alpha * step
            steps += 1
        trace = float(np.real(np.trace(sigma)))
        if nu / t <= rel_tol * max(trace, 1e-18):
            return ConeSolution(optimum=trace, sigma=sigma, newton_steps=steps, gap_bound=nu / t)
        t *= BARRIER_GROWTH
    raise ConeProgramError(f"barrier method stalled after {steps} Newton steps (gap bound {nu / t:.3e})")


def _newton_direction(hess: np.ndarray, grad: np.ndarray) -> tuple[np.ndarray, float]:
    """Regularize until the solve yields a descent direction."""
    reg = 0.0
    for _ in range(10):
        try:
            direction = np.linalg.solve(hess + reg * np.eye(hess.shape[0]), -grad)
        except np.linalg.LinAlgError:
            reg = 1e-10 if reg == 0.0 else reg * 10.0
            continue
        decrement = float(-grad @ direction)
        if decrement >= 0.0:
            return direction, decrement
        reg = 1e-10 if reg == 0.0 else reg * 10.0
    return -grad, float(grad @ grad)
