"""Blind recovery of channel taps from the received-signal ACF.

The receive-side ACF at integer lags 0..M is a quadratic function of the
unknown echo taps alpha_1..alpha_M (the main tap is pinned to 1) plus the
noise variance, which enters lag 0 only.  That gives M+1 equations in
M+1 unknowns; a damped Gauss-Newton (Levenberg-Marquardt) iteration with
the analytic Jacobian solves it.  Problem sizes are tiny (M of order 10),
so everything is dense numpy.

The equations pin down the autocorrelation of the tap sequence, whose
factorisation into taps is unique only up to the usual spectral
ambiguity.  Within the damped-attenuation operating regime (decay rates
of roughly 0.3 and up) the physical strongly-decaying tap vector is the
factor the linearised seed converges to; with near-unit echoes other
exact factorisations exist and the solver may legitimately return one of
them (converged, zero residual, different taps).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acf import AcfEstimate

__all__ = [
    "IdentificationProblem",
    "SolverOptions",
    "EstimationResult",
    "build_residuals",
    "residual_jacobian",
    "solve_channel",
    "detect_paths",
    "mse",
]


@dataclass(frozen=True)
class IdentificationProblem:
    """Inputs of the tap-recovery system.

    r_rr       measured (or exact) received ACF at lags 0..max_delay
    r_xx       known transmit ACF at lags 0..2*max_delay; the quadratic
               expansion references lag sums up to twice the delay span
    max_delay  number of candidate echo taps M
    """

    r_rr: AcfEstimate
    r_xx: np.ndarray
    max_delay: int

    def __post_init__(self):
        rxx = np.asarray(self.r_xx, dtype=float)
        m = self.max_delay
        if self.r_rr.max_lag != m:
            raise ValueError(f"r_rr must cover lags 0..{m}")
        if rxx.ndim != 1 or rxx.size < 2 * m + 1:
            raise ValueError(f"r_xx must cover lags 0..{2 * m}")
        if not np.all(np.isfinite(rxx)):
            raise ValueError("r_xx must be finite")
        object.__setattr__(self, "r_xx", rxx)


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-10          # residual 2-norm declaring convergence
    step_tol: float = 1e-12     # step 2-norm below which iteration stops
    max_iter: int = 200
    damping0: float = 1e-3


@dataclass(frozen=True)
class EstimationResult:
    """Solver output: echo taps, noise variance, and diagnostics."""

    alpha_hat: np.ndarray
    noise_var_hat: float
    residual_norm: float
    iterations: int
    converged: bool

    def __post_init__(self):
        arr = np.asarray(self.alpha_hat, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("estimated taps must be finite")
        object.__setattr__(self, "alpha_hat", arr)


def _tap_correlation(alpha_full: np.ndarray) -> np.ndarray:
    """c[d] = sum_i a_i a_{i+d} for d = 0..M, with a_0 = 1 prepended."""
    m1 = alpha_full.size
    return np.array([np.dot(alpha_full[: m1 - d], alpha_full[d:]) for d in range(m1)])


def build_residuals(alpha: np.ndarray, noise_var: float, prob: IdentificationProblem) -> np.ndarray:
    """Model-minus-measurement residual of each lag equation.

    Entry k is the quadratic expansion of the received ACF at lag k,
    evaluated at (alpha, noise_var) with the conventions a_0 = 1 and
    a_j = 0 beyond max_delay, minus r_rr[k].
    """
    m = prob.max_delay
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (m,):
        raise ValueError(f"alpha must have shape ({m},)")
    a = np.concatenate(([1.0], alpha))
    c = _tap_correlation(a)
    rxx = prob.r_xx
    k = np.arange(m + 1)
    model = c[0] * rxx[k]
    for d in range(1, m + 1):
        model += c[d] * (rxx[np.abs(k - d)] + rxx[k + d])
    model[0] += noise_var
    return model - prob.r_rr.values


def residual_jacobian(alpha: np.ndarray, noise_var: float, prob: IdentificationProblem) -> np.ndarray:
    """Exact partials of the residuals w.r.t. (alpha_1..alpha_M, noise_var).

    The equations are quadratic in the taps, so every entry is linear in
    alpha; the noise-variance column is the unit vector at lag 0.
    """
    m = prob.max_delay
    alpha = np.asarray(alpha, dtype=float)
    a = np.concatenate(([1.0], alpha))
    rxx = prob.r_xx
    # derivative of sum_{i,b} a_i a_b rxx[|k-i+b|] w.r.t. a_j splits into the
    # i=j and b=j terms: T(k-j) + T(-(k+j)) with T(v) = sum_b a_b rxx[|v+b|]
    offsets = np.arange(m + 1)
    u = np.arange(-2 * m, m + 1)
    T = np.array([np.dot(a, rxx[np.abs(ui + offsets)]) for ui in u])

    def t_at(v):  # v in [-2M, M]
        return T[v + 2 * m]

    jac = np.zeros((m + 1, m + 1))
    for k in range(m + 1):
        for j in range(1, m + 1):
            jac[k, j - 1] = t_at(k - j) + t_at(-(k + j))
    jac[0, m] = 1.0
    return jac


def _initial_guess(prob: IdentificationProblem) -> np.ndarray:
    """Linearised seed: read each lag equation ignoring cross terms."""
    rxx0 = prob.r_xx[0]
    alpha0 = np.maximum(0.0, prob.r_rr.values[1:] / rxx0)
    nv0 = max(0.0, prob.r_rr.values[0] - rxx0 * (1.0 + float(np.sum(alpha0**2))))
    return np.concatenate([alpha0, [nv0]])


def solve_channel(prob: IdentificationProblem, opts: SolverOptions = SolverOptions()) -> EstimationResult:
    """Levenberg-Marquardt solve of the lag-equation system.

    Damping increases on rejected steps (which also covers near-singular
    normal matrices) and relaxes on accepted ones.  Never raises on
    non-convergence: the best iterate comes back with converged=False.
    """
    m = prob.max_delay
    x = _initial_guess(prob)
    lam = opts.damping0
    r = build_residuals(x[:m], x[m], prob)
    cost = float(r @ r)
    n_iter = 0
    for n_iter in range(1, opts.max_iter + 1):
        if np.sqrt(cost) <= opts.tol:
            break
        jac = residual_jacobian(x[:m], x[m], prob)
        grad = jac.T @ r
        hess = jac.T @ jac
        scale = np.diag(np.maximum(np.diag(hess), 1e-12))
        step = None
        for _ in range(64):
            try:
                step = np.linalg.solve(hess + lam * scale, -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            x_new = x + step
            r_new = build_residuals(x_new[:m], x_new[m], prob)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam / 3.0, 1e-14)
                break
            lam *= 10.0
        else:
            break  # no acceptable step at any damping: stuck
        if step is not None and float(np.linalg.norm(step)) <= opts.step_tol:
            break
    residual_norm = float(np.sqrt(cost))
    return EstimationResult(
        alpha_hat=x[:m],
        noise_var_hat=float(x[m]),
        residual_norm=residual_norm,
        iterations=n_iter,
        converged=bool(residual_norm <= opts.tol),
    )


def detect_paths(res: EstimationResult, threshold: float = 0.05) -> list[tuple[int, float]]:
    """Delays whose estimated tap exceeds the threshold, plus the main path.

    Negative estimates are clamped to zero before thresholding; the main
    path (0, 1.0) is always present.
    """
    clamped = np.maximum(res.alpha_hat, 0.0)
    found = [(0, 1.0)]
    for d, a in enumerate(clamped, start=1):
        if a > threshold:
            found.append((d, float(a)))
    return found


def mse(true_channels, estimated, path_count: int) -> float:
    """Per-path mean squared tap error averaged over trials.

    (1/D) * sum_d ||H_d - Hhat_d||^2 / path_count over D paired tap
    vectors of equal dimension.
    """
    if len(true_channels) != len(estimated) or len(true_channels) == 0:
        raise ValueError("need equally many (>=1) true and estimated vectors")
    if path_count < 1:
        raise ValueError("path_count must be positive")
    total = 0.0
    dim = None
    for h, h_hat in zip(true_channels, estimated):
        h = np.asarray(h, dtype=float)
        h_hat = np.asarray(h_hat, dtype=float)
        if h.shape != h_hat.shape:
            raise ValueError("true/estimated vector shapes differ")
        if dim is None:
            dim = h.shape
        elif h.shape != dim:
            raise ValueError("inconsistent vector dimensions across trials")
        total += float(np.sum((h - h_hat) ** 2))
    return total / (len(true_channels) * path_count)
