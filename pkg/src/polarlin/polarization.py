"""Capacity splitting for the erasure channel, sorting, and the sigmoid picture."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares


def capacity_split(i: float) -> tuple[float, float]:
    """One channel of capacity ``i`` becomes ``(2i - i^2, i^2)``."""
    if not 0.0 <= i <= 1.0:
        raise ValueError(f"capacity must lie in [0, 1], got {i}")
    return 2 * i - i * i, i * i


@dataclass(frozen=True)
class CapacityProfile:
    epsilon: float
    n: int
    capacities: np.ndarray
    sorted_order: np.ndarray  # 0-based channel indices, ascending capacity

    @property
    def N(self) -> int:
        return self.capacities.size

    def sorted_capacities(self) -> np.ndarray:
        return self.capacities[self.sorted_order]


def polarize(epsilon: float, n: int) -> CapacityProfile:
    """Apply the split ``n`` times starting from ``1 - epsilon``.

    Each parent is replaced in place by its (better, worse) pair, so the
    output order matches the nested expansion I[2], I[4], I[8], ...
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if n < 1:
        raise ValueError("at least one splitting stage is required")
    c = np.array([1.0 - epsilon])
    for _ in range(n):
        c = np.stack([2 * c - c * c, c * c], axis=1).ravel()
    order = np.argsort(c, kind="stable")
    c.flags.writeable = False
    order.flags.writeable = False
    return CapacityProfile(float(epsilon), n, c, order)


class FrozenPolicy(enum.Enum):
    FIRST_HALF = "first-half"
    LOWEST_CAPACITY = "lowest-capacity"


def select_frozen(profile: CapacityProfile, count: int,
                  policy: FrozenPolicy = FrozenPolicy.FIRST_HALF) -> tuple[int, ...]:
    """1-based positions to freeze.

    FIRST_HALF freezes 1..count.  LOWEST_CAPACITY freezes the ``count``
    weakest channels, ties going to the lower index.
    """
    N = profile.N
    if not 0 <= count <= N:
        raise ValueError(f"cannot freeze {count} of {N} channels")
    if policy is FrozenPolicy.FIRST_HALF:
        return tuple(range(1, count + 1))
    return tuple(sorted(int(i) + 1 for i in profile.sorted_order[:count]))


# --------------------------------------------------------------------------- sigmoid


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SigmoidFit:
    mu: float
    beta: float
    residual: float  # RMS
    mu_stderr: float
    beta_stderr: float
    gradient_norm: float
    iterations: int


def logistic(n, mu: float, beta: float):
    with np.errstate(over="ignore"):  # exp overflow saturates to 0, which is the right limit
        return 1.0 / (1.0 + np.exp(-(np.asarray(n, dtype=float) - mu) / beta))


def _fit_logistic(x: np.ndarray, y: np.ndarray, mu0: float, beta0: float,
                  max_iter: int = 500) -> SigmoidFit:
    def resid(p):
        return logistic(x, p[0], p[1]) - y

    def jac(p):
        mu, beta = p
        f = logistic(x, mu, beta)
        d = f * (1.0 - f)
        return np.column_stack([-d / beta, -d * (x - mu) / beta**2])

    sol = least_squares(resid, [mu0, beta0], jac=jac, method="lm",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_iter)
    mu, beta = sol.x
    r = resid(sol.x)
    J = jac(sol.x)
    grad = float(np.linalg.norm(J.T @ r))
    if not (np.isfinite(mu) and np.isfinite(beta)) or grad >= 1e-8:
        raise FitError(
            f"sigmoid fit did not converge: mu={mu:.6g} beta={beta:.6g} "
            f"|grad|={grad:.3g} after {sol.nfev} evaluations ({sol.message})"
        )
    dof = max(x.size - 2, 1)
    s2 = float(r @ r) / dof
    try:
        cov = np.linalg.inv(J.T @ J) * s2
        mu_se, beta_se = np.sqrt(np.abs(np.diag(cov)))
    except np.linalg.LinAlgError:
        mu_se = beta_se = float("nan")
    return SigmoidFit(float(mu), abs(float(beta)), float(np.sqrt(np.mean(r * r))),
                      float(mu_se), float(beta_se), grad, int(sol.nfev))


def fit_sigmoid(profile: CapacityProfile) -> SigmoidFit:
    """Least-squares logistic fit of ascending capacities against rank 1..N."""
    y = profile.sorted_capacities()
    N = y.size
    if N < 8:
        raise ValueError("sigmoid fit needs at least 8 channels")
    if np.ptp(y) == 0:
        raise FitError("degenerate profile: all capacities are equal")
    x = np.arange(1, N + 1, dtype=float)
    mu0 = float(x[np.argmin(np.abs(y - 0.5))])
    return _fit_logistic(x, y, mu0, N / 100)


def fit_sigmoid_points(x, y) -> SigmoidFit:
    """Same fit on arbitrary (x, y) samples; used for synthetic checks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.ptp(y) == 0:
        raise FitError("degenerate data: all values are equal")
    mu0 = float(x[np.argmin(np.abs(y - 0.5))])
    return _fit_logistic(x, y, mu0, max(np.ptp(x) / 100, 1e-3))


def channel_density(n, fit: SigmoidFit, N: int):
    """Normalized channel density, proportional to 1 / (d f_LS / dn)."""
    mu, beta = fit.mu, fit.beta
    n = np.asarray(n, dtype=float)
    num = N * (1.0 + np.cosh((n - mu) / beta))
    den = N + beta * (np.sinh((N - mu) / beta) + np.sinh(mu / beta))
    out = num / den
    return float(out) if out.ndim == 0 else out


def capacity_histogram(profile: CapacityProfile, bins: int = 10) -> list[tuple[tuple[float, float], int]]:
    """Counts over uniform bins of [0, 1]; the last bin is closed."""
    if bins < 2:
        raise ValueError("at least two bins are required")
    counts, edges = np.histogram(profile.capacities, bins=bins, range=(0.0, 1.0))
    return [((float(edges[k]), float(edges[k + 1])), int(counts[k])) for k in range(bins)]
