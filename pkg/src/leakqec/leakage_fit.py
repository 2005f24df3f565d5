"""Rate-equation model and fits for leakage growth during code operation.

The |2>-state population after k stabilizer rounds follows

    P(k) = p_inf * (1 - exp(-Gamma k)) + p0 * exp(-Gamma k)

with Gamma = gamma_up + gamma_down and p_inf = gamma_up / Gamma.  Fitted
rates are continuous (per-round exponents) and may exceed 1; the simulator
works with per-round probabilities, related by p = 1 - exp(-gamma).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "LeakageRateFit",
    "FitConvergenceError",
    "rate_model",
    "fit_rates",
    "fit_rates_constrained",
    "rate_to_per_round_prob",
    "per_round_prob_to_rate",
    "export_rate_fits_csv",
]


class FitConvergenceError(RuntimeError):
    """Raised when the rate-equation fit does not converge."""


@dataclass(frozen=True)
class LeakageRateFit:
    """Result of fitting the leakage rate equation to a population curve."""

    gamma_up: float
    gamma_down: float
    Gamma: float
    p0: float
    p_inf: float
    residual_norm: float
    constrained: bool = False
    clipped: bool = False

    def __post_init__(self) -> None:
        if self.Gamma > 0 and math.isfinite(self.Gamma):
            if abs(self.p_inf - self.gamma_up / self.Gamma) > 1e-9:
                raise ValueError("p_inf must equal gamma_up / Gamma")


def rate_model(fit: LeakageRateFit, k) -> np.ndarray | float:
    """Leakage population at round k under the rate equation."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise ValueError("k must be >= 0")
    decay = np.exp(-fit.Gamma * k_arr)
    out = fit.p_inf * (1.0 - decay) + fit.p0 * decay
    return float(out) if np.isscalar(k) else out


def rate_to_per_round_prob(gamma: float) -> float:
    """Continuous per-round rate -> per-round probability, 1 - exp(-gamma)."""
    return 1.0 - math.exp(-gamma)


def per_round_prob_to_rate(p: float) -> float:
    """Per-round probability -> continuous rate, -ln(1 - p)."""
    if not 0 <= p < 1:
        raise ValueError("p must be in [0, 1)")
    return -math.log1p(-p)


def _eval_curve(params: np.ndarray, k: np.ndarray) -> np.ndarray:
    p0, p_inf, gamma = params
    decay = np.exp(-gamma * k)
    return p_inf * (1.0 - decay) + p0 * decay


def _initial_guess(k: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Start values from a log-linearized tail of the curve."""
    p_inf0 = float(np.mean(y[-max(3, len(y) // 4):]))
    p00 = float(y[0])
    resid = np.abs(y - p_inf0)
    good = resid > max(1e-12, 1e-3 * max(abs(p_inf0), 1e-12))
    if good.sum() >= 2:
        slope = np.polyfit(k[good], np.log(resid[good]), 1)[0]
        gamma0 = max(-slope, 1e-6)
    else:
        gamma0 = 0.1
    return np.array([p00, p_inf0, gamma0])


def fit_rates(
    curve: Sequence[float],
    weights: Sequence[float] | None = None,
    rounds: Sequence[int] | None = None,
    max_iterations: int = 200,
) -> LeakageRateFit:
    """Least-squares fit of (p0, p_inf, Gamma) to a leakage growth curve.

    ``curve[i]`` is the population measured after ``rounds[i]`` stabilizer
    rounds (default 1..len(curve)).  Uses Levenberg-Marquardt with a
    parameter tolerance of 1e-10; if the unconstrained optimum has rates
    outside their physical range the fit is repeated with box bounds and
    flagged ``clipped``.
    """
    y = np.asarray(curve, dtype=float)
    if y.size < 3:
        raise ValueError("need at least 3 rounds to fit 3 parameters")
    if np.any((y < 0) | (y > 1)):
        raise ValueError("populations must lie in [0, 1]")
    k = (
        np.arange(1, y.size + 1, dtype=float)
        if rounds is None
        else np.asarray(rounds, dtype=float)
    )
    if k.shape != y.shape:
        raise ValueError("rounds and curve must have the same length")
    w = np.ones_like(y) if weights is None else np.asarray(weights, dtype=float)

    def residuals(params: np.ndarray) -> np.ndarray:
        return (_eval_curve(params, k) - y) * w

    x0 = _initial_guess(k, y)
    sol = least_squares(
        residuals, x0, method="lm", xtol=1e-10, ftol=1e-10, gtol=1e-10,
        max_nfev=max_iterations * 10,
    )
    if not sol.success:
        raise FitConvergenceError(
            f"rate fit did not converge: {sol.message} (nfev={sol.nfev})"
        )
    p0, p_inf, gamma = sol.x
    clipped = False
    if p_inf < 0 or p_inf > 1 or gamma < 0 or p0 < 0 or p0 > 1:
        sol = least_squares(
            residuals,
            np.clip(x0, [0, 0, 1e-9], [1, 1, np.inf]),
            bounds=([0, 0, 0], [1, 1, np.inf]),
            xtol=1e-10, ftol=1e-10, gtol=1e-10,
            max_nfev=max_iterations * 10,
        )
        if not sol.success:
            raise FitConvergenceError(
                f"bounded rate fit did not converge: {sol.message}"
            )
        p0, p_inf, gamma = sol.x
        clipped = True
    gamma_up = p_inf * gamma
    return LeakageRateFit(
        gamma_up=gamma_up,
        gamma_down=gamma - gamma_up,
        Gamma=gamma,
        p0=p0,
        p_inf=p_inf,
        residual_norm=float(np.linalg.norm(residuals(sol.x))),
        clipped=clipped,
    )


def fit_rates_constrained(
    curve: Sequence[float],
    gamma_up_fixed: float,
    exclude_first_round: bool = False,
) -> LeakageRateFit:
    """Constrained fit used when reset breaks the growth pattern.

    Assumes gamma_up from the no-reset case; p_inf is the plain average of
    the curve (optionally dropping round 1, which carries an initialization
    artifact) and gamma_down follows from p_inf = gamma_up / Gamma.
    Returns gamma_down = +inf when the curve averages to zero.
    """
    if gamma_up_fixed < 0:
        raise ValueError("gamma_up_fixed must be >= 0")
    y = np.asarray(curve, dtype=float)
    if exclude_first_round:
        y = y[1:]
    if y.size == 0:
        raise ValueError("curve must be nonempty")
    p_inf = float(np.mean(y))
    if p_inf == 0.0:
        gamma_down = math.inf
        gamma = math.inf
    else:
        gamma_down = gamma_up_fixed * (1.0 - p_inf) / p_inf
        gamma = gamma_up_fixed + gamma_down
    return LeakageRateFit(
        gamma_up=gamma_up_fixed,
        gamma_down=gamma_down,
        Gamma=gamma,
        p0=p_inf,
        p_inf=p_inf,
        residual_norm=float(np.linalg.norm(y - p_inf)),
        constrained=True,
    )


def export_rate_fits_csv(
    rows: Iterable[tuple[str, bool, LeakageRateFit]], fh: TextIO
) -> None:
    """Write fit results as CSV rows (role, reset flag, rates, p_inf, flag)."""
    writer = csv.writer(fh)
    writer.writerow(
        ["role", "reset", "gamma_up", "gamma_down", "p_inf", "constrained"]
    )
    for role, reset, fit in rows:
        writer.writerow(
            [
                role,
                int(reset),
                f"{fit.gamma_up:.6e}",
                f"{fit.gamma_down:.6e}",
                f"{fit.p_inf:.6e}",
                int(fit.constrained),
            ]
        )
