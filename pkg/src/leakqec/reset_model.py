"""Multi-level reset gate: pulse synthesis and semi-classical error budget.

The reset gate moves qubit excitations into the readout resonator in three
stages: an adiabatic frequency sweep past the resonator ("swap"), a wait
below the resonator while the photons decay at rate kappa ("hold"), and a
fast diabatic ramp back to the idle frequency ("return").

The swap trajectory is a fast quasi-adiabatic pulse designed on the control
angle of the qubit-resonator avoided crossing: the qubit frequency moves
quickly when far detuned and slowly near the crossing.  The error budget
combines Landau-Zener transition probabilities for the swap and return
crossings with exponential photon decay during the hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

__all__ = [
    "ResetPulseParams",
    "ResetErrorBudget",
    "paper_pulse_params",
    "theta_tilde",
    "time_of_x",
    "x_of_time",
    "trajectory",
    "swap_crossing_velocity",
    "landau_zener_diabatic",
    "diabatic_swap_bound",
    "hold_survival",
    "incomplete_swap_fringe",
    "reset_error_budget",
    "error_landscape",
    "export_landscape_csv",
]

# Swap lengths below this are treated as non-adiabatic: the swap is
# incomplete and the residual excitation shows Rabi-like fringes.
ADIABATIC_THRESHOLD_NS = 30.0

# Number of quadrature nodes used to tabulate t(x); inversion error is far
# below the 1e-6 ns tolerance at this density.
_QUAD_NODES = 4096


@dataclass(frozen=True)
class ResetPulseParams:
    """Physical constants and stage durations of the multi-level reset gate.

    Frequencies in GHz, durations in ns, kappa in 1/ns.  ``mu`` and
    ``f_swap`` are the free pulse-design parameters standing in for the
    coupling and resonator frequency in the control-angle parametrization;
    ``lambdas`` are the three Fourier coefficients of the control-angle
    velocity and must sum to 1.
    """

    g: float = 0.12
    kappa: float = 1.0 / 45.0
    eta: float = 0.2
    f_idle: float = 6.09
    f_swap: float = 4.665
    f_hold: float = 3.665
    f_resonator: float = 4.665
    mu: float = 0.15
    lambdas: tuple[float, float, float] = (1.15, -0.2, 0.05)
    t_swap: float = 30.0
    t_hold: float = 300.0
    t_return: float = 2.0

    def __post_init__(self) -> None:
        if abs(sum(self.lambdas) - 1.0) > 1e-9:
            raise ValueError(f"lambdas must sum to 1, got {sum(self.lambdas)}")
        if not (self.f_hold < self.f_resonator < self.f_idle):
            raise ValueError("require f_hold < f_resonator < f_idle")
        if not (self.f_hold < self.f_swap < self.f_idle):
            raise ValueError("require f_hold < f_swap < f_idle")
        for name in ("t_swap", "t_hold", "t_return"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("g", "kappa", "mu"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def delta_f(self) -> float:
        """Total qubit frequency excursion of the gate (GHz)."""
        return self.f_idle - self.f_hold

    @property
    def theta_in(self) -> float:
        """Control angle at the idle frequency, in (0, pi)."""
        return math.atan2(2.0 * self.mu, self.f_idle - self.f_swap)

    @property
    def theta_fin(self) -> float:
        """Control angle at the hold frequency, in (0, pi)."""
        return math.atan2(2.0 * self.mu, self.f_hold - self.f_swap)


@dataclass(frozen=True)
class ResetErrorBudget:
    """Semi-classical reset error budget for one initial excited state.

    Two channels add up to ``p_total``: the excitation swaps into the
    resonator, survives the hold and adiabatically returns to the qubit
    (``p_channel_adiabatic_return``), or the initial swap fails and the
    excitation stays on the qubit through the diabatic return
    (``p_channel_failed_swap``).  Diagnostics: ``p_diabatic_swap`` is the
    probability that at least one photon fails to swap, ``p_survive_hold``
    that at least one swapped photon outlives the hold, and
    ``p_diabatic_return`` the single-photon diabatic return probability.
    """

    p_diabatic_swap: float
    p_survive_hold: float
    p_diabatic_return: float
    p_channel_adiabatic_return: float
    p_channel_failed_swap: float
    p_total: float


def paper_pulse_params(**overrides) -> ResetPulseParams:
    """Reset pulse parameters of the reference device (defaults of
    :class:`ResetPulseParams`), with optional field overrides."""
    return ResetPulseParams(**overrides)


def _lambda_series(lambdas: Sequence[float], x: np.ndarray) -> np.ndarray:
    """Sum_n lambda_n * [x - sin(2 pi n x) / (2 pi n)]."""
    out = np.zeros_like(x)
    for n, lam in enumerate(lambdas, start=1):
        w = 2.0 * math.pi * n
        out += lam * (x - np.sin(w * x) / w)
    return out


def _lambda_series_deriv(lambdas: Sequence[float], x: np.ndarray) -> np.ndarray:
    """Sum_n lambda_n * [1 - cos(2 pi n x)], the control-angle velocity shape."""
    out = np.zeros_like(x)
    for n, lam in enumerate(lambdas, start=1):
        out += lam * (1.0 - np.cos(2.0 * math.pi * n * x))
    return out


def theta_tilde(params: ResetPulseParams, x) -> np.ndarray | float:
    """Control angle theta(x) of the swap pulse at dimensionless time x.

    theta(0) is the idle-frequency angle and theta(1) the hold-frequency
    angle; in between the angle velocity follows the three-term cosine
    series, which vanishes at both endpoints (smooth start and stop).
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < -1e-12) or np.any(x_arr > 1 + 1e-12):
        raise ValueError("x must lie in [0, 1]")
    th = params.theta_in + (params.theta_fin - params.theta_in) * _lambda_series(
        params.lambdas, x_arr
    )
    return float(th) if np.isscalar(x) else th


class _PulseTable:
    """Cached quadrature table for t(x) and its monotone inverse."""

    def __init__(self, params: ResetPulseParams):
        xs = np.linspace(0.0, 1.0, _QUAD_NODES + 1)
        sin_th = np.sin(theta_tilde(params, xs))
        # cumulative trapezoid; exactness is covered by the Riemann oracle test
        dx = xs[1] - xs[0]
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (sin_th[1:] + sin_th[:-1]) * dx)]
        )
        self.norm = cum[-1]
        self.xs = xs
        self.frac = cum / self.norm  # t(x) / t_swap on the node grid
        self._t_of_x = PchipInterpolator(xs, self.frac)
        self._x_of_t = PchipInterpolator(self.frac, xs)

    def t_fraction(self, x: np.ndarray) -> np.ndarray:
        return self._t_of_x(x)

    def x_fraction(self, frac: np.ndarray) -> np.ndarray:
        return self._x_of_t(frac)


@lru_cache(maxsize=64)
def _pulse_table(params: ResetPulseParams) -> _PulseTable:
    return _PulseTable(params)


def time_of_x(params: ResetPulseParams, x) -> np.ndarray | float:
    """Physical time t(x) along the swap, in ns.

    Defined so the Rabi frequency is constant in the dimensionless time x:
    t is the cumulative integral of sin(theta) normalized to t_swap.
    Strictly increasing with t(0) = 0 and t(1) = t_swap.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < -1e-12) or np.any(x_arr > 1 + 1e-12):
        raise ValueError("x must lie in [0, 1]")
    t = params.t_swap * _pulse_table(params).t_fraction(x_arr)
    return float(t) if np.isscalar(x) else t


def x_of_time(params: ResetPulseParams, t) -> np.ndarray | float:
    """Monotone inverse of :func:`time_of_x` (t in [0, t_swap])."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < -1e-9) or np.any(t_arr > params.t_swap + 1e-9):
        raise ValueError("t must lie in [0, t_swap]")
    x = _pulse_table(params).x_fraction(t_arr / params.t_swap)
    x = np.clip(x, 0.0, 1.0)
    return float(x) if np.isscalar(t) else x


def trajectory(
    params: ResetPulseParams, n_samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """Qubit frequency trajectory f_q(t) of the swap stage.

    Returns ``(t, f_q)`` sampled uniformly in t over [0, t_swap].  The
    trajectory starts at f_idle, ends at f_hold and is strictly decreasing;
    it crosses the resonator frequency exactly once.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    t = np.linspace(0.0, params.t_swap, n_samples)
    x = x_of_time(params, t)
    th = theta_tilde(params, x)
    f_q = params.f_swap + 2.0 * params.mu / np.tan(th)
    # pin the analytically exact endpoints (interpolation noise removal)
    f_q[0] = params.f_idle
    f_q[-1] = params.f_hold
    return t, f_q


def swap_crossing_velocity(
    params: ResetPulseParams, f_cross: float | None = None
) -> float:
    """|df_q/dt| of the swap pulse at the frequency f_cross (GHz^2).

    Defaults to the qubit-resonator crossing f_resonator.  This is the
    detuning sweep rate that controls the diabatic error of the designed
    pulse; it is much smaller than the linear-ramp mean velocity because
    the pulse slows down near the crossing.
    """
    if f_cross is None:
        f_cross = params.f_resonator
    if not (params.f_hold < f_cross < params.f_idle):
        raise ValueError("f_cross must lie strictly between f_hold and f_idle")
    th_cross = math.atan2(2.0 * params.mu, f_cross - params.f_swap)
    x_star = brentq(
        lambda x: theta_tilde(params, x) - th_cross, 0.0, 1.0, xtol=1e-14
    )
    dth_dx = (params.theta_fin - params.theta_in) * float(
        _lambda_series_deriv(params.lambdas, np.asarray(x_star))
    )
    # df/dx = -2 mu / sin^2(theta) * dtheta/dx ; dt/dx = t_swap sin(theta)/norm
    sin_th = math.sin(th_cross)
    norm = _pulse_table(params).norm
    return 2.0 * params.mu * dth_dx * norm / (params.t_swap * sin_th**3)


def landau_zener_diabatic(g_eff: float, velocity: float) -> float:
    """Diabatic transition probability exp(-(2 pi g_eff)^2 / velocity).

    ``g_eff`` is the avoided-crossing coupling in GHz and ``velocity`` the
    detuning sweep rate in GHz^2.  A fast sweep (large velocity) crosses
    diabatically (probability near 1); strong coupling suppresses it.
    """
    if g_eff < 0:
        raise ValueError("g_eff must be >= 0")
    if velocity <= 0:
        raise ValueError("velocity must be > 0")
    return math.exp(-((2.0 * math.pi * g_eff) ** 2) / velocity)


def diabatic_swap_bound(params: ResetPulseParams) -> float:
    """Linear-ramp upper bound on the swap-stage diabatic error.

    Uses the mean sweep velocity delta_f / t_swap; the designed pulse is
    slower at the crossing, so the true diabatic error is far below this.
    """
    return landau_zener_diabatic(params.g, params.delta_f / params.t_swap)


def hold_survival(params: ResetPulseParams, t_hold: float | None = None) -> float:
    """Probability that one resonator photon survives the hold, exp(-kappa t)."""
    t = params.t_hold if t_hold is None else t_hold
    if t < 0:
        raise ValueError("t_hold must be >= 0")
    return math.exp(-params.kappa * t)


def incomplete_swap_fringe(params: ResetPulseParams, t_swap: float) -> float:
    """Qualitative residual-excitation fringe for swaps below threshold.

    Below the adiabatic threshold the swap is incomplete and the leftover
    excitation Rabi-oscillates at 2g; this returns a [0, 1] residual factor
    (1 + cos(2 pi * 2 g * dt)) / 2 ramped up linearly with dt = threshold
    - t_swap.  Qualitative shape only; no quantitative meaning is claimed.
    """
    dt = ADIABATIC_THRESHOLD_NS - t_swap
    if dt <= 0:
        return 0.0
    fringe = 0.5 * (1.0 + math.cos(2.0 * math.pi * 2.0 * params.g * dt))
    return min(dt / ADIABATIC_THRESHOLD_NS, 1.0) * fringe


def _clip01(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def reset_error_budget(
    params: ResetPulseParams,
    initial_level: int,
    t_swap: float | None = None,
    t_hold: float | None = None,
    include_fringe: bool = False,
    readout_floor: float = 0.0,
) -> ResetErrorBudget:
    """Semi-classical reset error budget for the qubit starting in |1>, |2> or |3>.

    For n initial excitations the swap is treated as n sequential avoided
    crossings; the m-th remaining photon crosses with coupling g*sqrt(m)
    (harmonic-ladder scaling) at the resonance f_resonator + (m-1)*eta, and
    each swapped photon decays independently during the hold.  The chained
    multi-photon numbers are an approximation, not an exact multistate
    result.  ``include_fringe`` adds the qualitative short-swap residual;
    ``readout_floor`` adds a constant for emulating measured (not theory)
    curves.
    """
    if initial_level not in (1, 2, 3):
        raise ValueError("initial_level must be 1, 2 or 3")
    ts = params.t_swap if t_swap is None else t_swap
    th = params.t_hold if t_hold is None else t_hold
    if ts <= 0 or th < 0:
        raise ValueError("durations out of range")
    eff = params if ts == params.t_swap else ResetPulseParams(
        **{**_params_dict(params), "t_swap": ts}
    )
    surv = hold_survival(params, th)
    nu_return = params.delta_f / params.t_return

    p_fail_any = 1.0  # accumulates prod(1 - a_m), prod(1 - b_m)
    prod_no_return = 1.0
    prod_no_failswap = 1.0
    p_swap_ok_all = 1.0
    p_dr_single = landau_zener_diabatic(params.g, nu_return)
    for m in range(initial_level, 0, -1):
        g_m = params.g * math.sqrt(m)
        f_cross = params.f_resonator + (m - 1) * params.eta
        v_m = swap_crossing_velocity(eff, f_cross)
        p_ds = landau_zener_diabatic(g_m, v_m)
        p_dr = landau_zener_diabatic(g_m, nu_return)
        a_m = (1.0 - p_ds) * surv * (1.0 - p_dr)
        b_m = p_ds * p_dr
        prod_no_return *= 1.0 - a_m
        prod_no_failswap *= 1.0 - b_m
        p_swap_ok_all *= 1.0 - p_ds

    p_adiabatic_return = _clip01(1.0 - prod_no_return)
    p_failed_swap = _clip01(1.0 - prod_no_failswap)
    p_total = _clip01(p_adiabatic_return + p_failed_swap)
    if include_fringe:
        p_total = _clip01(p_total + incomplete_swap_fringe(params, ts))
    if readout_floor:
        p_total = _clip01(p_total + readout_floor)
    return ResetErrorBudget(
        p_diabatic_swap=_clip01(1.0 - p_swap_ok_all),
        p_survive_hold=_clip01(1.0 - (1.0 - surv) ** initial_level),
        p_diabatic_return=_clip01(p_dr_single),
        p_channel_adiabatic_return=p_adiabatic_return,
        p_channel_failed_swap=p_failed_swap,
        p_total=p_total,
    )


def _params_dict(params: ResetPulseParams) -> dict:
    return {
        "g": params.g,
        "kappa": params.kappa,
        "eta": params.eta,
        "f_idle": params.f_idle,
        "f_swap": params.f_swap,
        "f_hold": params.f_hold,
        "f_resonator": params.f_resonator,
        "mu": params.mu,
        "lambdas": params.lambdas,
        "t_swap": params.t_swap,
        "t_hold": params.t_hold,
        "t_return": params.t_return,
    }


def error_landscape(
    params: ResetPulseParams,
    swap_grid: Iterable[float],
    hold_grid: Iterable[float],
    initial_level: int = 1,
    include_fringes: bool = False,
    readout_floor: float = 0.0,
) -> np.ndarray:
    """Total reset error over a (swap duration x hold duration) grid.

    Rows follow ``swap_grid``, columns ``hold_grid``.  For swap durations
    at or above the adiabatic threshold the error is monotone non-increasing
    in the hold duration.
    """
    swaps = list(swap_grid)
    holds = list(hold_grid)
    if not swaps or not holds:
        raise ValueError("grids must be nonempty")
    out = np.empty((len(swaps), len(holds)))
    for i, ts in enumerate(swaps):
        for j, th in enumerate(holds):
            out[i, j] = reset_error_budget(
                params,
                initial_level,
                t_swap=ts,
                t_hold=th,
                include_fringe=include_fringes,
                readout_floor=readout_floor,
            ).p_total
    return out


def export_landscape_csv(
    swap_grid: Sequence[float],
    hold_grid: Sequence[float],
    landscape: np.ndarray,
    fh: TextIO,
) -> None:
    """Write a landscape as CSV: header row of hold durations, first column
    swap durations, cells in scientific notation with 6 significant digits."""
    fh.write("t_swap_ns," + ",".join(f"{h:g}" for h in hold_grid) + "\n")
    for ts, row in zip(swap_grid, landscape):
        fh.write(f"{ts:g}," + ",".join(f"{v:.5e}" for v in row) + "\n")
