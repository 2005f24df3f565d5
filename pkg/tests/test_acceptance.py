"""Acceptance suite: one test per release criterion, tolerances pinned.

Each test prints a single pass/fail line.  Run with

    pytest tests/test_acceptance.py -v -s
"""

import math
from functools import lru_cache

import numpy as np
import pytest

from leakqec.code_sim import ChainLayout, NoiseParams, Schedule, run_experiment
from leakqec.correlation import (
    DetectionMatrix,
    autocorrelation_nodes,
    checkerboard_statistic,
    detection_events,
    event_fraction,
    pij,
    pij_matrix,
)
from leakqec.decoder import (
    build_graph,
    build_graph_analytic,
    decode_dataset,
    eps_from_p_logical,
    lambda_fit,
    mwpm,
    p_logical_from_eps,
    subsample,
)
from leakqec.defaults import calibrated_noise
from leakqec.leakage_fit import LeakageRateFit, fit_rates, rate_model
from leakqec.pipelines import postselect
from leakqec.reset_model import (
    hold_survival,
    landau_zener_diabatic,
    paper_pulse_params,
    reset_error_budget,
    theta_tilde,
    time_of_x,
    trajectory,
    x_of_time,
)

LAYOUT = ChainLayout(21)


def report(number: int, name: str, ok: bool, detail: str) -> None:
    print(f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def test_criterion_01_landau_zener_return():
    value = landau_zener_diabatic(0.12, 1.25)
    ok = abs(value - 0.634) <= 0.005
    report(1, "Landau-Zener return", ok, f"P_D(r) = {value:.6f} vs 0.634 +/- 0.005")


def test_criterion_02_hold_survival():
    value = hold_survival(paper_pulse_params(), 300.0)
    ok = abs(value - 1.27e-3) <= 1e-5
    report(2, "hold survival", ok, f"exp(-300/45) = {value:.6e} vs 1.27e-3 +/- 1e-5")


def test_criterion_03_reset_error_channels():
    budget = reset_error_budget(paper_pulse_params(), 1)
    a = budget.p_channel_adiabatic_return
    b = budget.p_channel_failed_swap
    ok = abs(a - 4.6e-4) <= 0.2 * 4.6e-4 and b < 1e-4
    report(
        3, "reset error channels", ok,
        f"adiabatic-return = {a:.3e} (4.6e-4 +/- 20%), failed-swap = {b:.3e} (< 1e-4)",
    )


def test_criterion_04_pulse_endpoints_and_bijection():
    p = paper_pulse_params()
    d_in = abs(theta_tilde(p, 0.0) - p.theta_in)
    d_fin = abs(theta_tilde(p, 1.0) - p.theta_fin)
    t, f = trajectory(p, 2001)
    d_idle = abs(f[0] - p.f_idle)
    d_hold = abs(f[-1] - p.f_hold)
    xs = np.linspace(0.0, 1.0, 5001)
    rt = float(np.max(np.abs(x_of_time(p, time_of_x(p, xs)) - xs)))
    ok = d_in < 1e-10 and d_fin < 1e-10 and d_idle < 1e-6 and d_hold < 1e-6 and rt < 1e-6
    report(
        4, "pulse endpoints and bijection", ok,
        f"theta endpoints ({d_in:.1e}, {d_fin:.1e}) < 1e-10, trajectory endpoints "
        f"({d_idle:.1e}, {d_hold:.1e}) < 1e-6 GHz, round-trip {rt:.1e} < 1e-6",
    )


def test_criterion_05_pij_estimator_recovery():
    rng = np.random.default_rng(20201013)
    n = 10**6
    both = rng.random(n) < 0.05
    s1 = rng.random(n) < 0.02
    s2 = rng.random(n) < 0.02
    events = np.zeros((n, 1, 2), dtype=np.uint8)
    events[:, 0, 0] = both ^ s1
    events[:, 0, 1] = both ^ s2
    det = DetectionMatrix(events=events, n_rounds=1, has_terminal=False)
    recovered = pij(det, (0, 1), (1, 1))
    sigma = math.sqrt(0.05 * 0.95 / n)

    ind = np.zeros((n, 1, 2), dtype=np.uint8)
    ind[:, 0, 0] = rng.random(n) < 0.05
    ind[:, 0, 1] = rng.random(n) < 0.05
    det_ind = DetectionMatrix(events=ind, n_rounds=1, has_terminal=False)
    null = pij(det_ind, (0, 1), (1, 1))

    ok = abs(recovered - 0.05) < 3 * sigma and abs(null) < 3 * sigma
    report(
        5, "p_ij estimator recovery", ok,
        f"pair process {recovered:.5f} vs 0.05 (3 sigma = {3 * sigma:.1e}), "
        f"independent streams |{null:.2e}| < {3 * sigma:.1e}",
    )


def test_criterion_06_checkerboard():
    noise = NoiseParams(p_relax=0.05)
    ds = run_experiment(LAYOUT, noise, Schedule(n_rounds=30), 10, 10_000, 6006)
    det = detection_events(ds, include_terminal=False)
    odd, even = [], []
    for m in range(LAYOUT.n_measure):
        mat = pij_matrix(det, autocorrelation_nodes(det, m))
        o, e = checkerboard_statistic(mat, max_separation=7)
        odd.append(o)
        even.append(e)
    odd_mean, even_mean = float(np.mean(odd)), float(np.mean(even))
    ok = odd_mean > 0.0 and even_mean <= 0.0
    report(
        6, "checkerboard", ok,
        f"odd-separation mean = {odd_mean:.2e} > 0, "
        f"even-separation mean = {even_mean:.2e} <= 0 (separations 2..7)",
    )


def test_criterion_07_leakage_tail_removal():
    noise = calibrated_noise()
    inj_round, rounds, m = 10, 30, 4  # inject on measure qubit 4 (chain qubit 9)
    fractions = {}
    for reset in (False, True):
        sched = Schedule(n_rounds=rounds, reset_enabled=reset, injection=(9, inj_round))
        ds = run_experiment(LAYOUT, noise, sched, 40, 1000, (7007, int(reset)))
        det = detection_events(ds, include_terminal=False)
        fractions[reset] = event_fraction(det)[:, m]
    n_shots = 40_000
    base_rounds = slice(3, 8)

    f_nr = fractions[False]
    base = f_nr[base_rounds].mean()
    sigma = math.sqrt(max(base * (1 - base), 1e-9) / n_shots)
    tail = f_nr[inj_round + 1 : inj_round + 6] - base  # rounds 12..16
    tail_ok = bool((tail > 3 * sigma).all())
    excess = f_nr[inj_round + 1 : inj_round + 9] - base
    ratios = excess[1:] / excess[:-1]
    gamma_eff = 1.0 - float(np.mean(ratios))
    geom_ok = bool((excess > 0).all()) and 0.0 < gamma_eff < 0.3

    f_r = fractions[True]
    base_r = f_r[base_rounds].mean()
    sigma_r = math.sqrt(max(base_r * (1 - base_r), 1e-9) / n_shots)
    recovery = abs(f_r[inj_round + 2] - base_r)  # round 13: 2nd after the pair
    reset_ok = recovery < 3 * sigma_r

    ok = tail_ok and geom_ok and reset_ok
    report(
        7, "leakage tail removal", ok,
        f"no-reset tail above baseline for >= 5 rounds ({tail_ok}), geometric decay "
        f"rate {gamma_eff:.3f} ({geom_ok}); with reset back within 3 sigma by round "
        f"{inj_round + 2} (|{recovery:.2e}| < {3 * sigma_r:.2e})",
    )


def brute_force_weight(dist_to_bnd, dmat):
    F = len(dist_to_bnd)

    @lru_cache(maxsize=None)
    def best(mask):
        if mask == 0:
            return 0.0
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        out = dist_to_bnd[i] + best(rest)
        mm = rest
        while mm:
            j = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            out = min(out, dmat[i][j] + best(rest & ~(1 << j)))
        return out

    return best((1 << F) - 1)


def test_criterion_08_mwpm_exactness():
    layout = ChainLayout(9)
    noise = NoiseParams(
        p_flip_idle=0.01, p_flip_gate=0.004, p_relax=0.02,
        readout_confusion=((0.98, 0.02, 0), (0.02, 0.98, 0), (0, 0, 1)),
    )
    graph = build_graph_analytic(layout, 10, noise)
    rng = np.random.default_rng(8008)
    B = graph.boundary_index
    worst = 0.0
    for _ in range(1000):
        F = int(rng.integers(1, 11))
        flagged = rng.choice(graph.n_nodes, size=F, replace=False)
        ev = np.zeros(graph.n_nodes, dtype=bool)
        ev[flagged] = True
        out = mwpm(ev, graph)
        d_b = tuple(graph.distance(int(v), B) for v in flagged)
        dm = tuple(
            tuple(graph.distance(int(u), int(v)) for v in flagged) for u in flagged
        )
        worst = max(worst, abs(out.weight - brute_force_weight(d_b, dm)))
    ok = worst < 1e-9
    report(
        8, "MWPM exactness", ok,
        f"1000 instances with <= 10 events: max |weight - brute force| = {worst:.2e}",
    )


def test_criterion_09_rate_equation_fit():
    truth = LeakageRateFit(
        gamma_up=0.0011, gamma_down=0.081, Gamma=0.0821,
        p0=0.0, p_inf=0.0011 / 0.0821, residual_norm=0.0,
    )
    k = np.arange(1, 31)
    clean = fit_rates(rate_model(truth, k))
    clean_err = max(
        abs(clean.gamma_up - truth.gamma_up), abs(clean.gamma_down - truth.gamma_down)
    )

    rng = np.random.default_rng(9009)
    shots = 100_000
    noisy_curve = rng.binomial(shots, rate_model(truth, k)) / shots
    noisy = fit_rates(noisy_curve)
    boot = []
    for _ in range(200):
        resampled = rng.binomial(shots, rate_model(noisy, k)) / shots
        boot.append(fit_rates(resampled))
    sig_up = float(np.std([b.gamma_up for b in boot]))
    sig_down = float(np.std([b.gamma_down for b in boot]))
    noisy_ok = (
        abs(noisy.gamma_up - truth.gamma_up) < 3 * sig_up
        and abs(noisy.gamma_down - truth.gamma_down) < 3 * sig_down
    )
    consistency = abs(noisy.p_inf - noisy.gamma_up / noisy.Gamma)

    ok = clean_err < 1e-8 and noisy_ok and consistency < 1e-12
    report(
        9, "rate-equation fit", ok,
        f"noiseless recovery {clean_err:.1e} < 1e-8; noisy within 3 sigma bootstrap "
        f"({noisy_ok}); p_inf consistency {consistency:.1e} < 1e-12",
    )


@pytest.fixture(scope="module")
def lambda_scaling():
    noise = calibrated_noise()
    sizes = (9, 13, 17, 21)
    results = {}
    for reset in (False, True):
        for k in (10, 30):
            ds = run_experiment(
                LAYOUT, noise, Schedule(n_rounds=k, reset_enabled=reset),
                40, 1000, (1010, int(reset), k),
            )
            eps_by, errors_by = {}, {}
            for size in sizes:
                sub = subsample(ds, 0, size)
                det = detection_events(sub)
                graph = build_graph(det, sub.layout, k)
                res = decode_dataset(sub, graph, det)
                eps_by[size] = res.eps
                errors_by[size] = res.per_shot_errors
            results[(reset, k)] = (eps_by, errors_by)
    return results


def _bootstrap_lambda(errors_by, k, n_boot, seed):
    rng = np.random.default_rng(seed)
    n = len(next(iter(errors_by.values())))
    lams = []
    for _ in range(n_boot):
        idx = rng.integers(0, n, size=n)
        eps_by = {
            s: eps_from_p_logical(float(errs[idx].mean()), k)
            for s, errs in errors_by.items()
        }
        if any(not math.isfinite(e) or e <= 0 for e in eps_by.values()):
            continue
        lams.append(lambda_fit(eps_by).lam)
    return np.percentile(lams, [2.5, 97.5])


def test_criterion_10_lambda_scaling(lambda_scaling):
    eps_nr, err_nr = lambda_scaling[(False, 30)]
    eps_r, err_r = lambda_scaling[(True, 30)]
    fit_nr = lambda_fit(eps_nr)
    fit_r = lambda_fit(eps_r)
    r2_ok = fit_nr.r_squared > 0.98 and fit_r.r_squared > 0.98

    ci_nr = _bootstrap_lambda(err_nr, 30, 150, 10101)
    ci_r = _bootstrap_lambda(err_r, 30, 150, 10102)
    sep_ok = fit_r.lam > fit_nr.lam and ci_r[0] > ci_nr[1]

    lam_nr_10 = lambda_fit(lambda_scaling[(False, 10)][0]).lam
    lam_r_10 = lambda_fit(lambda_scaling[(True, 10)][0]).lam
    drift_r = abs(lam_r_10 / fit_r.lam - 1.0)
    drift_nr = abs(lam_nr_10 / fit_nr.lam - 1.0)
    stab_ok = drift_r <= 0.05 and drift_nr > 0.05

    ok = r2_ok and sep_ok and stab_ok
    report(
        10, "error-suppression scaling", ok,
        f"R2 no-reset {fit_nr.r_squared:.3f} / reset {fit_r.r_squared:.3f} (> 0.98); "
        f"lambda no-reset {fit_nr.lam:.2f} CI {np.round(ci_nr, 2)} vs reset "
        f"{fit_r.lam:.2f} CI {np.round(ci_r, 2)} (disjoint: {sep_ok}); "
        f"round-10 drift reset {drift_r:.1%} (<= 5%) vs no-reset {drift_nr:.1%} (> 5%)",
    )


def test_criterion_11_eps_conversion_round_trip():
    worst = 0.0
    for p in np.arange(0.0, 0.50, 0.01):
        for k in (1, 10, 30):
            eps = eps_from_p_logical(float(p), k)
            worst = max(worst, abs(p_logical_from_eps(eps, k) - p))
    ok = worst < 1e-12
    report(
        11, "eps conversion round trip", ok,
        f"max |P_L - invert(eps(P_L))| = {worst:.2e} over P_L grid x k in {{1,10,30}}",
    )


def test_criterion_12_postselection():
    rng = np.random.default_rng(12012)
    n = 100_000
    contaminated = (rng.random(n) < 0.01).astype(int)
    contaminated[30_000:30_500] = (rng.random(500) < 0.5).astype(int)
    contaminated[70_000:70_300] = 1
    report_c, kept = postselect(contaminated)
    removed = np.zeros(n, dtype=bool)
    for a, b in report_c.removed_ranges:
        removed[a:b] = True
    bursts_gone = removed[30_000:30_500].all() and removed[70_000:70_300].all()

    quiet = (rng.random(n) < 0.01).astype(int)
    report_q, kept_q = postselect(quiet)
    quiet_ok = report_q.removed_fraction == 0.0 and len(kept_q) == n

    ok = bursts_gone and quiet_ok and 0 < report_c.removed_fraction < 0.1
    report(
        12, "postselection", ok,
        f"bursts fully removed ({bursts_gone}), removed fraction "
        f"{report_c.removed_fraction:.3%}; quiet stream untouched ({quiet_ok})",
    )
