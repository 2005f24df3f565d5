#!/usr/bin/env python3
"""Re-derive the calibrated noise preset.

Sweeps the base bit-flip scale around the shipped preset and reports the
error-suppression factor, fit quality and round-10 stability for both reset
settings, so the constants in ``leakqec.defaults`` can be re-frozen after
model changes.  The targets: no-reset lambda near 2 at 30 rounds, both fits
with R^2 above 0.98, clear reset/no-reset separation, and a reset curve
that is already stable at round 10.
"""

import argparse
import json

from leakqec.code_sim import ChainLayout, NoiseParams, Schedule, run_experiment
from leakqec.correlation import detection_events
from leakqec.decoder import build_graph, decode_dataset, lambda_fit, subsample
from leakqec.defaults import _CALIBRATED_V1


def evaluate(noise, reset, rounds, groups, repeats, seed):
    layout = ChainLayout(21)
    ds = run_experiment(
        layout, noise, Schedule(n_rounds=rounds, reset_enabled=reset),
        groups, repeats, seed,
    )
    eps_by = {}
    for size in (9, 13, 17, 21):
        sub = subsample(ds, 0, size)
        det = detection_events(sub)
        graph = build_graph(det, sub.layout, rounds)
        eps_by[size] = decode_dataset(sub, graph, det).eps
    fit = lambda_fit(eps_by)
    return {"eps": eps_by, "lambda": fit.lam, "r_squared": fit.r_squared}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scales", type=float, nargs="+", default=[0.8, 1.0, 1.25])
    ap.add_argument("--repeats", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=424242)
    ap.add_argument("--out", default="out/calibration_sweep.json")
    args = ap.parse_args()

    base = dict(_CALIBRATED_V1)
    results = {}
    for scale in args.scales:
        kw = dict(base)
        for key in ("p_flip_idle", "p_flip_gate", "p_relax"):
            kw[key] = base[key] * scale
        noise = NoiseParams(**kw)
        row = {}
        for reset in (False, True):
            for rounds in (10, 30):
                tag = f"{'reset' if reset else 'noreset'}_k{rounds}"
                row[tag] = evaluate(
                    noise, reset, rounds, 40, args.repeats,
                    (args.seed, int(reset), rounds),
                )
                print(f"scale={scale} {tag}: lambda={row[tag]['lambda']:.3f} "
                      f"R2={row[tag]['r_squared']:.4f}", flush=True)
        results[str(scale)] = row
    with open(args.out, "w") as fh:
        json.dump(results, fh, indent=2)
    print(args.out)


if __name__ == "__main__":
    main()
