#!/usr/bin/env python3
"""Error suppression vs code size and rounds, with and without reset (fig6 data)."""

import argparse

from leakqec.config import default_config
from leakqec.pipelines import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/lambda_scan")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=1000)
    ap.add_argument("--rounds", type=int, nargs="+", default=[10, 20, 30])
    args = ap.parse_args()
    cfg = default_config(
        "lambda-scan", seed=args.seed,
        rounds_scan=args.rounds,
        shots={"bitstrings": 40, "repeats": args.repeats},
    )
    for path in run(cfg, args.out):
        print(path)


if __name__ == "__main__":
    main()
