#!/usr/bin/env python3
"""Leakage growth curves vs code length plus rate-equation fits (fig3 data)."""

import argparse

from leakqec.config import default_config
from leakqec.pipelines import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/leakage_growth")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=250,
                    help="shots per bitstring group and termination round")
    args = ap.parse_args()
    cfg = default_config(
        "leakage-growth", seed=args.seed,
        shots={"bitstrings": 20, "repeats": args.repeats},
    )
    for path in run(cfg, args.out):
        print(path)


if __name__ == "__main__":
    main()
