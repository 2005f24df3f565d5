#!/usr/bin/env python3
"""Auto- and cross-correlation p_ij matrices with and without reset (fig5 data)."""

import argparse

from leakqec.config import default_config
from leakqec.pipelines import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/pij")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--qubit", type=int, default=5,
                    help="measure qubit for the autocorrelation view")
    args = ap.parse_args()
    cfg = default_config(
        "pij", seed=args.seed,
        pij={"qubit": args.qubit, "pair": [max(args.qubit - 1, 0), args.qubit]},
    )
    for path in run(cfg, args.out):
        print(path)


if __name__ == "__main__":
    main()
