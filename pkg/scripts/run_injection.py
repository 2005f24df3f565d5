#!/usr/bin/env python3
"""Detection-event fractions around an injected leakage rotation (fig4 data)."""

import argparse

from leakqec.config import default_config
from leakqec.pipelines import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/injection")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--qubit", type=int, default=9,
                    help="chain qubit receiving the |1>->|2> rotation")
    ap.add_argument("--round", type=int, default=10, dest="inj_round")
    args = ap.parse_args()
    cfg = default_config(
        "injection", seed=args.seed,
        schedule={"rounds": 30, "injection": [args.qubit, args.inj_round]},
    )
    for path in run(cfg, args.out):
        print(path)


if __name__ == "__main__":
    main()
