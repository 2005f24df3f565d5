#!/usr/bin/env python3
"""Reset-error landscape over swap and hold durations (fig2 data)."""

import argparse

from leakqec.config import default_config
from leakqec.pipelines import run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/reset_landscape")
    ap.add_argument("--level", type=int, default=1, choices=(1, 2, 3))
    ap.add_argument("--fringes", action="store_true",
                    help="include the qualitative short-swap fringe model")
    args = ap.parse_args()
    cfg = default_config(
        "reset-sweep", initial_level=args.level, include_fringes=args.fringes
    )
    for path in run(cfg, args.out):
        print(path)


if __name__ == "__main__":
    main()
