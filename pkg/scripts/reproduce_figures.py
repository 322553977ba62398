"""Regenerate every preset CSV (plus sidecars) into an output directory."""

import argparse
import sys
import time

from geophase.sweeps import PRESETS, run_preset


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="out")
    ap.add_argument("--only", nargs="*", choices=sorted(PRESETS), help="subset of presets")
    ap.add_argument("--steps", type=int, default=None, help="steps per cycle override")
    ap.add_argument("--no-refine", action="store_true")
    args = ap.parse_args()

    for name in args.only or PRESETS:
        t0 = time.perf_counter()
        paths = run_preset(name, args.outdir, refine=not args.no_refine, steps=args.steps)
        print(f"{name:6s} {time.perf_counter() - t0:6.2f} s  " + " ".join(str(p) for p in paths))
    return 0


if __name__ == "__main__":
    sys.exit(main())
