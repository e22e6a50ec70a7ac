"""Run the randomized invariant suite for several seeds and tabulate the worst values."""

from __future__ import annotations

import argparse
import time

from qsot.verify import run_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()

    worst: dict[str, tuple[float, bool]] = {}
    t0 = time.perf_counter()
    for seed in args.seeds:
        for r in run_suite(seed, args.trials, args.tol):
            prev = worst.get(r.name)
            value = r.value if prev is None else (max if r.rule == "<=" else min)(prev[0], r.value)
            worst[r.name] = (value, r.passed and (prev is None or prev[1]))
    for name, (value, ok) in worst.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name:<24} {value:.3e}")
    print(f"{len(args.seeds)} seeds x {args.trials} trials in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
