"""Compare all holistic bit patterns against each other on the identity chain."""

from __future__ import annotations

import argparse
import itertools

import numpy as np

from qsot.channels import identity_channel
from qsot.linalg import Operator
from qsot.star import star_nchain, star_nchain_holistic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    args = ap.parse_args()

    ids = [identity_channel(2)] * args.n
    plus = Operator(np.full((2, 2), 0.5))
    fp = star_nchain("fp", ids, plus).data
    # a pattern and its complement give the same product
    patterns = ["".join(p) for p in itertools.product("LR", repeat=args.n) if p[0] == "L"]
    prods = {p: star_nchain_holistic(p, ids, plus).data for p in patterns}
    for p in patterns:
        print(f"{p}: max|holistic - markovian fp| = {np.abs(prods[p] - fp).max():.4f}")
    for a, b in itertools.combinations(patterns, 2):
        print(f"{a} vs {b}: {np.abs(prods[a] - prods[b]).max():.4f}")


if __name__ == "__main__":
    main()
