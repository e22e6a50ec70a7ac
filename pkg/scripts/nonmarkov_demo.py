"""Print the Z/X/Z quasiprobabilities of id^2 * (1/2) and their conditionals."""

from __future__ import annotations

import itertools

from qsot.scenarios import nonmarkov_demo


def main() -> None:
    rep = nonmarkov_demo()
    print("i j k   Q(i,j,k)  Q(k|i,j)  Q(k|j)")
    for i, j, k in itertools.product(range(2), repeat=3):
        q = rep.distribution[i, j, k].real
        print(f"{i} {j} {k}   {q:8.4f}  {rep.cond_given_ab[i, j, k].real:8.4f}  {rep.cond_given_b[j, k].real:6.4f}")
    print(f"formula defect {rep.formula_defect:.1e}; Markov defect {rep.markov.max_defect:.3f} at {rep.markov.witness}")


if __name__ == "__main__":
    main()
