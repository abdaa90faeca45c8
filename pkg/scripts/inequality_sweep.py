#!/usr/bin/env python3
"""Sweep the two dissipation-term inequalities over models and dimensions.

Samples positive cosine test functions and reports the worst observed
ratio against the proven constant for each (model, n) pair.

Usage: python scripts/inequality_sweep.py [--trials 500] [--seed 1]
"""

import argparse

from entroflow.coeff_models import Linear, PowerLaw, ShiftedPowerLaw
from entroflow.inequalities import bernis_constant, worst_ratio_search


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20260824)
    ap.add_argument("--cells", type=int, default=64)
    args = ap.parse_args()

    models = [("linear", Linear()), ("power_law_m2", PowerLaw(2.0)),
              ("shifted_m2", ShiftedPowerLaw(2.0))]
    print("%-14s %2s %10s %10s %10s %6s" %
          ("model", "n", "worst_B", "const_B", "worst_F", "ok"))
    for name, model in models:
        for n in (1, 2, 3):
            cells = args.cells if n < 3 else max(16, args.cells // 4)
            s = worst_ratio_search(n, model, args.trials, args.seed, cells=cells)
            print("%-14s %2d %10.4f %10.4f %10.4f %6s"
                  % (name, n, s.max_bernis, bernis_constant(n),
                     s.max_fisher, s.all_passed))


if __name__ == "__main__":
    main()
