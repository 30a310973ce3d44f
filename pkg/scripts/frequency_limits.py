#!/usr/bin/env python3
"""Show one trial record converging in Q_p while diverging to 0 in R.

The synthesizer builds checkpoint counts N_j = b + p^(2j) for a target unit
ratio a/b, so the relative frequencies a / N_j rush to zero on the real line
while their p-adic distance to a/b shrinks like p^(-2j).  The script prints
the raw record, then runs the trailing-window stabilization test in both
topologies over a range of demanded strengths.
"""

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

sys.path.insert(0, "src")

from padicmech.core import padic_norm
from padicmech.prob import dual_limit_synthesize, stabilization_detect


@dataclass
class StudyConfig:
    prime: int = 5
    alpha: Fraction = Fraction(1)
    count: int = 12
    window: int = 4


def run(cfg: StudyConfig) -> None:
    rec = dual_limit_synthesize(cfg.prime, cfg.alpha, cfg.count)
    print(f"target ratio {cfg.alpha}, p = {cfg.prime}, {cfg.count} checkpoints")
    print(f"{'j':>3} {'N_j':>16} {'n_j':>6} {'freq':>22} {'|freq - alpha|_p':>18}")
    for j, (n_trials, n_succ, nu) in enumerate(
            zip(rec.checkpoints, rec.successes, rec.frequencies), start=1):
        dist = padic_norm(nu - cfg.alpha, cfg.prime)
        print(f"{j:>3} {n_trials:>16} {n_succ:>6} {str(nu):>22} {str(dist):>18}")

    print("\nreal-topology verdicts (epsilon = 10^-k):")
    for k in (2, 4, 6, 8):
        rep = stabilization_detect(rec, "real", window=cfg.window,
                                   epsilon=Fraction(1, 10**k))
        cand = f", candidate {rep.candidate}" if rep.candidate is not None else ""
        print(f"  k={k}: {rep.status}{cand}")

    print("\np-adic verdicts (threshold p^-s):")
    for s in (1, 2, 4, 6):
        rep = stabilization_detect(rec, "padic", window=cfg.window,
                                   prime=cfg.prime, strength=s)
        cand = f", candidate {rep.candidate}" if rep.candidate is not None else ""
        print(f"  s={s}: {rep.status}{cand}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prime", type=int, default=5)
    ap.add_argument("--alpha", type=Fraction, default=Fraction(1))
    ap.add_argument("--count", type=int, default=12)
    ap.add_argument("--window", type=int, default=4)
    args = ap.parse_args()
    run(StudyConfig(args.prime, args.alpha, args.count, args.window))


if __name__ == "__main__":
    main()
