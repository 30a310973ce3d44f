#!/usr/bin/env python3
"""Export the digit-map image of Z_p as CSV for plotting.

Every residue class mod p^depth is sent to [0, 1] by reading its digits as a
base-k fraction.  Plotting column `image` against column `residue` shows the
self-similar staircase; `error` bounds how far the true image of any point in
the class can drift from the listed value.
"""

import argparse
import csv
import sys
from dataclasses import dataclass

sys.path.insert(0, "src")

from padicmech.core import PadicInt, monna_embed


@dataclass
class GridConfig:
    prime: int = 3
    depth: int = 4
    image_base: int = 3


def run(cfg: GridConfig, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["residue", "literal", "image", "error"])
    for r in range(cfg.prime**cfg.depth):
        x = PadicInt(cfg.prime, r, cfg.depth)
        img = monna_embed(x, cfg.image_base)
        w.writerow([r, str(x), str(img.value), str(img.error_bound)])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prime", type=int, default=3)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--image-base", type=int, default=None,
                    help="denominator base of the image (default: the prime)")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    cfg = GridConfig(args.prime, args.depth,
                     args.image_base if args.image_base else args.prime)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            run(cfg, fh)
    else:
        run(cfg, sys.stdout)


if __name__ == "__main__":
    main()
