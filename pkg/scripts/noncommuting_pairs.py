"""List every non-commuting pair of local double cosets with small determinant."""

import argparse
import itertools
from dataclasses import dataclass

from heishecke.heis_core import local_classes
from heishecke.heis_hecke import HeisHeckeElement


@dataclass
class PairConfig:
    p: int = 2
    max_exponent: int = 3


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--max-exponent", type=int, default=3)
    a = ap.parse_args()
    cfg = PairConfig(a.p, a.max_exponent)
    classes = sorted(local_classes(cfg.p, cfg.max_exponent), key=lambda c: (c.det, c))
    total = bad = 0
    for u, v in itertools.combinations(classes, 2):
        x, y = HeisHeckeElement.basis(u), HeisHeckeElement.basis(v)
        total += 1
        if x * y != y * x:
            bad += 1
            print(f"(l,k,i,j)=({u.l},{u.k},{u.i},{u.j}) vs ({v.l},{v.k},{v.i},{v.j})")
    print(f"{bad} of {total} pairs fail to commute at p={cfg.p}")


if __name__ == "__main__":
    main()
