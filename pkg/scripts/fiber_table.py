"""Tabulate eta* fiber sizes over single-prime adelic cosets against [U_0 : +-U_n]."""

import argparse
from dataclasses import dataclass

from heishecke.heis_core import HeisLocalParams
from heishecke.heis_hecke import AdelicCoset, eta_fiber
from heishecke.orbit_lab import index_u0_pm_un, predicted_exponent


@dataclass
class TableConfig:
    primes: tuple[int, ...] = (2, 3, 5)
    max_exponent: int = 8
    only_split: bool = True


def rows(cfg: TableConfig):
    for p in cfg.primes:
        for l in range(cfg.max_exponent // 2 + 1):
            for k in range(cfg.max_exponent - 2 * l + 1):
                for j in range(l + 1):
                    for i in range(k + 1):
                        n = predicted_exponent(l, k, i, j)
                        want = index_u0_pm_un(p, l, n)
                        if cfg.only_split and want == 1:
                            continue
                        got = len(eta_fiber(AdelicCoset.of([HeisLocalParams(p, l, k, i, j)])))
                        yield p, l, k, i, j, n, got, want


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="2,3,5")
    ap.add_argument("--max-exponent", type=int, default=8)
    ap.add_argument("--all", action="store_true", help="include cosets whose fiber is a single class")
    a = ap.parse_args()
    cfg = TableConfig(tuple(int(x) for x in a.primes.split(",")), a.max_exponent, not a.all)
    print(f"{'p':>3} {'l':>2} {'k':>2} {'i':>2} {'j':>2} {'n':>2} {'fiber':>6} {'index':>6}")
    bad = 0
    for p, l, k, i, j, n, got, want in rows(cfg):
        bad += got != want
        flag = "" if got == want else "  <-- mismatch"
        print(f"{p:>3} {l:>2} {k:>2} {i:>2} {j:>2} {n:>2} {got:>6} {want:>6}{flag}")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
