"""Sweep the stabilizer/fiber grid and write one JSON record per (p, l, k, i, j)."""

import argparse
import json
import time
from dataclasses import dataclass

from heishecke.orbit_lab import sweep


@dataclass
class SweepConfig:
    primes: tuple[int, ...] = (2, 3)
    lmax: int = 3
    kmax: int = 4
    out: str = "sweep.jsonl"


def run(cfg: SweepConfig) -> int:
    bad = 0
    with open(cfg.out, "w") as fh:
        for p in cfg.primes:
            for l in range(cfg.lmax + 1):
                for k in range(cfg.kmax + 1):
                    t = time.perf_counter()
                    reports = sweep(p, l, k)
                    secs = time.perf_counter() - t
                    for r in reports:
                        fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
                        bad += not r.match
                    print(f"p={p} l={l} k={k}: {len(reports)} cases, |G|={reports[0].group_order}, {secs:.2f}s")
    print(f"{bad} mismatches, written to {cfg.out}")
    return bad


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="2,3")
    ap.add_argument("--lmax", type=int, default=3)
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--out", default="sweep.jsonl")
    a = ap.parse_args()
    cfg = SweepConfig(tuple(int(x) for x in a.primes.split(",")), a.lmax, a.kmax, a.out)
    raise SystemExit(1 if run(cfg) else 0)


if __name__ == "__main__":
    main()
