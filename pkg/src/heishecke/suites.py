"""Verification sweeps shared by the CLI ``verify`` command and the test suite."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache

from heishecke.gl_hecke import GlHeckeElement
from heishecke.heis_core import HeisLocalParams, h_degree, local_classes
from heishecke.heis_hecke import (
    AdelicCoset,
    AdelicHeckeElement,
    HeisHeckeElement,
    adelic_class,
    eta_fiber,
    eta_star,
    eta_star_local,
    hecke_mul_pairs,
    noncommutativity_witness,
)
from heishecke.orbit_lab import (
    DEFAULT_GLK_BUDGET,
    DEFAULT_SCAN_BUDGET,
    filtration_subgroup,
    integral_surjectivity_report,
    sweep,
)

SUITES = ("detsa", "cor47", "surjectivity", "commute", "noncommute", "eta-mult", "classical")
SURJECTIVITY_CASES = ((2, 1, 1), (2, 2, 2), (3, 1, 1), (3, 2, 4))


@dataclass
class CaseResult:
    case: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"case": self.case, "pass": self.ok, "detail": self.detail}


@dataclass
class SuiteResult:
    name: str
    cases: list[CaseResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases)

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.ok]

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "pass": self.ok,
            "total": str(len(self.cases)),
            "failed": str(len(self.failures)),
            "cases": [c.to_json() for c in self.cases],
        }


@lru_cache(maxsize=None)
def _sweep(p: int, l: int, k: int, budget: int):
    return tuple(sweep(p, l, k, budget))


def _grid(pset, lmax, kmax):
    return [(p, l, k) for p in pset for l in range(lmax + 1) for k in range(kmax + 1)]


def detsa(pset=(2, 3), lmax: int = 3, kmax: int = 4, budget: int = DEFAULT_SCAN_BUDGET) -> SuiteResult:
    """Stabilizer determinant image is U_min(i, k-i, l-j) / U_l everywhere on the grid."""
    cases = []
    for p, l, k in _grid(pset, lmax, kmax):
        for r in _sweep(p, l, k, budget):
            ok = r.n is not None and filtration_subgroup(p, l, r.n) == filtration_subgroup(p, l, r.predicted_n)
            ok = ok and r.orbit_size * r.stab_size == r.group_order
            cases.append(CaseResult(f"p={p} l={l} k={k} i={r.i} j={r.j}", ok, {"n": str(r.n), "expected": str(r.predicted_n)}))
    return SuiteResult("detsa", cases)


def orbit_counts(pset=(2, 3), lmax: int = 3, kmax: int = 4, budget: int = DEFAULT_SCAN_BUDGET) -> SuiteResult:
    """G^+- orbit count on each G-orbit equals [U_0 : +-U_n]."""
    cases = []
    for p, l, k in _grid(pset, lmax, kmax):
        for r in _sweep(p, l, k, budget):
            ok = r.fiber_count == r.formula_count
            detail = {"fiber_count": str(r.fiber_count), "formula_count": str(r.formula_count)}
            cases.append(CaseResult(f"p={p} l={l} k={k} i={r.i} j={r.j}", ok, detail))
    return SuiteResult("cor47", cases)


def surjectivity(cases=SURJECTIVITY_CASES, entry_bound: int = 8, budget: int = DEFAULT_GLK_BUDGET) -> SuiteResult:
    out = []
    for p, l, k in cases:
        r = integral_surjectivity_report(p, l, k, entry_bound, budget)
        detail = {
            "entry_bound": str(r.entry_bound),
            "pm": f"{r.pm_generated}/{r.pm_target}",
            "one": f"{r.one_generated}/{r.one_target}",
        }
        out.append(CaseResult(f"p={p} l={l} k={k}", r.ok, detail))
    return SuiteResult("surjectivity", out)


def commute(pset=(2, 3), max_exponent: int = 4) -> SuiteResult:
    """eta* is injective on local classes and images at different primes commute."""
    images = {}
    cases = []
    for p in pset:
        imgs = {c: eta_star_local(HeisHeckeElement.basis(c)) for c in local_classes(p, max_exponent)}
        distinct = len(set(imgs.values())) == len(imgs)
        cases.append(CaseResult(f"injective p={p}", distinct, {"classes": str(len(imgs))}))
        images[p] = imgs
    for p, q in itertools.combinations(pset, 2):
        bad = []
        n = 0
        for (u, x), (v, y) in itertools.product(images[p].items(), images[q].items()):
            n += 1
            if x * y != y * x:
                bad.append(f"{u} {v}")
        cases.append(CaseResult(f"commute p={p} q={q}", not bad, {"pairs": str(n), "failing": bad}))
    return SuiteResult("commute", cases)


def noncommute(p: int = 2, max_exponent: int = 4, shuffle_seed: int = 0) -> SuiteResult:
    """Find u, v with uv != vu and recompute both products from shuffled left cosets."""
    u, v, uv, vu = noncommutativity_witness(p, max_exponent)
    uv2 = hecke_mul_pairs(u, v, shuffle_seed=shuffle_seed)
    vu2 = hecke_mul_pairs(v, u, shuffle_seed=shuffle_seed + 1)
    detail = {
        "u": u.to_json(),
        "v": v.to_json(),
        "uv": uv.to_json(),
        "vu": vu.to_json(),
        "recomputed_agree": uv2 == uv and vu2 == vu,
        "degrees": [str(uv.degree()), str(vu.degree())],
    }
    ok = uv != vu and uv2 == uv and vu2 == vu and uv.degree() == vu.degree() == u.degree() * v.degree()
    return SuiteResult("noncommute", [CaseResult(f"p={p}", ok, detail)])


def eta_mult(pset=(2, 3), max_exponent: int = 3, samples: int = 40, seed: int = 0) -> SuiteResult:
    """eta*(xy) = eta*(x) eta*(y) and eta* preserves degree, on sampled adelic basis elements."""
    rng = random.Random(seed)
    pool = [AdelicCoset.of([c]) for p in pset for c in local_classes(p, max_exponent)]
    pool += [AdelicCoset.of([a, b]) for a, b in itertools.product(local_classes(pset[0], 2), local_classes(pset[-1], 2))][:20]
    pool = sorted(set(pool))
    cases = []
    for t in range(samples):
        a, b = rng.choice(pool), rng.choice(pool)
        x, y = AdelicHeckeElement.basis(a), AdelicHeckeElement.basis(b)
        xy = x * y
        lhs, rhs = eta_star(xy), eta_star(x) * eta_star(y)
        deg_ok = lhs.degree() == xy.degree() == x.degree() * y.degree()
        back = all(adelic_class(g) == c for c in xy.terms for g in eta_fiber(c))
        cases.append(CaseResult(f"{a.to_json()} * {b.to_json()}", lhs == rhs and deg_ok and back, {}))
    return SuiteResult("eta-mult", cases)


def classical(pset=(2, 3, 5), samples: int = 500, seed: int = 0, max_exponent: int = 3) -> SuiteResult:
    """GL2 baseline: T(1,p)^2 = T(1,p^2) + (p+1) T(p,p), commutativity and multiplicative degree."""
    cases = []
    for p in pset:
        t = GlHeckeElement.basis(1, p, p)
        want = GlHeckeElement.basis(1, p * p, p) + (p + 1) * GlHeckeElement.basis(p, p, p)
        cases.append(CaseResult(f"T(1,{p})^2", t * t == want, {"product": (t * t).to_json()}))
    rng = random.Random(seed)
    pool = []
    for p in pset:
        for e in range(max_exponent + 1):
            for l in range(e // 2 + 1):
                pool.append(GlHeckeElement.basis(p**l, p ** (e - l), p))
    bad_comm = bad_deg = 0
    for _ in range(samples):
        x = rng.choice(pool)
        y = rng.choice([q for q in pool if q.p == x.p])
        xy, yx = x * y, y * x
        bad_comm += xy != yx
        bad_deg += xy.degree() != x.degree() * y.degree()
    cases.append(CaseResult("commutative", bad_comm == 0, {"samples": str(samples), "failing": str(bad_comm)}))
    cases.append(CaseResult("degree", bad_deg == 0, {"samples": str(samples), "failing": str(bad_deg)}))
    return SuiteResult("classical", cases)


def run_suite(name: str, **kw) -> SuiteResult:
    funcs = {
        "detsa": detsa,
        "cor47": orbit_counts,
        "surjectivity": surjectivity,
        "commute": commute,
        "noncommute": noncommute,
        "eta-mult": eta_mult,
        "classical": classical,
    }
    if name not in funcs:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return funcs[name](**kw)


def local_degree_table(p: int, max_exponent: int) -> dict[HeisLocalParams, int]:
    return {c: h_degree(c) for c in local_classes(p, max_exponent)}
