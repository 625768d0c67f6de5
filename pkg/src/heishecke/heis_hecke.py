"""Hecke rings of the Heisenberg monoid: global, local at p, and adelic with finite support.

Products use the right-coset form of the structure constants: if
Gamma alpha Gamma is the disjoint union of g Gamma, then the coefficient of
Gamma xi Gamma in (Gamma alpha Gamma)(Gamma beta Gamma) is the number of g
with g^-1 xi in Gamma beta Gamma.  ``hecke_mul_pairs`` computes the same thing
the slow way, from all pairs of left cosets, and serves as the oracle.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

from heishecke.errors import LocalityMismatch, NotInMonoid, WitnessNotFound
from heishecke.exact_linalg import det2, hnf2, mul2
from heishecke.heis_core import (
    HeisDoubleCoset,
    HeisElement,
    HeisLocalParams,
    _tmul,
    global_orbits,
    h_degree,
    h_double_coset_canonical,
    h_inverse_times,
    h_local_canonical,
    iter_left_cosets,
    iter_right_cosets,
    left_key,
    local_classes,
    local_orbits,
    localize,
)
from heishecke.numtheory import crt, factorize
from heishecke.orbit_lab import index_u0_pm_un, predicted_exponent

Coset = Union[HeisDoubleCoset, HeisLocalParams]


class HeisHeckeElement:
    """Finitely supported integer combination of double cosets, global (p=None) or local at p."""

    __slots__ = ("terms", "p")

    def __init__(self, terms: Mapping[Coset, int] | None = None, p: int | None = None):
        clean: dict[Coset, int] = {}
        for key, coeff in (terms or {}).items():
            _check_key(key, p)
            coeff = clean.get(key, 0) + int(coeff)
            if coeff:
                clean[key] = coeff
            else:
                clean.pop(key, None)
        self.terms = clean
        self.p = p

    @classmethod
    def basis(cls, c: Coset) -> HeisHeckeElement:
        return cls({c: 1}, c.p if isinstance(c, HeisLocalParams) else None)

    @classmethod
    def one(cls, p: int | None = None) -> HeisHeckeElement:
        return cls.basis(HeisDoubleCoset.identity() if p is None else HeisLocalParams.identity(p))

    def __eq__(self, other):
        if not isinstance(other, HeisHeckeElement):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __add__(self, other: HeisHeckeElement) -> HeisHeckeElement:
        _same_locality(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return HeisHeckeElement(terms, self.p)

    def __sub__(self, other: HeisHeckeElement) -> HeisHeckeElement:
        return self + (-1) * other

    def __rmul__(self, n: int) -> HeisHeckeElement:
        return HeisHeckeElement({k: n * v for k, v in self.terms.items()}, self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        return hecke_mul(self, other)

    def degree(self) -> int:
        return sum(v * h_degree(k) for k, v in self.terms.items())

    def items(self) -> list[tuple[Coset, int]]:
        return sorted(self.terms.items())

    def to_json(self) -> dict:
        return {
            "locality": "global" if self.p is None else "local",
            "p": None if self.p is None else str(self.p),
            "terms": [{"coset": k.to_json(), "coeff": str(v)} for k, v in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> HeisHeckeElement:
        p = None if data.get("p") is None else int(data["p"])
        load = HeisDoubleCoset.from_json if p is None else HeisLocalParams.from_json
        terms: dict[Coset, int] = defaultdict(int)
        for t in data["terms"]:
            terms[load(t["coset"])] += int(t["coeff"])
        return cls(terms, p)

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*{k}" for k, v in self.items()) or "0"
        return f"HeisHeckeElement({body})"


def _check_key(key, p):
    if p is None:
        if not isinstance(key, HeisDoubleCoset):
            raise LocalityMismatch(f"{key} is not a global double coset")
    elif not isinstance(key, HeisLocalParams) or key.p != p:
        raise LocalityMismatch(f"{key} is not a double coset local at {p}")


def _same_locality(x, y):
    if x.p != y.p:
        raise LocalityMismatch(f"cannot combine locality {x.p} with {y.p}")


def _classifier(p: int | None):
    if p is None:
        return lambda m, v: h_double_coset_canonical(HeisElement.from_tuple(m, v))
    return lambda m, v: h_local_canonical(HeisElement.from_tuple(m, v), p)


def _rep_tuple(c: Coset):
    r = c.representative()
    return r.m, r.vec


@lru_cache(maxsize=4096)
def _right_reps(c: Coset) -> tuple:
    return tuple(iter_right_cosets(c))


@lru_cache(maxsize=65536)
def basis_product(a: Coset, b: Coset) -> tuple[tuple[Coset, int], ...]:
    """Structure constants of (Gamma a Gamma)(Gamma b Gamma), sorted by coset.

    Candidates are the classes of rep(a) * g' for right representatives g' of
    b; each candidate's coefficient is counted over right representatives of a.
    Raises AssertionError if the counted degrees do not add up.
    """
    p = a.p if isinstance(a, HeisLocalParams) else None
    classify = _classifier(p)
    target = h_degree(a) * h_degree(b)
    am, av = _rep_tuple(a)
    candidates = sorted({classify(*_tmul(am, av, gm, gv)) for gm, gv in _right_reps(b)})
    right_a = _right_reps(a)
    out = []
    total = 0
    for xi in candidates:
        xm, xv = _rep_tuple(xi)
        n = 0
        for gm, gv in right_a:
            q = h_inverse_times(gm, gv, xm, xv)
            if q is not None and classify(*q) == b:
                n += 1
        if n:
            out.append((xi, n))
            total += n * h_degree(xi)
        if total == target:
            break
    if total != target:
        raise AssertionError(f"product of {a} and {b}: counted degree {total}, expected {target}")
    return tuple(out)


def hecke_mul(x: HeisHeckeElement, y: HeisHeckeElement) -> HeisHeckeElement:
    _same_locality(x, y)
    out: dict[Coset, int] = defaultdict(int)
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            for c, n in basis_product(a, b):
                out[c] += ca * cb * n
    return HeisHeckeElement(out, x.p)


def _random_gamma(rng: random.Random) -> tuple[tuple[int, int, int, int], tuple[int, int]]:
    m = (1, 0, 0, 1)
    for _ in range(rng.randint(1, 5)):
        t = rng.randint(-3, 3)
        e = rng.choice([(1, t, 0, 1), (1, 0, t, 1), (0, 1, 1, 0), (-1, 0, 0, 1)])
        m = mul2(e, m)
    return m, (rng.randint(-9, 9), rng.randint(-9, 9))


def basis_product_pairs(a: Coset, b: Coset, shuffle_seed: int | None = None) -> dict[Coset, int]:
    """Structure constants from all pairs of left cosets.

    With ``shuffle_seed`` every representative is first moved to a random
    other element of its left coset, so the result also tests independence
    of the choice of representatives.
    """
    p = a.p if isinstance(a, HeisLocalParams) else None
    classify = _classifier(p)
    xs = list(iter_left_cosets(a))
    ys = list(iter_left_cosets(b))
    if shuffle_seed is not None:
        rng = random.Random(shuffle_seed)

        def move(reps):
            moved = []
            for m, v in reps:
                gm, gv = _random_gamma(rng)
                moved.append(_tmul(gm, gv, m, v))
            rng.shuffle(moved)
            return moved

        xs, ys = move(xs), move(ys)
    counts: Counter = Counter()
    for xm, xv in xs:
        for ym, yv in ys:
            counts[left_key(*_tmul(xm, xv, ym, yv))] += 1
    grouped: dict[Coset, list[int]] = defaultdict(list)
    for (m, v), n in counts.items():
        grouped[classify(m, v)].append(n)
    out = {}
    for c, mults in grouped.items():
        if len(set(mults)) != 1 or len(mults) != h_degree(c):
            raise AssertionError(f"non-uniform left-coset multiplicities in class {c}")
        out[c] = mults[0]
    return out


def hecke_mul_pairs(x: HeisHeckeElement, y: HeisHeckeElement, shuffle_seed: int | None = None) -> HeisHeckeElement:
    _same_locality(x, y)
    out: dict[Coset, int] = defaultdict(int)
    for t, ((a, ca), (b, cb)) in enumerate(itertools.product(x.items(), y.items())):
        seed = None if shuffle_seed is None else shuffle_seed + t
        for c, n in basis_product_pairs(a, b, seed).items():
            out[c] += ca * cb * n
    return HeisHeckeElement(out, x.p)


# ---------------------------------------------------------------------------
# adelic ring at finite support


@dataclass(frozen=True, order=True)
class AdelicCoset:
    """Product of local double cosets, identity at every prime not listed."""

    support: tuple[tuple[int, HeisLocalParams], ...] = ()

    def __post_init__(self):
        items = dict(self.support)
        if len(items) != len(self.support):
            raise ValueError("repeated prime in adelic support")
        for p, c in items.items():
            if c.p != p:
                raise ValueError(f"component {c} filed under prime {p}")
        clean = tuple(sorted((p, c) for p, c in items.items() if not c.is_identity))
        object.__setattr__(self, "support", clean)

    @classmethod
    def of(cls, components: Mapping[int, HeisLocalParams] | Iterable[HeisLocalParams]) -> AdelicCoset:
        if isinstance(components, Mapping):
            return cls(tuple(components.items()))
        return cls(tuple((c.p, c) for c in components))

    def component(self, p: int) -> HeisLocalParams:
        return dict(self.support).get(p, HeisLocalParams.identity(p))

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.support)

    @property
    def det(self) -> int:
        out = 1
        for _, c in self.support:
            out *= c.det
        return out

    def degree(self) -> int:
        out = 1
        for _, c in self.support:
            out *= h_degree(c)
        return out

    def to_json(self) -> dict:
        return {str(p): c.to_json() for p, c in self.support}


class AdelicHeckeElement:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[AdelicCoset, int] | None = None):
        clean: dict[AdelicCoset, int] = {}
        for key, coeff in (terms or {}).items():
            coeff = clean.get(key, 0) + int(coeff)
            if coeff:
                clean[key] = coeff
            else:
                clean.pop(key, None)
        self.terms = clean

    @classmethod
    def basis(cls, c: AdelicCoset) -> AdelicHeckeElement:
        return cls({c: 1})

    @classmethod
    def one(cls) -> AdelicHeckeElement:
        return cls.basis(AdelicCoset())

    @classmethod
    def from_local(cls, x: HeisHeckeElement) -> AdelicHeckeElement:
        """Embed an element of the local ring at p."""
        if x.p is None:
            raise LocalityMismatch("only local elements embed into the adelic ring")
        return cls({AdelicCoset.of([c]): v for c, v in x.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, AdelicHeckeElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: AdelicHeckeElement) -> AdelicHeckeElement:
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return AdelicHeckeElement(terms)

    def __rmul__(self, n: int) -> AdelicHeckeElement:
        return AdelicHeckeElement({k: n * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        return adelic_mul(self, other)

    def items(self) -> list[tuple[AdelicCoset, int]]:
        return sorted(self.terms.items())

    def degree(self) -> int:
        return sum(v * c.degree() for c, v in self.terms.items())

    def to_json(self) -> dict:
        return {"terms": [{"coset": c.to_json(), "coeff": str(v)} for c, v in self.items()]}

    def __repr__(self) -> str:
        return f"AdelicHeckeElement({self.items()})"


def _adelic_basis_product(a: AdelicCoset, b: AdelicCoset) -> dict[AdelicCoset, int]:
    """Multiply prime by prime in the local rings and distribute."""
    primes = sorted(set(a.primes) | set(b.primes))
    factors = []
    for p in primes:
        prod = basis_product(a.component(p), b.component(p))
        factors.append([(c, n) for c, n in prod])
    out: dict[AdelicCoset, int] = defaultdict(int)
    for combo in itertools.product(*factors):
        coeff = 1
        for _, n in combo:
            coeff *= n
        out[AdelicCoset.of([c for c, _ in combo])] += coeff
    return out


def adelic_mul(x: AdelicHeckeElement, y: AdelicHeckeElement) -> AdelicHeckeElement:
    out: dict[AdelicCoset, int] = defaultdict(int)
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            for c, n in _adelic_basis_product(a, b).items():
                out[c] += ca * cb * n
    return AdelicHeckeElement(out)


# ---------------------------------------------------------------------------
# eta*


def adelic_class(c: HeisDoubleCoset) -> AdelicCoset:
    """The adelic double coset containing the global one."""
    rep = c.representative()
    return AdelicCoset.of([localize(rep, p) for p, _ in factorize(c.det)])


def eta_fiber(c: AdelicCoset) -> list[HeisDoubleCoset]:
    """All global double cosets whose adelic class is c, sorted.

    The local orbit of (p^j, p^(i+j)) under G_(l,k) is taken at each prime in
    the support; their CRT products fill out one orbit of the product group
    on Z/d1 x Z/d2, which splits into H_A-orbits, one per global class.
    """
    d1 = d2 = 1
    local_sets = []
    for p, lp in c.support:
        m1, m2 = lp.divisors
        d1, d2 = d1 * m1, d2 * m2
        local_sets.append((m1, m2, local_orbits(p, lp.l, lp.k).orbit(lp.point)))
    orbits = global_orbits(d1, d2)
    found = set()
    for combo in itertools.product(*(pts for _, _, pts in local_sets)):
        v1 = crt([pt[0] for pt in combo], [m1 for m1, _, _ in local_sets]) if d1 > 1 else 0
        v2 = crt([pt[1] for pt in combo], [m2 for _, m2, _ in local_sets]) if d2 > 1 else 0
        found.add(orbits.canonical((v1, v2)))
    return [HeisDoubleCoset((d1, d2), v) for v in sorted(found)]


def eta_star(x: AdelicHeckeElement) -> HeisHeckeElement:
    out: dict[HeisDoubleCoset, int] = defaultdict(int)
    for c, n in x.terms.items():
        for g in eta_fiber(c):
            out[g] += n
    return HeisHeckeElement(out)


def eta_star_local(x: HeisHeckeElement) -> HeisHeckeElement:
    """eta* of a local element embedded into the adelic ring."""
    return eta_star(AdelicHeckeElement.from_local(x))


def in_eta_image(target: HeisHeckeElement) -> bool:
    """Whether target is an integer combination of eta*-images of adelic cosets.

    eta* sends an adelic coset to the plain sum over its fiber and distinct
    fibers are disjoint, so the image is exactly the set of elements whose
    coefficients are constant along every fiber.
    """
    if target.p is not None:
        raise LocalityMismatch("eta* lands in the global ring")
    for c, n in target.terms.items():
        for g in eta_fiber(adelic_class(c)):
            if target.terms.get(g, 0) != n:
                return False
    return True


# ---------------------------------------------------------------------------
# witnesses


def noncommutativity_witness(p: int, max_exponent: int = 4):
    """(u, v, u*v, v*u) for the first pair of local classes at p that do not commute.

    Pairs are tried in a fixed order (by the larger determinant, then by
    parameters) among classes with determinant dividing p^max_exponent.
    """
    classes = sorted(local_classes(p, max_exponent), key=lambda c: (c.det, c))
    for t, v in enumerate(classes):
        for u in classes[:t]:
            x, y = HeisHeckeElement.basis(u), HeisHeckeElement.basis(v)
            xy, yx = x * y, y * x
            if xy != yx:
                return x, y, xy, yx
    raise WitnessNotFound(f"every pair of local classes at p={p} with det | p^{max_exponent} commutes")


def nonsurjectivity_params(p: int) -> HeisLocalParams:
    return HeisLocalParams(p, 3, 6, 3, 0) if p == 2 else HeisLocalParams(p, 2, 4, 2, 0)


def nonsurjectivity_witness(p: int) -> dict:
    """Certificate that a single global class is missing from the image of eta*.

    The fiber over the chosen adelic coset has [U_0 : +-U_n] > 1 members; the
    first of them, taken alone, has unequal weights along that fiber.
    """
    lp = nonsurjectivity_params(p)
    c = AdelicCoset.of([lp])
    fiber = eta_fiber(c)
    n = predicted_exponent(lp.l, lp.k, lp.i, lp.j)
    expected = index_u0_pm_un(p, lp.l, n)
    distinguished = fiber[0]
    single = HeisHeckeElement.basis(distinguished)
    fiber_degree = sum(h_degree(g) for g in fiber)
    local_degree = h_degree(lp)
    back = {adelic_class(g) for g in fiber}
    checks = {
        "fiber_size_expected": str(expected),
        "formula": "[U0 : ±Un]",
        "n": str(n),
        "fiber_size_matches": len(fiber) == expected,
        "fiber_degree": str(fiber_degree),
        "local_degree": str(local_degree),
        "degrees_match": fiber_degree == local_degree,
        "fiber_maps_back": back == {c},
        "distinguished_in_image": in_eta_image(single),
        "fiber_sum_in_image": in_eta_image(eta_star(AdelicHeckeElement.basis(c))),
    }
    verified = (
        checks["fiber_size_matches"]
        and checks["degrees_match"]
        and checks["fiber_maps_back"]
        and len(fiber) >= 2
        and not checks["distinguished_in_image"]
        and checks["fiber_sum_in_image"]
    )
    return {
        "p": str(p),
        "params": {"l": str(lp.l), "k": str(lp.k), "j": str(lp.j), "i": str(lp.i)},
        "fiber": [g.to_json() for g in fiber],
        "fiber_size": str(len(fiber)),
        "distinguished": distinguished.to_json(),
        "checks": checks,
        "verified": verified,
    }


def verify_certificate(cert: dict) -> bool:
    """Recheck a certificate from its JSON alone."""
    p = int(cert["p"])
    prm = cert["params"]
    lp = HeisLocalParams(p, int(prm["l"]), int(prm["k"]), int(prm["i"]), int(prm["j"]))
    fiber = [HeisDoubleCoset.from_json(g) for g in cert["fiber"]]
    if fiber != eta_fiber(AdelicCoset.of([lp])) or int(cert["fiber_size"]) != len(fiber):
        return False
    n = predicted_exponent(lp.l, lp.k, lp.i, lp.j)
    if len(fiber) != index_u0_pm_un(p, lp.l, n) or len(fiber) < 2:
        return False
    g = HeisDoubleCoset.from_json(cert["distinguished"])
    if g not in fiber or not g.is_canonical():
        return False
    return not in_eta_image(HeisHeckeElement.basis(g))


def iter_local_basis(p: int, max_exponent: int) -> Iterator[HeisHeckeElement]:
    for c in local_classes(p, max_exponent):
        yield HeisHeckeElement.basis(c)
