"""Classical Hecke rings of GL2 over Z and Z_p, computed by left-coset enumeration.

Double cosets are keyed by their elementary divisors (d1, d2).  A locality of
``None`` means the global ring; an integer p means the local ring at p, whose
double cosets are realised by p-power divisor pairs.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

from heishecke.errors import LocalityMismatch, NotInMonoid, SizeLimit
from heishecke.exact_linalg import IntMatrix, det, divisor_chain, hnf2, mul2
from heishecke.numtheory import divisors, is_prime_power_of, valuation

DEFAULT_GL_BUDGET = 10**6


@dataclass(frozen=True, order=True)
class GlDoubleCoset:
    divisors: tuple[int, int]
    p: int | None = None

    def __post_init__(self):
        d1, d2 = (int(x) for x in self.divisors)
        if d1 <= 0 or d2 % d1:
            raise ValueError(f"invalid divisor chain {self.divisors}")
        if self.p is not None and not (is_prime_power_of(d1, self.p) and is_prime_power_of(d2, self.p)):
            raise ValueError(f"{self.divisors} is not a {self.p}-power chain")
        object.__setattr__(self, "divisors", (d1, d2))

    @property
    def matrix(self) -> IntMatrix:
        return IntMatrix.diag(*self.divisors)

    @property
    def index(self) -> int:
        return self.divisors[0] * self.divisors[1]

    def to_json(self) -> list[str]:
        return [str(x) for x in self.divisors]


def gl_canonicalize(m: IntMatrix, p: int | None = None) -> GlDoubleCoset:
    if m.dim != 2 or det(m) == 0:
        raise NotInMonoid(f"{m!r} is not in M2(Z) cap GL2(Q)")
    d1, d2 = divisor_chain(m)
    if p is not None and not is_prime_power_of(d1 * d2, p):
        raise NotInMonoid(f"det of {m!r} is not a power of {p}")
    return GlDoubleCoset((d1, d2), p)


@lru_cache(maxsize=4096)
def _left_coset_tuples(d1: int, d2: int, budget: int) -> tuple[tuple[int, int, int, int], ...]:
    n = d1 * d2
    if n > budget:
        raise SizeLimit(f"divisor product {n} exceeds budget {budget}")
    out = []
    for a in divisors(n):
        d = n // a
        for b in range(d):
            if divisor_chain(IntMatrix.of(((a, b), (0, d))))[0] == d1:
                out.append((a, b, 0, d))
    return tuple(out)


def gl_left_coset_tuples(c: GlDoubleCoset, budget: int = DEFAULT_GL_BUDGET):
    return _left_coset_tuples(*c.divisors, budget)


def gl_left_cosets(c: GlDoubleCoset, budget: int = DEFAULT_GL_BUDGET) -> list[IntMatrix]:
    """Hermite-normal representatives of the left cosets inside the double coset."""
    return [IntMatrix.of((t[:2], t[2:])) for t in gl_left_coset_tuples(c, budget)]


def gl_degree(c: GlDoubleCoset, budget: int = DEFAULT_GL_BUDGET) -> int:
    return len(gl_left_coset_tuples(c, budget))


class GlHeckeElement:
    """Finitely supported Z-combination of double cosets sharing one locality."""

    __slots__ = ("terms", "p")

    def __init__(self, terms: Mapping[GlDoubleCoset | tuple[int, int], int] | None = None, p: int | None = None):
        clean: dict[GlDoubleCoset, int] = {}
        for key, coeff in (terms or {}).items():
            if not isinstance(key, GlDoubleCoset):
                key = GlDoubleCoset(tuple(key), p)
            if key.p != p:
                raise LocalityMismatch(f"term {key} does not have locality {p}")
            coeff = clean.get(key, 0) + int(coeff)
            if coeff:
                clean[key] = coeff
            else:
                clean.pop(key, None)
        self.terms = clean
        self.p = p

    @classmethod
    def basis(cls, d1: int, d2: int, p: int | None = None) -> GlHeckeElement:
        return cls({GlDoubleCoset((d1, d2), p): 1}, p)

    @classmethod
    def one(cls, p: int | None = None) -> GlHeckeElement:
        return cls.basis(1, 1, p)

    def __eq__(self, other):
        if not isinstance(other, GlHeckeElement):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def __add__(self, other: GlHeckeElement) -> GlHeckeElement:
        _check_locality(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return GlHeckeElement(terms, self.p)

    def __rmul__(self, n: int) -> GlHeckeElement:
        return GlHeckeElement({k: n * v for k, v in self.terms.items()}, self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        return gl_hecke_mul(self, other)

    def degree(self) -> int:
        return sum(v * gl_degree(k) for k, v in self.terms.items())

    def items(self) -> Iterator[tuple[GlDoubleCoset, int]]:
        return iter(sorted(self.terms.items()))

    def to_json(self) -> dict:
        return {
            "locality": "global" if self.p is None else "local",
            "p": None if self.p is None else str(self.p),
            "terms": [{"divisors": k.to_json(), "coeff": str(v)} for k, v in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> GlHeckeElement:
        p = data.get("p")
        p = None if p is None else int(p)
        terms: dict[GlDoubleCoset, int] = defaultdict(int)
        for t in data["terms"]:
            terms[GlDoubleCoset(tuple(int(x) for x in t["divisors"]), p)] += int(t["coeff"])
        return cls(terms, p)

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*{k.divisors}" for k, v in self.items()) or "0"
        where = "global" if self.p is None else f"p={self.p}"
        return f"GlHeckeElement({body}; {where})"


def _check_locality(x, y):
    if x.p != y.p:
        raise LocalityMismatch(f"cannot combine locality {x.p} with {y.p}")


def _basis_product(a: GlDoubleCoset, b: GlDoubleCoset) -> dict[GlDoubleCoset, int]:
    counts: Counter = Counter()
    for x in gl_left_coset_tuples(a):
        for y in gl_left_coset_tuples(b):
            counts[hnf2(mul2(x, y))[0]] += 1
    grouped: dict[GlDoubleCoset, list[int]] = defaultdict(list)
    for h, n in counts.items():
        grouped[gl_canonicalize(IntMatrix.of((h[:2], h[2:])), a.p)].append(n)
    out = {}
    for coset, mults in grouped.items():
        # every left coset of the target double coset must occur, all equally often
        if len(set(mults)) != 1 or len(mults) != gl_degree(coset):
            raise AssertionError(f"non-uniform coset multiplicities for {coset}: {mults}")
        out[coset] = mults[0]
    return out


def gl_hecke_mul(x: GlHeckeElement, y: GlHeckeElement) -> GlHeckeElement:
    """Product by enumerating pairs of left-coset representatives and regrouping."""
    _check_locality(x, y)
    out: dict[GlDoubleCoset, int] = defaultdict(int)
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            for c, n in _basis_product(a, b).items():
                out[c] += ca * cb * n
    return GlHeckeElement(out, x.p)


def local_chain(p: int, l: int, k: int) -> GlDoubleCoset:
    return GlDoubleCoset((p**l, p ** (l + k)), p)


def chain_exponents(c: GlDoubleCoset) -> tuple[int, int]:
    """(l, k) with divisors (p^l, p^(l+k)) for a local double coset."""
    d1, d2 = c.divisors
    l = valuation(d1, c.p)
    return l, valuation(d2, c.p) - l
