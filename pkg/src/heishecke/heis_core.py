"""The Heisenberg monoid: pairs (A, a) with product (A, a)(B, b) = (AB, Ab + det(B) a).

Gamma_H = GL2(Z) x Z^2 acts on both sides of Delta_H = (M2(Z) cap GL2(Q)) x Z^2.

Left cosets.  (X, x)(B, b) = (XB, Xb + det(B) x), so a left coset is determined
by the Hermite form of B together with X b mod det(B).

Double cosets.  If U B V = A = diag(d1, d2) then (U, 0)(B, b)(V, 0) =
(A, det(V) U b), and the pairs fixing A act on the vector through
a -> det(X) X a mod A Z^2 for X in GL2(Z) with A^-1 X A integral, i.e. with
X[1,0] divisible by d2/d1.  Since -I lies in that group the twist by det(X)
does not change orbits.  The image H_A of that group in Aut(Z/d1 x Z/d2) is
the set of mixed-modulus matrices of determinant +-1 mod d1 (one common sign
across all primes), which we build from the per-prime G^1 generators of
``orbit_lab`` glued by CRT, plus diag(1, -1).

Locally at p the same computation runs with Gamma_0(p^k) in place of the
integral group, whose image is all of G_{l,k}.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from heishecke.errors import NotInMonoid, NotLocallyIntegral
from heishecke.exact_linalg import IntMatrix, QuotientVector, det2, hnf2, mul2
from heishecke.gl_hecke import GlDoubleCoset, gl_left_coset_tuples
from heishecke.numtheory import crt, factorize, is_prime, is_prime_power_of, valuation
from heishecke.orbit_lab import GlkGroup, Mixed, Point, local_vector, orbit_bfs

Mat = tuple[int, int, int, int]
Vec = tuple[int, int]


@dataclass(frozen=True, slots=True)
class HeisElement:
    mat: IntMatrix
    vec: tuple[int, int]

    def __post_init__(self):
        if self.mat.dim != 2 or len(self.vec) != 2:
            raise ValueError("HeisElement needs a 2x2 matrix and a length-2 vector")
        object.__setattr__(self, "vec", (int(self.vec[0]), int(self.vec[1])))

    @classmethod
    def of(cls, mat, vec=(0, 0)) -> HeisElement:
        if not isinstance(mat, IntMatrix):
            mat = IntMatrix.of(mat)
        return cls(mat, tuple(vec))

    @classmethod
    def from_tuple(cls, m: Mat, v: Vec) -> HeisElement:
        return cls(IntMatrix(((m[0], m[1]), (m[2], m[3]))), v)

    @classmethod
    def identity(cls) -> HeisElement:
        return cls(IntMatrix.identity(2), (0, 0))

    @property
    def m(self) -> Mat:
        (a, b), (c, d) = self.mat.rows
        return (a, b, c, d)

    @property
    def det(self) -> int:
        return det2(self.m)

    def in_delta(self) -> bool:
        return self.det != 0

    def in_gamma(self) -> bool:
        return abs(self.det) == 1

    def __mul__(self, other: HeisElement) -> HeisElement:
        return h_mul(self, other)

    def to_json(self) -> dict:
        return {"mat": self.mat.to_json(), "vec": [str(x) for x in self.vec]}

    @classmethod
    def from_json(cls, data: dict) -> HeisElement:
        return cls(IntMatrix.from_json(data["mat"]), tuple(int(x) for x in data["vec"]))


def h_mul(x: HeisElement, y: HeisElement) -> HeisElement:
    m, v = _tmul(x.m, x.vec, y.m, y.vec)
    return HeisElement.from_tuple(m, v)


def _tmul(a: Mat, av: Vec, b: Mat, bv: Vec) -> tuple[Mat, Vec]:
    db = b[0] * b[3] - b[1] * b[2]
    return mul2(a, b), (a[0] * bv[0] + a[1] * bv[1] + db * av[0], a[2] * bv[0] + a[3] * bv[1] + db * av[1])


def _apply(m: Mat, v: Vec) -> Vec:
    return (m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1])


def _inv_unimodular(m: Mat) -> Mat:
    a, b, c, d = m
    s = a * d - b * c  # +-1
    return (s * d, -s * b, -s * c, s * a)


# ---------------------------------------------------------------------------
# parameters and canonical forms


@dataclass(frozen=True, order=True)
class HeisLocalParams:
    """Local double coset of (diag[p^l, p^(l+k)], (p^j, p^(i+j)))."""

    p: int
    l: int
    k: int
    i: int
    j: int

    def __post_init__(self):
        if not is_prime(self.p) or self.l < 0 or self.k < 0 or not (0 <= self.j <= self.l and 0 <= self.i <= self.k):
            raise ValueError(f"invalid local parameters {self}")

    @classmethod
    def identity(cls, p: int) -> HeisLocalParams:
        return cls(p, 0, 0, 0, 0)

    @property
    def is_identity(self) -> bool:
        return self.l == 0 and self.k == 0

    @property
    def divisors(self) -> tuple[int, int]:
        return (self.p**self.l, self.p ** (self.l + self.k))

    @property
    def det(self) -> int:
        return self.p ** (2 * self.l + self.k)

    @property
    def point(self) -> Point:
        return local_vector(self.p, self.l, self.k, self.i, self.j)

    def representative(self) -> HeisElement:
        return HeisElement(IntMatrix.diag(*self.divisors), (self.p**self.j, self.p ** (self.i + self.j)))

    def to_json(self) -> dict:
        return {key: str(getattr(self, key)) for key in ("p", "l", "k", "i", "j")}

    @classmethod
    def from_json(cls, data: dict) -> HeisLocalParams:
        return cls(*(int(data[key]) for key in ("p", "l", "k", "i", "j")))


@dataclass(frozen=True, order=True)
class HeisDoubleCoset:
    """Global double coset of (diag[d1, d2], v) with v the least point of its H_A-orbit."""

    divisors: tuple[int, int]
    vclass: tuple[int, int]

    def __post_init__(self):
        d1, d2 = (int(x) for x in self.divisors)
        if d1 <= 0 or d2 % d1:
            raise ValueError(f"invalid divisor chain {self.divisors}")
        object.__setattr__(self, "divisors", (d1, d2))
        object.__setattr__(self, "vclass", (int(self.vclass[0]) % d1, int(self.vclass[1]) % d2))

    @property
    def d(self) -> tuple[int, int]:
        return self.divisors

    @property
    def v(self) -> tuple[int, int]:
        return self.vclass

    @classmethod
    def make(cls, d1: int, d2: int, v: Vec) -> HeisDoubleCoset:
        """Canonicalise an arbitrary vector class mod (d1, d2)."""
        return cls((d1, d2), global_orbits(d1, d2).canonical((v[0] % d1, v[1] % d2)))

    @classmethod
    def identity(cls) -> HeisDoubleCoset:
        return cls((1, 1), (0, 0))

    @property
    def det(self) -> int:
        return self.d[0] * self.d[1]

    def representative(self) -> HeisElement:
        return HeisElement(IntMatrix.diag(*self.d), self.v)

    def is_canonical(self) -> bool:
        return global_orbits(*self.d).canonical(self.v) == self.v

    def to_json(self) -> dict:
        return {"d": [str(x) for x in self.d], "v": [str(x) for x in self.v]}

    @classmethod
    def from_json(cls, data: dict) -> HeisDoubleCoset:
        return cls(tuple(int(x) for x in data["d"]), tuple(int(x) for x in data["v"]))

    def quotient_vector(self) -> QuotientVector:
        return QuotientVector(self.d, self.v)


class OrbitIndex:
    """Lazily computed orbits of a finite group acting on Z/m1 x Z/m2.

    Orbits are stored once found; the lock keeps concurrent callers from
    expanding the same orbit twice.
    """

    def __init__(self, m1: int, m2: int, gens: tuple[Mixed, ...]):
        self.m1, self.m2, self.gens = m1, m2, gens
        self._canon: dict[Point, Point] = {}
        self._orbits: dict[Point, tuple[Point, ...]] = {}
        self._lock = threading.Lock()

    def orbit(self, v: Point) -> tuple[Point, ...]:
        v = (v[0] % self.m1, v[1] % self.m2)
        c = self._canon.get(v)
        if c is None:
            with self._lock:
                c = self._canon.get(v)
                if c is None:
                    orb = tuple(sorted(orbit_bfs(v, self.gens, self.m1, self.m2)))
                    c = orb[0]
                    self._orbits[c] = orb
                    for w in orb:
                        self._canon[w] = c
        return self._orbits[c]

    def canonical(self, v: Point) -> Point:
        return self.orbit(v)[0]

    def all_orbits(self) -> list[tuple[Point, ...]]:
        seen = []
        for v1 in range(self.m1):
            for v2 in range(self.m2):
                if (v1, v2) not in self._canon:
                    self.orbit((v1, v2))
        for c in sorted(self._orbits):
            seen.append(self._orbits[c])
        return seen


def _embed(local: Mixed, p: int, e1: int, e2: int, d1: int, d2: int) -> Mixed:
    """CRT-glue a p-local mixed matrix with the identity at the other primes."""
    q1, q2 = p**e1, p**e2
    r1, r2 = d1 // q1, d2 // q2
    ident = (1, 0, 0, 1)
    row1 = [crt([local[t], ident[t]], [q1, r1]) if d1 > 1 else 0 for t in (0, 1)]
    row2 = [crt([local[t], ident[t]], [q2, r2]) if d2 > 1 else 0 for t in (2, 3)]
    return (row1[0] % d1, row1[1] % d1, row2[0] % d2, row2[1] % d2)


@lru_cache(maxsize=None)
def quotient_group_generators(d1: int, d2: int) -> tuple[Mixed, ...]:
    """Generators of H_A, the image of {X in GL2(Z): X[1,0] = 0 mod d2/d1} acting on Z/d1 x Z/d2."""
    if d1 <= 0 or d2 % d1:
        raise ValueError(f"invalid divisor chain ({d1}, {d2})")
    gens: list[Mixed] = []
    for p, e2 in factorize(d2):
        e1 = valuation(d1, p) if d1 % p == 0 else 0
        for g in GlkGroup(p, e1, e2 - e1).generators("one"):
            gens.append(_embed(g, p, e1, e2, d1, d2))
    gens.append((1 % d1, 0, 0, -1 % d2))
    ident = (1 % d1, 0, 0, 1 % d2)
    return tuple(dict.fromkeys(g for g in gens if g != ident))


_ORBIT_CACHE: dict[tuple, OrbitIndex] = {}
_ORBIT_CACHE_LOCK = threading.Lock()


def global_orbits(d1: int, d2: int) -> OrbitIndex:
    key = ("global", d1, d2)
    with _ORBIT_CACHE_LOCK:
        idx = _ORBIT_CACHE.get(key)
        if idx is None:
            idx = _ORBIT_CACHE[key] = OrbitIndex(d1, d2, quotient_group_generators(d1, d2))
    return idx


def local_orbits(p: int, l: int, k: int) -> OrbitIndex:
    key = ("local", p, l, k)
    with _ORBIT_CACHE_LOCK:
        idx = _ORBIT_CACHE.get(key)
        if idx is None:
            G = GlkGroup(p, l, k)
            idx = _ORBIT_CACHE[key] = OrbitIndex(G.m1, G.m2, G.generators("full"))
    return idx


def snf2(m: Mat) -> tuple[Mat, tuple[int, int], Mat]:
    """Tuple-level Smith form of a nonsingular 2x2 matrix: returns (U, (d1, d2), V) with U m V diagonal."""
    u: Mat = (1, 0, 0, 1)
    v: Mat = (1, 0, 0, 1)
    cur = m
    while True:
        h, x = hnf2(cur)
        u = mul2(x, u)
        cur = h
        a, b, _, d = cur
        if b == 0 and d % a == 0:
            return u, (a, d), v
        if b == 0:
            # a does not divide d: fold row 2 into row 1, then clear by columns
            u = mul2((1, 1, 0, 1), u)
            cur = (a, d, 0, d)
        ht, y = hnf2((cur[0], cur[2], cur[1], cur[3]))
        yt = (y[0], y[2], y[1], y[3])
        v = mul2(v, yt)
        cur = (ht[0], ht[2], ht[1], ht[3])


def transport(x: HeisElement) -> tuple[tuple[int, int], Point]:
    """Divisor chain of x.mat and the vector moved into Z/d1 x Z/d2 by the Smith transforms."""
    m = x.m
    if det2(m) == 0:
        raise NotInMonoid(f"{x} has singular matrix part")
    u, (d1, d2), v = snf2(m)
    s = det2(v)
    w = _apply(u, x.vec)
    return (d1, d2), ((s * w[0]) % d1, (s * w[1]) % d2)


def h_left_canonical(x: HeisElement) -> HeisElement:
    """Representative (H, w) of Gamma_H x with H in Hermite form and 0 <= w < |det|."""
    m = x.m
    dt = det2(m)
    if dt == 0:
        raise NotInMonoid(f"{x} has singular matrix part")
    h, xm = hnf2(m)
    n = abs(dt)
    w = _apply(xm, x.vec)
    return HeisElement.from_tuple(h, (w[0] % n, w[1] % n))


def left_key(m: Mat, v: Vec) -> tuple[Mat, Vec]:
    """Tuple form of h_left_canonical for the hot loops."""
    h, xm = hnf2(m)
    n = h[0] * h[3]
    w = _apply(xm, v)
    return h, (w[0] % n, w[1] % n)


def h_double_coset_canonical(x: HeisElement) -> HeisDoubleCoset:
    (d1, d2), w = transport(x)
    return HeisDoubleCoset((d1, d2), global_orbits(d1, d2).canonical(w))


def localize(x: HeisElement, p: int) -> HeisLocalParams:
    """The double coset of x in Delta_{H_p}, for any x in Delta_H.

    The prime-to-p part of diag(d1, d2) is a unit at p and is divided out of
    the transported vector before the G_{l,k}-orbit lookup.
    """
    (d1, d2), w = transport(x)
    l = valuation(d1, p)
    k = valuation(d2, p) - l
    m1, m2 = p**l, p ** (l + k)
    u1, u2 = d1 // m1, d2 // m2
    pt = ((w[0] * pow(u1, -1, m1)) % m1 if m1 > 1 else 0, (w[1] * pow(u2, -1, m2)) % m2 if m2 > 1 else 0)
    return local_parameterization(p, l, k).lookup(pt)


def h_local_canonical(x: HeisElement, p: int) -> HeisLocalParams:
    if not is_prime_power_of(x.det, p):
        raise NotLocallyIntegral(f"det {x.det} is not +- a power of {p}")
    return localize(x, p)


class LocalParameterization:
    """Which (j, i) representative each G_{l,k}-orbit of Z/p^l x Z/p^(l+k) belongs to.

    Orbits are labelled by the lexicographically least (j, i) whose point lies
    in them; any further (j, i) landing in an already-labelled orbit is kept in
    ``collisions``.
    """

    def __init__(self, p: int, l: int, k: int):
        self.p, self.l, self.k = p, l, k
        self.orbits = local_orbits(p, l, k)
        self.label: dict[Point, HeisLocalParams] = {}
        self.collisions: list[tuple[HeisLocalParams, HeisLocalParams]] = []
        for j in range(l + 1):
            for i in range(k + 1):
                par = HeisLocalParams(p, l, k, i, j)
                c = self.orbits.canonical(par.point)
                if c in self.label:
                    self.collisions.append((self.label[c], par))
                else:
                    self.label[c] = par

    def lookup(self, pt: Point) -> HeisLocalParams:
        c = self.orbits.canonical(pt)
        try:
            return self.label[c]
        except KeyError:
            raise NotInMonoid(f"orbit of {pt} at p={self.p}, l={self.l}, k={self.k} has no (j, i) representative")

    def uncovered_orbits(self) -> list[tuple[Point, ...]]:
        return [orb for orb in self.orbits.all_orbits() if orb[0] not in self.label]

    def classes(self) -> list[HeisLocalParams]:
        return sorted(self.label.values())


@lru_cache(maxsize=None)
def local_parameterization(p: int, l: int, k: int) -> LocalParameterization:
    return LocalParameterization(p, l, k)


def local_classes(p: int, max_exponent: int) -> list[HeisLocalParams]:
    """All distinct local double coset classes with det dividing p^max_exponent."""
    out = []
    for l in range(max_exponent // 2 + 1):
        for k in range(max_exponent - 2 * l + 1):
            out.extend(local_parameterization(p, l, k).classes())
    return out


# ---------------------------------------------------------------------------
# coset systems


def _orbit_of(c: HeisDoubleCoset | HeisLocalParams) -> tuple[tuple[int, int], tuple[Point, ...]]:
    if isinstance(c, HeisLocalParams):
        return c.divisors, local_orbits(c.p, c.l, c.k).orbit(c.point)
    return c.d, global_orbits(*c.d).orbit(c.v)


def orbit_size(c: HeisDoubleCoset | HeisLocalParams) -> int:
    return len(_orbit_of(c)[1])


def h_degree(c: HeisDoubleCoset | HeisLocalParams) -> int:
    """Number of left cosets: GL2 degree x orbit size x d1*d2."""
    (d1, d2), orb = _orbit_of(c)
    return len(gl_left_coset_tuples(GlDoubleCoset((d1, d2)))) * len(orb) * d1 * d2


def h_right_degree(c: HeisDoubleCoset | HeisLocalParams) -> int:
    (d1, d2), orb = _orbit_of(c)
    return len(gl_left_coset_tuples(GlDoubleCoset((d1, d2)))) * len(orb)


def iter_left_cosets(c: HeisDoubleCoset | HeisLocalParams) -> Iterator[tuple[Mat, Vec]]:
    """Left-canonical (Hermite matrix, reduced vector) pairs covering the double coset once each.

    For each Hermite B with U B V = A, the vectors b with det(V) U b in the
    orbit mod A Z^2 are det(V) U^-1 t for t running over lifts of the orbit
    to Z^2 / det(A) Z^2.
    """
    (d1, d2), orb = _orbit_of(c)
    n = d1 * d2
    for b in gl_left_coset_tuples(GlDoubleCoset((d1, d2))):
        u, _, v = snf2(b)
        s = det2(v)
        ui = _inv_unimodular(u)
        for w1, w2 in orb:
            for s1 in range(d2):
                t1 = w1 + d1 * s1
                for s2 in range(d1):
                    t2 = w2 + d2 * s2
                    yield b, ((s * (ui[0] * t1 + ui[1] * t2)) % n, (s * (ui[2] * t1 + ui[3] * t2)) % n)


def h_left_cosets(c: HeisDoubleCoset | HeisLocalParams) -> list[HeisElement]:
    return [HeisElement.from_tuple(m, v) for m, v in sorted(iter_left_cosets(c))]


def h_left_cosets_by_filter(c: HeisDoubleCoset | HeisLocalParams) -> list[HeisElement]:
    """Same set as h_left_cosets, found by testing every (B, b) with 0 <= b < |det B|."""
    if isinstance(c, HeisLocalParams):
        member = lambda x: h_local_canonical(x, c.p) == c  # noqa: E731
        d = c.divisors
    else:
        member = lambda x: h_double_coset_canonical(x) == c  # noqa: E731
        d = c.d
    n = d[0] * d[1]
    out = []
    for b in gl_left_coset_tuples(GlDoubleCoset(d)):
        for v1 in range(n):
            for v2 in range(n):
                x = HeisElement.from_tuple(b, (v1, v2))
                if member(x):
                    out.append(x)
    return out


def iter_right_cosets(c: HeisDoubleCoset | HeisLocalParams) -> Iterator[tuple[Mat, Vec]]:
    """Representatives g with the double coset equal to the disjoint union of g Gamma_H.

    Right cosets of the matrix part are transposes of the left ones; for each,
    the vector is any b with det(V) U b in the orbit, taken modulo B Z^2.
    """
    (d1, d2), orb = _orbit_of(c)
    for t in gl_left_coset_tuples(GlDoubleCoset((d1, d2))):
        b = (t[0], t[2], t[1], t[3])
        u, _, v = snf2(b)
        s = det2(v)
        ui = _inv_unimodular(u)
        for w in orb:
            x = _apply(ui, w)
            yield b, (s * x[0], s * x[1])


def h_right_cosets(c: HeisDoubleCoset | HeisLocalParams) -> list[HeisElement]:
    return [HeisElement.from_tuple(m, v) for m, v in iter_right_cosets(c)]


def same_right_coset(x: HeisElement, y: HeisElement) -> bool:
    """x Gamma_H == y Gamma_H, tested directly: x^-1 y must lie in Gamma_H."""
    inv = h_inverse_times(x.m, x.vec, y.m, y.vec)
    return inv is not None and abs(det2(inv[0])) == 1


def h_inverse_times(gm: Mat, gv: Vec, xm: Mat, xv: Vec) -> tuple[Mat, Vec] | None:
    """g^-1 x when it is integral, else None.

    g^-1 x = (B^-1 X, B^-1 (x - det(B^-1 X) g)) with B^-1 = adj(B) / det(B).
    """
    a, b, c, d = gm
    dg = a * d - b * c
    adj = (d, -b, -c, a)
    num = mul2(adj, xm)
    if num[0] % dg or num[1] % dg or num[2] % dg or num[3] % dg:
        return None
    m = (num[0] // dg, num[1] // dg, num[2] // dg, num[3] // dg)
    dm = m[0] * m[3] - m[1] * m[2]
    r = (xv[0] - dm * gv[0], xv[1] - dm * gv[1])
    w = _apply(adj, r)
    if w[0] % dg or w[1] % dg:
        return None
    return m, (w[0] // dg, w[1] // dg)
