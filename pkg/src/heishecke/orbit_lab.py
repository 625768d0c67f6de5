"""The finite groups G_{l,k} = Gamma_0(p^k) / Gamma(p^l, p^(l+k)) and their action on Z/p^l x Z/p^(l+k).

Elements are 4-tuples (a, b, c, d) in the mixed-modulus representation: the
first row lives mod m1 = p^l, the second mod m2 = p^(l+k), and c is always a
multiple of p^k.  That last condition is what makes the representation work:

* In a product, the second-row entries c1*a2 and c1*b2 only see a2, b2 mod p^l,
  but c1 = p^k * c' so p^k * c' * (a2 + p^l t) = p^k c' a2 mod p^(l+k).
* In the first row, b1*c2 and b1*d2 only need c2, d2 mod p^l because the row is
  read mod p^l anyway.
* For the same reasons the determinant a*d - b*c is well defined mod p^l, and
  acting on (v1 mod p^l, v2 mod p^(l+k)) is well defined since c*v1 = p^k c' v1.

The kernel of the action is exactly Gamma(p^l, p^(l+k)), so distinct tuples act
as distinct automorphisms and the tuple set *is* G_{l,k}.

Large groups are never materialised for the sweeps; ``GlkGroup.chunks`` streams
the element set one value of ``a`` at a time as numpy arrays.
"""

from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from heishecke.errors import BudgetExhausted, FormulaMismatch, SizeLimit
from heishecke.numtheory import filtration_generators, is_prime, subgroup_closure, unit_group_generators, units

DEFAULT_GLK_BUDGET = 10**7
# streaming passes never hold the group in memory, so they get a larger cap
DEFAULT_SCAN_BUDGET = 10**8

Mixed = tuple[int, int, int, int]
Point = tuple[int, int]


# ---------------------------------------------------------------------------
# scalar mixed-modulus arithmetic, shared with heis_core's global groups


def mixed_mul(x: Mixed, y: Mixed, m1: int, m2: int) -> Mixed:
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return (
        (a1 * a2 + b1 * c2) % m1,
        (a1 * b2 + b1 * d2) % m1,
        (c1 * a2 + d1 * c2) % m2,
        (c1 * b2 + d1 * d2) % m2,
    )


def mixed_act(g: Mixed, v: Point, m1: int, m2: int) -> Point:
    a, b, c, d = g
    v1, v2 = v
    return ((a * v1 + b * v2) % m1, (c * v1 + d * v2) % m2)


def mixed_det(g: Mixed, m1: int) -> int:
    a, b, c, d = g
    return (a * d - b * c) % m1


def orbit_bfs(start: Point, gens: Sequence[Mixed], m1: int, m2: int) -> list[Point]:
    """Orbit of ``start`` under the group generated by ``gens`` (finite, so monoid closure suffices)."""
    start = (start[0] % m1, start[1] % m2)
    seen = {start}
    order = [start]
    queue = deque(order)
    while queue:
        v1, v2 = queue.popleft()
        for a, b, c, d in gens:
            w = ((a * v1 + b * v2) % m1, (c * v1 + d * v2) % m2)
            if w not in seen:
                seen.add(w)
                order.append(w)
                queue.append(w)
    return order


def orbit_partition(points: Iterable[Point], gens: Sequence[Mixed], m1: int, m2: int) -> list[list[Point]]:
    """Split a union of orbits into orbits, each listed from its lexicographic minimum."""
    todo = set(points)
    parts = []
    for v in sorted(todo):
        if v not in todo:
            continue
        orb = orbit_bfs(v, gens, m1, m2)
        todo.difference_update(orb)
        parts.append(sorted(orb))
    return parts


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitFiltrationClass:
    """A residue class in U_0/U_l, i.e. a unit mod p^l."""

    p: int
    l: int
    value: int

    def __post_init__(self):
        m = self.p**self.l
        object.__setattr__(self, "value", self.value % m)
        if m > 1 and self.value % self.p == 0:
            raise ValueError(f"{self.value} is not a unit mod {m}")


@dataclass(frozen=True)
class GlkGroup:
    p: int
    l: int
    k: int
    budget: int = field(default=DEFAULT_GLK_BUDGET, compare=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p) or self.l < 0 or self.k < 0:
            raise ValueError(f"bad G_(l,k) parameters p={self.p} l={self.l} k={self.k}")

    @property
    def m1(self) -> int:
        return self.p**self.l

    @property
    def m2(self) -> int:
        return self.p ** (self.l + self.k)

    @property
    def step(self) -> int:
        return self.p**self.k

    @property
    def raw_size(self) -> int:
        """Number of candidate tuples scanned by a full enumeration."""
        return self.m1**3 * self.m2

    @property
    def identity(self) -> Mixed:
        return (1 % self.m1, 0, 0, 1 % self.m2)

    def contains(self, g: Mixed) -> bool:
        a, b, c, d = g
        m1, m2, p = self.m1, self.m2, self.p
        if not (0 <= a < m1 and 0 <= b < m1 and 0 <= c < m2 and 0 <= d < m2) or c % self.step:
            return False
        return (self.l == 0 or (a * d - b * c) % p != 0) and (self.k == 0 or d % p != 0)

    def mul(self, x: Mixed, y: Mixed) -> Mixed:
        return mixed_mul(x, y, self.m1, self.m2)

    def act(self, g: Mixed, v: Point) -> Point:
        return mixed_act(g, v, self.m1, self.m2)

    def det(self, g: Mixed) -> UnitFiltrationClass:
        return UnitFiltrationClass(self.p, self.l, mixed_det(g, self.m1))

    def chunks(self) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
        """Stream all elements as (a, b, c, d) arrays, one chunk per value of a."""
        m1, m2, p, step = self.m1, self.m2, self.p, self.step
        b, cq, d = np.meshgrid(
            np.arange(m1, dtype=np.int64), np.arange(m1, dtype=np.int64), np.arange(m2, dtype=np.int64), indexing="ij"
        )
        b, c, d = b.ravel(), (cq * step).ravel(), d.ravel()
        d_ok = (d % p != 0) if self.k else np.ones_like(d, dtype=bool)
        for a in range(m1):
            keep = d_ok
            if self.l:
                keep = keep & ((a * d - b * c) % p != 0)
            yield np.full(int(keep.sum()), a, dtype=np.int64), b[keep], c[keep], d[keep]

    def _check_budget(self):
        if self.raw_size > self.budget:
            raise SizeLimit(f"G_({self.l},{self.k}) at p={self.p}: {self.raw_size} tuples exceeds budget {self.budget}")

    def elements(self) -> np.ndarray:
        """All elements as an (N, 4) int64 array, subject to the enumeration budget."""
        self._check_budget()
        parts = [np.stack(ch, axis=1) for ch in self.chunks()]
        return np.concatenate(parts) if parts else np.zeros((0, 4), dtype=np.int64)

    def order(self) -> int:
        self._check_budget()
        return sum(len(ch[0]) for ch in self.chunks())

    def encode(self, a, b, c, d):
        m1, m2 = self.m1, self.m2
        return ((a * m1 + b) * m1 + c // self.step) * m2 + d

    def decode(self, code):
        m1, m2 = self.m1, self.m2
        code, d = np.divmod(code, m2)
        code, cq = np.divmod(code, m1)
        a, b = np.divmod(code, m1)
        return a, b, cq * self.step, d

    def mul_codes(self, x, y):
        a1, b1, c1, d1 = self.decode(x)
        a2, b2, c2, d2 = self.decode(y)
        m1, m2 = self.m1, self.m2
        return self.encode(
            (a1 * a2 + b1 * c2) % m1, (a1 * b2 + b1 * d2) % m1, (c1 * a2 + d1 * c2) % m2, (c1 * b2 + d1 * d2) % m2
        )

    def generators(self, kind: str = "full") -> tuple[Mixed, ...]:
        """Explicit generators of G (``full``), G^+- (``pm``) or G^1 (``one``).

        G^1 is generated by the elementary unipotents, diag(g, 1/g) for unit
        generators g, and diag(1, h) for h generating U_l; ``pm`` adds
        diag(1, -1) and ``full`` adds diag(1, g).
        """
        p, l, k, m1, m2 = self.p, self.l, self.k, self.m1, self.m2
        gens: list[Mixed] = [
            (1 % m1, 1 % m1, 0, 1 % m2),
            (1 % m1, 0, self.step % m2, 1 % m2),
        ]
        for g in unit_group_generators(p, l + k):
            gens.append((g % m1, 0, 0, pow(g, -1, m2)))
        for h in filtration_generators(p, l, l + k):
            gens.append((1 % m1, 0, 0, h % m2))
        if kind in ("pm", "full"):
            gens.append((1 % m1, 0, 0, -1 % m2))
        if kind == "full":
            gens.extend((1 % m1, 0, 0, g % m2) for g in unit_group_generators(p, l + k))
        elif kind not in ("pm", "one"):
            raise ValueError(f"unknown generator kind {kind!r}")
        out = []
        for g in gens:
            g = (g[0] % m1, g[1] % m1, g[2] % m2, g[3] % m2)
            if g != self.identity and g not in out:
                out.append(g)
        return tuple(out)

    def closure(self, gens: Iterable[Mixed]) -> np.ndarray:
        """Sorted codes of the subgroup generated by ``gens``."""
        return closure_codes(self, [int(self.encode(*g)) for g in gens])

    def subgroup_codes(self, kind: str) -> np.ndarray:
        """Sorted codes of G, G^+- or G^1 by enumeration and determinant filtering."""
        self._check_budget()
        m1 = self.m1
        out = []
        for a, b, c, d in self.chunks():
            if kind == "full":
                keep = np.ones(len(a), dtype=bool)
            else:
                dt = (a * d - b * c) % m1
                keep = dt == 1 % m1
                if kind == "pm":
                    keep |= dt == (-1) % m1
            out.append(self.encode(a[keep], b[keep], c[keep], d[keep]))
        return np.sort(np.concatenate(out))


def build_glk(p: int, l: int, k: int, budget: int = DEFAULT_GLK_BUDGET) -> GlkGroup:
    """G_(l,k) with its order checked against the enumeration budget up front."""
    G = GlkGroup(p, l, k, budget)
    G._check_budget()
    return G


def glk_det(G: GlkGroup, g: Mixed) -> UnitFiltrationClass:
    """det_(l,k)(g) = ad - bc mod p^l.

    Only a and b are known mod p^l, but bc is still well defined there: c is
    known mod p^(l+k) and any two lifts of c differ by a multiple of p^l.
    """
    if not G.contains(g):
        raise ValueError(f"{g} is not an element of {G}")
    return G.det(g)


def closure_codes(G: GlkGroup, gen_codes: Iterable[int]) -> np.ndarray:
    """Subgroup generated by coded elements; generators already inside are skipped."""
    ident = int(G.encode(*G.identity))
    members = np.array([ident], dtype=np.int64)
    member_set = {ident}
    accepted: list[int] = []
    for g in sorted(set(int(x) for x in gen_codes)):
        if g in member_set:
            continue
        accepted.append(g)
        gens = np.array(accepted, dtype=np.int64)
        frontier = members
        while len(frontier):
            prod = G.mul_codes(np.repeat(frontier, len(gens)), np.tile(gens, len(frontier)))
            new = np.setdiff1d(np.unique(prod), members, assume_unique=True)
            members = np.union1d(members, new)
            frontier = new
        member_set = set(members.tolist())
    return members


# ---------------------------------------------------------------------------
# orbits, stabilisers and determinant images by brute-force enumeration


@dataclass
class ScanResult:
    """Per-vector statistics from one streaming pass over G."""

    vector: Point
    group_order: int = 0
    orbit: np.ndarray | None = None  # bool mask over point codes v1*m2 + v2
    pm_orbit: np.ndarray | None = None
    stab_size: int = 0
    stab_dets: set[int] = field(default_factory=set)

    def orbit_points(self, m2: int) -> list[Point]:
        return [divmod(int(x), m2) for x in np.flatnonzero(self.orbit)]


def scan_group(G: GlkGroup, vectors: Sequence[Point]) -> list[ScanResult]:
    """Apply every element of G to every vector; record orbits, stabilisers, G^+- orbits.

    Streams, so G.budget caps the number of scanned tuples rather than memory.
    """
    G._check_budget()
    m1, m2 = G.m1, G.m2
    npts = m1 * m2
    results = [ScanResult((v[0] % m1, v[1] % m2)) for v in vectors]
    for r in results:
        r.orbit = np.zeros(npts, dtype=bool)
        r.pm_orbit = np.zeros(npts, dtype=bool)
    for a, b, c, d in G.chunks():
        dt = (a * d - b * c) % m1
        pm = (dt == 1 % m1) | (dt == (-1) % m1)
        for r in results:
            v1, v2 = r.vector
            w1 = (a * v1 + b * v2) % m1
            w2 = (c * v1 + d * v2) % m2
            code = w1 * m2 + w2
            r.group_order += len(a)
            r.orbit[code] = True
            r.pm_orbit[code[pm]] = True
            stab = code == v1 * m2 + v2
            r.stab_size += int(stab.sum())
            r.stab_dets.update(np.unique(dt[stab]).tolist())
    return results


def orbit_and_stabilizer(G: GlkGroup, a: Point) -> tuple[frozenset[Point], np.ndarray]:
    """Orbit of ``a`` and its stabiliser (as an (N, 4) array), by full enumeration."""
    G._check_budget()
    m1, m2 = G.m1, G.m2
    v1, v2 = a[0] % m1, a[1] % m2
    orbit: set[Point] = set()
    stab = []
    for ga, gb, gc, gd in G.chunks():
        w1 = (ga * v1 + gb * v2) % m1
        w2 = (gc * v1 + gd * v2) % m2
        orbit.update(zip(w1.tolist(), w2.tolist()))
        keep = (w1 == v1) & (w2 == v2)
        stab.append(np.stack([ga[keep], gb[keep], gc[keep], gd[keep]], axis=1))
    return frozenset(orbit), np.concatenate(stab)


def filtration_subgroup(p: int, l: int, n: int) -> frozenset[int]:
    """U_n/U_l as a set of residues mod p^l."""
    m = p**l
    return frozenset(u for u in units(m) if (u - 1) % p**n == 0) if m > 1 else frozenset({0})


def det_image_exponent(p: int, l: int, image: Iterable[int], prefer: int | None = None) -> int | None:
    """The n with image == U_n/U_l, or None when the image is not of that shape.

    At p = 2 the subgroups for n = 0 and n = 1 coincide; ``prefer`` breaks the tie.
    """
    image = frozenset(image)
    hits = [n for n in range(l + 1) if filtration_subgroup(p, l, n) == image]
    if not hits:
        return None
    return prefer if prefer in hits else hits[0]


def predicted_exponent(l: int, k: int, i: int, j: int) -> int:
    return min(i, k - i, l - j)


def local_vector(p: int, l: int, k: int, i: int, j: int) -> Point:
    return (p**j % p**l, p ** (i + j) % p ** (l + k))


def _check_params(p, l, k, i, j):
    if not is_prime(p) or l < 0 or k < 0 or not (0 <= j <= l and 0 <= i <= k):
        raise ValueError(f"invalid parameters p={p} l={l} k={k} i={i} j={j}")


def stab_det_exponent(p: int, l: int, k: int, i: int, j: int, budget: int = DEFAULT_SCAN_BUDGET) -> int:
    """Enumerate det(Stab(p^j, p^(i+j))) and return n with image U_n/U_l.

    Raises FormulaMismatch unless the image equals U_n/U_l for n = min(i, k-i, l-j).
    """
    _check_params(p, l, k, i, j)
    (res,) = scan_group(GlkGroup(p, l, k, budget), [local_vector(p, l, k, i, j)])
    want = predicted_exponent(l, k, i, j)
    n = det_image_exponent(p, l, res.stab_dets, prefer=want)
    if n is None or filtration_subgroup(p, l, n) != filtration_subgroup(p, l, want):
        raise FormulaMismatch(f"det(S_a) = {sorted(res.stab_dets)} is not U_{want}/U_{l} (p={p}, k={k}, i={i}, j={j})")
    return n


def index_u0_pm_un(p: int, l: int, n: int) -> int:
    """[U_0 : +-U_n] at level p^l, by generating <-1, U_n> inside (Z/p^l)^*."""
    if not 0 <= n <= l:
        raise ValueError(f"need 0 <= n <= l, got n={n}, l={l}")
    m = p**l
    u0 = units(m)
    sub = subgroup_closure([-1 % m, *filtration_subgroup(p, l, n)], m)
    return len(u0) // len(sub)


@dataclass
class OrbitReport:
    p: int
    l: int
    k: int
    i: int
    j: int
    group_order: int
    orbit_size: int
    stab_size: int
    n: int | None
    fiber_count: int
    formula_count: int
    match: bool
    pm_orbit_size: int = 0
    predicted_n: int = 0

    def to_json(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            out[key] = val if isinstance(val, bool) or val is None else str(val)
        return out


def _report_from_scan(G: GlkGroup, i: int, j: int, res: ScanResult) -> OrbitReport:
    p, l, k, m1, m2 = G.p, G.l, G.k, G.m1, G.m2
    want = predicted_exponent(l, k, i, j)
    n = det_image_exponent(p, l, res.stab_dets, prefer=want)
    orbit = res.orbit_points(m2)
    parts = orbit_partition(orbit, G.generators("pm"), m1, m2)
    pm_size = int(res.pm_orbit.sum())
    if any(len(part) != pm_size for part in parts):
        raise FormulaMismatch(f"G^+- generator orbits {[len(q) for q in parts]} disagree with enumerated size {pm_size}")
    formula = index_u0_pm_un(p, l, want)
    n_ok = n is not None and filtration_subgroup(p, l, n) == filtration_subgroup(p, l, want)
    ok = n_ok and len(parts) == formula and len(orbit) * res.stab_size == res.group_order
    return OrbitReport(
        p, l, k, i, j,
        group_order=res.group_order,
        orbit_size=len(orbit),
        stab_size=res.stab_size,
        n=n,
        fiber_count=len(parts),
        formula_count=formula,
        match=ok,
        pm_orbit_size=pm_size,
        predicted_n=want,
    )


def fiber_count(p: int, l: int, k: int, i: int, j: int, budget: int = DEFAULT_SCAN_BUDGET) -> OrbitReport:
    """Count G^+- orbits on the G_{l,k}-orbit of (p^j, p^(i+j)) by enumeration."""
    _check_params(p, l, k, i, j)
    G = GlkGroup(p, l, k, budget)
    (res,) = scan_group(G, [local_vector(p, l, k, i, j)])
    return _report_from_scan(G, i, j, res)


def sweep(p: int, l: int, k: int, budget: int = DEFAULT_SCAN_BUDGET) -> list[OrbitReport]:
    """Reports for every valid (i, j) at fixed (p, l, k), sharing one pass over G."""
    G = GlkGroup(p, l, k, budget)
    params = [(i, j) for j in range(l + 1) for i in range(k + 1)]
    scans = scan_group(G, [local_vector(p, l, k, i, j) for i, j in params])
    return [_report_from_scan(G, i, j, r) for (i, j), r in zip(params, scans)]


# ---------------------------------------------------------------------------
# reduction of integral matrices


@dataclass
class SurjectivityReport:
    p: int
    l: int
    k: int
    entry_bound: int
    pm_generated: int
    pm_target: int
    one_generated: int
    one_target: int

    @property
    def ok(self) -> bool:
        return self.pm_generated == self.pm_target and self.one_generated == self.one_target


def integral_images(G: GlkGroup, bound: int, det_sign: int) -> tuple[np.ndarray, int]:
    """Codes of reductions of integer matrices in Gamma_0(p^k) with |entries| <= bound and det = det_sign.

    Returns (unique codes, number of candidate tuples examined).
    """
    m1, m2, step = G.m1, G.m2, G.step
    out = []
    examined = 0
    span = np.arange(-bound, bound + 1, dtype=np.int64)
    for c in range(-(bound // step) * step, bound + 1, step):
        if c == 0:
            for a in (1, -1):
                d = det_sign * a
                out.append(G.encode(np.full(len(span), a % m1), span % m1, np.zeros(len(span), np.int64), np.full(len(span), d % m2)))
            examined += 2 * len(span)
            continue
        a, d = np.meshgrid(span, span, indexing="ij")
        a, d = a.ravel(), d.ravel()
        num = a * d - det_sign
        keep = num % c == 0
        b = num[keep] // c
        inside = np.abs(b) <= bound
        a, d, b = a[keep][inside], d[keep][inside], b[inside]
        out.append(G.encode(a % m1, b % m1, np.full(len(a), c % m2), d % m2))
        examined += len(span) ** 2
    return np.unique(np.concatenate(out)), examined


def integral_surjectivity_report(
    p: int, l: int, k: int, entry_bound: int = 8, budget: int = DEFAULT_GLK_BUDGET
) -> SurjectivityReport:
    """Close reductions of bounded integral matrices and compare with G^+- and G^1.

    The bound doubles until both closures are full or the candidate count
    exceeds ``budget``; the latter raises BudgetExhausted.
    """
    G = GlkGroup(p, l, k, budget)
    target_pm = G.subgroup_codes("pm")
    target_one = G.subgroup_codes("one")
    bound = max(1, entry_bound)
    while True:
        one_imgs, n1 = integral_images(G, bound, 1)
        neg_imgs, n2 = integral_images(G, bound, -1)
        if n1 + n2 > budget:
            raise BudgetExhausted(f"entry bound {bound} needs {n1 + n2} candidates, over budget {budget}")
        got_one = closure_codes(G, one_imgs)
        got_pm = closure_codes(G, np.concatenate([one_imgs, neg_imgs]))
        for got, target in ((got_one, target_one), (got_pm, target_pm)):
            if not np.all(np.isin(got, target)):
                raise FormulaMismatch("integral closure left the determinant +-1 subgroup")
        rep = SurjectivityReport(p, l, k, bound, len(got_pm), len(target_pm), len(got_one), len(target_one))
        if rep.ok:
            return rep
        bound *= 2


def integral_surjectivity_check(p: int, l: int, k: int, entry_bound: int = 8, budget: int = DEFAULT_GLK_BUDGET) -> bool:
    return integral_surjectivity_report(p, l, k, entry_bound, budget).ok
