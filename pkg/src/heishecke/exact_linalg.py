"""Exact integer linear algebra: determinants, Smith and Hermite forms, quotient actions.

Everything here works on Python ints, so no entry ever overflows.  Only
``det`` and ``snf`` accept ranks other than 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from heishecke.errors import IllDefinedAction, SingularMatrix


@dataclass(frozen=True, slots=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("IntMatrix must be square and non-empty")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> IntMatrix:
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int = 2) -> IntMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, *entries: int) -> IntMatrix:
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.rows)

    def transpose(self) -> IntMatrix:
        return IntMatrix(tuple(zip(*self.rows)))

    def det(self) -> int:
        return det(self)

    def flat(self) -> tuple[int, ...]:
        return tuple(x for r in self.rows for x in r)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data) -> IntMatrix:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(tuple(int(x) for x in r) for r in data))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"


@dataclass(frozen=True, slots=True)
class SnfDecomposition:
    """``u @ m @ v == diag(*d)`` with ``u``, ``v`` unimodular and ``d`` a divisor chain."""

    u: IntMatrix
    d: tuple[int, ...]
    v: IntMatrix

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "d": [str(x) for x in self.d], "v": self.v.to_json()}


@dataclass(frozen=True, slots=True)
class QuotientVector:
    """An element of Z/d1 x Z/d2 with d1 | d2, always stored reduced."""

    modulus: tuple[int, int]
    coords: tuple[int, int]

    def __post_init__(self):
        d1, d2 = (int(x) for x in self.modulus)
        if d1 <= 0 or d2 % d1:
            raise ValueError(f"bad quotient modulus {self.modulus}")
        v1, v2 = self.coords
        object.__setattr__(self, "modulus", (d1, d2))
        object.__setattr__(self, "coords", (int(v1) % d1, int(v2) % d2))


def det(m: IntMatrix) -> int:
    """Exact determinant (fraction-free Bareiss elimination above rank 2)."""
    n = m.dim
    r = m.rows
    if n == 1:
        return r[0][0]
    if n == 2:
        return r[0][0] * r[1][1] - r[0][1] * r[1][0]
    a = [list(row) for row in r]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = s*a + t*b = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def snf(m: IntMatrix) -> SnfDecomposition:
    """Smith normal form by repeated gcd pivoting, transforms accumulated along the way."""
    n = m.dim
    if det(m) == 0:
        raise SingularMatrix(f"{m!r} is singular")
    a = [list(r) for r in m.rows]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def add_row(dst, src, q):  # row dst -= q * row src
        for mat in (a, u):
            rd, rs = mat[dst], mat[src]
            for j in range(n):
                rd[j] -= q * rs[j]

    def add_col(dst, src, q):  # col dst -= q * col src
        for mat in (a, v):
            for row in mat:
                row[dst] -= q * row[src]

    for t in range(n):
        while True:
            _, pr, pc = min((abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j])
            if pr != t:
                a[t], a[pr] = a[pr], a[t]
                u[t], u[pr] = u[pr], u[t]
            if pc != t:
                for mat in (a, v):
                    for row in mat:
                        row[t], row[pc] = row[pc], row[t]
            piv = a[t][t]
            clean = True
            for i in range(t + 1, n):
                if a[i][t]:
                    add_row(i, t, a[i][t] // piv)
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, a[t][j] // piv)
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, n) if a[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return SnfDecomposition(IntMatrix.of(u), tuple(a[i][i] for i in range(n)), IntMatrix.of(v))


def divisor_chain(m: IntMatrix) -> tuple[int, ...]:
    """Elementary divisors only. For 2x2 this is (gcd of entries, |det|/gcd)."""
    if m.dim == 2:
        d = abs(det(m))
        if d == 0:
            raise SingularMatrix(f"{m!r} is singular")
        a, b, c, e = m.flat()
        g = _gcd4(a, b, c, e)
        return (g, d // g)
    return snf(m).d


def _gcd4(a, b, c, d):
    from math import gcd

    return gcd(gcd(a, b), gcd(c, d))


def hnf_left_with_transform(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Return (H, X) with H = X @ m in the frozen left-coset normal form.

    H is upper triangular with positive diagonal and 0 <= H[0,1] < H[1,1];
    X may have determinant -1.
    """
    if m.dim != 2:
        raise ValueError("hnf_left is implemented for 2x2 matrices only")
    h, x = hnf2(m.flat())
    return IntMatrix.of((h[:2], h[2:])), IntMatrix.of((x[:2], x[2:]))


def hnf_left(m: IntMatrix) -> IntMatrix:
    return hnf_left_with_transform(m)[0]


def hnf2(m: tuple[int, int, int, int]) -> tuple[tuple[int, int, int, int], tuple[int, int, int, int]]:
    """Tuple-level 2x2 left Hermite form, shared by the hot loops elsewhere."""
    a, b, c, d = m
    if a * d - b * c == 0:
        raise SingularMatrix(f"{m} is singular")
    g, s, t = ext_gcd(a, c)
    x00, x01, x10, x11 = s, t, -c // g, a // g
    h01 = s * b + t * d
    h11 = x10 * b + x11 * d
    if h11 < 0:
        x10, x11, h11 = -x10, -x11, -h11
    q = h01 // h11
    if q:
        h01 -= q * h11
        x00 -= q * x10
        x01 -= q * x11
    return (g, h01, 0, h11), (x00, x01, x10, x11)


def act_on_quotient(m: IntMatrix, v: QuotientVector) -> QuotientVector:
    """Apply m to v in Z/d1 x Z/d2; row 1 is read mod d1, row 2 mod d2."""
    d1, d2 = v.modulus
    (a, b), (c, d) = m.rows
    if c % (d2 // d1):
        raise IllDefinedAction(f"(2,1) entry {c} not divisible by {d2 // d1}")
    v1, v2 = v.coords
    return QuotientVector((d1, d2), (a * v1 + b * v2, c * v1 + d * v2))


def is_unimodular(m: IntMatrix) -> bool:
    return abs(det(m)) == 1


def adjugate2(m: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    a, b, c, d = m
    return (d, -b, -c, a)


def mul2(x: tuple[int, int, int, int], y: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def det2(x: tuple[int, int, int, int]) -> int:
    return x[0] * x[3] - x[1] * x[2]
