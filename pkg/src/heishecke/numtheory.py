"""Elementary number theory on small machine-sized integers."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % f for f in range(3, isqrt(n) + 1, 2))


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation by trial division, as sorted (p, e) pairs."""
    n = abs(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**i for d in ds for i in range(e + 1)]
    return sorted(ds)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime_power_of(n: int, p: int) -> bool:
    """True for n = p^e with e >= 0 (sign ignored)."""
    n = abs(n)
    if n == 0:
        return False
    while n % p == 0:
        n //= p
    return n == 1


def crt(residues: list[int], moduli: list[int]) -> int:
    """Combine pairwise coprime congruences into one residue mod prod(moduli)."""
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        if n == 1:
            continue
        t = ((r - x) * pow(m, -1, n)) % n
        x += m * t
        m *= n
    return x % m


def units(m: int) -> list[int]:
    if m == 1:
        return [0]
    return [u for u in range(1, m) if gcd(u, m) == 1]


@lru_cache(maxsize=None)
def unit_group_generators(p: int, e: int) -> tuple[int, ...]:
    """A generating set of (Z/p^e)^*; empty when the group is trivial."""
    m = p**e
    if m <= 2:
        return ()
    if p == 2:
        return (m - 1,) if e == 2 else (m - 1, 5)
    g = next(g for g in range(2, p) if all(pow(g, (p - 1) // q, p) != 1 for q, _ in factorize(p - 1)))
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    return (g % m,)


@lru_cache(maxsize=None)
def filtration_generators(p: int, l: int, e: int) -> tuple[int, ...]:
    """Generators of U_l = {u = 1 mod p^l} inside (Z/p^e)^*."""
    if l == 0 or (p == 2 and l == 1):
        return unit_group_generators(p, e)
    if l >= e:
        return ()
    return ((1 + p**l) % p**e,)


def subgroup_closure(gens: list[int], m: int) -> frozenset[int]:
    """The subgroup of (Z/m)^* generated by gens."""
    one = 1 % m
    seen = {one}
    frontier = [one]
    gens = [g % m for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = (x * g) % m
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)
