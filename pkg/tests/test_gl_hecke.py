import itertools
import random

import pytest

from conftest import as_matrix, random_unimodular
from heishecke.errors import LocalityMismatch, NotInMonoid, SizeLimit
from heishecke.exact_linalg import IntMatrix, det, hnf_left, mul2
from heishecke.gl_hecke import (
    GlDoubleCoset,
    GlHeckeElement,
    gl_canonicalize,
    gl_degree,
    gl_left_cosets,
)

T = GlHeckeElement.basis


def test_canonicalize_examples():
    assert gl_canonicalize(IntMatrix.diag(1, 3), 3) == GlDoubleCoset((1, 3), 3)
    assert gl_canonicalize(IntMatrix.of([[1, 2], [3, 4]])) == GlDoubleCoset((1, 2))
    assert gl_canonicalize(IntMatrix.diag(5, 5)).divisors == (5, 5)
    with pytest.raises(NotInMonoid):
        gl_canonicalize(IntMatrix.diag(1, 6), 2)
    with pytest.raises(NotInMonoid):
        gl_canonicalize(IntMatrix.of([[1, 1], [1, 1]]))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_left_cosets_of_t1p(p):
    reps = gl_left_cosets(GlDoubleCoset((1, p), p))
    want = {IntMatrix.of([[1, b], [0, p]]) for b in range(p)} | {IntMatrix.diag(p, 1)}
    assert set(reps) == want and len(reps) == p + 1
    assert gl_left_cosets(GlDoubleCoset((p, p), p)) == [IntMatrix.diag(p, p)]
    assert gl_degree(GlDoubleCoset((1, p * p), p)) == p * p + p


def test_trivial_coset():
    assert gl_left_cosets(GlDoubleCoset((1, 1))) == [IntMatrix.identity(2)]


@pytest.mark.parametrize("d", [(1, 4), (2, 4), (1, 6), (2, 12), (3, 9), (1, 12)])
def test_left_cosets_partition_double_coset(d):
    c = GlDoubleCoset(d)
    reps = gl_left_cosets(c)
    n = d[0] * d[1]
    # pairwise distinct: B' B^-1 is never unimodular
    for x, y in itertools.combinations(reps, 2):
        adj = IntMatrix.of([[x[1, 1], -x[0, 1]], [-x[1, 0], x[0, 0]]])
        assert any(e % n for e in (y @ adj).flat())
    # covering: random elements of the double coset land on a representative
    rng = random.Random(7)
    for _ in range(200):
        g = as_matrix(random_unimodular(rng)) @ c.matrix @ as_matrix(random_unimodular(rng))
        assert hnf_left(g) in reps


def test_size_limit():
    with pytest.raises(SizeLimit):
        gl_left_cosets(GlDoubleCoset((1, 2**21)))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_t1p_squared(p):
    t = T(1, p, p)
    assert t * t == T(1, p * p, p) + (p + 1) * T(p, p, p)


@pytest.mark.parametrize("p", [2, 3])
def test_scalar_and_identity(p):
    assert T(p, p, p) * T(1, p, p) == T(p, p * p, p)
    for x in (T(1, p, p), T(p, p * p, p)):
        assert GlHeckeElement.one(p) * x == x == x * GlHeckeElement.one(p)


@pytest.mark.parametrize("p", [2, 3])
def test_local_ring_commutes(p):
    gens = [T(1, p, p), T(p, p, p), T(1, p * p, p), T(p, p * p, p)]
    for x, y in itertools.product(gens, gens):
        xy = x * y
        assert xy == y * x
        assert xy.degree() == x.degree() * y.degree()


def test_global_product_of_coprime_primes():
    x, y = T(1, 2), T(1, 3)
    assert x * y == y * x == T(1, 6)


def test_associativity_and_distributivity():
    rng = random.Random(3)
    pool = [T(1, 2, 2), T(2, 2, 2), T(1, 4, 2), T(2, 4, 2), T(1, 8, 2)]
    for _ in range(15):
        a, b, c = (rng.choice(pool) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_locality_mismatch():
    with pytest.raises(LocalityMismatch):
        T(1, 2, 2) * T(1, 2)
    with pytest.raises(ValueError):
        GlDoubleCoset((2, 3))


def test_json_round_trip():
    x = T(1, 4, 2) + 3 * T(2, 2, 2)
    assert GlHeckeElement.from_json(x.to_json()) == x
    assert x.to_json()["terms"][0] == {"divisors": ["1", "4"], "coeff": "1"}


def test_zero_terms_dropped():
    x = T(1, 2) + (-1) * T(1, 2)
    assert x.terms == {}
