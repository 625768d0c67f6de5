import itertools
import random

import pytest

from heishecke.errors import LocalityMismatch
from heishecke.heis_core import HeisDoubleCoset, HeisLocalParams, global_orbits, h_degree, local_classes
from heishecke.heis_hecke import (
    AdelicCoset,
    AdelicHeckeElement,
    HeisHeckeElement,
    adelic_class,
    adelic_mul,
    basis_product,
    basis_product_pairs,
    eta_fiber,
    eta_star,
    eta_star_local,
    hecke_mul,
    hecke_mul_pairs,
    in_eta_image,
    noncommutativity_witness,
    nonsurjectivity_witness,
    verify_certificate,
)

L = HeisLocalParams
B = HeisHeckeElement.basis


def _global_classes(max_det):
    out = []
    for d1 in range(1, max_det + 1):
        for d2 in range(d1, max_det + 1, d1):
            if d1 * d2 <= max_det:
                out += [HeisDoubleCoset((d1, d2), o[0]) for o in global_orbits(d1, d2).all_orbits()]
    return out


def test_identity():
    for p in (None, 2, 3):
        one = HeisHeckeElement.one(p)
        pool = _global_classes(4) if p is None else local_classes(p, 2)
        for c in pool:
            assert one * B(c) == B(c) == B(c) * one


def test_fast_product_matches_pairs_local():
    classes = local_classes(2, 2) + [L(2, 1, 1, 1, 0), L(2, 0, 3, 1, 0)]
    for a, b in itertools.product(classes, local_classes(2, 2)):
        assert dict(basis_product(a, b)) == basis_product_pairs(a, b)


def test_fast_product_matches_pairs_local_p3():
    for a, b in itertools.product(local_classes(3, 2), local_classes(3, 1)):
        assert dict(basis_product(a, b)) == basis_product_pairs(a, b, shuffle_seed=1)


def test_fast_product_matches_pairs_global():
    classes = _global_classes(6)
    rng = random.Random(1)
    for _ in range(25):
        a, b = rng.choice(classes), rng.choice(classes)
        assert dict(basis_product(a, b)) == basis_product_pairs(a, b, shuffle_seed=rng.randint(0, 99))


def test_degree_multiplicative():
    rng = random.Random(8)
    pool = local_classes(2, 3) + local_classes(3, 2)
    for _ in range(60):
        a = rng.choice(pool)
        b = rng.choice([c for c in pool if c.p == a.p])
        assert (B(a) * B(b)).degree() == h_degree(a) * h_degree(b)


def test_ring_axioms():
    rng = random.Random(13)
    for p in (2, 3):
        pool = [B(c) for c in local_classes(p, 2)]
        for _ in range(10):
            x, y, z = (rng.choice(pool) for _ in range(3))
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert (y + z) * x == y * x + z * x
    pool = [B(c) for c in _global_classes(4)]
    for _ in range(10):
        x, y, z = (rng.choice(pool) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + 2 * z) == x * y + 2 * (x * z)


def test_local_ring_noncommutative():
    for p in (2, 3):
        u, v, uv, vu = noncommutativity_witness(p)
        assert uv != vu
        assert uv.degree() == vu.degree() == u.degree() * v.degree()


def test_noncommutativity_deterministic():
    a = noncommutativity_witness(2)
    b = noncommutativity_witness(2)
    assert [x.to_json() for x in a] == [x.to_json() for x in b]


def test_noncommuting_pair_survives_shuffled_recount():
    u, v, uv, vu = noncommutativity_witness(2)
    for seed in (1, 2, 3):
        assert hecke_mul_pairs(u, v, shuffle_seed=seed) == uv
        assert hecke_mul_pairs(v, u, shuffle_seed=seed) == vu


def test_locality_mismatch():
    with pytest.raises(LocalityMismatch):
        B(L(2, 0, 1, 0, 0)) * B(L(3, 0, 1, 0, 0))
    with pytest.raises(LocalityMismatch):
        HeisHeckeElement({L(2, 0, 1, 0, 0): 1}, p=None)


def test_json_round_trip():
    x = B(L(2, 1, 2, 1, 0)) + 3 * B(L(2, 0, 1, 0, 0))
    assert HeisHeckeElement.from_json(x.to_json()) == x
    y = B(HeisDoubleCoset((2, 8), (1, 2)))
    assert HeisHeckeElement.from_json(y.to_json()) == y


# adelic ring


def test_adelic_disjoint_support():
    a = AdelicCoset.of([L(2, 0, 1, 0, 0)])
    b = AdelicCoset.of([L(3, 1, 0, 0, 0)])
    x, y = AdelicHeckeElement.basis(a), AdelicHeckeElement.basis(b)
    want = AdelicHeckeElement.basis(AdelicCoset.of([L(2, 0, 1, 0, 0), L(3, 1, 0, 0, 0)]))
    assert x * y == want == y * x


def test_adelic_same_prime_is_local_product():
    for a, b in itertools.product(local_classes(2, 2), repeat=2):
        x = AdelicHeckeElement.from_local(B(a)) * AdelicHeckeElement.from_local(B(b))
        assert x == AdelicHeckeElement.from_local(B(a) * B(b))


def test_adelic_identity_components_dropped():
    c = AdelicCoset.of([L(2, 0, 0, 0, 0), L(3, 0, 1, 1, 0)])
    assert c.primes == (3,)
    assert AdelicCoset.of([L(5, 0, 0, 0, 0)]) == AdelicCoset()


def test_adelic_associative():
    rng = random.Random(6)
    pool = [AdelicHeckeElement.basis(AdelicCoset.of([c])) for c in local_classes(2, 2) + local_classes(3, 1)]
    for _ in range(15):
        x, y, z = (rng.choice(pool) for _ in range(3))
        assert adelic_mul(adelic_mul(x, y), z) == adelic_mul(x, adelic_mul(y, z))


# eta*


def test_fiber_p2():
    fiber = eta_fiber(AdelicCoset.of([L(2, 3, 6, 3, 0)]))
    assert len(fiber) == 2
    assert {f.d for f in fiber} == {(8, 512)}
    reps = {HeisDoubleCoset.make(8, 512, (1, 8)), HeisDoubleCoset.make(8, 512, (1, 24))}
    assert set(fiber) == reps


def test_fiber_p3_and_p5():
    assert len(eta_fiber(AdelicCoset.of([L(3, 2, 4, 2, 0)]))) == 3
    assert len(eta_fiber(AdelicCoset.of([L(5, 2, 4, 2, 0)]))) == 10


def test_fiber_identity():
    assert eta_fiber(AdelicCoset()) == [HeisDoubleCoset.identity()]
    assert eta_star(AdelicHeckeElement.one()) == HeisHeckeElement.one()


def test_eta_star_of_split_coset():
    x = eta_star(AdelicHeckeElement.basis(AdelicCoset.of([L(2, 3, 6, 3, 0)])))
    assert sorted(x.terms.values()) == [1, 1]


def test_fiber_members_map_back_and_degrees_agree():
    for c in local_classes(2, 4) + local_classes(3, 3) + [L(3, 2, 4, 2, 0)]:
        ac = AdelicCoset.of([c])
        fiber = eta_fiber(ac)
        assert fiber
        assert all(adelic_class(g) == ac for g in fiber)
        assert sum(h_degree(g) for g in fiber) == h_degree(c)


def test_mixed_prime_fiber():
    ac = AdelicCoset.of([L(2, 3, 6, 3, 0), L(3, 1, 1, 0, 0)])
    fiber = eta_fiber(ac)
    assert len(fiber) == 2
    assert all(adelic_class(g) == ac for g in fiber)
    assert sum(h_degree(g) for g in fiber) == ac.degree()


def test_fibers_cover_global_classes():
    # every global class of det <= 36 lies in exactly one fiber, its own adelic class
    seen = set()
    for g in _global_classes(36):
        fib = eta_fiber(adelic_class(g))
        assert g in fib
        seen.add(tuple(fib))
    flat = [g for f in seen for g in f]
    assert len(flat) == len(set(flat))


def test_eta_star_multiplicative_sample():
    rng = random.Random(21)
    pool = [AdelicCoset.of([c]) for c in local_classes(2, 3) + local_classes(3, 2)]
    for _ in range(25):
        a, b = rng.choice(pool), rng.choice(pool)
        x, y = AdelicHeckeElement.basis(a), AdelicHeckeElement.basis(b)
        assert eta_star(x * y) == eta_star(x) * eta_star(y)


def test_eta_star_injective_on_small_local_classes():
    for p in (2, 3):
        imgs = [eta_star_local(B(c)) for c in local_classes(p, 4)]
        assert len(set(imgs)) == len(imgs)


def test_cross_prime_images_commute_sample():
    rng = random.Random(0)
    a2, a3 = local_classes(2, 4), local_classes(3, 4)
    for _ in range(40):
        x, y = eta_star_local(B(rng.choice(a2))), eta_star_local(B(rng.choice(a3)))
        assert x * y == y * x


# certificates


@pytest.mark.parametrize("p,size", [(2, 2), (3, 3), (5, 10)])
def test_nonsurjectivity_certificate(p, size):
    cert = nonsurjectivity_witness(p)
    assert cert["fiber_size"] == str(size)
    assert cert["checks"]["fiber_size_expected"] == str(size)
    assert cert["verified"] and verify_certificate(cert)
    assert not cert["checks"]["distinguished_in_image"]


def test_certificate_tampering_detected():
    cert = nonsurjectivity_witness(3)
    bad = dict(cert, fiber=cert["fiber"][:2], fiber_size="2")
    assert not verify_certificate(bad)


def test_image_membership():
    c = AdelicCoset.of([L(3, 2, 4, 2, 0)])
    full = eta_star(AdelicHeckeElement.basis(c))
    assert in_eta_image(full) and in_eta_image(5 * full)
    fiber = eta_fiber(c)
    assert not in_eta_image(B(fiber[0]) + B(fiber[1]))
    assert in_eta_image(B(HeisDoubleCoset((1, 2), (0, 0))))
