import itertools

import numpy as np
import pytest

from heishecke.errors import SizeLimit
from heishecke.exact_linalg import IntMatrix, QuotientVector, act_on_quotient
from heishecke.orbit_lab import (
    GlkGroup,
    build_glk,
    filtration_subgroup,
    fiber_count,
    glk_det,
    index_u0_pm_un,
    integral_surjectivity_check,
    integral_surjectivity_report,
    local_vector,
    orbit_and_stabilizer,
    orbit_bfs,
    orbit_partition,
    stab_det_exponent,
    sweep,
)

SMALL = [(2, 1, 1), (2, 2, 1), (3, 1, 1), (2, 0, 3), (3, 2, 0), (5, 1, 0), (2, 1, 2)]


def _elements(G):
    return [tuple(int(x) for x in row) for row in G.elements()]


def test_trivial_group():
    assert build_glk(3, 0, 0).order() == 1


def test_g11_at_two():
    els = set(_elements(build_glk(2, 1, 1)))
    want = {(1, b, c, d) for b in (0, 1) for c in (0, 2) for d in (1, 3)}
    assert els == want


@pytest.mark.parametrize("plk", SMALL)
def test_group_axioms(plk):
    G = build_glk(*plk)
    codes = np.sort(G.encode(*G.elements().T))
    ident = G.encode(*G.identity)
    assert len(np.unique(codes)) == len(codes) and ident in codes
    for x in codes:
        row = G.mul_codes(np.full(len(codes), x), codes)
        assert np.all(np.isin(row, codes))
        assert ident in row


def test_mixed_multiplication_is_well_defined():
    # lifting entries by the moduli and multiplying over Z gives the same class
    p, l, k = 3, 1, 2
    G = GlkGroup(p, l, k)
    m1, m2 = G.m1, G.m2
    els = _elements(G)[:60]
    for x, y in itertools.product(els, els):
        for s in range(3):
            lx = (x[0] + s * m1, x[1] - s * m1, x[2] + s * m2, x[3] + 2 * s * m2)
            prod = (lx[0] * y[0] + lx[1] * y[2], lx[0] * y[1] + lx[1] * y[3], lx[2] * y[0] + lx[3] * y[2], lx[2] * y[1] + lx[3] * y[3])
            assert (prod[0] % m1, prod[1] % m1, prod[2] % m2, prod[3] % m2) == G.mul(x, y)


def test_det_examples_and_homomorphism():
    G = build_glk(2, 1, 1)
    assert glk_det(G, G.identity).value == 1 % 2
    H = build_glk(3, 2, 1)
    assert glk_det(H, (1, 0, 0, 5)).value == 5
    for K in (G, H):
        els = K.elements()
        dets = (els[:, 0] * els[:, 3] - els[:, 1] * els[:, 2]) % K.m1
        for idx in range(0, len(els), max(1, len(els) // 40)):
            x = els[idx]
            prod = np.stack(K.decode(K.mul_codes(np.full(len(els), K.encode(*x)), K.encode(*els.T))), axis=1)
            pd = (prod[:, 0] * prod[:, 3] - prod[:, 1] * prod[:, 2]) % K.m1
            assert np.array_equal(pd, (dets[idx] * dets) % K.m1)
            assert glk_det(K, tuple(int(v) for v in x)).value == dets[idx]


def test_budget():
    with pytest.raises(SizeLimit):
        build_glk(3, 3, 4)
    with pytest.raises(SizeLimit):
        fiber_count(3, 2, 4, 2, 0, budget=1000)


def test_zero_vector():
    G = build_glk(2, 2, 1)
    orbit, stab = orbit_and_stabilizer(G, (0, 0))
    assert orbit == {(0, 0)} and len(stab) == G.order()


def test_orbit_stabilizer_p3():
    G = build_glk(3, 2, 4)
    orbit, stab = orbit_and_stabilizer(G, (1, 9))
    assert len(orbit) * len(stab) == G.order() == 236196


@pytest.mark.parametrize("p,l,k", [(2, 2, 3), (3, 2, 2), (2, 3, 2), (3, 1, 3)])
def test_stabilizer_congruences(p, l, k):
    # g fixes (p^j, p^(i+j)) iff a = 1 - b p^i mod p^(l-j) and, with c = p^k c',
    # d = 1 - p^(k-i) c' mod p^(l+k-i-j)
    G = build_glk(p, l, k)
    for j in range(l + 1):
        for i in range(k + 1):
            _, stab = orbit_and_stabilizer(G, local_vector(p, l, k, i, j))
            got = {tuple(int(x) for x in row) for row in stab}
            want = set()
            for a, b, c, d in G.elements().tolist():
                cq = c // p**k
                if (a - 1 + b * p**i) % p ** (l - j) == 0 and (d - 1 + p ** (k - i) * cq) % p ** (l + k - i - j) == 0:
                    want.add((a, b, c, d))
            assert got == want, (i, j)


@pytest.mark.parametrize("p,l,k", [(2, 2, 2), (3, 1, 2), (2, 1, 3)])
def test_orbits_partition_quotient(p, l, k):
    G = build_glk(p, l, k)
    gens = G.generators("full")
    parts = orbit_partition(itertools.product(range(G.m1), range(G.m2)), gens, G.m1, G.m2)
    assert sum(len(q) for q in parts) == G.m1 * G.m2
    seen = set()
    for q in parts:
        assert not seen & set(q)
        seen |= set(q)
        orbit, _ = orbit_and_stabilizer(G, q[0])
        assert orbit == set(q)


@pytest.mark.parametrize("plk", [(2, 1, 1), (2, 2, 2), (3, 1, 1), (3, 2, 1), (2, 0, 3), (3, 2, 0), (2, 3, 2), (5, 1, 1)])
def test_generators_generate(plk):
    G = build_glk(*plk)
    for kind in ("full", "pm", "one"):
        assert np.array_equal(G.closure(G.generators(kind)), G.subgroup_codes(kind)), kind


@pytest.mark.parametrize("p,l,k", [(2, 2, 1), (3, 1, 2)])
def test_congruence_kernel_acts_trivially(p, l, k):
    m1, m2 = p**l, p ** (l + k)
    for x in itertools.product(range(-2, 3), repeat=4):
        g = IntMatrix.of([[1 + m1 * x[0], m1 * x[1]], [m2 * x[2], 1 + m2 * x[3]]])
        for v in itertools.product(range(m1), range(m2)):
            q = QuotientVector((m1, m2), v)
            assert act_on_quotient(g, q) == q


def test_stab_det_exponent_examples():
    assert stab_det_exponent(3, 2, 4, 2, 0) == 2
    assert stab_det_exponent(2, 3, 6, 3, 0) == 3
    for p, l, k in [(2, 2, 2), (3, 1, 3), (5, 1, 1)]:
        assert stab_det_exponent(p, l, k, 0, 0) == 0


def test_index_examples():
    assert index_u0_pm_un(3, 2, 2) == 3
    assert index_u0_pm_un(2, 3, 3) == 2
    for p, l in [(2, 3), (3, 2), (5, 2)]:
        assert index_u0_pm_un(p, l, 0) == 1
    # at p = 2, -1 lies outside U_3 mod 8 but inside U_1 = U_0
    assert index_u0_pm_un(2, 3, 1) == 1
    assert index_u0_pm_un(5, 1, 1) == 2


def test_filtration_at_two():
    assert filtration_subgroup(2, 3, 0) == filtration_subgroup(2, 3, 1) == {1, 3, 5, 7}
    assert filtration_subgroup(2, 3, 2) == {1, 5}


def test_fiber_count_odd():
    r = fiber_count(3, 2, 4, 2, 0)
    assert r.fiber_count == 3 == r.formula_count and r.match
    assert r.orbit_size * r.stab_size == r.group_order


def test_fiber_count_two():
    r = fiber_count(2, 3, 6, 3, 0)
    assert r.fiber_count == 2 and r.match and r.n == 3


@pytest.mark.parametrize("p,l,k", [(2, 2, 2), (3, 2, 3), (5, 1, 2)])
def test_fiber_count_n_zero(p, l, k):
    assert fiber_count(p, l, k, 0, 0).fiber_count == 1


def test_sweep_small_grid():
    for p, l, k in [(2, 2, 2), (3, 2, 2), (5, 1, 2)]:
        reports = sweep(p, l, k)
        assert len(reports) == (l + 1) * (k + 1)
        assert all(r.match for r in reports)


def test_report_json_schema():
    doc = fiber_count(3, 1, 2, 1, 0).to_json()
    for key in ("p", "l", "k", "i", "j", "group_order", "orbit_size", "stab_size", "n", "fiber_count", "formula_count"):
        assert isinstance(doc[key], str)
    assert doc["match"] is True


@pytest.mark.parametrize("plk", [(2, 1, 1), (2, 2, 2), (3, 1, 1)])
def test_integral_surjectivity(plk):
    assert integral_surjectivity_check(*plk, entry_bound=8)


def test_integral_surjectivity_large():
    r = integral_surjectivity_report(3, 2, 4, entry_bound=32)
    assert r.ok and r.one_generated * 2 == r.pm_generated


def test_orbit_bfs_fixed_point():
    assert orbit_bfs((0, 0), [(1, 1, 0, 1)], 4, 8) == [(0, 0)]
