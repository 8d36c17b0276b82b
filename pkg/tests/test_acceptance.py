"""The eleven acceptance criteria, one test each.

A summary hook in conftest prints ``criterion N: PASS/FAIL`` after the run.
"""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from stgeom import linalg as la
from stgeom.acm import (
    classify,
    conformal_const,
    field_eq_report,
    homothety,
    houri_torsion,
    is_killing,
    lee_form,
    lee_form_variants,
    proportionality,
    sasaki_hatakeyama,
    st_connection,
    torsion,
    type_check_11,
    type_check_21_12,
)
from stgeom.exterior import KForm, ce_d, interior, parse_form
from stgeom.gallery import (
    build,
    gallery,
    level_set_points,
    moment_check_euclid,
    moment_check_sphere,
    rational_euclid_points,
    rational_sphere_points,
    u_n_canonical_sst,
)
from stgeom.hermitian import cylinder, is_skt, kt_lee
from stgeom.warped import r, rfun, warped_skt_report, warped_torsion_direct, warped_torsion_formula

from .algebras import (
    brute_d,
    bracket_jacobi_ok,
    kt_lee_on_cylinder,
    random_algebra,
    random_form,
    random_st,
    torsion_oracle,
)

GALLERY = gallery()
NAMES = sorted(GALLERY)

# nabla_{E_i} E_j = c E_k, 0-based (i, j) -> (k, c)
SEVEN_TABLE = {
    (4, 0): (1, -1), (4, 1): (0, 1), (4, 2): (3, 1), (4, 3): (2, -1),
    (5, 0): (2, -1), (5, 1): (3, -1), (5, 2): (0, 1), (5, 3): (1, 1),
    (6, 0): (3, -1), (6, 1): (2, 1), (6, 2): (1, -1), (6, 3): (0, 1),
}
SEVEN_TORSION = "-e1^e2^e5 - e1^e3^e6 - e1^e4^e7 + e2^e3^e7 - e2^e4^e6 + e3^e4^e5"


def test_criterion_1_connection_table():
    s = build("ex_7d_nilpotent")
    conn = st_connection(s)
    for i in range(7):
        for j in range(7):
            want = la.unit_vector(7, *SEVEN_TABLE[(i, j)]) if (i, j) in SEVEN_TABLE else la.zero_vector(7)
            assert conn.gamma[i][j] == want


def test_criterion_2_torsion_forms():
    s7 = build("ex_7d_nilpotent")
    assert torsion(s7) == parse_form(7, SEVEN_TORSION, 3)
    s4 = build("ex_r_times_g4")
    c = torsion(s4)
    t = proportionality(c, KForm.monomial(5, (1, 2, 3)))
    assert t is not None and t != 0
    assert s4.eta.wedge(ce_d(s4.L, s4.eta)).is_zero()
    assert not ce_d(s4.L, c).is_zero()


def test_criterion_3_classification():
    c5 = classify(build("ex_5d_quasi_sasaki"))
    assert c5.primary == "quasi-Sasaki" and c5.deta_decomposable and c5.is_sst
    c2 = classify(build("su2_sasaki"))
    assert c2.primary == "alpha-Sasaki" and c2.alpha == 2
    c7 = classify(build("ex_7d_nilpotent"))
    assert c7.is_balanced and not c7.is_quasi_sasaki


def test_criterion_4_compact_group():
    s = u_n_canonical_sst(3)
    assert sasaki_hatakeyama(s).is_zero() and is_killing(s)
    rep = field_eq_report(s)
    assert rep.dc.is_zero() and rep.dstar_c.is_zero()
    assert rep.flat and rep.ricci_flat


def test_cylinder_skt_half_and_lee_formula():
    # the part of criterion 5 that holds, together with the Lee form that replaces the other part
    for s in GALLERY.values():
        h = cylinder(s)
        assert is_skt(h) == classify(s).is_sst
        assert kt_lee(h) == kt_lee_on_cylinder(s)


@pytest.mark.xfail(strict=True, raises=AssertionError,
                   reason="su2_sasaki and ex_5d_quasi_sasaki are balanced yet their cylinders have Lee form -2 ds")
def test_criterion_5_cylinder_bridge():
    for name, s in GALLERY.items():
        h = cylinder(s)
        c = classify(s)
        assert is_skt(h) == c.is_sst, name
        assert kt_lee(h).is_zero() == c.is_balanced, name


def test_criterion_6_warped():
    for s in GALLERY.values():
        for f in (rfun(1), r, r**2, 1 + r):
            assert warped_torsion_direct(s, f) == warped_torsion_formula(s, f)
    closed = {name for name in NAMES if warped_skt_report(GALLERY[name], r).closed}
    assert "su2_sasaki" in closed and "ex_7d_nilpotent" not in closed
    # besides su2 only the one-dimensional line, where deta = 0 = 2F
    assert {name for name in closed if GALLERY[name].dim >= 3} == {"su2_sasaki"}
    for name in closed:
        s = GALLERY[name]
        assert ce_d(s.L, s.eta) == 2 * s.F


def test_criterion_7_lee_form():
    for s in GALLERY.values():
        a, b, c = lee_form_variants(s)
        assert a == b == c
        if s.dim == 5:
            assert ce_d(s.L, s.F) == lee_form(s).wedge(s.F)
    assert any(s.dim == 5 for s in GALLERY.values())


def test_criterion_8_transformations():
    for s in GALLERY.values():
        deta = ce_d(s.L, s.eta)
        for a in (2, 3, Fraction(5, 2)):
            t = homothety(s, a)
            assert t.F == a * s.F
            assert lee_form(t) == lee_form(s)
            assert torsion(t) == a * ((a - 1) * s.eta.wedge(deta) + torsion(s))
        for l1, l2 in ((2, 3), (Fraction(1, 2), Fraction(5, 3))):
            assert conformal_const(conformal_const(s, l1), l2) == conformal_const(s, l1 * l2)


def test_criterion_9_houri_bridge():
    for s in GALLERY.values():
        assert ce_d(s.L, s.eta) - interior(s.xi, houri_torsion(s)) == 2 * s.F


def test_criterion_10_moment_maps():
    for k in (1, 2, 3):
        pts = rational_sphere_points(k, 100, seed=k) + level_set_points(k, 100, seed=k)
        for p in pts:
            rep = moment_check_sphere(k, p)
            assert rep.dmu_xi == 0 and rep.ok
        for p in rational_euclid_points(k, 100, seed=k):
            rep = moment_check_euclid(k, p)
            assert rep.dmu_xi == 0
            assert rep.dmu_phi_x == 2 * sum(x * x for x in p[1:])


def test_criterion_11_property_batteries():
    rng = random.Random(20261018)
    for _ in range(200):
        L = random_algebra(rng, max_dim=7)
        n = L.dim
        assert bracket_jacobi_ok(L)
        gens = [KForm.monomial(n, (i,)) for i in range(n)]
        gens += [KForm.monomial(n, key) for key in combinations(range(n), 2)]
        for a in gens:
            assert ce_d(L, ce_d(L, a)).is_zero()
        for k in range(1, min(n, 4) + 1):
            a = random_form(rng, n, k)
            da = ce_d(L, a)
            assert da == brute_d(L, a)
            assert ce_d(L, da).is_zero()
    structures = list(GALLERY.values()) + [random_st(rng) for _ in range(30)]
    for s in structures:
        assert torsion_oracle(s, st_connection(s)) == torsion(s)
    for s in GALLERY.values():
        assert type_check_21_12(s, torsion(s))
        assert type_check_11(s, ce_d(s.L, s.eta))
