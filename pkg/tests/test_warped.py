import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from stgeom.acm import classify, conformal_const, torsion
from stgeom.errors import ParseError, PreconditionError
from stgeom.exterior import ce_d
from stgeom.gallery import build, gallery
from stgeom.hermitian import cylinder, kt_torsion
from stgeom.warped import (
    CONSTANT_BRANCH,
    LINEAR_BRANCH,
    WForm,
    constant_value,
    derivative,
    format_rfun,
    format_wform,
    is_polynomial,
    parse_rfun,
    r,
    rfun,
    warped_omega,
    warped_skt_report,
    warped_torsion_direct,
    warped_torsion_formula,
    wd,
)

from .algebras import rand_q, random_algebra, random_st

seeds = st.integers(0, 10**6)
SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
ALL = sorted(gallery())


def random_poly(rng, max_degree=3):
    f = rfun(0)
    while not f:
        f = sum((rfun(rand_q(rng)) * r**k for k in range(rng.randint(0, max_degree) + 1)), rfun(0))
    return f


def random_wform(rng, n, k):
    a = {key: random_poly(rng) for key in combinations(range(n), k) if rng.random() < 0.4}
    b = {key: random_poly(rng) for key in combinations(range(n), k - 1) if rng.random() < 0.4} if k else {}
    return WForm(n, k, a, b)


# -- rational functions ------------------------------------------------------------

@pytest.mark.parametrize("text,expected", [("1 + r^2", 1 + r**2), ("r/2", r / 2), ("3", rfun(3)),
                                           ("(r^2 - 1)/(r - 1)", r + 1)])
def test_parse_rfun(text, expected):
    assert parse_rfun(text) == expected


@pytest.mark.parametrize("bad", ["r +", "x + r", "sqrt(r)", "2**(1/2)"])
def test_parse_rfun_errors(bad):
    with pytest.raises(ParseError):
        parse_rfun(bad)


def test_rfun_helpers():
    assert constant_value(rfun(Fraction(3, 4))) == Fraction(3, 4)
    assert constant_value(rfun(0)) == 0
    assert constant_value(r) is None
    assert is_polynomial(1 + r) and not is_polynomial(1 / r)
    assert derivative(r**3) == 3 * r**2
    assert format_rfun(r**2 / 2) == "r**2/2"


# -- WForm calculus -----------------------------------------------------------------

def test_wedge_with_dr():
    n = 3
    dr = WForm.dr(n)
    e1 = WForm(n, 1, {(0,): 1})
    assert dr.wedge(dr).is_zero()
    assert e1.wedge(dr) == -dr.wedge(e1)
    assert format_wform(dr.wedge(e1).scale(r)) == "(r)*dr^e1"


def test_wd_examples():
    s = build("su2_sasaki")
    n = s.dim
    F, eta = WForm.from_kform(s.F), WForm.from_kform(s.eta)
    # r^2 F with dF = 0
    assert wd(s.L, F.scale(r**2)) == WForm.dr(n).wedge(F).scale(2 * r)
    # f dr ^ eta -> -f dr ^ deta
    f = 1 + r**2
    deta = WForm.from_kform(ce_d(s.L, s.eta))
    assert wd(s.L, WForm.dr(n).wedge(eta).scale(f)) == -WForm.dr(n).wedge(deta).scale(f)
    # the cone over a Sasaki structure is Kaehler
    assert wd(s.L, warped_omega(s, r)).is_zero()


@SETTINGS
@given(seeds, st.integers(0, 3))
def test_wd_squared_vanishes(seed, k):
    rng = random.Random(seed)
    L = random_algebra(rng, max_dim=5)
    w = random_wform(rng, L.dim, min(k, L.dim))
    assert wd(L, wd(L, w)).is_zero()


@SETTINGS
@given(seeds)
def test_wd_is_antiderivation(seed):
    rng = random.Random(seed)
    L = random_algebra(rng, max_dim=5)
    a, b = random_wform(rng, L.dim, 1), random_wform(rng, L.dim, 2)
    assert wd(L, a.wedge(b)) == wd(L, a).wedge(b) - a.wedge(wd(L, b))


# -- warped torsion -----------------------------------------------------------------

@pytest.mark.parametrize("name", ALL)
@pytest.mark.parametrize("f", [rfun(1), r, r**2, 1 + r, 2 * r - r**3 / 3])
def test_direct_equals_formula_on_gallery(name, f):
    s = gallery()[name]
    direct = warped_torsion_direct(s, f)
    assert direct == warped_torsion_formula(s, f)
    assert direct.is_polynomial()


@SETTINGS
@given(seeds)
def test_direct_equals_formula_random(seed):
    rng = random.Random(seed)
    s = random_st(rng)
    f = random_poly(rng)
    assert warped_torsion_direct(s, f) == warped_torsion_formula(s, f)


@pytest.mark.parametrize("name", ALL)
def test_constant_warp_is_the_cylinder(name):
    s = gallery()[name]
    assert warped_torsion_direct(s, 1).to_kform() == kt_torsion(cylinder(s))


def test_cone_torsion_values():
    s = build("ex_7d_nilpotent")
    deta = ce_d(s.L, s.eta)
    c = torsion(s)
    dphiF = c - s.eta.wedge(deta)
    want = WForm.from_kform(s.eta.wedge(deta - 2 * s.F) + dphiF, r**2)
    assert warped_torsion_direct(s, r) == want
    want2 = WForm.from_kform(c, r**4) - WForm.from_kform(s.F.wedge(s.eta), 4 * r**5)
    assert warped_torsion_direct(s, r**2) == want2
    assert warped_torsion_direct(build("su2_sasaki"), r).is_zero()


def test_zero_warping_function_rejected():
    s = build("su2_sasaki")
    for fn in (warped_torsion_direct, warped_torsion_formula, warped_skt_report):
        with pytest.raises(PreconditionError):
            fn(s, 0)


# -- SKT dichotomy ------------------------------------------------------------------

def test_skt_branches():
    rep = warped_skt_report(build("ex_5d_quasi_sasaki"), 1)
    assert rep.closed and rep.branch == CONSTANT_BRANCH and rep.lam == 0
    rep = warped_skt_report(build("su2_sasaki"), r)
    assert rep.closed and rep.branch == LINEAR_BRANCH and rep.lam == 1
    assert rep.summary("cone") == "cone torsion closed; branch: linear f, deta = 2 f' F (lambda = f' = 1)"
    rep = warped_skt_report(build("ex_7d_nilpotent"), r)
    assert not rep.closed and rep.branch is None
    assert rep.summary("cone") == "cone torsion not closed"
    assert not warped_skt_report(build("ex_r_times_g4"), 1).closed


def test_scaled_cone_over_rescaled_sasaki():
    # after a constant conformal change deta = 2F/lam2, so f = r/lam2 gives a closed torsion
    s = conformal_const(build("su2_sasaki"), 2)
    assert not warped_skt_report(s, r).closed
    rep = warped_skt_report(s, r / 2)
    assert rep.closed and rep.lam == Fraction(1, 2) and rep.branch == LINEAR_BRANCH


@pytest.mark.parametrize("name", ALL)
def test_cone_closed_iff_deta_is_2F(name):
    s = gallery()[name]
    closed = warped_skt_report(s, r).closed
    assert closed == (ce_d(s.L, s.eta) == 2 * s.F)
    if classify(s).is_sasaki:
        assert closed


def test_cone_closed_exactly_for_sasaki_outside_the_degenerate_line():
    # the one-dimensional algebra has deta = 0 = 2F, so its cone is trivially closed
    closed = {name for name in ALL if warped_skt_report(gallery()[name], r).closed}
    assert closed == {"su2_sasaki", "u1_canonical_sst"}
    assert gallery()["u1_canonical_sst"].dim == 1
