from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from stgeom import linalg as la
from stgeom.acm import (
    classify,
    is_killing,
    proportionality,
    sasaki_hatakeyama,
    st_connection,
    torsion,
    validate,
)
from stgeom.errors import DimensionError, PreconditionError
from stgeom.exterior import KForm, ce_d, codifferential, curvature
from stgeom.gallery import (
    BUILDERS,
    SpherePoint,
    abelian_st,
    build,
    gallery,
    level_set_points,
    moment_check_euclid,
    moment_check_sphere,
    pythagorean_rotation,
    rational_euclid_points,
    rational_sphere_points,
    sphere_data,
    stereographic,
    u_n_basis_labels,
    u_n_canonical_sst,
    u_n_lie_algebra,
)

ALL = sorted(gallery())


# -- builders ------------------------------------------------------------------------

@pytest.mark.parametrize("name", ALL)
def test_builders_are_st(name):
    s = gallery()[name]
    assert validate(s).ok
    assert sasaki_hatakeyama(s).is_zero()
    assert is_killing(s)


def test_unknown_builder():
    with pytest.raises(PreconditionError, match="unknown example"):
        build("nope")
    assert set(BUILDERS) <= set(gallery())


@pytest.mark.parametrize("bad", [0, 2, 4])
def test_unsupported_sizes(bad):
    with pytest.raises(PreconditionError):
        u_n_canonical_sst(bad)
    with pytest.raises(PreconditionError):
        abelian_st(bad)


def test_seven_dim_example():
    s = build("ex_7d_nilpotent")
    assert s.xi == la.unit_vector(7, 4)
    assert s.F == KForm(7, 2, {(0, 1): 1, (2, 3): 1, (5, 6): 1})
    c = classify(s)
    assert c.primary == "generic-ST" and c.is_balanced


def test_su2_is_sasaki():
    s = build("su2_sasaki")
    assert ce_d(s.L, s.eta) == 2 * s.F
    c = classify(s)
    assert c.is_sasaki and c.alpha == 2


def _u_n_sympy(n):
    """The same basis as complex sympy matrices."""
    I = sympy.I
    mats = [I * sympy.Matrix(n, n, lambda a, b: int(a == b == j)) for j in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            e = sympy.Matrix(n, n, lambda a, b: int((a, b) == (j, k)))
            mats += [e - e.T, I * (e + e.T)]
    return mats


@pytest.mark.parametrize("n", [1, 2, 3])
def test_u_n_brackets_match_matrix_commutators(n):
    L = u_n_lie_algebra(n)
    mats = _u_n_sympy(n)
    assert L.dim == n * n == len(mats) == len(u_n_basis_labels(n))
    for a, b in combinations(range(L.dim), 2):
        comm = mats[a] * mats[b] - mats[b] * mats[a]
        v = L.basis_bracket(a, b)
        rebuilt = sum((sympy.Rational(x.numerator, x.denominator) * m for x, m in zip(v, mats)),
                      sympy.zeros(n, n))
        assert sympy.simplify(comm - rebuilt) == sympy.zeros(n, n)


def test_u3_metric_is_minus_trace():
    s = u_n_canonical_sst(3)
    mats = _u_n_sympy(3)
    for a in range(9):
        for b in range(9):
            assert sympy.Rational(str(s.g.g[a][b])) == -(mats[a] * mats[b]).trace()


def test_u3_torsion_is_the_bi_invariant_form():
    s = u_n_canonical_sst(3)
    n = s.dim
    E = [la.unit_vector(n, i) for i in range(n)]
    b = KForm(n, 3, {(i, j, k): s.g(s.L.basis_bracket(i, j), E[k]) for i, j, k in combinations(range(n), 3)})
    c = torsion(s)
    assert proportionality(c, b) == -1
    assert ce_d(s.L, c).is_zero()
    assert codifferential(s.L, s.g, c).is_zero()
    assert all(la.is_zero(r) for r in curvature(s.L, st_connection(s)).values())


def test_u3_torus_data():
    s = u_n_canonical_sst(3)
    # xi = iE11 and phi(iE22) = iE33
    assert s.xi == la.unit_vector(9, 0)
    assert s.phi_of(la.unit_vector(9, 1)) == la.unit_vector(9, 2)
    assert u_n_basis_labels(3)[:3] == ["iE11", "iE22", "iE33"]


def test_u1_is_a_line():
    s = u_n_canonical_sst(1)
    assert s.dim == 1 and torsion(s).is_zero()


# -- sphere points and pointwise data ------------------------------------------------

def test_stereographic_poles():
    assert stereographic((0, 0, 0)) == (0, 0, 0, -1)
    assert stereographic((1, 0, 0)) == (1, 0, 0, 0)


def test_sphere_point_validation():
    with pytest.raises(PreconditionError):
        SpherePoint(1, (1, 1, 0, 0))
    with pytest.raises(DimensionError):
        SpherePoint(1, (1, 0, 0))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_rational_sphere_points(k):
    pts = rational_sphere_points(k, 100, seed=k)
    assert len(pts) == 100 and len({p.coords for p in pts}) == 100
    assert pts[0].coords[-1] == -1
    for p in pts:
        assert sum(x * x for x in p.coords) == 1


def test_rational_sphere_points_needs_count():
    with pytest.raises(PreconditionError):
        rational_sphere_points(1, 0)


def test_sphere_data_at_the_first_basis_point():
    d = sphere_data(SpherePoint(1, (1, 0, 0, 0)))
    assert d.xi == (0, 1, 0, 0)
    assert d.eta == (0, 1, 0, 0)


@pytest.mark.parametrize("k", [1, 2])
def test_sphere_data_invariants(k):
    for p in rational_sphere_points(k, 100, seed=7):
        d = sphere_data(p)
        assert d.eta_of_xi() == 1
        assert d.phi_squared_ok() and d.phi_tangent()
        assert la.dot(d.xi, p.coords) == 0
        # metric compatibility on tangent vectors
        for u in d.tangent_basis:
            for v in d.tangent_basis:
                lhs = la.dot(la.matvec(d.phi, u), la.matvec(d.phi, v))
                assert lhs == la.dot(u, v) - la.dot(d.eta, u) * la.dot(d.eta, v)


# -- moment maps ------------------------------------------------------------------------

def _sphere_oracle(k, coords):
    """``d mu(phi X)`` from sympy differentiation of ``mu = sum (-1)^j |z_j|^2``."""
    xs = sympy.symbols(f"v0:{2 * k + 2}")
    w = [(-1) ** j for j in range(1, k + 2)]
    mu = sum(wj * (xs[2 * j] ** 2 + xs[2 * j + 1] ** 2) for j, wj in enumerate(w))
    grad = [sympy.diff(mu, x) for x in xs]
    p = SpherePoint(k, coords)
    d = sphere_data(p)
    X = []
    for j, wj in enumerate(w):
        X += [-wj * coords[2 * j + 1], wj * coords[2 * j]]
    phiX = la.matvec(d.phi, tuple(X))
    subs = {x: sympy.Rational(str(c)) for x, c in zip(xs, coords)}
    dmu = [g.subs(subs) for g in grad]
    return (sum(a * sympy.Rational(str(b)) for a, b in zip(dmu, phiX)),
            sum(a * sympy.Rational(str(b)) for a, b in zip(dmu, d.xi)))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sphere_moment_checks(k):
    for p in rational_sphere_points(k, 100, seed=k):
        rep = moment_check_sphere(k, p)
        assert rep.reeb_basic and rep.ok
        assert rep.mu_invariant and rep.f_invariant and rep.candidate_matches
        dphi, dxi = _sphere_oracle(k, p.coords)
        assert sympy.Rational(str(rep.dmu_phi_x)) == dphi and dxi == 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_sphere_level_set(k):
    pts = level_set_points(k, 100, seed=11)
    assert len({p.coords for p in pts}) == 100
    for p in pts:
        rep = moment_check_sphere(k, p)
        assert rep.on_level_set and rep.mu == 0
        assert rep.dmu_phi_x != 0 and rep.ok


@pytest.mark.parametrize("k", [1, 2])
def test_euclidean_moment_checks(k):
    for p in rational_euclid_points(k, 100, seed=3):
        rep = moment_check_euclid(k, p)
        assert rep.dmu_xi == 0
        assert rep.dmu_phi_x == 2 * sum(x * x for x in p[1:])
        assert rep.ok


def test_moment_check_errors():
    p = rational_sphere_points(1, 1)[0]
    with pytest.raises(PreconditionError):
        moment_check_sphere(2, p)
    with pytest.raises(PreconditionError):
        moment_check_sphere(0, SpherePoint(0, (1, 0)))
    with pytest.raises(PreconditionError):
        moment_check_euclid(1, (0, 1, 0))
    with pytest.raises(PreconditionError):
        level_set_points(0, 1)


def test_weighted_norms_are_invariant_for_any_weights():
    # the circle rotates each z_j by a phase, so every |z_j|^2 is fixed
    p = rational_sphere_points(1, 2, seed=5)[1]
    assert moment_check_sphere(1, p, lambdas=[Fraction(1, 3), 7]).f_invariant


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(0, 30))
def test_pythagorean_rotation_is_on_the_circle(a, b):
    c, s = pythagorean_rotation(a, b)
    assert c * c + s * s == 1


def test_pythagorean_rotation_rejects_zero():
    with pytest.raises(PreconditionError):
        pythagorean_rotation(0, 0)
