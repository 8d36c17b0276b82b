"""Concrete ST structures and exact pointwise checks on spheres and Euclidean space.

The Lie-algebra builders return :class:`~stgeom.acm.ACMStructure` values.
The pointwise section works with explicit rational points of
``S^{2k+1} ⊂ C^{k+1}`` (coordinates ordered ``x1, y1, x2, y2, ...``) and of
``R x C^{k+1}`` (coordinates ``s, x1, y1, ...``), with hand-coded polynomial
differentials so that every check is an exact zero test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg as la
from .acm import ACMStructure, complete_phi
from .errors import DimensionError, PreconditionError
from .exterior import LieAlgebra, Metric
from .linalg import ONE, ZERO, Matrix, Vector, q


def _structure(n, table, phi_entries, xi_index, metric=None) -> ACMStructure:
    L = LieAlgebra.from_table(n, table)
    g = Metric(metric) if metric is not None else Metric.identity(n)
    xi = la.unit_vector(n, xi_index)
    phi = complete_phi(n, g, xi, phi_entries)
    return ACMStructure(L, g, xi, phi)


def ex_r_times_g4() -> ACMStructure:
    """``R x G`` with G four-dimensional solvable; ``dt`` is the fifth coframe element.

    Normal with Killing Reeb field, torsion ``2 e2^e3^e4`` which is not closed.
    """
    return _structure(
        5,
        {3: "e3^e1 + e4^e2", 4: "e4^e1 + e2^e3"},
        [(0, 1, 1), (2, 1, 3)],
        xi_index=4,
    )


def ex_5d_quasi_sasaki() -> ACMStructure:
    """Five-dimensional quasi-Sasaki algebra with decomposable ``deta``."""
    return _structure(
        5,
        {
            1: "e1^e3 + e2^e3 - e3^e4 + e3^e5 + e2^e5",
            2: "2*e1^e2 - 2*e1^e3 + e1^e4 - e1^e5 - e2^e4 + e3^e4 + e4^e5",
            3: "-e1^e2 + e1^e3 + e1^e4 - e1^e5 + 2*e2^e4 - 2*e3^e4 + e4^e5",
            4: "-e1^e2 - e2^e3 + e2^e4 - e2^e5 - e3^e5",
            # (e1 + e4)^(e2 - e3); the sign of e4 is forced by d^2 = 0
            5: "e1^e2 - e1^e3 - e2^e4 + e3^e4",
        },
        [(0, -1, 1), (2, -1, 3)],
        xi_index=4,
    )


def ex_7d_nilpotent() -> ACMStructure:
    """Seven-dimensional 2-step nilpotent algebra with a balanced ST structure.

    The Reeb field is ``E5``: it is the only basis vector killed by the phi
    table, and ``F = e1^e2 + e3^e4 + e6^e7`` has no ``e5`` component.
    """
    return _structure(
        7,
        {5: "-e1^e2 + e3^e4", 6: "-e1^e3 - e2^e4", 7: "-e1^e4 + e2^e3"},
        [(0, -1, 1), (2, -1, 3), (5, -1, 6)],
        xi_index=4,
    )


def su2_sasaki() -> ACMStructure:
    """Standard Sasaki structure on su(2) with ``deta = 2F``."""
    return _structure(
        3,
        {1: "-2*e2^e3", 2: "-2*e3^e1", 3: "-2*e1^e2"},
        [(1, 1, 2), (2, -1, 1)],
        xi_index=0,
    )


def abelian_st(n: int) -> ACMStructure:
    """``R^n`` (n odd) with ``xi = E_n`` and ``e^{2i-1} o phi = -e^{2i}``."""
    if n < 1 or n % 2 == 0:
        raise PreconditionError(f"abelian ST structure needs odd n, got {n}")
    entries = [(2 * i, -1, 2 * i + 1) for i in range((n - 1) // 2)]
    return _structure(n, {}, entries, xi_index=n - 1)


# -- u(n) with its canonical SST structure ------------------------------------------

def u_n_basis_labels(n: int) -> list[str]:
    labels = [f"iE{j}{j}" for j in range(1, n + 1)]
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            labels += [f"E{j}{k}-E{k}{j}", f"i(E{j}{k}+E{k}{j})"]
    return labels


def _u_n_matrices(n: int) -> list[tuple[Matrix, Matrix]]:
    """Basis of u(n) as (real part, imaginary part) pairs."""

    def unit(j, k, c=ONE):
        return tuple(tuple(c if (a, b) == (j, k) else ZERO for b in range(n)) for a in range(n))

    zero = la.zeros(n)
    out = [(zero, unit(j, j)) for j in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            out.append((la.sub(unit(j, k), unit(k, j)), zero))
            out.append((zero, la.add(unit(j, k), unit(k, j))))
    return out


def _complex_commutator(a, b):
    ar, ai = a
    br, bi = b
    re = la.sub(la.matmul(ar, br), la.matmul(ai, bi))
    im = la.add(la.matmul(ar, bi), la.matmul(ai, br))
    re2 = la.sub(la.matmul(br, ar), la.matmul(bi, ai))
    im2 = la.add(la.matmul(br, ai), la.matmul(bi, ar))
    return la.sub(re, re2), la.sub(im, im2)


def _u_n_coords(n: int, m) -> Vector:
    re, im = m
    coords = [im[j][j] for j in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            coords += [re[j][k], im[j][k]]
    return tuple(coords)


def u_n_lie_algebra(n: int) -> LieAlgebra:
    """u(n) on the basis ``iE_jj``, then ``E_jk - E_kj, i(E_jk + E_kj)`` for ``j < k``."""
    from .exterior import KForm

    mats = _u_n_matrices(n)
    dim = len(mats)
    coeffs: list[dict] = [{} for _ in range(dim)]
    for a in range(dim):
        for b in range(a + 1, dim):
            br = _u_n_coords(n, _complex_commutator(mats[a], mats[b]))
            for i, v in enumerate(br):
                if v != 0:
                    coeffs[i][(a, b)] = -v
    return LieAlgebra([KForm(dim, 2, c) for c in coeffs])


def u_n_canonical_sst(n: int) -> ACMStructure:
    """u(n), n odd, with the metric ``-tr(AB)`` and the canonical ST structure.

    ``xi = iE11``; on the diagonal torus ``phi(iE_{2m}) = iE_{2m+1}``; on each
    root pair ``phi(E_jk - E_kj) = i(E_jk + E_kj)``, which is multiplication
    by ``i`` on the positive root vector ``E_jk``.
    """
    if n < 1 or n % 2 == 0:
        raise PreconditionError(f"u_n_canonical_sst needs odd n, got {n}")
    L = u_n_lie_algebra(n)
    dim = L.dim
    diag = [ONE] * n + [Fraction(2)] * (dim - n)
    g = Metric(tuple(la.unit_vector(dim, i, diag[i]) for i in range(dim)))
    cols = [la.zero_vector(dim) for _ in range(dim)]
    for m in range(1, n - 1, 2):
        cols[m] = la.unit_vector(dim, m + 1)
        cols[m + 1] = la.unit_vector(dim, m, -1)
    for p in range(n, dim, 2):
        cols[p] = la.unit_vector(dim, p + 1)
        cols[p + 1] = la.unit_vector(dim, p, -1)
    return ACMStructure(L, g, la.unit_vector(dim, 0), la.from_columns(cols))


BUILDERS: dict[str, Callable[[], ACMStructure]] = {
    "ex_r_times_g4": ex_r_times_g4,
    "ex_5d_quasi_sasaki": ex_5d_quasi_sasaki,
    "ex_7d_nilpotent": ex_7d_nilpotent,
    "su2_sasaki": su2_sasaki,
    "u1_canonical_sst": lambda: u_n_canonical_sst(1),
    "u3_canonical_sst": lambda: u_n_canonical_sst(3),
}


def build(name: str) -> ACMStructure:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise PreconditionError(f"unknown example {name!r}; choose from {', '.join(BUILDERS)}") from None


def gallery() -> dict[str, ACMStructure]:
    """Every named builder, plus the abelian ``R^5``."""
    out = {name: f() for name, f in BUILDERS.items()}
    out["abelian_r5"] = abelian_st(5)
    return out


# -- pointwise sphere and Euclidean data ---------------------------------------------

def _norm2(v: Sequence) -> Fraction:
    return sum((x * x for x in v), ZERO)


def _j(v: Vector) -> Vector:
    """Standard complex structure on ``(x1, y1, ...)``: ``J d/dx = d/dy``."""
    out = []
    for m in range(0, len(v), 2):
        out += [-v[m + 1], v[m]]
    return tuple(out)


def _j_matrix(size: int) -> Matrix:
    return la.from_columns([_j(la.unit_vector(size, i)) for i in range(size)])


@dataclass(frozen=True)
class SpherePoint:
    k: int
    coords: Vector

    def __post_init__(self):
        coords = la.vector(self.coords)
        object.__setattr__(self, "coords", coords)
        if self.k < 0 or len(coords) != 2 * self.k + 2:
            raise DimensionError(f"S^{2 * self.k + 1} needs {2 * self.k + 2} coordinates, got {len(coords)}")
        if _norm2(coords) != 1:
            raise PreconditionError(f"point is not on the unit sphere (|p|^2 = {_norm2(coords)})")

    def z_norms(self) -> tuple:
        """``|z_j|^2`` for each complex coordinate."""
        c = self.coords
        return tuple(c[2 * j] ** 2 + c[2 * j + 1] ** 2 for j in range(self.k + 1))


@dataclass(frozen=True)
class PointwiseACM:
    point: Vector
    eta: Vector
    xi: Vector
    phi: Matrix
    tangent_basis: tuple

    def eta_of_xi(self) -> Fraction:
        return la.dot(self.eta, self.xi)

    def phi_squared_ok(self) -> bool:
        """``phi^2 = -1 + eta (x) xi`` on every tangent basis vector."""
        for v in self.tangent_basis:
            lhs = la.matvec(self.phi, la.matvec(self.phi, v))
            rhs = la.add(la.scale(-1, v), la.scale(la.dot(self.eta, v), self.xi))
            if lhs != rhs:
                return False
        return True

    def phi_tangent(self) -> bool:
        return all(la.dot(la.matvec(self.phi, v), self.point) == 0 for v in self.tangent_basis)


def _tangent_basis(p: Vector) -> tuple:
    """Rational basis of ``p^perp``."""
    m = next(i for i, x in enumerate(p) if x != 0)
    out = []
    for i in range(len(p)):
        if i != m:
            out.append(la.sub(la.unit_vector(len(p), i), la.unit_vector(len(p), m, p[i] / p[m])))
    return tuple(out)


def sphere_data(p: SpherePoint) -> PointwiseACM:
    """Standard Sasaki data at ``p``: ``xi = sum x_j d/dy_j - y_j d/dx_j`` and
    ``phi X = J(X - eta(X) xi)`` on tangent vectors."""
    c = p.coords
    xi = _j(c)
    eta = xi
    size = len(c)
    proj = la.sub(la.identity(size), la.outer(xi, eta))
    phi = la.matmul(_j_matrix(size), proj)
    return PointwiseACM(c, eta, xi, phi, _tangent_basis(c))


def _rotate(coords: Vector, weights: Sequence[int], cs: tuple) -> Vector:
    """Rotate ``z_j`` by ``e^{i w_j s}`` where ``(cos s, sin s) = cs``."""
    cos, sin = cs
    out = []
    for j, w in enumerate(weights):
        x, y = coords[2 * j], coords[2 * j + 1]
        sw = sin * w
        out += [cos * x - sw * y, sw * x + cos * y]
    return tuple(out)


def pythagorean_rotation(a: int, b: int) -> tuple[Fraction, Fraction]:
    """``(cos s, sin s)`` from the Pythagorean triple generated by ``a, b``."""
    den = a * a + b * b
    if den == 0:
        raise PreconditionError("rotation generator must be nonzero")
    return Fraction(a * a - b * b, den), Fraction(2 * a * b, den)


@dataclass(frozen=True)
class MomentReport:
    point: Vector
    mu: Fraction
    dmu_xi: Fraction
    dmu_phi_x: Fraction
    expected_dmu_phi_x: Fraction
    on_level_set: bool
    mu_invariant: bool
    f_invariant: bool
    candidate_matches: bool

    @property
    def reeb_basic(self) -> bool:
        return self.dmu_xi == 0

    @property
    def ok(self) -> bool:
        return (self.reeb_basic and self.dmu_phi_x == self.expected_dmu_phi_x
                and self.mu_invariant and self.f_invariant and self.candidate_matches
                and (not self.on_level_set or self.dmu_phi_x != 0))


_DEFAULT_ROTATIONS = ((2, 1), (3, 2), (4, 1))


def _invariance(values: Callable[[Vector], Fraction], coords: Vector, weights, rotations) -> bool:
    base = values(coords)
    return all(values(_rotate(coords, weights, pythagorean_rotation(a, b))) == base for a, b in rotations)


def _f_values(lambdas):
    def f(coords):
        return sum((q(l) * (coords[2 * j] ** 2 + coords[2 * j + 1] ** 2) for j, l in enumerate(lambdas)), ZERO)
    return f


def moment_check_sphere(k: int, p: SpherePoint, lambdas: Sequence | None = None,
                        rotations=_DEFAULT_ROTATIONS) -> MomentReport:
    """Circle action ``z_j -> e^{(-1)^j i s} z_j`` on ``S^{2k+1}`` with ``mu = eta(X)``."""
    if k < 1 or p.k != k:
        raise PreconditionError(f"sphere moment check needs k >= 1 and a point of S^{2 * k + 1}")
    data = sphere_data(p)
    c = p.coords
    w = [(-1) ** j for j in range(1, k + 2)]
    X = []
    for j, wj in enumerate(w):
        X += [-wj * c[2 * j + 1], wj * c[2 * j]]
    X = tuple(X)
    norms = p.z_norms()
    mu = sum((wj * nz for wj, nz in zip(w, norms)), ZERO)
    dmu = []
    for j, wj in enumerate(w):
        dmu += [2 * wj * c[2 * j], 2 * wj * c[2 * j + 1]]
    dmu = tuple(dmu)
    lambdas = lambdas if lambdas is not None else list(range(1, k + 2))

    def mu_of(coords):
        return sum((wj * (coords[2 * j] ** 2 + coords[2 * j + 1] ** 2) for j, wj in enumerate(w)), ZERO)

    return MomentReport(
        point=c,
        mu=mu,
        dmu_xi=la.dot(dmu, data.xi),
        dmu_phi_x=la.dot(dmu, la.matvec(data.phi, X)),
        expected_dmu_phi_x=2 * mu * mu - 2,
        on_level_set=mu == 0,
        mu_invariant=_invariance(mu_of, c, w, rotations),
        f_invariant=_invariance(_f_values(lambdas), c, w, rotations),
        candidate_matches=la.dot(data.eta, X) == mu,
    )


def moment_check_euclid(k: int, p: Sequence, lambdas: Sequence | None = None,
                        rotations=_DEFAULT_ROTATIONS) -> MomentReport:
    """``R x C^{k+1}`` with ``xi = d/ds``, diagonal circle action and ``mu = 1 - sum |z_j|^2``.

    ``p`` is ``(s, x1, y1, ..., x_{k+1}, y_{k+1})``.
    """
    p = la.vector(p)
    if k < 1 or len(p) != 2 * k + 3:
        raise PreconditionError(f"Euclidean moment check needs k >= 1 and {2 * k + 3} coordinates")
    c = p[1:]
    size = len(p)
    xi = la.unit_vector(size, 0)
    phi = la.block_diag(((ZERO,),), _j_matrix(len(c)))
    X = (ZERO,) + _j(c)
    r2 = _norm2(c)
    dmu = (ZERO,) + tuple(-2 * x for x in c)
    w = [1] * (k + 1)
    lambdas = lambdas if lambdas is not None else list(range(1, k + 2))

    def mu_of(coords):
        return 1 - _norm2(coords)

    return MomentReport(
        point=p,
        mu=1 - r2,
        dmu_xi=la.dot(dmu, xi),
        dmu_phi_x=la.dot(dmu, la.matvec(phi, X)),
        expected_dmu_phi_x=2 * r2,
        on_level_set=r2 == 1,
        mu_invariant=_invariance(mu_of, c, w, rotations),
        f_invariant=_invariance(_f_values(lambdas), c, w, rotations),
        candidate_matches=True,
    )


# -- rational points -----------------------------------------------------------------

def stereographic(v: Sequence) -> Vector:
    """``(2v, |v|^2 - 1) / (|v|^2 + 1)``, a rational point of the unit sphere."""
    v = la.vector(v)
    n2 = _norm2(v)
    den = n2 + 1
    return tuple(2 * x / den for x in v) + ((n2 - 1) / den,)


def _random_rational(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def rational_sphere_points(k: int, count: int, seed: int = 0) -> list[SpherePoint]:
    """``count`` distinct rational points of ``S^{2k+1}``; the first is the south pole."""
    if count < 1:
        raise PreconditionError("count must be at least 1")
    rng = random.Random(seed)
    seen, out = set(), []
    v = la.zero_vector(2 * k + 1)
    while len(out) < count:
        pt = stereographic(v)
        if pt not in seen:
            seen.add(pt)
            out.append(SpherePoint(k, pt))
        v = tuple(_random_rational(rng) for _ in range(2 * k + 1))
    return out


def level_set_points(k: int, count: int, seed: int = 0) -> list[SpherePoint]:
    """Rational points of ``S^{2k+1}`` with ``sum (-1)^j |z_j|^2 = 0``.

    Odd and even complex coordinates each carry total weight 1/2: a rational
    unit vector is squeezed to norm 1/2 by ``(a, b) -> ((a+b)/2, (a-b)/2)``.
    """
    if k < 1:
        raise PreconditionError("the level set is empty for k = 0")
    n_odd = (k + 2) // 2
    n_even = (k + 1) // 2

    def half_norm(u):
        out = []
        for m in range(0, len(u), 2):
            a, b = u[m], u[m + 1]
            out += [(a + b) / 2, (a - b) / 2]
        return out

    rng = random.Random(seed)
    seen, out = set(), []
    while len(out) < count:
        odd = half_norm(stereographic([_random_rational(rng) for _ in range(2 * n_odd - 1)]))
        even = half_norm(stereographic([_random_rational(rng) for _ in range(2 * n_even - 1)]))
        coords = []
        for j in range(k + 1):
            src = odd if j % 2 == 0 else even
            m = j // 2
            coords += src[2 * m:2 * m + 2]
        pt = tuple(coords)
        if pt not in seen:
            seen.add(pt)
            out.append(SpherePoint(k, pt))
    return out


def rational_euclid_points(k: int, count: int, seed: int = 0) -> list[Vector]:
    rng = random.Random(seed)
    return [tuple(_random_rational(rng) for _ in range(2 * k + 3)) for _ in range(count)]
