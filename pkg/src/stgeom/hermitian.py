"""Hermitian (KT) structures on even-dimensional Lie algebras and the bridges
between ST and KT geometry: cylinder, product, central and torus extensions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import linalg as la
from .acm import ACMStructure, is_normal, require_st, require_valid, type_check_11
from .errors import InvalidStructure, PreconditionError
from .exterior import (
    KForm,
    LieAlgebra,
    Metric,
    VectorValued2Form,
    ce_d,
    direct_sum,
    embed,
    interior,
    pullback,
    trace_pairs,
)
from .linalg import Matrix, q

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class HermitianStructure:
    """``(L, g, J)`` with ``omega = g(J., .)`` computed at construction."""

    L: LieAlgebra
    g: Metric
    J: Matrix
    omega: KForm = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.L.dim
        object.__setattr__(self, "J", la.matrix(self.J))
        if self.g.dim != n or len(self.J) != n:
            raise InvalidStructure("L, g and J must share one dimension")
        m = la.matmul(la.transpose(self.J), self.g.g)
        object.__setattr__(self, "omega", KForm(n, 2, {(i, j): m[i][j] for i, j in combinations(range(n), 2)}))

    @classmethod
    def from_omega(cls, L: LieAlgebra, g: Metric, omega: KForm) -> "HermitianStructure":
        """Solve ``g(J., .) = omega`` for J, i.e. ``J = -g^-1 Omega``."""
        J = la.scale(-1, la.matmul(g.inv, omega.as_matrix()))
        return cls(L, g, J)

    @property
    def dim(self) -> int:
        return self.L.dim


def validate_hermitian(h: HermitianStructure) -> list[str]:
    n = h.dim
    fails = []
    if n % 2:
        fails.append(f"dimension {n} is odd")
    if la.matmul(h.J, h.J) != la.scale(-1, la.identity(n)):
        fails.append("J^2 != -1")
    if la.matmul(la.transpose(h.J), la.matmul(h.g.g, h.J)) != h.g.g:
        fails.append("g(JX, JY) != g(X, Y)")
    return fails


def require_hermitian(h: HermitianStructure):
    fails = validate_hermitian(h)
    if fails:
        raise InvalidStructure("; ".join(fails))


def nijenhuis(h: HermitianStructure) -> VectorValued2Form:
    """``N(X, Y) = [JX, JY] - [X, Y] - J[JX, Y] - J[X, JY]`` on basis pairs."""
    require_hermitian(h)
    n, L, J = h.dim, h.L, h.J
    cols = [la.column(J, i) for i in range(n)]
    vals = {}
    for i, j in combinations(range(n), 2):
        Ei, Ej = la.unit_vector(n, i), la.unit_vector(n, j)
        v = la.sub(L.bracket(cols[i], cols[j]), L.basis_bracket(i, j))
        v = la.sub(v, la.matvec(J, L.bracket(cols[i], Ej)))
        v = la.sub(v, la.matvec(J, L.bracket(Ei, cols[j])))
        vals[(i, j)] = v
    return VectorValued2Form(n, vals)


def is_integrable(h: HermitianStructure) -> bool:
    return nijenhuis(h).is_zero()


def _require_integrable(h: HermitianStructure, what: str):
    if not is_integrable(h):
        raise PreconditionError(f"{what} needs an integrable J")


def kt_torsion(h: HermitianStructure) -> KForm:
    """``c_J = d omega(J., J., J.)``."""
    _require_integrable(h, "kt_torsion")
    return pullback(h.J, ce_d(h.L, h.omega))


def is_skt(h: HermitianStructure) -> bool:
    return ce_d(h.L, kt_torsion(h)).is_zero()


def kt_lee(h: HermitianStructure) -> KForm:
    """``theta(X) = 1/2 sum g^{ij} d omega(X, E_i, J E_j)``."""
    _require_integrable(h, "kt_lee")
    n = h.dim
    dw = ce_d(h.L, h.omega)
    vals = []
    for a in range(n):
        m = la.matmul(interior(la.unit_vector(n, a), dw).as_matrix(), h.J)
        vals.append(HALF * sum((gij * m[i][j] for i, j, gij in trace_pairs(h.g)), Fraction(0)))
    return KForm.covector(vals)


# -- ST -> KT -----------------------------------------------------------------------

def lift(a: KForm, offset: int = 1) -> KForm:
    """A form on L viewed on ``R^offset (+) L`` (the cylinder coordinate comes first)."""
    return embed(a, a.dim + offset, offset)


def cylinder(s: ACMStructure) -> HermitianStructure:
    """``R T (+) L`` with T central, ``g_K = ds^2 + g`` and ``omega_K = ds ^ eta + F``.

    T sits at index 0, so ``JT = xi``, ``J xi = -T`` and ``J = phi`` on ``ker eta``.
    """
    require_st(s, "cylinder")
    n = s.dim + 1
    L = direct_sum(LieAlgebra.abelian(1), s.L)
    g = Metric(la.block_diag(la.identity(1), s.g.g))
    # J(t T + X) = phi X - eta(X) T + t xi
    eta = s.eta.covector_values()
    J = [[Fraction(0)] * n for _ in range(n)]
    J[0] = [Fraction(0)] + [-x for x in eta]
    for i in range(1, n):
        J[i][0] = s.xi[i - 1]
        for j in range(1, n):
            J[i][j] = s.phi[i - 1][j - 1]
    h = HermitianStructure(L, g, J)
    if h.omega != KForm.monomial(n, (0,)).wedge(lift(s.eta)) + lift(s.F):
        raise InvalidStructure("cylinder J does not reproduce ds ^ eta + F")
    return h


def product(sp: ACMStructure, sm: ACMStructure) -> HermitianStructure:
    """``L+ (+) L-`` with ``g = g+ + g-`` and ``omega = eta- ^ eta+ + F- + F+``."""
    for name, s in (("first", sp), ("second", sm)):
        require_valid(s)
        if not is_normal(s):
            raise PreconditionError(f"product needs normal inputs; the {name} is not normal")
    n1, n2 = sp.dim, sm.dim
    n = n1 + n2
    L = direct_sum(sp.L, sm.L)
    g = Metric(la.block_diag(sp.g.g, sm.g.g))
    eta_p, F_p = embed(sp.eta, n, 0), embed(sp.F, n, 0)
    eta_m, F_m = embed(sm.eta, n, n1), embed(sm.F, n, n1)
    return HermitianStructure.from_omega(L, g, eta_m.wedge(eta_p) + F_m + F_p)


def central_extension_st(h: HermitianStructure, sigma: KForm) -> ACMStructure:
    """``L (+) R xi`` with ``d eta = sigma``, ``phi = J`` on L and ``phi xi = 0``.

    xi is the last basis vector.  The result is ST with torsion
    ``eta ^ sigma + c_J``.
    """
    require_hermitian(h)
    _require_integrable(h, "central_extension_st")
    if sigma.degree != 2 or sigma.dim != h.dim:
        raise PreconditionError("sigma must be a 2-form on the base")
    if not ce_d(h.L, sigma).is_zero():
        raise PreconditionError("sigma is not closed")
    if pullback(h.J, sigma) != sigma:
        raise PreconditionError("sigma is not of type (1,1)")
    m = h.dim
    n = m + 1
    d = [embed(f, n) for f in h.L.d] + [embed(sigma, n)]
    g = Metric(la.block_diag(h.g.g, la.identity(1)))
    phi = la.block_diag(h.J, la.zeros(1))
    return ACMStructure(LieAlgebra(d), g, la.unit_vector(n, m), phi)


@dataclass(frozen=True)
class TorusExtension:
    structure: ACMStructure
    xi_perp: tuple
    eta_perp: KForm


def torus_extension_st(s: ACMStructure, sigma1: KForm, sigma2: KForm, st=(0, 1)) -> ACMStructure:
    """Torus bundle ``L (+) R X1 (+) R X2`` with ``d omega_i = sigma_i``.

    With ``(s, t)`` on the unit circle: ``xi^ = t X1 + s X2``,
    ``eta^ = t omega1 + s omega2`` and
    ``phi^ = phi + eta^perp (x) xi - eta (x) xi^perp`` where
    ``xi^perp = -s X1 + t X2``.  The X_i are central, so ``xi^`` is Killing
    as soon as the base is normal.
    """
    return torus_extension(s, sigma1, sigma2, st).structure


def torus_extension(s: ACMStructure, sigma1: KForm, sigma2: KForm, st=(0, 1)) -> TorusExtension:
    sv, tv = (q(x) for x in st)
    if sv * sv + tv * tv != 1:
        raise PreconditionError(f"(s, t) = ({sv}, {tv}) is not on the unit circle")
    require_valid(s)
    if not is_normal(s):
        raise PreconditionError("torus_extension_st needs a normal base")
    m = s.dim
    for name, sig in (("sigma1", sigma1), ("sigma2", sigma2)):
        if sig.degree != 2 or sig.dim != m:
            raise PreconditionError(f"{name} must be a 2-form on the base")
        if not ce_d(s.L, sig).is_zero():
            raise PreconditionError(f"{name} is not closed")
        if not interior(s.xi, sig).is_zero():
            raise PreconditionError(f"{name} is not horizontal")
        if not type_check_11(s, sig):
            raise PreconditionError(f"{name} is not of type (1,1)")
    n = m + 2
    d = [embed(f, n) for f in s.L.d] + [embed(sigma1, n), embed(sigma2, n)]
    g = Metric(la.block_diag(s.g.g, la.identity(2)))
    x1, x2 = la.unit_vector(n, m), la.unit_vector(n, m + 1)
    xi_hat = la.add(la.scale(tv, x1), la.scale(sv, x2))
    xi_perp = la.add(la.scale(-sv, x1), la.scale(tv, x2))
    eta_perp = la.matvec(g.g, xi_perp)
    xi = tuple(s.xi) + (0, 0)
    eta = la.vector(tuple(s.eta.covector_values()) + (0, 0))
    phi = la.block_diag(s.phi, la.zeros(2))
    phi = la.add(phi, la.outer(xi, eta_perp))
    phi = la.sub(phi, la.outer(xi_perp, eta))
    out = ACMStructure(LieAlgebra(d), g, xi_hat, phi)
    return TorusExtension(out, xi_perp, KForm.covector(eta_perp))
