"""Almost contact metric structures on Lie algebras and their ST geometry.

An :class:`ACMStructure` bundles a Lie algebra, a metric, the Reeb vector xi
and the endomorphism phi.  Everything here is left-invariant, so Lie
derivatives reduce to algebraic ad-actions and all checks are finite and
exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from . import linalg as la
from .errors import (
    InternalInconsistency,
    InvalidStructure,
    NotST,
    PhiCompletionError,
    PreconditionError,
)
from .exterior import (
    Connection,
    KForm,
    LieAlgebra,
    Metric,
    VectorValued2Form,
    ce_d,
    codifferential,
    curvature,
    evaluate,
    format_rational,
    interior,
    is_metric_connection,
    lc_connection,
    phi_inverse_connection,
    pullback,
    ricci,
    torsion_as_form,
    trace_pairs,
)
from .linalg import ONE, ZERO, Matrix, Vector, q

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ACMStructure:
    """Left-invariant almost contact metric data ``(L, g, xi, phi)``.

    ``eta = g(xi, .)`` and ``F = g(phi ., .)`` are computed at construction.
    Construction only checks shapes; use :func:`validate` for the invariants.
    """

    L: LieAlgebra
    g: Metric
    xi: Vector
    phi: Matrix
    eta: KForm = field(init=False, repr=False, compare=False)
    F: KForm = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.L.dim
        object.__setattr__(self, "xi", la.vector(self.xi))
        object.__setattr__(self, "phi", la.matrix(self.phi))
        if self.g.dim != n or len(self.xi) != n or len(self.phi) != n or any(len(r) != n for r in self.phi):
            raise InvalidStructure("L, g, xi and phi must share one dimension")
        object.__setattr__(self, "eta", self.g.flat(self.xi))
        fm = la.matmul(la.transpose(self.phi), self.g.g)
        object.__setattr__(self, "F", KForm(n, 2, {(i, j): fm[i][j] for i, j in combinations(range(n), 2)}))

    @property
    def dim(self) -> int:
        return self.L.dim

    def phi_of(self, v: Vector) -> Vector:
        return la.matvec(self.phi, v)

    def basis(self, i: int) -> Vector:
        return la.unit_vector(self.dim, i)


@dataclass
class ValidationReport:
    ok: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def complete_phi(n: int, g: Metric, xi: Vector, entries: Sequence) -> Matrix:
    """Complete a partial coframe table ``e^i o phi = c e^j`` to a full phi.

    ``entries`` holds ``(i, c, j)`` triples with 0-based indices (``j`` may be
    None when ``c`` is 0).  Several triples with the same ``i`` and distinct
    ``j`` add up to one row.  Missing rows are solved from
    ``e^i o phi^2 = -e^i + xi^i eta`` and from ``eta o phi = 0`` whenever a
    relation has exactly one unknown row.  A contradiction, or a row left
    undetermined, raises :class:`PhiCompletionError`.
    """
    xi = la.vector(xi)
    eta = la.matvec(g.g, xi)
    given: dict[int, list] = {}
    seen = set()
    for i, c, j in entries:
        c = q(c)
        if not 0 <= i < n or (c != 0 and (j is None or not 0 <= j < n)):
            raise PhiCompletionError(f"phi entry (e{i + 1}, {c}, {j}) out of range 1..{n}")
        if (i, j) in seen:
            raise PhiCompletionError(f"phi entry for e{i + 1} o phi and e{j + 1} given twice")
        seen.add((i, j))
        row = given.setdefault(i, list(la.zero_vector(n)))
        if c != 0:
            row[j] += c
    rows: dict[int, Vector] = {i: tuple(r) for i, r in given.items()}

    # relations sum_k coeff[k] (e^k o phi) = rhs
    relations = [(rows[i], la.add(la.scale(-1, la.unit_vector(n, i)), la.scale(xi[i], eta)),
                  f"phi^2 = -1 + eta(x)xi applied to e{i + 1}") for i in list(rows)]
    relations.append((eta, la.zero_vector(n), "eta o phi = 0"))
    pending = list(relations)
    progress = True
    while progress:
        progress = False
        for rel in list(pending):
            coeff, rhs, why = rel
            unknown = [k for k in range(n) if coeff[k] != 0 and k not in rows]
            if len(unknown) > 1:
                continue
            acc = rhs
            for k in range(n):
                if coeff[k] != 0 and k in rows:
                    acc = la.sub(acc, la.scale(coeff[k], rows[k]))
            pending.remove(rel)
            if not unknown:
                if not la.is_zero(acc):
                    raise PhiCompletionError(f"inconsistent phi table: {why} fails")
                continue
            k = unknown[0]
            rows[k] = la.scale(ONE / coeff[k], acc)
            pending.append((rows[k], la.add(la.scale(-1, la.unit_vector(n, k)), la.scale(xi[k], eta)),
                            f"phi^2 = -1 + eta(x)xi applied to e{k + 1}"))
            progress = True
    missing = [k for k in range(n) if k not in rows]
    if missing:
        names = ", ".join(f"e{k + 1}" for k in missing)
        raise PhiCompletionError(f"phi table leaves rows {names} undetermined")
    return tuple(rows[k] for k in range(n))


def _fmt_vector(v: Vector) -> str:
    terms = [f"{format_rational(x)}*E{i + 1}" for i, x in enumerate(v) if x != 0]
    return " + ".join(terms) or "0"


def validate(s: ACMStructure) -> ValidationReport:
    n = s.dim
    fails = []
    if n % 2 == 0:
        fails.append(f"dimension {n} is even")
    if s.g(s.xi, s.xi) != 1:
        fails.append(f"g(xi, xi) = {s.g(s.xi, s.xi)} != 1")
    pxi = s.phi_of(s.xi)
    if not la.is_zero(pxi):
        fails.append(f"phi(xi) = {_fmt_vector(pxi)} != 0")
    eta = s.eta.covector_values()
    target = la.sub(la.outer(s.xi, eta), la.identity(n))
    sq = la.matmul(s.phi, s.phi)
    bad = [(i, j) for i in range(n) for j in range(n) if sq[i][j] != target[i][j]]
    if bad:
        i, j = bad[0]
        fails.append(f"phi^2 != -1 + eta(x)xi on E{j + 1} (component {i + 1})")
    compat = la.matmul(la.transpose(s.phi), la.matmul(s.g.g, s.phi))
    want = la.sub(s.g.g, la.outer(eta, eta))
    bad = [(i, j) for i in range(n) for j in range(n) if compat[i][j] != want[i][j]]
    if bad:
        i, j = bad[0]
        fails.append(f"g(phi E{i + 1}, phi E{j + 1}) != g(E{i + 1}, E{j + 1}) - eta eta")
    fm = la.matmul(la.transpose(s.phi), s.g.g)
    skew = [(i, j) for i in range(n) for j in range(n) if fm[i][j] != -fm[j][i]]
    if skew:
        i, j = skew[0]
        fails.append(f"F not antisymmetric at (E{i + 1}, E{j + 1})")
    return ValidationReport(not fails, fails)


def require_valid(s: ACMStructure):
    rep = validate(s)
    if not rep.ok:
        raise InvalidStructure("; ".join(rep.failures))


# -- normality, Killing, ST ------------------------------------------------------

def sasaki_hatakeyama(s: ACMStructure) -> VectorValued2Form:
    """``S = [phiX, phiY] + phi^2[X, Y] - phi[phiX, Y] - phi[X, phiY] + deta(X, Y) xi``."""
    require_valid(s)
    n = s.dim
    L, phi = s.L, s.phi
    phi2 = la.matmul(phi, phi)
    deta = ce_d(L, s.eta)
    P = [la.column(phi, i) for i in range(n)]
    vals = {}
    for i, j in combinations(range(n), 2):
        Ei, Ej = s.basis(i), s.basis(j)
        v = L.bracket(P[i], P[j])
        v = la.add(v, la.matvec(phi2, L.basis_bracket(i, j)))
        v = la.sub(v, la.matvec(phi, L.bracket(P[i], Ej)))
        v = la.sub(v, la.matvec(phi, L.bracket(Ei, P[j])))
        v = la.add(v, la.scale(deta[(i, j)], s.xi))
        vals[(i, j)] = v
    return VectorValued2Form(n, vals)


def is_normal(s: ACMStructure) -> bool:
    return sasaki_hatakeyama(s).is_zero()


def is_killing(s: ACMStructure) -> bool:
    """``g(ad_xi X, Y) + g(X, ad_xi Y) = 0`` on all basis pairs."""
    ad = s.L.ad(s.xi)
    m = la.matmul(la.transpose(ad), s.g.g)
    return all(m[i][j] + m[j][i] == 0 for i in range(s.dim) for j in range(s.dim))


def xi_contract_dF_vanishes(s: ACMStructure) -> bool:
    """Derivative criterion: on left-invariant data ``L_xi F = xi _| dF``."""
    return interior(s.xi, ce_d(s.L, s.F)).is_zero()


@lru_cache(maxsize=256)
def _st_status(s: ACMStructure) -> tuple[bool, bool, bool, bool]:
    rep = validate(s)
    if not rep.ok:
        return False, False, False, False
    normal = is_normal(s)
    killing = is_killing(s)
    deriv = xi_contract_dF_vanishes(s)
    return True, normal, killing, deriv


def is_st(s: ACMStructure) -> bool:
    """Normal with Killing Reeb field, cross-checked against ``xi _| dF = 0``."""
    valid, normal, killing, deriv = _st_status(s)
    if not valid:
        return False
    if normal and killing != deriv:
        raise InternalInconsistency(
            f"Killing check ({killing}) and xi _| dF = 0 ({deriv}) disagree on a normal structure")
    return normal and killing


def require_st(s: ACMStructure, what: str = "operation"):
    valid, normal, killing, _ = _st_status(s)
    if not valid:
        require_valid(s)
    if not is_st(s):
        why = "not normal" if not normal else "xi is not Killing"
        raise NotST(f"{what} needs an ST structure ({why})")


# -- torsion and the characteristic connection ------------------------------------

def d_phi(s: ACMStructure, a: KForm) -> KForm:
    """``d^phi a = da(phi., ..., phi.)``."""
    return pullback(s.phi, ce_d(s.L, a))


def torsion(s: ACMStructure) -> KForm:
    """``c = eta ^ deta + d^phi F``."""
    require_st(s, "torsion")
    return _torsion_unchecked(s)


def _torsion_unchecked(s: ACMStructure) -> KForm:
    return s.eta.wedge(ce_d(s.L, s.eta)) + d_phi(s, s.F)


def st_connection(s: ACMStructure) -> Connection:
    """``g(nabla_X Y, Z) = g(nabla^LC_X Y, Z) + c(X, Y, Z)/2``."""
    require_st(s, "st_connection")
    n = s.dim
    c = _torsion_unchecked(s)
    half_c = _half_torsion(c, s.g)
    conn = lc_connection(s.L, s.g) + half_c
    if s.g.is_identity():
        other = phi_inverse_connection(s.L, s.g) + half_c
        if other != conn:
            raise InternalInconsistency("Koszul and Phi^-1 routes give different ST connections")
    return conn


def _half_torsion(c: KForm, g: Metric) -> Connection:
    n = c.dim
    lowered = [[[HALF * c[(i, j, k)] for k in range(n)] for j in range(n)] for i in range(n)]
    return Connection.from_lowered(lowered, g)


@dataclass
class ParallelReport:
    metric: bool
    xi_parallel: bool
    phi_parallel: bool
    torsion_matches: bool | None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.metric and self.xi_parallel and self.phi_parallel and self.torsion_matches is not False


def check_parallel(s: ACMStructure, conn: Connection) -> ParallelReport:
    """Check ``nabla g = nabla xi = nabla phi = 0`` and compare torsion with c."""
    n = s.dim
    fails = []
    metric = is_metric_connection(conn, s.g)
    if not metric:
        fails.append("nabla g != 0")
    xi_par = True
    phi_par = True
    for i in range(n):
        A = conn.endo(i)
        if xi_par and not la.is_zero(la.matvec(A, s.xi)):
            xi_par = False
            fails.append(f"nabla_E{i + 1} xi != 0")
        if phi_par and not la.is_zero(la.commutator(A, s.phi)):
            phi_par = False
            fails.append(f"nabla_E{i + 1} phi != 0")
    matches = None
    if validate(s).ok and is_st(s):
        t = torsion_as_form(s.L, conn, s.g)
        matches = t is not None and t == _torsion_unchecked(s)
        if not matches:
            fails.append("torsion of the connection differs from c")
    return ParallelReport(metric, xi_par, phi_par, matches, fails)


# -- Lee form, type conditions -------------------------------------------------------

def _frame_trace(g: Metric, b: Matrix, m: Matrix | None = None) -> Fraction:
    """``sum g^{ij} b(E_i, m E_j)`` for a bilinear form given by matrix ``b``."""
    bm = b if m is None else la.matmul(b, m)
    return sum((gij * bm[i][j] for i, j, gij in trace_pairs(g)), ZERO)


def lee_form_variants(s: ACMStructure) -> tuple[KForm, KForm, KForm]:
    """The three expressions for the Lee form, in order:
    ``-1/2 sum c(phiX, E_i, phiE_i)``, ``1/2 sum dF(X, E_i, phiE_i)``, ``-(d*F)(phiX)``.
    """
    require_st(s, "lee_form")
    n = s.dim
    c = _torsion_unchecked(s)
    dF = ce_d(s.L, s.F)
    v1, v2 = [], []
    for a in range(n):
        Ea = s.basis(a)
        ca = interior(s.phi_of(Ea), c)
        v1.append(-HALF * _frame_trace(s.g, ca.as_matrix(), s.phi))
        fa = interior(Ea, dF)
        v2.append(HALF * _frame_trace(s.g, fa.as_matrix(), s.phi))
    dstar = codifferential(s.L, s.g, s.F).covector_values()
    v3 = la.scale(-1, la.matvec(la.transpose(s.phi), dstar))
    return KForm.covector(v1), KForm.covector(v2), KForm.covector(v3)


def lee_form(s: ACMStructure) -> KForm:
    a, b, c = lee_form_variants(s)
    if not (a == b == c):
        raise InternalInconsistency(f"Lee form formulas disagree: {a} | {b} | {c}")
    return a


def dim5_lee_identity(s: ACMStructure) -> bool:
    """``dF = theta ^ F`` (a 5-dimensional identity)."""
    if s.dim != 5:
        raise PreconditionError(f"dim5_lee_identity needs dimension 5, got {s.dim}")
    return ce_d(s.L, s.F) == lee_form(s).wedge(s.F)


def type_check_11(s: ACMStructure, b: KForm) -> bool:
    """``b(phiX, phiY) = b(X, Y)``; requires ``xi _| b = 0``."""
    if b.degree != 2:
        raise PreconditionError("type (1,1) check needs a 2-form")
    if not interior(s.xi, b).is_zero():
        raise PreconditionError("type (1,1) check needs xi _| b = 0")
    return pullback(s.phi, b) == b


def type_check_21_12(s: ACMStructure, b: KForm) -> bool:
    """``b(X,Y,Z) = b(phiX,phiY,Z) + b(phiX,Y,phiZ) + b(X,phiY,phiZ)`` on all triples."""
    if b.degree != 3:
        raise PreconditionError("type (2,1)+(1,2) check needs a 3-form")
    n = s.dim
    E = [s.basis(i) for i in range(n)]
    P = [s.phi_of(e) for e in E]
    for i, j, k in combinations(range(n), 3):
        rhs = evaluate(b, P[i], P[j], E[k]) + evaluate(b, P[i], E[j], P[k]) + evaluate(b, E[i], P[j], P[k])
        if b[(i, j, k)] != rhs:
            return False
    return True


# -- classification -------------------------------------------------------------------

COSYMPLECTIC = "cosymplectic-coKaehler"
QUASI_SASAKI = "quasi-Sasaki"
ALPHA_SASAKI = "alpha-Sasaki"
GENERIC = "generic-ST"


@dataclass(frozen=True)
class Classification:
    primary: str
    alpha: Fraction | None
    is_sst: bool
    is_balanced: bool
    deta_decomposable: bool
    is_normal: bool
    is_killing: bool
    is_quasi_sasaki: bool

    @property
    def is_sasaki(self) -> bool:
        return self.primary == ALPHA_SASAKI and self.alpha == 2

    def summary(self) -> str:
        name = self.primary
        if self.primary == ALPHA_SASAKI:
            name = "Sasaki" if self.is_sasaki else f"alpha-Sasaki (alpha = {self.alpha})"
        bits = [name, "dη∧dη = 0" if self.deta_decomposable else "dη∧dη ≠ 0",
                "SST" if self.is_sst else "not SST"]
        return "; ".join(bits)


def proportionality(a: KForm, b: KForm) -> Fraction | None:
    """The rational ``t`` with ``a = t b`` (b nonzero), else None."""
    if b.is_zero():
        return None
    key, val = next(iter(b.terms()))
    t = a[key] / val
    return t if a == t * b else None


def classify(s: ACMStructure) -> Classification:
    require_st(s, "classify")
    c = _torsion_unchecked(s)
    deta = ce_d(s.L, s.eta)
    eta_deta = s.eta.wedge(deta)
    alpha = proportionality(c, s.eta.wedge(s.F))
    if c.is_zero():
        primary, alpha = COSYMPLECTIC, None
    elif alpha is not None and alpha != 0:
        primary = ALPHA_SASAKI
    elif c == eta_deta:
        primary, alpha = QUASI_SASAKI, None
    else:
        primary, alpha = GENERIC, None
    return Classification(
        primary=primary,
        alpha=alpha,
        is_sst=ce_d(s.L, c).is_zero(),
        is_balanced=lee_form(s).is_zero(),
        deta_decomposable=deta.wedge(deta).is_zero(),
        is_normal=True,
        is_killing=True,
        is_quasi_sasaki=(c == eta_deta),
    )


# -- transformations ------------------------------------------------------------------

def homothety(s: ACMStructure, a) -> ACMStructure:
    """Transversal homothety: ``g~ = a g + a(a-1) eta^2, xi~ = xi/a, phi~ = phi``."""
    a = q(a)
    if a <= 0:
        raise PreconditionError(f"homothety factor must be positive, got {a}")
    require_st(s, "homothety")
    eta = s.eta.covector_values()
    g = la.add(la.scale(a, s.g.g), la.scale(a * (a - 1), la.outer(eta, eta)))
    return ACMStructure(s.L, Metric(g), la.scale(ONE / a, s.xi), s.phi)


def conformal_const(s: ACMStructure, lam2) -> ACMStructure:
    """Transversal conformal change by a constant: ``g~ = lam2 g + (1 - lam2) eta^2``."""
    lam2 = q(lam2)
    if lam2 <= 0:
        raise PreconditionError(f"conformal factor must be positive, got {lam2}")
    require_st(s, "conformal_const")
    eta = s.eta.covector_values()
    g = la.add(la.scale(lam2, s.g.g), la.scale(1 - lam2, la.outer(eta, eta)))
    return ACMStructure(s.L, Metric(g), s.xi, s.phi)


def houri_torsion(s: ACMStructure) -> KForm:
    """``T = d^phi F + deta ^ eta - 2 F ^ eta``."""
    require_st(s, "houri_torsion")
    deta = ce_d(s.L, s.eta)
    return d_phi(s, s.F) + deta.wedge(s.eta) - 2 * s.F.wedge(s.eta)


# -- field equations and holonomy ----------------------------------------------------

@dataclass
class FieldEqReport:
    ricci: Matrix
    dstar_c: KForm
    dc: KForm
    flat: bool

    @property
    def ricci_flat(self) -> bool:
        return la.is_zero(self.ricci)

    @property
    def satisfied(self) -> bool:
        return self.ricci_flat and self.dstar_c.is_zero()


def field_eq_report(s: ACMStructure) -> FieldEqReport:
    conn = st_connection(s)
    c = _torsion_unchecked(s)
    R = curvature(s.L, conn)
    return FieldEqReport(
        ricci=ricci(s.L, conn, s.g),
        dstar_c=codifferential(s.L, s.g, c),
        dc=ce_d(s.L, c),
        flat=all(la.is_zero(r) for r in R.values()),
    )


def _flat(m: Matrix) -> tuple:
    return tuple(x for row in m for x in row)


def _span_basis(mats: list, n: int) -> list:
    rows = [_flat(m) for m in mats if not la.is_zero(m)]
    if not rows:
        return []
    red, pivots = la.rref(tuple(rows))
    return [tuple(tuple(red[r][i * n:(i + 1) * n]) for i in range(n)) for r in range(len(pivots))]


@dataclass
class HolonomyReport:
    basis: list
    kills_xi: bool
    skew: bool
    commutes_phi: bool
    phi_traceless: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def in_u(self) -> bool:
        return self.kills_xi and self.skew and self.commutes_phi

    @property
    def in_su(self) -> bool:
        return self.in_u and self.phi_traceless


def hol_span(s: ACMStructure) -> HolonomyReport:
    """Lie algebra generated by the curvature endomorphisms of the ST connection.

    The span is closed under commutators and under brackets with the
    connection maps ``nabla_{E_i}``, the infinitesimal holonomy of an
    invariant connection.
    """
    conn = st_connection(s)
    n = s.dim
    A = [conn.endo(i) for i in range(n)]
    basis = _span_basis(list(curvature(s.L, conn).values()), n)
    while True:
        new = list(basis)
        for x, y in combinations(basis, 2):
            new.append(la.commutator(x, y))
        for a in A:
            for x in basis:
                new.append(la.commutator(a, x))
        nb = _span_basis(new, n)
        if len(nb) == len(basis):
            break
        basis = nb
    g = s.g.g
    kills = all(la.is_zero(la.matvec(b, s.xi)) for b in basis)
    skew = all(la.is_zero(la.add(la.matmul(g, b), la.transpose(la.matmul(g, b)))) for b in basis)
    comm = all(la.is_zero(la.commutator(b, s.phi)) for b in basis)
    tl = all(la.trace(la.matmul(s.phi, b)) == 0 for b in basis)
    return HolonomyReport(basis, kills, skew, comm, tl)
