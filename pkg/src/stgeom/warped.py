"""Forms on ``I x N`` with coefficients in Q(r): cone and warped-product torsion.

A :class:`WForm` ``a + dr ^ b`` stores ``a`` and ``b`` as sparse maps from
sorted index tuples (forms on N) to elements of the rational function field
``Q(r)``.  Only left-invariant forms on N are represented, so ``d_N`` is the
Chevalley-Eilenberg differential applied coefficient-wise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from sympy import QQ, SympifyError, field, sympify

from .acm import ACMStructure, require_st, torsion
from .errors import ParseError, PreconditionError
from .exterior import KForm, LieAlgebra, ce_d, format_rational, sort_sign
from .linalg import q

RField, r = field("r", QQ)
RFun = type(r)


def rfun(x) -> RFun:
    """Coerce ints, Fractions and ``Q(r)`` elements into ``Q(r)``."""
    if isinstance(x, RFun):
        return x
    x = q(x)
    return RField(QQ(x.numerator, x.denominator))


def parse_rfun(text: str) -> RFun:
    """Parse text such as ``"1 + r^2"`` or ``"r/2"``; only the symbol ``r`` is allowed."""
    try:
        expr = sympify(text.replace("^", "**"), rational=True)
    except (SympifyError, SyntaxError, TypeError) as exc:
        raise ParseError(f"cannot parse function of r: {text!r}") from exc
    if {s.name for s in expr.free_symbols} - {"r"}:
        raise ParseError(f"only the variable r may appear in {text!r}")
    try:
        return RField.from_expr(expr)
    except Exception as exc:  # sympy raises assorted errors for non-rational input
        raise ParseError(f"{text!r} is not a rational function of r") from exc


def constant_value(f: RFun) -> Fraction | None:
    """The rational value of a constant element of Q(r), else None."""
    if not f:
        return Fraction(0)
    if f.numer.degree() > 0 or f.denom.degree() > 0:
        return None
    return q(f.numer.LC) / q(f.denom.LC)


def is_polynomial(f: RFun) -> bool:
    # the denominator may carry a rational constant such as 9
    return f.denom.degree() <= 0


def derivative(f: RFun) -> RFun:
    return f.diff(r)


def _clean(d: Mapping) -> dict:
    return {k: v for k, v in sorted(d.items()) if v}


def _accumulate(out: dict, key: tuple, val):
    sign, skey = sort_sign(key)
    if sign:
        out[skey] = out.get(skey, RField.zero) + (val if sign > 0 else -val)


def _wedge_maps(x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for kx, vx in x.items():
        for ky, vy in y.items():
            if set(kx) & set(ky):
                continue
            _accumulate(out, kx + ky, vx * vy)
    return out


class WForm:
    """``a + dr ^ b`` on ``I x N`` with ``dim N = dim``."""

    __slots__ = ("dim", "degree", "a", "b")

    def __init__(self, dim: int, degree: int, a: Mapping = (), b: Mapping = ()):
        self.dim = dim
        self.degree = degree
        aa: dict = {}
        bb: dict = {}
        for key, v in dict(a).items():
            if len(key) != degree:
                raise ValueError("a-part has the wrong degree")
            _accumulate(aa, tuple(key), rfun(v))
        for key, v in dict(b).items():
            if len(key) != degree - 1:
                raise ValueError("b-part has the wrong degree")
            _accumulate(bb, tuple(key), rfun(v))
        self.a = _clean(aa)
        self.b = _clean(bb)

    @classmethod
    def from_kform(cls, form: KForm, coeff=1) -> "WForm":
        c = rfun(coeff)
        return cls(form.dim, form.degree, {k: c * rfun(v) for k, v in form.terms()})

    @classmethod
    def dr(cls, dim: int) -> "WForm":
        return cls(dim, 1, {}, {(): 1})

    @classmethod
    def zero(cls, dim: int, degree: int) -> "WForm":
        return cls(dim, degree)

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def _check(self, other: "WForm"):
        if self.dim != other.dim or self.degree != other.degree:
            raise ValueError("WForm dimension or degree mismatch")

    def __add__(self, other: "WForm") -> "WForm":
        self._check(other)
        a, b = dict(self.a), dict(self.b)
        for k, v in other.a.items():
            a[k] = a.get(k, RField.zero) + v
        for k, v in other.b.items():
            b[k] = b.get(k, RField.zero) + v
        return WForm(self.dim, self.degree, a, b)

    def __neg__(self) -> "WForm":
        return self.scale(-1)

    def __sub__(self, other: "WForm") -> "WForm":
        return self + (-other)

    def scale(self, c) -> "WForm":
        c = rfun(c)
        return WForm(self.dim, self.degree, {k: c * v for k, v in self.a.items()},
                     {k: c * v for k, v in self.b.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def wedge(self, other: "WForm") -> "WForm":
        if self.dim != other.dim:
            raise ValueError("WForm dimension mismatch")
        a = _wedge_maps(self.a, other.a)
        b = _wedge_maps(self.b, other.a)
        sign = -1 if self.degree % 2 else 1
        for k, v in _wedge_maps(self.a, other.b).items():
            b[k] = b.get(k, RField.zero) + sign * v
        return WForm(self.dim, self.degree + other.degree, a, b)

    def __eq__(self, other):
        return (isinstance(other, WForm) and self.dim == other.dim and self.degree == other.degree
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.dim, self.degree, tuple(self.a.items()), tuple(self.b.items())))

    def coefficients(self):
        return list(self.a.values()) + list(self.b.values())

    def is_polynomial(self) -> bool:
        return all(is_polynomial(c) for c in self.coefficients())

    def to_kform(self) -> KForm:
        """Constant-coefficient form on ``R (+) N`` with ``dr`` at index 0."""
        n = self.dim + 1
        coeffs = {}
        for part, pre in ((self.a, ()), (self.b, (0,))):
            for key, v in part.items():
                val = constant_value(v)
                if val is None:
                    raise PreconditionError("to_kform needs constant coefficients")
                coeffs[pre + tuple(i + 1 for i in key)] = val
        return KForm(n, self.degree, coeffs)

    def __repr__(self):
        return f"WForm({format_wform(self)})"

    def __str__(self):
        return format_wform(self)


def _format_coeff(c: RFun) -> str:
    text = str(c.as_expr())
    return text if text.replace("-", "").replace("/", "").isdigit() else f"({text})"


def format_wform(w: WForm) -> str:
    parts = []
    for part, pre in ((w.a, ""), (w.b, "dr^")):
        for key, v in part.items():
            mono = pre + "^".join(f"e{i + 1}" for i in key)
            mono = mono.rstrip("^") or "1"
            parts.append(f"{_format_coeff(v)}*{mono}")
    return " + ".join(parts) if parts else "0"


def format_rfun(f: RFun) -> str:
    return str(f.as_expr())


@lru_cache(maxsize=4096)
def _d_monomial(L: LieAlgebra, key: tuple) -> tuple:
    return tuple(ce_d(L, KForm.monomial(L.dim, key)).terms())


def _d_map(L: LieAlgebra, m: Mapping) -> dict:
    out: dict = {}
    for key, v in m.items():
        for k2, c in _d_monomial(L, key):
            out[k2] = out.get(k2, RField.zero) + v * rfun(c)
    return out


def wd(L: LieAlgebra, w: WForm) -> WForm:
    """``d(a + dr ^ b) = d_N a + dr ^ (d/dr a - d_N b)``."""
    if L.dim != w.dim:
        raise ValueError("Lie algebra and WForm dimensions differ")
    a = _d_map(L, w.a)
    b = {k: derivative(v) for k, v in w.a.items()}
    for k, v in _d_map(L, w.b).items():
        b[k] = b.get(k, RField.zero) - v
    return WForm(w.dim, w.degree + 1, a, b)


# -- the warped KT structure -----------------------------------------------------------

def _require_f(f) -> RFun:
    f = rfun(f)
    if not f:
        raise PreconditionError("warping function must be nonzero")
    return f


def warped_omega(s: ACMStructure, f) -> WForm:
    """``omega_W = f dr ^ eta + f^2 F``."""
    f = _require_f(f)
    n = s.dim
    return WForm.dr(n).wedge(WForm.from_kform(s.eta, f)) + WForm.from_kform(s.F, f * f)


def j_pullback(s: ACMStructure, f, w: WForm) -> WForm:
    """``w(J., ..., J.)`` for the warped J: ``dr o J = -f eta``, ``beta o J = beta o phi + beta(xi)/f dr``."""
    f = _require_f(f)
    n = s.dim
    images = []
    for i in range(n):
        row = {(j,): s.phi[i][j] for j in range(n) if s.phi[i][j]}
        img = WForm(n, 1, row)
        if s.xi[i]:
            img = img + WForm.dr(n).scale(rfun(s.xi[i]) / f)
        images.append(img)
    dr_img = WForm.from_kform(s.eta, -f)

    def mono(key):
        out = WForm(n, 0, {(): 1})
        for i in key:
            out = out.wedge(images[i])
        return out

    total = WForm.zero(n, w.degree)
    for key, v in w.a.items():
        total = total + mono(key).scale(v)
    for key, v in w.b.items():
        total = total + dr_img.wedge(mono(key)).scale(v)
    return total


def warped_torsion_direct(s: ACMStructure, f) -> WForm:
    """``d omega_W (J., J., J.)`` computed in Q(r)."""
    require_st(s, "warped torsion")
    f = _require_f(f)
    return j_pullback(s, f, wd(s.L, warped_omega(s, f)))


def warped_torsion_formula(s: ACMStructure, f) -> WForm:
    """``f^2 (c - 2 f' F ^ eta)``."""
    f = _require_f(f)
    c = torsion(s)
    return WForm.from_kform(c, f * f) - WForm.from_kform(s.F.wedge(s.eta), 2 * f * f * derivative(f))


CONSTANT_BRANCH = "constant f, closed c"
LINEAR_BRANCH = "linear f, deta = 2 f' F"


@dataclass(frozen=True)
class WarpedSKTReport:
    torsion: WForm
    d_torsion: WForm
    closed: bool
    branch: str | None
    lam: Fraction | None

    def summary(self, label: str = "warped") -> str:
        if not self.closed:
            return f"{label} torsion not closed"
        lam = "" if self.lam is None else f" (lambda = f' = {format_rational(self.lam)})"
        return f"{label} torsion closed; branch: {self.branch}{lam}"


def warped_skt_report(s: ACMStructure, f) -> WarpedSKTReport:
    """Closedness of the warped torsion, with the branch of the SKT dichotomy.

    Closedness is computed directly.  The branch is derived afterwards: either
    ``f' = 0`` with ``dc = 0``, or ``f'`` is a constant lambda with
    ``deta = 2 lambda F``.
    """
    f = _require_f(f)
    T = warped_torsion_direct(s, f)
    dT = wd(s.L, T)
    closed = dT.is_zero()
    branch, lam = None, None
    if closed:
        fp = derivative(f)
        lam = constant_value(fp)
        deta = ce_d(s.L, s.eta)
        if lam == 0 and ce_d(s.L, torsion(s)).is_zero():
            branch = CONSTANT_BRANCH
        elif lam is not None and deta == 2 * lam * s.F:
            branch = LINEAR_BRANCH
        else:
            branch = "none"
    return WarpedSKTReport(T, dT, closed, branch, lam)
