"""Exact multilinear algebra on a Lie algebra with a fixed basis E_1..E_n.

Conventions used throughout the package:

* Forms carry no 1/k! factors: ``(e^a ^ e^b)(X, Y) = e^a(X) e^b(Y) - e^a(Y) e^b(X)``.
* For left-invariant forms ``de(X, Y) = -e([X, Y])``, so the bracket is
  ``[E_j, E_k] = -sum_i de^i(E_j, E_k) E_i``.
* Endomorphism matrices store the image of ``E_j`` in column ``j``.
* Indices are 0-based in code; names ``e1..en`` / ``E1..En`` are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import linalg as la
from .errors import DimensionError, NotPositiveDefinite, ParseError, PreconditionError
from .linalg import ONE, ZERO, Matrix, Vector, q

MultiIndex = tuple  # strictly increasing tuple of 0-based indices


def sort_sign(indices: Sequence[int]) -> tuple[int, tuple]:
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    return _sort_sign(tuple(indices))


@lru_cache(maxsize=1 << 16)
def _sort_sign(indices: tuple) -> tuple[int, tuple]:
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class KForm:
    """Sparse alternating k-form on an n-dimensional space, exact coefficients."""

    __slots__ = ("dim", "degree", "_c", "_hash")

    def __init__(self, dim: int, degree: int, coeffs: Mapping | Iterable = ()):
        if dim < 0 or degree < 0:
            raise ValueError("dimension and degree must be non-negative")
        self.dim = dim
        self.degree = degree
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[MultiIndex, Fraction] = {}
        for key, val in items:
            key = tuple(key)
            if len(key) != degree:
                raise DimensionError(f"monomial {key} has wrong length for a {degree}-form")
            if any(not 0 <= i < dim for i in key):
                raise DimensionError(f"index out of range in {key} (dim {dim})")
            sign, skey = sort_sign(key)
            if sign == 0:
                continue
            c[skey] = c.get(skey, ZERO) + sign * q(val)
        self._c = {k: v for k, v in sorted(c.items()) if v != 0}
        self._hash = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls(dim, degree)

    @classmethod
    def scalar(cls, dim: int, value) -> "KForm":
        return cls(dim, 0, {(): value})

    @classmethod
    def monomial(cls, dim: int, indices: Sequence[int], coeff=1) -> "KForm":
        return cls(dim, len(indices), {tuple(indices): coeff})

    @classmethod
    def covector(cls, values: Sequence) -> "KForm":
        return cls(len(values), 1, {(i,): v for i, v in enumerate(values)})

    @classmethod
    def from_matrix(cls, m: Matrix) -> "KForm":
        """2-form with ``a(E_i, E_j) = m[i][j]`` (m must be antisymmetric)."""
        n = len(m)
        for i in range(n):
            for j in range(n):
                if m[i][j] != -m[j][i]:
                    raise ValueError("matrix is not antisymmetric")
        return cls(n, 2, {(i, j): m[i][j] for i in range(n) for j in range(i + 1, n)})

    # -- access ---------------------------------------------------------------

    def __getitem__(self, key) -> Fraction:
        sign, skey = sort_sign(key)
        if sign == 0:
            return ZERO
        return sign * self._c.get(skey, ZERO)

    def terms(self):
        return self._c.items()

    def support(self) -> tuple:
        return tuple(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def as_matrix(self) -> Matrix:
        if self.degree != 2:
            raise DimensionError("as_matrix needs a 2-form")
        n = self.dim
        m = [[ZERO] * n for _ in range(n)]
        for (i, j), v in self._c.items():
            m[i][j] = v
            m[j][i] = -v
        return tuple(tuple(r) for r in m)

    def covector_values(self) -> Vector:
        if self.degree != 1:
            raise DimensionError("covector_values needs a 1-form")
        return tuple(self._c.get((i,), ZERO) for i in range(self.dim))

    # -- linear structure -----------------------------------------------------

    def _check(self, other: "KForm"):
        if not isinstance(other, KForm):
            raise TypeError(f"expected KForm, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if other.degree != self.degree:
            raise DimensionError("cannot add forms of different degree")
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, ZERO) + v
        return KForm(self.dim, self.degree, c)

    __radd__ = __add__

    def __neg__(self):
        return KForm(self.dim, self.degree, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, KForm):
            return NotImplemented
        s = q(scalar)
        return KForm(self.dim, self.degree, {k: s * v for k, v in self._c.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (ONE / q(scalar))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, KForm):
            return NotImplemented
        return (self.dim, self.degree, self._c) == (other.dim, other.degree, other._c)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.degree, tuple(self._c.items())))
        return self._hash

    def wedge(self, other: "KForm") -> "KForm":
        self._check(other)
        out: dict = {}
        for k1, v1 in self._c.items():
            s1 = set(k1)
            for k2, v2 in other._c.items():
                if s1.intersection(k2):
                    continue
                sign, key = sort_sign(k1 + k2)
                out[key] = out.get(key, ZERO) + sign * v1 * v2
        return KForm(self.dim, self.degree + other.degree, out)

    def __repr__(self):
        return f"KForm({self.dim}, {self.degree}, {format_form(self)!r})"

    def __str__(self):
        return format_form(self)


def wedge(*forms: KForm) -> KForm:
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def basis_form(dim: int, *indices: int) -> KForm:
    return KForm.monomial(dim, indices)


# -- text format -----------------------------------------------------------------

def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_form(a: KForm) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for key, v in a.terms():
        mono = "^".join(f"e{i + 1}" for i in key)
        if not mono:
            parts.append(("-" if v < 0 else "+", format_rational(abs(v))))
            continue
        mag = abs(v)
        coeff = "" if mag == 1 else format_rational(mag) + "*"
        parts.append(("-" if v < 0 else "+", coeff + mono))
    head_sign, head = parts[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?((?:e\d+)(?:\s*\^\s*e\d+)*)?\s*"
)


def parse_form(dim: int, text: str, degree: int | None = None) -> KForm:
    """Parse expressions such as ``"-e1^e2 + 2*e3^e4"`` into a KForm.

    ``"0"`` (or an empty string) needs ``degree`` to know which zero to build.
    """
    src = text.strip()
    if src in ("", "0"):
        if degree is None:
            raise ParseError(f"degree needed to parse zero form {text!r}")
        return KForm.zero(dim, degree)
    pos = 0
    terms: list = []
    first = True
    while pos < len(src):
        m = _TERM.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"cannot parse form {text!r} at column {pos + 1}")
        sign, coeff, mono = m.groups()
        if not first and sign is None:
            raise ParseError(f"missing operator in {text!r} at column {pos + 1}")
        if coeff is None and mono is None:
            raise ParseError(f"empty term in {text!r} at column {pos + 1}")
        c = Fraction(coeff) if coeff else ONE
        if sign == "-":
            c = -c
        idx = tuple(int(t) - 1 for t in re.findall(r"e(\d+)", mono or ""))
        if any(not 0 <= i < dim for i in idx):
            raise ParseError(f"basis index out of range 1..{dim} in {text!r}")
        terms.append((idx, c))
        pos = m.end()
        first = False
    degs = {len(k) for k, _ in terms}
    if len(degs) != 1:
        raise ParseError(f"mixed degrees in {text!r}")
    deg = degs.pop()
    if degree is not None and deg != degree:
        raise ParseError(f"expected a {degree}-form, got degree {deg} in {text!r}")
    out = KForm.zero(dim, deg)
    for idx, c in terms:
        out = out + KForm(dim, deg, [(idx, c)])
    return out


# -- evaluation, contraction, pullback --------------------------------------------

def _det(rows: list) -> Fraction:
    k = len(rows)
    if k == 0:
        return ONE
    if k == 1:
        return rows[0][0]
    if k == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for c in range(k):
        if rows[0][c] == 0:
            continue
        minor = [r[:c] + r[c + 1:] for r in rows[1:]]
        total += (-1) ** c * rows[0][c] * _det(minor)
    return total


def evaluate(a: KForm, *vectors: Vector) -> Fraction:
    """``a(v_1, ..., v_k)`` with the determinant (no 1/k!) convention."""
    if len(vectors) != a.degree:
        raise DimensionError(f"{a.degree}-form evaluated on {len(vectors)} vectors")
    total = ZERO
    for key, coeff in a.terms():
        rows = [[v[i] for v in vectors] for i in key]
        total += coeff * _det(rows)
    return total


def interior(v: Vector, a: KForm) -> KForm:
    """Contraction ``v _| a`` into the first slot."""
    if a.degree == 0:
        raise DimensionError("cannot contract a vector into a 0-form")
    if len(v) != a.dim:
        raise DimensionError("vector and form dimensions differ")
    out: dict = {}
    for key, coeff in a.terms():
        for r, i in enumerate(key):
            if v[i] == 0:
                continue
            rest = key[:r] + key[r + 1:]
            out[rest] = out.get(rest, ZERO) + (-1) ** r * v[i] * coeff
    return KForm(a.dim, a.degree - 1, out)


def pullback(m: Matrix, a: KForm) -> KForm:
    """``a(m., ..., m.)``: the form with every slot precomposed by ``m``."""
    n = a.dim
    if len(m) != n:
        raise DimensionError("endomorphism and form dimensions differ")
    # e^i o m = sum_j m[i][j] e^j
    rows = [KForm(n, 1, {(j,): m[i][j] for j in range(n)}) for i in range(n)]
    out = KForm.zero(n, a.degree)
    for key, coeff in a.terms():
        if not key:
            out = out + KForm.scalar(n, coeff)
            continue
        term = rows[key[0]]
        for i in key[1:]:
            term = term.wedge(rows[i])
            if term.is_zero():
                break
        out = out + coeff * term
    return out


def _substitute(a: KForm, images: Sequence, degree: int, alternate: bool) -> KForm:
    """``sum_r (+-1)^r e^{k_1} ^ .. ^ images[k_r] ^ .. ^ e^{k_p}`` over the terms of ``a``.

    ``images[i]`` is a list of ``(key, value)`` pairs; the sign ``(-1)^r`` is
    applied when ``alternate`` is set.
    """
    out: dict = {}
    for key, coeff in a.terms():
        for r, i in enumerate(key):
            img = images[i]
            if not img:
                continue
            c = -coeff if alternate and r % 2 else coeff
            head, tail = key[:r], key[r + 1:]
            for ikey, v in img:
                sign, skey = sort_sign(head + ikey + tail)
                if sign > 0:
                    out[skey] = out.get(skey, ZERO) + c * v
                elif sign < 0:
                    out[skey] = out.get(skey, ZERO) - c * v
    return KForm(a.dim, degree, out)


def derivation(m: Matrix, a: KForm) -> KForm:
    """``sum_r a(.., m Y_r, ..)``, the natural action of an endomorphism on forms."""
    n = a.dim
    images = [[((j,), m[i][j]) for j in range(n) if m[i][j]] for i in range(n)]
    return _substitute(a, images, a.degree, alternate=False)


def slots(a: KForm, maps: Sequence[Matrix | None], vectors: Sequence[Vector]) -> Fraction:
    """Evaluate ``a`` on ``vectors`` with ``maps[r]`` (or identity) applied in slot r."""
    vs = [v if m is None else la.matvec(m, v) for m, v in zip(maps, vectors)]
    return evaluate(a, *vs)


class VectorValued2Form:
    """Antisymmetric map (i, j) -> Vector, stored for i < j."""

    def __init__(self, dim: int, values: Mapping[tuple[int, int], Vector]):
        self.dim = dim
        self._v = {}
        for (i, j), vec in values.items():
            if i == j:
                if not la.is_zero(vec):
                    raise ValueError("diagonal entry of an antisymmetric map must vanish")
                continue
            if i > j:
                i, j, vec = j, i, la.scale(-1, vec)
            self._v[(i, j)] = tuple(vec)

    def __getitem__(self, key) -> Vector:
        i, j = key
        if i == j:
            return la.zero_vector(self.dim)
        if i < j:
            return self._v.get((i, j), la.zero_vector(self.dim))
        return la.scale(-1, self._v.get((j, i), la.zero_vector(self.dim)))

    def items(self):
        return sorted(self._v.items())

    def nonzero(self) -> list:
        return [(k, v) for k, v in self.items() if not la.is_zero(v)]

    def is_zero(self) -> bool:
        return not self.nonzero()


# -- metric ----------------------------------------------------------------------

class Metric:
    """Positive definite symmetric bilinear form with exact cached inverse."""

    __slots__ = ("g", "inv")

    def __init__(self, g: Iterable[Iterable]):
        g = la.matrix(g)
        n = len(g)
        if any(len(r) != n for r in g):
            raise DimensionError("metric must be a square matrix")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise NotPositiveDefinite("metric is not symmetric")
        minors = la.leading_minors(g)
        for k, m in enumerate(minors, start=1):
            if m <= 0:
                raise NotPositiveDefinite(f"leading principal minor {k} is {m}; metric not positive definite")
        self.g = g
        self.inv = la.inverse(g) if n else g

    @classmethod
    def identity(cls, n: int) -> "Metric":
        return cls(la.identity(n))

    @property
    def dim(self) -> int:
        return len(self.g)

    def __call__(self, u: Vector, v: Vector) -> Fraction:
        return la.bilinear(self.g, u, v)

    def flat(self, v: Vector) -> KForm:
        return KForm.covector(la.matvec(self.g, v))

    def sharp(self, a: KForm) -> Vector:
        return la.matvec(self.inv, a.covector_values())

    def is_identity(self) -> bool:
        return self.g == la.identity(self.dim)

    def __eq__(self, other):
        return isinstance(other, Metric) and self.g == other.g

    def __hash__(self):
        return hash(self.g)

    def __repr__(self):
        return f"Metric({[[format_rational(x) for x in r] for r in self.g]})"


def trace_pairs(g: Metric):
    """Pairs (i, j, g^{ij}) with nonzero inverse-metric entry, for frame sums."""
    n = g.dim
    return [(i, j, g.inv[i][j]) for i in range(n) for j in range(n) if g.inv[i][j] != 0]


# -- Lie algebra -----------------------------------------------------------------

class LieAlgebra:
    """Lie algebra given by the differentials ``de^i`` of a coframe."""

    __slots__ = ("dim", "d", "_brackets")

    def __init__(self, d: Sequence[KForm]):
        d = tuple(d)
        n = len(d)
        for i, f in enumerate(d):
            if not isinstance(f, KForm) or f.degree != 2 or f.dim != n:
                raise DimensionError(f"de{i + 1} must be a 2-form on a {n}-dimensional space")
        self.dim = n
        self.d = d
        table = {}
        for j in range(n):
            for k in range(j + 1, n):
                vec = tuple(-d[i][(j, k)] for i in range(n))
                table[(j, k)] = vec
        self._brackets = table

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebra":
        return cls([KForm.zero(n, 2) for _ in range(n)])

    @classmethod
    def from_table(cls, n: int, table: Mapping[int, str]) -> "LieAlgebra":
        """Build from ``{i: "expr"}`` with 1-based ``i``; missing entries are closed."""
        d = [KForm.zero(n, 2) for _ in range(n)]
        for i, expr in table.items():
            if not 1 <= i <= n:
                raise DimensionError(f"coframe index {i} out of range 1..{n}")
            d[i - 1] = parse_form(n, expr, degree=2) if isinstance(expr, str) else expr
        return cls(d)

    def basis_bracket(self, j: int, k: int) -> Vector:
        if j == k:
            return la.zero_vector(self.dim)
        if j < k:
            return self._brackets[(j, k)]
        return la.scale(-1, self._brackets[(k, j)])

    def bracket(self, x: Vector, y: Vector) -> Vector:
        out = la.zero_vector(self.dim)
        for (j, k), vec in self._brackets.items():
            c = x[j] * y[k] - x[k] * y[j]
            if c != 0 and not la.is_zero(vec):
                out = la.add(out, la.scale(c, vec))
        return out

    def ad(self, x: Vector) -> Matrix:
        n = self.dim
        return la.from_columns([self.bracket(x, la.unit_vector(n, j)) for j in range(n)])

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.d == other.d

    def __hash__(self):
        return hash(self.d)

    def __repr__(self):
        rows = ", ".join(f"de{i + 1} = {f}" for i, f in enumerate(self.d) if f)
        return f"LieAlgebra(dim={self.dim}; {rows or 'abelian'})"


def embed(a: KForm, dim: int, index_map: Sequence[int] | int = 0) -> KForm:
    """Push ``a`` into a larger space, sending basis index ``i`` to ``index_map[i]``
    (or to ``i + index_map`` when an integer offset is given)."""
    if isinstance(index_map, int):
        index_map = [i + index_map for i in range(a.dim)]
    return KForm(dim, a.degree, {tuple(index_map[i] for i in key): v for key, v in a.terms()})


def restrict(a: KForm, indices: Sequence[int]) -> KForm:
    """Restriction to the span of the given basis vectors, renumbered 0, 1, ..."""
    pos = {i: r for r, i in enumerate(indices)}
    return KForm(len(indices), a.degree,
                 {tuple(pos[i] for i in key): v for key, v in a.terms() if all(i in pos for i in key)})


def direct_sum(*algebras: LieAlgebra) -> LieAlgebra:
    dim = sum(L.dim for L in algebras)
    d, offset = [], 0
    for L in algebras:
        d += [embed(f, dim, offset) for f in L.d]
        offset += L.dim
    return LieAlgebra(d)


def bracket(L: LieAlgebra, x: Vector, y: Vector) -> Vector:
    return L.bracket(x, y)


def ce_d(L: LieAlgebra, a: KForm) -> KForm:
    """Chevalley-Eilenberg differential: the antiderivation extending e^i -> de^i."""
    if a.dim != L.dim:
        raise DimensionError("form and Lie algebra dimensions differ")
    return _substitute(a, [list(f.terms()) for f in L.d], a.degree + 1, alternate=True)


def jacobi_check(L: LieAlgebra) -> bool:
    return all(ce_d(L, f).is_zero() for f in L.d)


def is_unimodular(L: LieAlgebra) -> bool:
    n = L.dim
    return all(la.trace(L.ad(la.unit_vector(n, i))) == 0 for i in range(n))


# -- connections -----------------------------------------------------------------

@dataclass(frozen=True)
class Connection:
    """Left-invariant connection, ``nabla_{E_i} E_j = sum_k gamma[i][j][k] E_k``."""

    gamma: tuple

    @classmethod
    def zero(cls, n: int) -> "Connection":
        return cls(tuple(tuple((ZERO,) * n for _ in range(n)) for _ in range(n)))

    @classmethod
    def from_lowered(cls, lowered, g: Metric) -> "Connection":
        """From ``lowered[i][j][l] = g(nabla_{E_i} E_j, E_l)``."""
        n = g.dim
        gamma = tuple(
            tuple(la.matvec(g.inv, tuple(lowered[i][j][l] for l in range(n))) for j in range(n))
            for i in range(n)
        )
        return cls(gamma)

    @property
    def dim(self) -> int:
        return len(self.gamma)

    def endo(self, i: int) -> Matrix:
        """Matrix of ``Y -> nabla_{E_i} Y``."""
        return la.from_columns(self.gamma[i])

    def along(self, x: Vector) -> Matrix:
        n = self.dim
        out = la.zeros(n)
        for i in range(n):
            if x[i] != 0:
                out = la.add(out, la.scale(x[i], self.endo(i)))
        return out

    def apply(self, x: Vector, y: Vector) -> Vector:
        return la.matvec(self.along(x), y)

    def lowered(self, g: Metric) -> tuple:
        n = self.dim
        return tuple(tuple(la.matvec(g.g, self.gamma[i][j]) for j in range(n)) for i in range(n))

    def __add__(self, other: "Connection") -> "Connection":
        return Connection(tuple(
            tuple(la.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.gamma, other.gamma)
        ))

    def nonzero_entries(self) -> list:
        """``[(i, j, vector)]`` for every nonzero ``nabla_{E_i} E_j``."""
        n = self.dim
        return [(i, j, self.gamma[i][j]) for i in range(n) for j in range(n)
                if not la.is_zero(self.gamma[i][j])]


def _koszul_lowered(L: LieAlgebra, g: Metric):
    n = L.dim
    # gb[i][j][l] = g([E_i, E_j], E_l)
    gb = [[la.matvec(g.g, L.basis_bracket(i, j)) for j in range(n)] for i in range(n)]
    half = Fraction(1, 2)
    return [[[half * (gb[i][j][l] - gb[j][l][i] + gb[l][i][j])
              for l in range(n)] for j in range(n)] for i in range(n)]


@lru_cache(maxsize=128)
def lc_connection(L: LieAlgebra, g: Metric) -> Connection:
    """Levi-Civita connection from the left-invariant Koszul formula."""
    if g.dim != L.dim:
        raise DimensionError("metric and Lie algebra dimensions differ")
    return Connection.from_lowered(_koszul_lowered(L, g), g)


def phi_inverse_connection(L: LieAlgebra, g: Metric | None = None) -> Connection:
    """Levi-Civita connection read off from ``d`` by inverting the wedging map.

    Each term ``(e^j ^ e^k) (x) e^i`` of ``d = sum_i de^i (x) e^i`` is sent to
    ``1/2 (-e^i (x) e^j^e^k + e^k (x) e^i^e^j + e^j (x) e^k^e^i)``.  A term
    ``e^a (x) b`` acts by ``g(nabla_{E_a} Y, Z) = -b(Y, Z)``, i.e. the 2-form
    ``e^b ^ e^c`` is the skew map ``Y -> e^c(Y) E_b - e^b(Y) E_c``.  Only valid
    in an orthonormal basis.
    """
    n = L.dim
    if g is not None and not g.is_identity():
        raise PreconditionError("phi_inverse_connection needs an orthonormal basis (identity metric)")
    half = Fraction(1, 2)
    acc = [KForm.zero(n, 2) for _ in range(n)]
    for i, di in enumerate(L.d):
        for (j, k), c in di.terms():
            acc[i] = acc[i] - half * c * KForm.monomial(n, (j, k))
            acc[k] = acc[k] + half * c * KForm.monomial(n, (i, j))
            acc[j] = acc[j] + half * c * KForm.monomial(n, (k, i))
    lowered = [[[-acc[a][(b, c)] for c in range(n)] for b in range(n)] for a in range(n)]
    return Connection(tuple(tuple(tuple(row) for row in block) for block in lowered))


def covariant_derivative(conn: Connection, i: int, a: KForm) -> KForm:
    """``nabla_{E_i} a`` for a constant-coefficient form."""
    return -derivation(conn.endo(i), a)


def codifferential(L: LieAlgebra, g: Metric, a: KForm) -> KForm:
    """``d*a = -sum g^{ij} E_j _| nabla^LC_{E_i} a``."""
    if a.degree == 0:
        raise DimensionError("codifferential of a 0-form is not defined here")
    lc = lc_connection(L, g)
    n = L.dim
    nab = [covariant_derivative(lc, i, a) for i in range(n)]
    out = KForm.zero(n, a.degree - 1)
    for i, j, gij in trace_pairs(g):
        out = out - gij * interior(la.unit_vector(n, j), nab[i])
    return out


def curvature(L: LieAlgebra, conn: Connection) -> dict:
    """``{(i, j): R(E_i, E_j)}`` for ``i < j``, each an endomorphism matrix."""
    n = L.dim
    A = [conn.endo(i) for i in range(n)]
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            r = la.commutator(A[i], A[j])
            br = L.basis_bracket(i, j)
            for m in range(n):
                if br[m] != 0:
                    r = la.sub(r, la.scale(br[m], A[m]))
            out[(i, j)] = r
    return out


def curvature_at(R: dict, i: int, j: int, n: int) -> Matrix:
    if i == j:
        return la.zeros(n)
    return R[(i, j)] if i < j else la.scale(-1, R[(j, i)])


def is_flat(L: LieAlgebra, conn: Connection) -> bool:
    return all(la.is_zero(r) for r in curvature(L, conn).values())


def ricci(L: LieAlgebra, conn: Connection, g: Metric | None = None) -> Matrix:
    """``Ric(X, Y) = tr(Z -> R(Z, X) Y)``.  The metric is not needed for this trace."""
    n = L.dim
    R = curvature(L, conn)
    return tuple(
        tuple(sum((curvature_at(R, k, a, n)[k][b] for k in range(n)), ZERO) for b in range(n))
        for a in range(n)
    )


def torsion_tensor(L: LieAlgebra, conn: Connection, g: Metric) -> tuple:
    """``t[i][j][k] = g(nabla_{E_i}E_j - nabla_{E_j}E_i - [E_i,E_j], E_k)``."""
    n = L.dim
    out = []
    for i in range(n):
        block = []
        for j in range(n):
            t = la.sub(la.sub(conn.gamma[i][j], conn.gamma[j][i]), L.basis_bracket(i, j))
            block.append(la.matvec(g.g, t))
        out.append(tuple(block))
    return tuple(out)


def torsion_as_form(L: LieAlgebra, conn: Connection, g: Metric) -> KForm | None:
    """The lowered torsion as a 3-form, or None if it is not totally skew."""
    n = L.dim
    t = torsion_tensor(L, conn, g)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if t[i][j][k] != -t[i][k][j]:
                    return None
    return KForm(n, 3, {(i, j, k): t[i][j][k] for i, j, k in combinations(range(n), 3)})


def is_metric_connection(conn: Connection, g: Metric) -> bool:
    low = conn.lowered(g)
    n = conn.dim
    return all(low[i][j][k] + low[i][k][j] == 0
               for i in range(n) for j in range(n) for k in range(n))
