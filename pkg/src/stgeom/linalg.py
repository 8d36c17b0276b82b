"""Dense exact linear algebra over the rationals.

Vectors are tuples of :class:`~fractions.Fraction`, matrices are tuples of
row tuples.  Column ``j`` of an endomorphism matrix is the image of the basis
vector ``E_j``.  Elimination-heavy routines (inverse, determinant, row
reduction) are delegated to sympy's ``DomainMatrix`` over ``QQ``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def q(x) -> Fraction:
    """Coerce ints, strings like ``"-3/4"`` and Fractions to a Fraction.

    Floats are rejected outright so that no binary rounding sneaks in.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass an exact rational")
    # gmpy2.mpq, sympy Rational and friends
    num, den = getattr(x, "numerator", None), getattr(x, "denominator", None)
    if num is not None and den is not None:
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot interpret {x!r} as a rational")


def vector(entries: Iterable) -> Vector:
    return tuple(q(x) for x in entries)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int, coeff=ONE) -> Vector:
    return tuple(q(coeff) if k == i else ZERO for k in range(n))


def matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(vector(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def zeros(n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return tuple((ZERO,) * m for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(unit_vector(n, i) for i in range(n))


def from_columns(cols: Sequence[Vector]) -> Matrix:
    n = len(cols[0]) if cols else 0
    return tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(n))


def column(a: Matrix, j: int) -> Vector:
    return tuple(row[j] for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else a


def add(a, b):
    if a and isinstance(a[0], tuple):
        return tuple(add(x, y) for x, y in zip(a, b))
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    if a and isinstance(a[0], tuple):
        return tuple(sub(x, y) for x, y in zip(a, b))
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a):
    c = q(c)
    if a and isinstance(a[0], tuple):
        return tuple(scale(c, r) for r in a)
    return tuple(c * x for x in a)


def dot(u: Vector, v: Vector) -> Fraction:
    # structure constants are sparse; skipping zeros avoids most Fraction work
    return sum((x * y for x, y in zip(u, v) if x and y), ZERO)


def matvec(a: Matrix, v: Vector) -> Vector:
    return tuple(dot(row, v) for row in a)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def outer(u: Vector, v: Vector) -> Matrix:
    return tuple(tuple(x * y for y in v) for x in u)


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return sub(matmul(a, b), matmul(b, a))


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), ZERO)


def is_zero(a) -> bool:
    if a and isinstance(a[0], tuple):
        return all(is_zero(r) for r in a)
    return all(x == 0 for x in a)


def bilinear(g: Matrix, u: Vector, v: Vector) -> Fraction:
    return dot(u, matvec(g, v))


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    n, m = len(a), len(b)
    top = tuple(tuple(r) + (ZERO,) * m for r in a)
    bottom = tuple((ZERO,) * n + tuple(r) for r in b)
    return top + bottom


# -- DomainMatrix bridge -----------------------------------------------------

def _to_dm(a: Matrix) -> DomainMatrix:
    rows = [[QQ(x.numerator, x.denominator) for x in r] for r in a]
    ncols = len(a[0]) if a else 0
    return DomainMatrix(rows, (len(a), ncols), QQ)


def _from_dm(m: DomainMatrix) -> Matrix:
    return tuple(tuple(q(x) for x in row) for row in m.to_list())


def det(a: Matrix) -> Fraction:
    if not a:
        return ONE
    return q(_to_dm(a).det())


def inverse(a: Matrix) -> Matrix:
    if det(a) == 0:
        raise ZeroDivisionError("singular matrix")
    return _from_dm(_to_dm(a).inv())


def rref(a: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    if not a:
        return a, ()
    red, pivots = _to_dm(a).rref()
    return _from_dm(red), tuple(pivots)


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One solution of ``a x = b``, or None when the system is inconsistent."""
    n_cols = len(a[0])
    aug = tuple(tuple(r) + (bi,) for r, bi in zip(a, b))
    red, pivots = rref(aug)
    if n_cols in pivots:
        return None
    x = [ZERO] * n_cols
    for row, p in zip(red, pivots):
        x[p] = row[-1]
    return tuple(x)


def leading_minors(a: Matrix) -> list[Fraction]:
    return [det(tuple(r[:k] for r in a[:k])) for k in range(1, len(a) + 1)]
