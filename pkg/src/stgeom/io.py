"""Structure files and JSON serialization.

A structure file is a UTF-8 JSON document::

    {"format": 1, "dim": 7,
     "d": {"e5": [["-1", "e1", "e2"], ["1", "e3", "e4"]], ...},
     "metric": "orthonormal",
     "xi": "E5",
     "phi": [["e1", "-1", "e2"], ["e3", "-1", "e4"], ["e6", "-1", "e7"]],
     "labels": ["X1", ...]}

``d`` maps ``e<i>`` to ``[coeff, e<j>, e<k>]`` triples, ``phi`` lists
``[e<i>, coeff, e<j>]`` meaning ``e^i o phi = coeff e^j`` (partial tables are
completed).  A Hermitian file sets ``"kind": "hermitian"`` and gives a full
``"J"`` table in the same format instead of ``xi`` and ``phi``.  Rationals are
always strings such as ``"-3/4"``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import linalg as la
from .acm import ACMStructure, complete_phi, require_valid
from .errors import DimensionError, JacobiError, ParseError
from .exterior import (
    Connection,
    KForm,
    LieAlgebra,
    Metric,
    format_rational,
    jacobi_check,
    parse_form,
)
from .hermitian import HermitianStructure, require_hermitian

FORMAT = 1
_NAME = re.compile(r"^([eE])(\d+)$")


def _rational(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ParseError(f"{where}: expected a rational string like \"-3/4\", got {x!r}")
    try:
        return Fraction(x.strip()) if isinstance(x, str) else Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: {x!r} is not a rational number") from None


def _index(name: Any, n: int, where: str, prefix: str = "e") -> int:
    if not isinstance(name, str):
        raise ParseError(f"{where}: expected a name like {prefix}1, got {name!r}")
    m = _NAME.match(name.strip())
    if not m or m.group(1).lower() != prefix.lower():
        raise ParseError(f"{where}: expected a name like {prefix}1, got {name!r}")
    i = int(m.group(2))
    if not 1 <= i <= n:
        raise DimensionError(f"{where}: {name} out of range {prefix}1..{prefix}{n}")
    return i - 1


def _expect(cond: bool, msg: str):
    if not cond:
        raise ParseError(msg)


def load_document(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from None
    return loads_document(text, str(path))


def loads_document(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _expect(isinstance(doc, dict), f"{source}: top level must be a JSON object")
    fmt = doc.get("format", FORMAT)
    _expect(fmt == FORMAT, f"{source}: unsupported format {fmt!r} (expected {FORMAT})")
    return doc


def _parse_algebra(doc: dict) -> LieAlgebra:
    n = doc.get("dim")
    _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 1, f"dim: expected a positive integer, got {n!r}")
    table = doc.get("d", {})
    _expect(isinstance(table, dict), "d: expected an object mapping e<i> to term lists")
    d = [KForm.zero(n, 2) for _ in range(n)]
    for name, terms in table.items():
        i = _index(name, n, f"d.{name}")
        _expect(isinstance(terms, list), f"d.{name}: expected a list of [coeff, e<j>, e<k>] triples")
        coeffs: dict = {}
        for t, term in enumerate(terms):
            where = f"d.{name}[{t}]"
            _expect(isinstance(term, list) and len(term) == 3, f"{where}: expected [coeff, e<j>, e<k>]")
            c = _rational(term[0], where)
            j, k = _index(term[1], n, where), _index(term[2], n, where)
            coeffs[(j, k)] = coeffs.get((j, k), 0) + c
        d[i] = KForm(n, 2, list(coeffs.items()))
    L = LieAlgebra(d)
    if not jacobi_check(L):
        raise JacobiError("structure constants violate d^2 = 0 (Jacobi identity)")
    return L


def _parse_metric(doc: dict, n: int) -> Metric:
    m = doc.get("metric", "orthonormal")
    if m == "orthonormal":
        return Metric.identity(n)
    _expect(isinstance(m, list) and len(m) == n and all(isinstance(r, list) and len(r) == n for r in m),
            f"metric: expected \"orthonormal\" or a {n}x{n} matrix of rational strings")
    return Metric([[_rational(x, f"metric[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(m)])


def _parse_vector(x: Any, n: int, where: str) -> tuple:
    if isinstance(x, str):
        return la.unit_vector(n, _index(x, n, where, prefix="E"))
    _expect(isinstance(x, list) and len(x) == n, f"{where}: expected E<i> or a list of {n} rationals")
    return tuple(_rational(v, f"{where}[{i}]") for i, v in enumerate(x))


def _parse_table(entries: Any, n: int, where: str) -> list:
    _expect(isinstance(entries, list), f"{where}: expected a list of [e<i>, coeff, e<j>] entries")
    out = []
    for t, e in enumerate(entries):
        w = f"{where}[{t}]"
        _expect(isinstance(e, list) and len(e) in (2, 3), f"{w}: expected [e<i>, coeff, e<j>]")
        i = _index(e[0], n, w)
        c = _rational(e[1], w)
        j = None
        if len(e) == 3 and e[2] is not None:
            j = _index(e[2], n, w)
        _expect(c == 0 or j is not None, f"{w}: nonzero coefficient needs a target e<j>")
        out.append((i, c, j))
    return out


def parse_structure(doc: dict) -> ACMStructure:
    """Build and validate an ACM structure; raises typed errors for each failure class."""
    _expect(doc.get("kind", "acm") == "acm", "kind: expected \"acm\" for an almost contact metric file")
    L = _parse_algebra(doc)
    n = L.dim
    g = _parse_metric(doc, n)
    _expect("xi" in doc, "xi: missing")
    xi = _parse_vector(doc["xi"], n, "xi")
    phi = complete_phi(n, g, xi, _parse_table(doc.get("phi", []), n, "phi"))
    s = ACMStructure(L, g, xi, phi)
    require_valid(s)
    return s


def parse_hermitian(doc: dict) -> HermitianStructure:
    _expect(doc.get("kind") == "hermitian", "kind: expected \"hermitian\"")
    L = _parse_algebra(doc)
    n = L.dim
    g = _parse_metric(doc, n)
    rows = [list(la.zero_vector(n)) for _ in range(n)]
    given = set()
    for i, c, j in _parse_table(doc.get("J", []), n, "J"):
        given.add(i)
        if c:
            rows[i][j] += c
    # complete single-term rows through J^2 = -1
    for i in sorted(given):
        support = [j for j in range(n) if rows[i][j]]
        if len(support) == 1 and support[0] not in given:
            j = support[0]
            rows[j][i] = -1 / rows[i][j]
            given.add(j)
    missing = [k for k in range(n) if k not in given]
    _expect(not missing, "J: rows " + ", ".join(f"e{k + 1}" for k in missing) + " undetermined")
    # e^i o J = rows[i] is exactly row i of the matrix of J
    h = HermitianStructure(L, g, la.matrix(rows))
    require_hermitian(h)
    return h


def load_structure(path: str | Path):
    """ACMStructure or HermitianStructure according to the file's ``kind``."""
    doc = load_document(path)
    if doc.get("kind", "acm") == "hermitian":
        return parse_hermitian(doc)
    return parse_structure(doc)


def load_form(source: str, dim: int) -> KForm:
    """A form from a file (JSON ``{"form": ...}`` or bare text) or an inline expression."""
    p = Path(source)
    text = source
    if p.exists():
        text = p.read_text(encoding="utf-8").strip()
        if text.startswith("{"):
            doc = loads_document(text, source)
            if doc.get("dim", dim) != dim:
                raise DimensionError(f"{source}: form dimension {doc.get('dim')} != {dim}")
            text = doc.get("form", "")
            _expect(isinstance(text, str), f"{source}: form must be a string expression")
    return parse_form(dim, text, degree=2)


# -- serialization ---------------------------------------------------------------------

def rat(x: Fraction) -> str:
    return format_rational(Fraction(x))


def form_json(a: KForm) -> list:
    """Sorted monomial list ``[[coeff, "e1", "e2"], ...]``."""
    return [[rat(v)] + [f"e{i + 1}" for i in key] for key, v in a.terms()]


def vector_json(v) -> list:
    return [rat(x) for x in v]


def matrix_json(m) -> list:
    return [[rat(x) for x in row] for row in m]


def vector_terms(v, prefix: str = "E") -> list:
    return [[rat(x), f"{prefix}{i + 1}"] for i, x in enumerate(v) if x != 0]


def connection_json(conn: Connection) -> list:
    return [{"along": f"E{i + 1}", "of": f"E{j + 1}", "value": vector_terms(v)}
            for i, j, v in conn.nonzero_entries()]


def _algebra_doc(L: LieAlgebra) -> dict:
    return {f"e{i + 1}": [[rat(v), f"e{j + 1}", f"e{k + 1}"] for (j, k), v in f.terms()]
            for i, f in enumerate(L.d) if f}


def _metric_doc(g: Metric):
    return "orthonormal" if g.is_identity() else matrix_json(g.g)


def _table_doc(m) -> list:
    out = []
    for i, row in enumerate(m):
        terms = [[f"e{i + 1}", rat(x), f"e{j + 1}"] for j, x in enumerate(row) if x != 0]
        out += terms or [[f"e{i + 1}", "0", None]]
    return out


def structure_doc(s: ACMStructure, labels=None) -> dict:
    n = s.dim
    nz = [i for i, x in enumerate(s.xi) if x != 0]
    xi = f"E{nz[0] + 1}" if len(nz) == 1 and s.xi[nz[0]] == 1 else vector_json(s.xi)
    doc = {"format": FORMAT, "kind": "acm", "dim": n, "d": _algebra_doc(s.L),
           "metric": _metric_doc(s.g), "xi": xi, "phi": _table_doc(s.phi)}
    if labels:
        doc["labels"] = list(labels)
    return doc


def hermitian_doc(h: HermitianStructure) -> dict:
    return {"format": FORMAT, "kind": "hermitian", "dim": h.dim, "d": _algebra_doc(h.L),
            "metric": _metric_doc(h.g), "J": _table_doc(h.J)}


def _dump(x: Any, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_dump(x[k], indent + 1)}" for k in sorted(x)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in x):
            return json.dumps(list(x), ensure_ascii=False)
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in x) + "\n" + pad + "]"
    return json.dumps(x, ensure_ascii=False)


def dumps(doc: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, lists of scalars kept on one line."""
    return _dump(doc, 0) + "\n"
