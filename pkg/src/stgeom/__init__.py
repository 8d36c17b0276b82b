"""Exact left-invariant Sasaki-with-torsion geometry on Lie algebras."""

from .acm import (
    ACMStructure,
    classify,
    complete_phi,
    conformal_const,
    field_eq_report,
    hol_span,
    homothety,
    houri_torsion,
    is_killing,
    is_normal,
    is_st,
    lee_form,
    st_connection,
    torsion,
    validate,
)
from .errors import StGeomError
from .exterior import KForm, LieAlgebra, Metric, ce_d, format_form, parse_form
from .gallery import build
from .hermitian import HermitianStructure, cylinder, is_skt, kt_lee, kt_torsion

__version__ = "0.1.0"

__all__ = [
    "ACMStructure", "HermitianStructure", "KForm", "LieAlgebra", "Metric", "StGeomError",
    "build", "ce_d", "classify", "complete_phi", "conformal_const", "cylinder", "field_eq_report",
    "format_form", "hol_span", "homothety", "houri_torsion", "is_killing", "is_normal",
    "is_skt", "is_st", "kt_lee", "kt_torsion", "lee_form", "parse_form", "st_connection", "torsion",
    "validate",
]
