"""Symplectic curvature flow on Lie groups: curvature, bracket flow and solitons."""
from .exceptions import (
    DimensionError,
    IncompatibleStructure,
    InvalidDatum,
    NonConvergence,
    NotALieAlgebra,
    NotInvariantFamily,
    ScflowError,
    ShorthandSyntaxError,
)
from .lie import Bracket, parse_shorthand, to_shorthand
from .linalg import CompatibleTriple, build_triple, canonical_triple, two_form
from .curvature import curvature, chern_ricci, ricci, scf_rhs, bracket_velocity
from .solitons import SolitonCertificate, algebraic_fit, strong_fit
from .settings import settings

__version__ = "0.1.0"

__all__ = [
    "Bracket",
    "CompatibleTriple",
    "DimensionError",
    "IncompatibleStructure",
    "InvalidDatum",
    "NonConvergence",
    "NotALieAlgebra",
    "NotInvariantFamily",
    "ScflowError",
    "ShorthandSyntaxError",
    "SolitonCertificate",
    "algebraic_fit",
    "bracket_velocity",
    "build_triple",
    "canonical_triple",
    "chern_ricci",
    "curvature",
    "parse_shorthand",
    "ricci",
    "scf_rhs",
    "settings",
    "strong_fit",
    "to_shorthand",
    "two_form",
]
