"""Perverse coherent t-structures on affine schemes, computed with Groebner bases."""

from .complexes import ChainMap, Complex, Triangle, cone, cocone, shift
from .duality import DualizingData, biduality_data, canonical_module, dualize
from .engine import (
    ic_extend,
    minimality_check,
    orthogonality_check,
    perverse_cohomology,
    perverse_truncate,
    truncate_geq,
)
from .errors import (
    CertificateFailure,
    NotCohenMacaulay,
    PervcohError,
    PerversityError,
    PolySyntaxError,
    SpaceError,
    UndeclaredGenericPoint,
    UnsupportedSupport,
    WindowError,
)
from .groebner import AmbientRing, PrimeField, QuotientRing, groebner_basis, normal_form
from .modules import PresentedModule
from .resolutions import gamma_sections_oracle, resolve
from .space import build_space, check_perversity, member, member_gt

__version__ = "0.1.0"

__all__ = [
    "AmbientRing", "CertificateFailure", "ChainMap", "Complex", "DualizingData", "NotCohenMacaulay",
    "PervcohError", "PerversityError", "PolySyntaxError", "PresentedModule", "PrimeField",
    "QuotientRing", "SpaceError", "Triangle", "UndeclaredGenericPoint", "UnsupportedSupport",
    "WindowError", "biduality_data", "build_space", "canonical_module", "check_perversity", "cocone",
    "cone", "dualize", "gamma_sections_oracle", "groebner_basis", "ic_extend", "member", "member_gt",
    "minimality_check", "normal_form", "orthogonality_check", "perverse_cohomology",
    "perverse_truncate", "resolve", "shift", "truncate_geq",
]
