"""Reduced Khovanov homology over F2 for sutured tangles, their twist
towers, and the kappa invariant of strongly invertible knots."""

from .diagram import (
    PlanarDiagram,
    SuturedTangle,
    TangleError,
    closure,
    closure_infinity,
    diagram_from_pd,
    load_input,
    load_tangle,
    mirror,
    validate,
)
from .khcomplex import GradedVectorSpace, determinant, is_thin, jones_polynomial, khovanov
from .limit import (
    KappaInvariant,
    UnstabilizedError,
    WindowPolicy,
    amphicheirality_check,
    compute_kappa,
    compute_window,
    limit_profile,
    mirror_reflect,
    structure_report,
)
from .skein import triangle_check, twist_quotient_map

__version__ = "0.1.0"
