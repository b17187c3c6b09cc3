"""Point counts and class arithmetic for pencils of cubic surfaces over finite fields."""

from .budget import Budget, BudgetExceeded
from .count import (
    CountResult,
    count_locus,
    count_pencil,
    count_projective,
    count_singular_fibers,
    euler_formulas,
    verdict_equality,
)
from .field import Field, FieldElem, FieldError, field_create
from .kvar import KClass, L, kclass_normalize, kclass_realize, kv_cancellation_derive, replay
from .pencil import (
    CertificationError,
    Pencil,
    make_nodal_cubic,
    make_pencil,
    phi_forward,
    phi_inverse,
    universal_linear_iso,
)
from .poly import MPoly, poly_eval, poly_is_homogeneous, poly_partial, poly_random_form

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "BudgetExceeded",
    "CertificationError",
    "CountResult",
    "Field",
    "FieldElem",
    "FieldError",
    "KClass",
    "L",
    "MPoly",
    "Pencil",
    "count_locus",
    "count_pencil",
    "count_projective",
    "count_singular_fibers",
    "euler_formulas",
    "field_create",
    "kclass_normalize",
    "kclass_realize",
    "kv_cancellation_derive",
    "make_nodal_cubic",
    "make_pencil",
    "phi_forward",
    "phi_inverse",
    "poly_eval",
    "poly_is_homogeneous",
    "poly_partial",
    "poly_random_form",
    "replay",
    "universal_linear_iso",
    "verdict_equality",
]
