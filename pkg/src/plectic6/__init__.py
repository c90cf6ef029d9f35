"""Exterior algebra on R^n and linear-type analysis of 3-forms on R^6.

The package has three layers.  :mod:`plectic6.forms` is a dense exterior
algebra over the standard basis (wedge, interior product, pullback,
non-degeneracy).  :mod:`plectic6.classify` computes the trace invariant
whose sign separates the non-degenerate 3-forms on R^6 into three
orbits, and constructs explicit basis changes onto the two open-orbit
normal forms.  :mod:`plectic6.fields` evaluates point-dependent 3-form
fields, scans them over grids (flat or periodic), and reports where the
linear type changes -- in particular whether a base point admits any
grid neighbourhood of constant type.

A command line, ``plectic6``, fronts the same operations; see
:mod:`plectic6.cli`.
"""

__version__ = "0.1.0"

from .classify import (
    DEGENERATE,
    NORMAL_FORM_TAGS,
    TYPE_I,
    TYPE_II,
    TYPE_III,
    Classification,
    HitchinEndo,
    NormalizationError,
    UnsupportedTypeError,
    build_J,
    classify,
    lambda_invariant,
    normal_form,
    normalize,
    random_orbit_sample,
    volume_coordinates,
)
from .expressions import EvalError, ExprSyntaxError, free_variables, parse_expr
from .fields import (
    FieldSpecError,
    GeneralField,
    GridSpec,
    GridSpecError,
    ObstructionVerdict,
    OmegaF,
    PointRecord,
    ScanReport,
    UnsupportedFieldError,
    detect_obstruction,
    eval_field,
    exterior_derivative_fd,
    is_closed_omega_f,
    parse_field_spec,
    scan,
)
from .forms import (
    AlternatingForm,
    FormInputError,
    basis_form,
    contract,
    evaluate,
    flat_matrix,
    form_from_terms,
    format_form_text,
    forms_close,
    is_nondegenerate,
    multi_indices,
    parse_form_text,
    pullback,
    random_form,
    random_invertible,
    standard_volume,
    wedge,
    zero_form,
)
from .verify import VerifyItem, alpha_family, run_verification

__all__ = [
    "AlternatingForm",
    "Classification",
    "DEGENERATE",
    "EvalError",
    "ExprSyntaxError",
    "FieldSpecError",
    "FormInputError",
    "GeneralField",
    "GridSpec",
    "GridSpecError",
    "HitchinEndo",
    "NORMAL_FORM_TAGS",
    "NormalizationError",
    "ObstructionVerdict",
    "OmegaF",
    "PointRecord",
    "ScanReport",
    "TYPE_I",
    "TYPE_II",
    "TYPE_III",
    "UnsupportedFieldError",
    "UnsupportedTypeError",
    "VerifyItem",
    "__version__",
    "alpha_family",
    "basis_form",
    "build_J",
    "classify",
    "contract",
    "detect_obstruction",
    "eval_field",
    "evaluate",
    "exterior_derivative_fd",
    "flat_matrix",
    "form_from_terms",
    "format_form_text",
    "forms_close",
    "free_variables",
    "is_closed_omega_f",
    "is_nondegenerate",
    "lambda_invariant",
    "multi_indices",
    "normal_form",
    "normalize",
    "parse_expr",
    "parse_field_spec",
    "parse_form_text",
    "pullback",
    "random_form",
    "random_invertible",
    "random_orbit_sample",
    "run_verification",
    "scan",
    "standard_volume",
    "volume_coordinates",
    "wedge",
    "zero_form",
]
