"""Exact symbolic exterior calculus and the classification of natural operations."""

from .poly import Poly
from .forms import (
    DiffForm,
    DimensionMismatch,
    SmoothMap,
    eval_at,
    ext_d,
    linear_combine,
    pullback,
    taylor_components,
    volume_form,
    wedge,
)
from .tensors import CovTensor, embed_form, nabla, project_form, skew, tensor_product
from .graded import GradedMono, GradedPoly, GradedVar, gp_eval, gp_mul, mono_normalize
from .classify import (
    NaturalOp,
    Signature,
    check_naturality,
    count_basis,
    decompose,
    decomposition,
    enumerate_basis,
    evaluate_on_witness,
    witness,
)
from .chern_weil import (
    InvariantPoly,
    LieForm,
    MatLieAlg,
    chern_form,
    curvature,
    lemados_connection,
    normalize_at_point,
    preset,
)
from .expr import bind, parse_expr, render

__all__ = [
    "Poly",
    "DiffForm",
    "DimensionMismatch",
    "SmoothMap",
    "eval_at",
    "ext_d",
    "linear_combine",
    "pullback",
    "taylor_components",
    "volume_form",
    "wedge",
    "CovTensor",
    "embed_form",
    "nabla",
    "project_form",
    "skew",
    "tensor_product",
    "GradedMono",
    "GradedPoly",
    "GradedVar",
    "gp_eval",
    "gp_mul",
    "mono_normalize",
    "NaturalOp",
    "Signature",
    "check_naturality",
    "count_basis",
    "decompose",
    "decomposition",
    "enumerate_basis",
    "evaluate_on_witness",
    "witness",
    "InvariantPoly",
    "LieForm",
    "MatLieAlg",
    "chern_form",
    "curvature",
    "lemados_connection",
    "normalize_at_point",
    "preset",
    "bind",
    "parse_expr",
    "render",
]

__version__ = "0.1.0"
