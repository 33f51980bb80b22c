"""Exact verification and synthesis of contact metric (kappa, mu)-structures
on constant-coefficient frame models."""

from .contact_core import (
    KappaMuReport,
    boeckx_invariant,
    classify,
    compute_h,
    fit_kappa_mu,
    is_sasakian,
    nijenhuis,
    verify_contact_metric,
)
from .exact_scalar import Scalar, float_tolerance, parse_scalar, serialize, sqrt_exact
from .frame_model import (
    ContactStructure,
    FrameModel,
    catalog,
    catalog_model,
    load_model,
    milnor_model,
    save_model,
    validate_model,
)
from .legendre import (
    bilegendrian_connection,
    check_parallel,
    extended_pang,
    foliation_data,
    libermann_operator,
    lemmarocky_check,
    pang_classify,
    pang_form,
)
from .report import Report, verify_report
from .synthesis import (
    SynthesisParams,
    admissible_params,
    roundtrip_params,
    sasakianize,
    synthesize,
    synthesize_ab,
    synthesize_c,
    tw_parallelize,
)
from .tensor_engine import curvature, levi_civita

__version__ = "0.1.0"

__all__ = [
    "ContactStructure",
    "FrameModel",
    "KappaMuReport",
    "Report",
    "Scalar",
    "SynthesisParams",
    "admissible_params",
    "bilegendrian_connection",
    "boeckx_invariant",
    "catalog",
    "catalog_model",
    "check_parallel",
    "classify",
    "compute_h",
    "curvature",
    "extended_pang",
    "fit_kappa_mu",
    "float_tolerance",
    "foliation_data",
    "is_sasakian",
    "lemmarocky_check",
    "levi_civita",
    "libermann_operator",
    "load_model",
    "milnor_model",
    "nijenhuis",
    "pang_classify",
    "pang_form",
    "parse_scalar",
    "roundtrip_params",
    "sasakianize",
    "save_model",
    "serialize",
    "sqrt_exact",
    "synthesize",
    "synthesize_ab",
    "synthesize_c",
    "tw_parallelize",
    "validate_model",
    "verify_contact_metric",
    "verify_report",
]
