from .bounds import A3Report, BoundReport, a3_report, diameter, evaluate_bounds, parse_fstar
from .certificate import Certificate, VerificationError, length_interval, mesh_digest, verify_certificate
from .pipeline import (
    DichotomyError,
    EssentialCurve,
    GeneralPositionExhausted,
    MainResult,
    VWitness,
    certify,
    contains_v,
    essential_curve_in_J,
    knot_tube_sharpness,
    main_m,
    run_cw_pipeline,
    run_main_theorem,
)

__all__ = [
    "A3Report",
    "BoundReport",
    "Certificate",
    "DichotomyError",
    "EssentialCurve",
    "GeneralPositionExhausted",
    "MainResult",
    "VWitness",
    "VerificationError",
    "a3_report",
    "certify",
    "contains_v",
    "diameter",
    "essential_curve_in_J",
    "evaluate_bounds",
    "knot_tube_sharpness",
    "length_interval",
    "main_m",
    "mesh_digest",
    "parse_fstar",
    "run_cw_pipeline",
    "run_main_theorem",
    "verify_certificate",
]
