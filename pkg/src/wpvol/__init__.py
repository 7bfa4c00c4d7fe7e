"""Exact Weil-Petersson volumes, psi/kappa intersection numbers and their large genus behaviour."""
from __future__ import annotations

from ._version import __version__
from .asymptotics import (
    b_coeffs,
    c1_closed,
    c_value,
    kappa_limit_target,
    kappa_limit_value,
    p_poly,
    p_poly_oracle,
    q_render,
    q_value,
    ratio_fn,
)
from .correlators import MemoStore, correlator, normalized_correlator, one_point_closed, two_point_oracle
from .exact import GPoly, GRationalFn, PiValue, pi_eval
from .kappa import KappaMonomial, kmz_expand, mixed_correlator
from .verify import CheckReport, run_suite
from .volumes import (
    VolumePolynomial,
    bracket_def,
    bracket_rec,
    evaluate_volume,
    one_point_coeff,
    volume,
    volume_polynomial,
)

__all__ = [
    "__version__",
    "PiValue",
    "GPoly",
    "GRationalFn",
    "pi_eval",
    "MemoStore",
    "correlator",
    "normalized_correlator",
    "one_point_closed",
    "two_point_oracle",
    "KappaMonomial",
    "kmz_expand",
    "mixed_correlator",
    "bracket_def",
    "bracket_rec",
    "volume",
    "volume_polynomial",
    "VolumePolynomial",
    "evaluate_volume",
    "one_point_coeff",
    "c_value",
    "p_poly",
    "p_poly_oracle",
    "c1_closed",
    "ratio_fn",
    "b_coeffs",
    "q_value",
    "q_render",
    "kappa_limit_value",
    "kappa_limit_target",
    "CheckReport",
    "run_suite",
]
