"""Absolute-continuity certificates for convolutions of orbital measures on
the noncompact Grassmannians SO_0(p,q)/SO(p)xSO(q), q > p, and their complex
and quaternionic relatives.

The public surface mirrors the pipeline: build the root structure, project
group elements to chamber coordinates, classify configurations, evaluate the
sharp eligibility criterion, certify densities by tangent-space ranks, and
analyze convolution powers.
"""

from .cartan import (Configuration, EligibilityVerdict, NotInGroupError,
                     NumericalInconsistencyError, cartan_from_configuration,
                     cartan_projection, configuration_of, exp_cartan,
                     is_eligible)
from .density import (DensityVerdict, RepetitionReport, Status, SupportSample,
                      TangentReport, affine_dimension, decide,
                      find_certificate, is_total, necessity_report,
                      support_sample, u_span_rank, v_span, v_span_rank)
from .linalg import (DEFAULT_TOLERANCE, Field, Tolerance, haar_sample,
                     matrix_exp, singular_values, span_rank)
from .powers import (PowerAnalysis, PowerReport, PowerStatus,
                     forced_zero_count, min_power, sample_power)
from .structure import (CartanElement, GrassmannShape, RootDatum,
                        SymmetrizedVector, adjoint, build_roots, build_S,
                        one_param_k, theta, weyl_project)

__version__ = "0.1.0"

__all__ = [
    "CartanElement", "Configuration", "DEFAULT_TOLERANCE", "DensityVerdict",
    "EligibilityVerdict", "Field", "GrassmannShape", "NotInGroupError",
    "NumericalInconsistencyError", "PowerAnalysis", "PowerReport",
    "PowerStatus", "RepetitionReport", "RootDatum", "Status", "SupportSample",
    "SymmetrizedVector", "TangentReport", "Tolerance", "adjoint",
    "affine_dimension", "build_S", "build_roots", "cartan_from_configuration",
    "cartan_projection", "configuration_of", "decide", "exp_cartan",
    "find_certificate", "forced_zero_count", "haar_sample", "is_eligible",
    "is_total", "matrix_exp", "min_power", "necessity_report", "one_param_k",
    "sample_power", "singular_values", "span_rank", "support_sample",
    "theta", "u_span_rank", "v_span", "v_span_rank", "weyl_project",
    "__version__",
]
