"""Numerics for the Finsleroid-relativistic space.

The compiled kernels are used when available; set ``FINSLEROID_PURE_PYTHON=1``
before import to force the numpy fallback.  ``kernels.BACKEND`` names the one
in use.
"""
from .cospace import co_angle, co_distance, co_scalar_product, co_scalars, dual_metric, fhf_H, legendre_duality_check
from .errors import (
    AccuracyError,
    DegenerateCurveError,
    DomainError,
    FinsleroidError,
    PreconditionError,
    SectorError,
    SingularityError,
)
from .geodesics import (
    GeodesicCurve,
    angle,
    arclength,
    axis_angle,
    connect,
    distance,
    equatorial_angle,
    eval_point,
    eval_velocity,
    geodesic_residual,
    nonplanarity,
    scalar_product,
    shoot,
)
from .kernels import BACKEND
from .metric import (
    CartanTensor,
    MetricTensor,
    cartan_tensor,
    covector_of,
    curvature_check,
    fmf_F,
    func_A,
    func_L,
    metric_tensor,
    quadratic_form_B,
    weight_j,
)
from .params import (
    CouplingParams,
    EventVector,
    MomentumCovector,
    SectorLabel,
    classify_cosector,
    classify_sector,
    derive_params,
)
from .transform import QPoint, christoffel, mu, n_tensor, pullback_metric, sigma, sigma_jacobian
from .verify import FDConfig, SuiteReport, run_suite, sample_timelike

__version__ = "0.1.0"
