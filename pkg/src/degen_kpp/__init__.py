"""Travelling waves of the degenerate Fisher-KPP equation

    dI/dt = (1 - I) Laplacian(I) + I (1 - I),

computed through the singular shooting problem h' = 2c sqrt(h+)/(1-r) - 2r
for h = (u')^2 o u^{-1}.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    CertificateError,
    ConsistencyError,
    ConvergenceError,
    DegenKPPError,
    DomainError,
    EstimationError,
    IntegrationError,
    ResolutionError,
    SearchError,
)
from .ode_core import (  # noqa: E402
    DEFAULT_TOL,
    HTrace,
    Speed,
    ToleranceSet,
    integrate,
    lambda_pm,
    rhs,
    shoot,
    zero_fate,
)
from .shooting import (  # noqa: E402
    WaveKind,
    alpha_max,
    alpha_switch,
    classify,
    decay_exponent,
    small_speed_scan,
    solve_large,
    solve_large_iteration,
    solve_small,
    threshold_table,
)
from .wave import (  # noqa: E402
    WaveProfile,
    convexity_pattern,
    evaluate_u,
    left_tail,
    reconstruct,
    right_tail_rate,
    speed_identity,
)


def __getattr__(name):
    # scikit-learn is imported only when the estimator is used
    if name == "TravellingWaveFamily":
        from .estimator import TravellingWaveFamily

        return TravellingWaveFamily
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "CertificateError", "ConsistencyError", "ConvergenceError", "DegenKPPError", "DomainError",
    "EstimationError", "IntegrationError", "ResolutionError", "SearchError",
    "DEFAULT_TOL", "HTrace", "Speed", "ToleranceSet", "integrate", "lambda_pm", "rhs", "shoot",
    "zero_fate",
    "WaveKind", "alpha_max", "alpha_switch", "classify", "decay_exponent", "small_speed_scan",
    "solve_large", "solve_large_iteration", "solve_small", "threshold_table",
    "WaveProfile", "convexity_pattern", "evaluate_u", "left_tail", "reconstruct",
    "right_tail_rate", "speed_identity",
    "TravellingWaveFamily",
]
