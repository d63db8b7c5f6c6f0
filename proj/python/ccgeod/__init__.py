"""Geodesics of conformally compact metrics up to the conformal infinity."""

from ._core import (
    ChartIntegrityError,
    DomainError,
    FermiChart,
    FitError,
    IntegratorConfig,
    NumericError,
    boundary_shoot,
    boundary_shoot_fit,
    endpoint_jacobian,
    endpoint_map,
    figure_data,
    hyperbolic_endpoint_oracle,
    is_asymptotically_hyperbolic,
    kappa,
    load_chart,
    make_epsilon_chart,
    make_warped_ah_chart,
    obstruction,
    run_checks,
    __version__,
)

__all__ = [
    "ChartIntegrityError",
    "DomainError",
    "FermiChart",
    "FitError",
    "IntegratorConfig",
    "NumericError",
    "boundary_shoot",
    "boundary_shoot_fit",
    "endpoint_jacobian",
    "endpoint_map",
    "figure_data",
    "hyperbolic_endpoint_oracle",
    "is_asymptotically_hyperbolic",
    "kappa",
    "load_chart",
    "make_epsilon_chart",
    "make_warped_ah_chart",
    "obstruction",
    "run_checks",
    "__version__",
]
