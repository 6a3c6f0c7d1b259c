"""Radar bias registration and bias-aware alpha-beta filter design."""

from ._core import (
    ConfigError,
    DegenerateDenominator,
    DomainError,
    InvalidGains,
    NoValidRoot,
    SingularGeometry,
    SingularSystem,
    build_A,
    cartesian_to_spherical,
    eci_to_enu,
    enu1_to_enu2,
    enu1_to_enu2_position,
    enu_to_face,
    face_to_enu,
    gain_polynomial,
    predicted_covariances,
    run_alpha_beta_filter,
    run_monte_carlo,
    site_position_eci,
    solve_absolute_bias,
    solve_beta,
    spherical_to_cartesian,
    validate_gains,
)

__all__ = [name for name in dir() if not name.startswith("_")]
