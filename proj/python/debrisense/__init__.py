"""Space-debris sensing over THz inter-satellite links.

Thin Python layer over the C++ core; see ``debrisense._core`` for the full list.
"""

from ._core import (  # noqa: F401
    METRICS_CSV_HEADER,
    SAMPLE_CSV_HEADER,
    SPEED_OF_LIGHT,
    ConfigError,
    Error,
    ExperimentConfig,
    GeometryError,
    InvalidArgument,
    Material,
    MaterialError,
    beckmann_series,
    default_material,
    diffraction_loss,
    excess_delay,
    extract_features,
    fresnel_coefficients,
    fresnel_kirchhoff_parameter,
    fspl_amplitude,
    incidence_angle,
    q_function,
    roughness_coefficient,
    run_campaign,
    simulate_link,
    wave_impedance,
)

__version__ = "0.1.0"
