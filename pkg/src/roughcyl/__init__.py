"""Moment-method electromagnetic scattering from rough circular cylinders."""

__version__ = "0.1.0"

from .azimuthal import (IncidentPlaneWave, MediumParams, ScatteringPattern, SurfaceCurrents,
                        assemble_alpha, assemble_beta, assemble_rhs, scattered_near_field,
                        scattering_cross_section, solve_currents)
from .axial import (AxialCurrents, CylindricalWave, TaperedBeam, assemble_axial_matrix,
                    incident_field, scattered_field, solve_axial)
from .errors import (ConfigError, DomainError, GeometryError, QuadratureError, RoughCylError,
                     SingularMatrixError)
from .surface import (AxialSurface, AzimuthalSurface, RoughnessSpec, smooth_axial,
                      smooth_azimuthal, synthesize_axial, synthesize_azimuthal)

__all__ = [
    "AxialCurrents", "AxialSurface", "AzimuthalSurface", "ConfigError", "CylindricalWave",
    "DomainError", "GeometryError", "IncidentPlaneWave", "MediumParams", "QuadratureError",
    "RoughCylError", "RoughnessSpec", "ScatteringPattern", "SingularMatrixError",
    "SurfaceCurrents", "TaperedBeam", "assemble_alpha", "assemble_axial_matrix",
    "assemble_beta", "assemble_rhs", "incident_field", "scattered_field",
    "scattered_near_field", "scattering_cross_section", "smooth_axial", "smooth_azimuthal",
    "solve_axial", "solve_currents", "synthesize_axial", "synthesize_azimuthal",
]
