"""Meshfree ALE solver for the BGK model with moving boundaries."""

from alebgk.velocity import (
    GasProperties,
    MacroState,
    VelocityGrid,
    compute_moments,
    make_velocity_grid,
    reduced_maxwellians,
    relaxation_time,
    stress_tensor,
)

__all__ = [
    "GasProperties",
    "MacroState",
    "VelocityGrid",
    "compute_moments",
    "make_velocity_grid",
    "reduced_maxwellians",
    "relaxation_time",
    "stress_tensor",
]

__version__ = "0.1.0"
