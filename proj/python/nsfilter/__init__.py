"""Dealiased spectral 2D Navier-Stokes solver with 3DVAR filtering."""

from ._core import (
    BlowupError,
    ConfigError,
    Grid,
    IoError,
    SchemaError,
    __version__,
    default_config,
    draw_noise,
    error_bounds,
    flow,
    flow_norm,
    forecast_weights,
    from_physical,
    noise_trace,
    nonlinear,
    project_high,
    project_low,
    run,
    sobolev_norm,
    spin_up,
    stream,
    to_physical,
    velocity,
)

__all__ = [
    "BlowupError",
    "ConfigError",
    "Grid",
    "IoError",
    "SchemaError",
    "__version__",
    "default_config",
    "draw_noise",
    "error_bounds",
    "flow",
    "flow_norm",
    "forecast_weights",
    "from_physical",
    "noise_trace",
    "nonlinear",
    "project_high",
    "project_low",
    "run",
    "sobolev_norm",
    "spin_up",
    "stream",
    "to_physical",
    "velocity",
]
