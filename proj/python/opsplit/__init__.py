"""Splitting solvers for constrained fixed-point, monotone inclusion, and
equilibrium problems: projections, resolvents, brute-force oracles, and the
config-driven run/verify front end shared with the CLI."""

import json as _json

from ._core import (
    ConfigError,
    cyclic_index,
    inner,
    project_ball,
    project_box,
    project_halfspace,
    prox_abs,
    resolvent_affine,
    resolvent_box,
    solve_affine_kkt,
    solve_vi_grid,
    trace_format,
)
from ._core import run as _run_text
from ._core import verify as _verify_text

__all__ = [
    "ConfigError",
    "cyclic_index",
    "inner",
    "project_ball",
    "project_box",
    "project_halfspace",
    "prox_abs",
    "resolvent_affine",
    "resolvent_box",
    "run",
    "solve_affine_kkt",
    "solve_vi_grid",
    "trace_format",
    "verify",
]


def _as_text(config):
    if isinstance(config, (dict, list)):
        return _json.dumps(config)
    return config


def run(config, output=""):
    """Execute a run configuration (dict or JSON text); returns the summary."""
    return _run_text(_as_text(config), output)


def verify(config):
    """Run the certificate suites for a configuration (dict or JSON text)."""
    return _verify_text(_as_text(config))
