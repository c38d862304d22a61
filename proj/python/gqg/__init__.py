"""Python access to the gqg channel solver.

Configurations are plain dicts with the same keys as the JSON run files.
"""

import json as _json

from . import _gqg
from ._gqg import (
    ConfigError,
    ConstraintViolation,
    DimensionError,
    GqgError,
    IoError,
    NumericalInstability,
    grid_nodes,
    read_snapshot,
)

__all__ = [
    "ConfigError",
    "ConstraintViolation",
    "DimensionError",
    "GqgError",
    "IoError",
    "NumericalInstability",
    "default_config",
    "grid_nodes",
    "linear_check",
    "qg_compare",
    "read_snapshot",
    "read_snapshot_header",
    "resolve_config",
    "simulate",
    "sweep",
]


def _dump(config):
    return _json.dumps(config if config is not None else {})


def default_config():
    return _json.loads(_gqg.default_config())


def resolve_config(config=None):
    """Validate a partial config and return it with every default filled in."""
    return _json.loads(_gqg.resolve_config(_dump(config)))


def simulate(config=None, write_files=False):
    return _gqg.run_simulation(_dump(config), write_files)


def sweep(config=None):
    return _json.loads(_gqg.run_eps_sweep(_dump(config)))


def linear_check(config=None):
    return _json.loads(_gqg.run_linear_validation(_dump(config)))


def qg_compare(config=None):
    return _json.loads(_gqg.run_wellprepared_comparison(_dump(config)))


def read_snapshot_header(path):
    return _json.loads(_gqg.read_snapshot_header(str(path)))
