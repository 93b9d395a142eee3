"""Grey radiative transfer in the diffusion limit.

Solvers take a run configuration as a dict, a JSON string or a path to a
JSON file; the schema is the one the raddiff CLI reads.
"""

import json
import os

import numpy as np

from . import _core
from ._core import ConfigError, e1, head_from, kernel_fourier, kernel_K, tail_from

__all__ = [
    "ConfigError",
    "e1",
    "kernel_K",
    "kernel_fourier",
    "head_from",
    "tail_from",
    "kernel_table",
    "normalize_config",
    "config_hash",
    "milne_solve",
    "boundary_map",
    "transport_solve",
    "elliptic_solve",
    "convergence_study",
    "verify_suite",
]


def _text(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, (str, os.PathLike)) and os.path.isfile(config):
        with open(config) as f:
            return f.read()
    return str(config)


def kernel_table(lo=0.01, hi=10.0, step=0.01):
    """Columns x, K, E1(|x|), head, tail, first_moment_tail, fourier as a structured array."""
    text = _core.kernel_table(lo, hi, step)
    header, *rows = text.strip().splitlines()
    names = [h.split(" [")[0] for h in header.split(",")]
    data = np.array([[float(v) for v in r.split(",")] for r in rows])
    return {n: data[:, k] for k, n in enumerate(names)}


def normalize_config(config):
    """The config with every default filled in."""
    return json.loads(_core.normalize_config(_text(config)))


def config_hash(config):
    return _core.config_hash(_text(config))


def milne_solve(config, normal=(0.0, 0.0, 1.0)):
    """Half-space profile for the configured source seen through a boundary with this outward normal."""
    return _core.milne_solve(_text(config), np.asarray(normal, dtype=float))


def boundary_map(config):
    return _core.boundary_map(_text(config))


def transport_solve(config, eps=None):
    """u_eps on the configured domain; eps defaults to the first entry of the sweep."""
    return _core.transport_solve(_text(config), eps)


def elliptic_solve(config):
    """Limit solution with the boundary temperature map as Dirichlet data."""
    return _core.elliptic_solve(_text(config))


def convergence_study(config):
    """Report dict (as study.json) plus the study.csv text under "csv"."""
    out = _core.convergence_study(_text(config))
    report = json.loads(out["json"])
    report["csv"] = out["csv"]
    report["pass"] = out["pass"]
    return report


def verify_suite(config):
    out = _core.verify_suite(_text(config))
    report = json.loads(out["json"])
    report["pass"] = out["pass"]
    return report
