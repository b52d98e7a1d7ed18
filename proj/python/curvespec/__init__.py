"""Peano-curve spectral models of normal matrices."""

import json

import numpy as np

from ._curvespec import (
    PreconditionError,
    ValidationError,
    cell_of_interval,
    curve_vertex,
    eval_point,
    interval_of_cell,
    run_cli,
    surjectivity,
)
from . import _curvespec

__all__ = [
    "PreconditionError",
    "ValidationError",
    "cell_of_interval",
    "curve_vertex",
    "eval_point",
    "interval_of_cell",
    "surjectivity",
    "selection",
    "model",
    "decompose",
    "pipeline",
    "run_cli",
]


def _complex_matrix(a):
    return np.ascontiguousarray(np.asarray(a, dtype=np.complex128))


def selection(points, depth):
    """Selection table of a finite point set in the plane, as a dict."""
    return json.loads(_curvespec._selection_json([complex(z) for z in points], int(depth)))


def model(a, x=None):
    """Spectral measure of a normal matrix with cyclic vector x (default: normalized ones)."""
    vec = None if x is None else np.asarray(x, dtype=np.complex128)
    return json.loads(_curvespec._model_json(_complex_matrix(a), vec))


def decompose(h, delta=0.05):
    """Greedy split of a Hermitian matrix into diagonal part plus remainder.

    Returns basis F, diagonal mu, remainder C with h = F diag(mu) F* + C, and the report dict.
    """
    schedule = [float(delta)] if np.isscalar(delta) else [float(d) for d in delta]
    out = _curvespec._split(_complex_matrix(h), schedule)
    out["report"] = json.loads(out["report"])
    return out


def pipeline(a, depth=4, degrees=(8, 16, 32), delta=0.05, seed=1, x=None):
    """Full chain for a normal matrix; returns the report dicts and the model matrices."""
    schedule = [float(delta)] if np.isscalar(delta) else [float(d) for d in delta]
    vec = None if x is None else np.asarray(x, dtype=np.complex128)
    out = _curvespec._pipeline(_complex_matrix(a), int(depth), [int(d) for d in degrees], schedule, int(seed), vec)
    out["model"] = json.loads(out["model"])
    out["decomposition"] = json.loads(out["decomposition"])
    return out
