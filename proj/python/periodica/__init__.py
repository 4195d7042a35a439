"""Rigorous certificates for periodic orbits of one-dimensional maps."""

import json

from ._core import (
    CurveError,
    Interval,
    IntervalError,
    analytic_p1_seed,
    locate_doubling_points,
    map_ids,
    parse_double,
    to_hex,
)
from . import _core

__all__ = [
    "CurveError",
    "Interval",
    "IntervalError",
    "analytic_p1_seed",
    "certify",
    "certify_curve",
    "from_hex",
    "locate_doubling_points",
    "map_ids",
    "parse_double",
    "seed_orbits",
    "sweep",
    "to_hex",
]


def from_hex(value):
    """Decode a hex-float string (or a [lo, hi] pair of them) from a record."""
    if isinstance(value, list):
        return [from_hex(v) for v in value]
    return parse_double(value)


def certify(map, params, period, x, refine=False, R=None):
    """Certificate for the candidate orbit x as a dict."""
    return json.loads(_core.certify_json(map, params, period, list(x), refine, R))


def seed_orbits(map, params, period, seed=0x5EED, budget=256):
    """Certified, distinct, deduplicated orbits found by seeding."""
    return [json.loads(s) for s in _core.seed_json(map, params, period, seed, budget)]


def sweep(map, grid, p_min=1, p_max=4, budget=256, grid_points=1 << 15, seed=0x5EED, workers=0):
    """Census over a grid {name: (lo, hi, step)}; archive entries are dicts."""
    out = _core.sweep(map, grid, p_min, p_max, budget, grid_points, seed, workers)
    out["archive"] = [json.loads(s) for s in out["archive"]]
    return out


def certify_curve(p, kappa1, kappa2, seed, K=16, N=10, R=1e-2):
    """Uniform certificate of a period-doubling candidate curve over one window."""
    return json.loads(_core.curve_json(p, kappa1, kappa2, list(seed), K, N, R))
