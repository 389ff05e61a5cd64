"""Indices as winding numbers sampled on a circle."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import (FieldUndefined, NonConvergentSampling, NumericalError,
                      UndefinedOnCircle, VanishingOnCircle)
from .directions import HalfInt

DEFAULT_MAX_SAMPLES = 65536


def default_max_samples():
    env = os.environ.get("UMBILIC_SAMPLES")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError("UMBILIC_SAMPLES must be an integer, got %r" % env)
        if n < 8:
            raise ValueError("UMBILIC_SAMPLES must be at least 8")
        return n
    return DEFAULT_MAX_SAMPLES


@dataclass(frozen=True)
class WindingOptions:
    min_samples: int = 256
    max_samples: int = field(default_factory=default_max_samples)
    max_step: float = math.pi / 3
    min_magnitude: float = 1e-9
    residual_tol: float = 1e-6 * 2 * math.pi


@dataclass(frozen=True)
class WindingReport:
    index: object
    radius: float
    samples: int
    min_magnitude: float
    max_step: float
    residual: float

    def to_json(self):
        idx = self.index.to_json() if isinstance(self.index, HalfInt) else self.index
        return {"index": idx, "radius": self.radius, "samples": self.samples,
                "minMagnitude": self.min_magnitude, "maxStep": self.max_step,
                "residual": self.residual}


def circle_points(center, radius, n):
    t = 2 * np.pi * np.arange(n) / n
    return center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)


def _wrapped_steps(angles):
    d = np.diff(np.append(angles, angles[0]))
    return (d + np.pi) % (2 * np.pi) - np.pi


def _check_circle(center, radius):
    if not (radius > 0 and math.isfinite(radius)):
        raise ValueError("radius must be positive, got %r" % (radius,))


def _run(sample, center, radius, opts, turns_per_unit):
    """Shared adaptive loop.

    `sample(xs, ys)` returns (angle, magnitude) arrays where the angle is
    the quantity being wound (doubled for line fields) and
    `turns_per_unit` converts its steps back to directional angle.
    """
    _check_circle(radius=radius, center=center)
    opts = opts or WindingOptions()
    n = opts.min_samples
    while True:
        xs, ys = circle_points(center, radius, n)
        ang, mag = sample(xs, ys)
        top = float(np.max(mag))
        rel = float(np.min(mag)) / top if top > 0 else 0.0
        d = _wrapped_steps(ang)
        max_step = float(np.max(np.abs(d))) * turns_per_unit
        total = float(np.sum(d))
        k = int(round(total / (2 * np.pi)))
        residual = abs(total - 2 * np.pi * k)
        report = (n, rel, max_step, residual, k)
        if rel <= opts.min_magnitude:
            i = int(np.argmin(mag))
            raise VanishingOnCircle(
                "field nearly vanishes on the circle near (%.6g, %.6g) "
                "(relative magnitude %.3g)" % (xs[i], ys[i], rel),
                _report(report, radius))
        if max_step < opts.max_step and residual < opts.residual_tol:
            return report
        if 2 * n > opts.max_samples:
            raise NonConvergentSampling(
                "angle steps did not resolve with %d samples (max step %.3g rad, "
                "residual %.3g)" % (n, max_step, residual), _report(report, radius))
        n *= 2


def _report(r, radius, index=None):
    n, rel, max_step, residual, k = r
    return WindingReport(k if index is None else index, float(radius), n,
                         rel, max_step, residual)


def winding_vector_field(F, center, radius, opts=None):
    """Winding number of the planar vector field F around a circle.

    `F(xs, ys)` takes coordinate arrays and returns a pair (u, v) of arrays.
    """
    def sample(xs, ys):
        u, v = F(xs, ys)
        u = np.broadcast_to(np.asarray(u, dtype=float), xs.shape)
        v = np.broadcast_to(np.asarray(v, dtype=float), xs.shape)
        return np.arctan2(v, u), np.hypot(u, v)

    r = _run(sample, center, radius, opts, 1.0)
    return r[4], _report(r, radius)


def index_line_field(L, center, radius, opts=None):
    """Index of a line field: the turning of its direction modulo pi.

    `L` is a line field (see `fields.LineField`).  Failures of the field
    on the circle surface as `UndefinedOnCircle` carrying the cause.
    """
    def sample(xs, ys):
        try:
            dirs, strength = L.evaluate(xs, ys)
        except FieldUndefined as e:
            raise UndefinedOnCircle("line field undefined on the circle: %s" % e,
                                    point=e.point, cause=e) from e
        except NumericalError as e:
            raise UndefinedOnCircle("line field undefined on the circle: %s" % e,
                                    point=getattr(e, "point", None), cause=e) from e
        theta = np.arctan2(dirs[:, 1], dirs[:, 0])
        # direction fields only matter modulo pi, so double the angle
        return 2 * theta, np.asarray(strength, dtype=float)

    r = _run(sample, center, radius, opts, 0.5)
    idx = HalfInt(r[4])
    return idx, _report(r, radius, idx)
