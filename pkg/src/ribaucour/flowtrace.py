"""Streamlines of line fields, grid sampling, and SVG/OBJ/CSV output."""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (CausalityViolation, DegenerateMetric, DegenerateNormal,
                     DomainError, EmptyMesh, FieldUndefined, RibaucourError,
                     SeedUndefined)
from .scalarfield import eval_jet2
from .surfaces import Kind, as_kind, graph_from_jet, ribaucour_surface


class Termination(str, enum.Enum):
    MAX_LENGTH = "MaxLength"
    LEFT_DOMAIN = "LeftDomain"
    FIELD_UNDEFINED = "FieldUndefined"
    NEAR_SINGULAR = "NearSingular"


@dataclass(frozen=True)
class Polyline:
    points: np.ndarray
    termination: Termination

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("a polyline needs at least 2 points")

    def length(self):
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))


@dataclass(frozen=True)
class Disk:
    center: tuple = (0.0, 0.0)
    radius: float = 1.0

    def contains(self, p):
        return math.hypot(p[0] - self.center[0], p[1] - self.center[1]) <= self.radius


DOT_GUARD = 0.1


def _rotate(v, angle):
    """Rotate each row of v (M, 2) by the matching entry of `angle`."""
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([c * v[:, 0] - s * v[:, 1], s * v[:, 0] + c * v[:, 1]], axis=1)


def _candidates(L, P):
    """Candidates at every row of P; None for rows where L is undefined."""
    try:
        return list(L.candidates(P[:, 0], P[:, 1]))
    except RibaucourError:
        out = []
        for x, y in P:
            try:
                out.append(L.candidates([x], [y])[0])
            except RibaucourError:
                out.append(None)
        return out


def _oriented(L, P, pred, stop):
    """Per row, the candidate closest to `pred`, oriented along it.

    Rows that fail get their termination reason recorded in `stop`.
    """
    out = np.full(P.shape, np.nan)
    for i, c in enumerate(_candidates(L, P)):
        if stop[i] is not None:
            continue
        if c is None:
            stop[i] = Termination.FIELD_UNDEFINED
            continue
        dots = c @ pred[i]
        k = int(np.argmax(np.abs(dots)))
        if not np.isfinite(dots[k]) or abs(dots[k]) < DOT_GUARD:
            stop[i] = Termination.NEAR_SINGULAR
            continue
        out[i] = c[k] if dots[k] > 0 else -c[k]
    return out


def integrate_streamlines(L, seeds, step, max_points=2000, domain=None, backward=False):
    """Trace curvature lines of the line field `L` from each seed.

    Classical RK4 on the unit direction; every stage re-orients the field
    to agree with a predicted direction (orientation continuation), and a
    continuation whose best match has |dot| < 0.1 stops as NearSingular.
    Where `L` offers several candidate directions (the two null lines of a
    time-like form) the prediction also carries the turning rate of the
    previous step, so a trace keeps its branch where two branches touch.
    The seeds are advanced together so each stage is one batched field call.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    P = np.array(seeds, dtype=float).reshape(-1, 2)
    M = len(P)
    try:
        D, _ = L.evaluate(P[:, 0], P[:, 1])
    except RibaucourError as e:
        raise SeedUndefined("line field undefined at a seed: %s" % e) from e
    D = -D if backward else D.copy()
    domains = [domain or Disk((x, y), float("inf")) for x, y in P]
    paths = [[p.copy()] for p in P]
    reason = [None] * M
    turn = np.zeros(M)
    live = np.arange(M)
    h = step
    while len(live):
        stop = [None] * len(live)
        p, d, w = P[live], D[live], turn[live]
        k1 = _oriented(L, p, d, stop)
        k2 = _oriented(L, p + 0.5 * h * k1, _rotate(k1, 0.5 * w), stop)
        k3 = _oriented(L, p + 0.5 * h * k2, k2, stop)
        k4 = _oriented(L, p + h * k3, _rotate(k3, 0.5 * w), stop)
        q = p + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        keep = []
        for n, i in enumerate(live):
            if stop[n] is not None:
                reason[i] = stop[n]
                continue
            if not domains[i].contains(q[n]):
                reason[i] = Termination.LEFT_DOMAIN
                continue
            ref = d[n] if len(paths[i]) > 1 else k1[n]
            turn[i] = math.atan2(ref[0] * k4[n, 1] - ref[1] * k4[n, 0], ref @ k4[n])
            D[i] = k4[n]
            P[i] = q[n]
            paths[i].append(q[n].copy())
            if len(paths[i]) >= max_points:
                reason[i] = Termination.MAX_LENGTH
                continue
            keep.append(i)
        live = np.array(keep, dtype=int)
    out = []
    for pts, r in zip(paths, reason):
        if len(pts) == 1:
            pts.append(pts[0].copy())
        out.append(Polyline(np.array(pts), r or Termination.MAX_LENGTH))
    return out


def integrate_streamline(L, seed, step, max_points=2000, domain=None, backward=False):
    """Single-seed `integrate_streamlines`."""
    try:
        return integrate_streamlines(L, [seed], step, max_points, domain, backward)[0]
    except SeedUndefined as e:
        raise SeedUndefined("line field undefined at seed %r: %s"
                            % (tuple(seed), e.__cause__)) from e.__cause__


def trace_through(L, seeds, step, max_points=2000, domain=None):
    """Both halves of the streamline through each seed, joined into one."""
    fwd = integrate_streamlines(L, seeds, step, max_points, domain)
    bwd = integrate_streamlines(L, seeds, step, max_points, domain, backward=True)
    out = []
    for f, b in zip(fwd, bwd):
        pts = np.concatenate([b.points[:0:-1], f.points])
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(np.diff(pts, axis=0) != 0, axis=1)
        pts = pts[keep]
        out.append(Polyline(pts if len(pts) >= 2 else f.points, f.termination))
    return out


def ring_seeds(center=(0.0, 0.0), radii=(0.1, 0.2, 0.3), per_ring=8):
    out = []
    for r in radii:
        for k in range(per_ring):
            t = 2 * math.pi * (k + 0.5) / per_ring
            out.append((center[0] + r * math.cos(t), center[1] + r * math.sin(t)))
    return out


@dataclass(frozen=True)
class GridSample:
    point: tuple
    value: object
    tag: str


def sample_grid(F, bbox, n):
    """Evaluate F(point) on an n x n grid over bbox = (x0, x1, y0, y1).

    Row-major: rows run over eta from bbox[2] to bbox[3], xi varying fastest.
    Library errors are recorded as the cell tag instead of aborting.
    """
    if n < 2:
        raise ValueError("grid needs n >= 2")
    xs = np.linspace(bbox[0], bbox[1], n)
    ys = np.linspace(bbox[2], bbox[3], n)
    out = []
    for y in ys:
        for x in xs:
            p = (float(x), float(y))
            try:
                v = F(p)
                tag = getattr(v, "value", "ok") if isinstance(v, enum.Enum) else "ok"
            except FieldUndefined as e:
                v, tag = None, str(e.reason)
            except RibaucourError as e:
                v, tag = None, type(e).__name__
            out.append(GridSample(p, v, tag))
    return out


def _f6(v):
    s = "%.6f" % v
    return "0.000000" if s == "-0.000000" else s


def render_svg(polylines, markers=(), viewport=(-0.5, 0.5, -0.5, 0.5), size=512):
    """SVG 1.1 text with a frame, the coordinate axes, streamlines and markers.

    `markers` holds (point, tag) pairs.  Output depends only on the input.
    """
    x0, x1, y0, y1 = map(float, viewport)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("empty viewport")
    W = float(size)
    H = W * (y1 - y0) / (x1 - x0)

    def X(x):
        return _f6((x - x0) / (x1 - x0) * W)

    def Y(y):
        return _f6((y1 - y) / (y1 - y0) * H)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%s" height="%s"'
        ' viewBox="0 0 %s %s">' % (_f6(W), _f6(H), _f6(W), _f6(H)),
        '<rect x="0.000000" y="0.000000" width="%s" height="%s" fill="white"'
        ' stroke="black" stroke-width="1"/>' % (_f6(W), _f6(H)),
    ]
    if x0 <= 0 <= x1:
        lines.append('<line class="axis" x1="%s" y1="0.000000" x2="%s" y2="%s"'
                     ' stroke="gray" stroke-width="0.5"/>' % (X(0), X(0), _f6(H)))
    if y0 <= 0 <= y1:
        lines.append('<line class="axis" x1="0.000000" y1="%s" x2="%s" y2="%s"'
                     ' stroke="gray" stroke-width="0.5"/>' % (Y(0), _f6(W), Y(0)))
    lines.append('<g class="streamlines" fill="none" stroke="navy" stroke-width="0.8">')
    for pl in polylines:
        pts = " ".join("%s,%s" % (X(x), Y(y)) for x, y in np.asarray(pl.points))
        lines.append('<polyline points="%s"/>' % pts)
    lines.append("</g>")
    lines.append('<g class="markers">')
    for (x, y), tag in markers:
        lines.append('<circle class="%s" cx="%s" cy="%s" r="3.000000" fill="red">'
                     '<title>%s</title></circle>' % (tag, X(x), Y(y), tag))
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


_SURFACE_ERRORS = (CausalityViolation, DegenerateNormal, DegenerateMetric, DomainError)


def position_of(f, kind, p):
    """Immersion point over the chart point `p` (graph or Ribaucour kind)."""
    kind = as_kind(kind)
    jet = eval_jet2(f, p)
    if kind in (Kind.GRAPH_EUCLID, Kind.GRAPH_SPACELIKE, Kind.GRAPH_TIMELIKE):
        return graph_from_jet(jet, kind).position
    return ribaucour_surface(jet, kind).position


def export_mesh(kind, f, grid, markers=()):
    """Wavefront OBJ of the immersion over grid = (x0, x1, y0, y1, nx, ny).

    Grid quads with an inadmissible corner are skipped.  Returns
    (obj_text, skipped_cells).  `markers` are extra 3D points written as
    vertices after the mesh.
    """
    kind = as_kind(kind)
    x0, x1, y0, y1, nx, ny = grid
    xs = np.linspace(x0, x1, int(nx))
    ys = np.linspace(y0, y1, int(ny))
    verts = {}
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            try:
                verts[(i, j)] = np.asarray(position_of(f, kind, (float(x), float(y))))
            except _SURFACE_ERRORS:
                pass
    index = {}
    lines = ["# %s immersion of %s" % (kind.value, f.pretty())]
    for j in range(len(ys)):
        for i in range(len(xs)):
            if (i, j) in verts:
                index[(i, j)] = len(index) + 1
                lines.append("v %.12g %.12g %.12g" % tuple(verts[(i, j)]))
    faces, skipped = [], 0
    for j in range(len(ys) - 1):
        for i in range(len(xs) - 1):
            c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            if not all(k in index for k in c):
                skipped += 1
                continue
            a, b, cc, d = (index[k] for k in c)
            faces += ["f %d %d %d" % (a, b, cc), "f %d %d %d" % (a, cc, d)]
    if not faces:
        raise EmptyMesh("every grid cell was skipped (%d cells)" % skipped)
    if markers:
        lines.append("# markers")
        lines += ["v %.12g %.12g %.12g" % tuple(m) for m in markers]
    lines += faces
    return "\n".join(lines) + "\n", skipped


def export_csv(samples):
    """CSV text for grid samples: xi, eta, value, tag."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["xi", "eta", "value", "tag"])
    for s in samples:
        v = s.value
        if isinstance(v, enum.Enum):
            v = v.value
        elif isinstance(v, float):
            v = repr(v)
        w.writerow([repr(float(s.point[0])), repr(float(s.point[1])),
                    "" if v is None else v, s.tag])
    return buf.getvalue()
