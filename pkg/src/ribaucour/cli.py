"""Command-line entry point.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import (CausalityViolation, DegenerateNormal, EmptyMesh, FieldUndefined,
                     NumericalError, UsageError, WindingError)
from .flowtrace import Disk, export_mesh, position_of, render_svg, ring_seeds, trace_through
from .scalarfield import eval_jet2, parse, pretty
from .surfaces import Kind, as_kind, find_umbilics, ribaucour_surface
from .umbilic.classify import PointType, classify_batch, classify_point, type_mask
from .umbilic.fields import (Sector, SmoothNullFlow, ThmEField, eigen_field, glued_field,
                             perp_flow)
from .umbilic.winding import index_line_field

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
KINDS = ("euclid", "spacelike", "timelike")
MESH_KINDS = KINDS + ("graph-euclid", "graph-spacelike", "graph-timelike")
FLOWS = ("eigen1", "eigen2", "null1", "null2", "thmE")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pair(text):
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise UsageError("expected two comma-separated numbers, got %r" % text)
    return x, y


def _bbox(text):
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise UsageError("--bbox needs x0,x1,y0,y1 with x0<x1 and y0<y1, got %r" % text)
    return vals


def _params(items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError("--param expects name=value, got %r" % item)
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError("parameter %s has non-numeric value %r" % (name, value))
    return out


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise UsageError("%s must be positive, got %r" % (name, value))
    return value


def build_parser():
    p = _Parser(prog="ribaucour", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, kinds=KINDS):
        sp.add_argument("--mu", required=True, help="generating function, e.g. 'rezpow(4)'")
        sp.add_argument("--kind", required=True, choices=kinds)
        sp.add_argument("--param", action="append", metavar="NAME=VALUE", default=[])
        sp.add_argument("--center", default="0,0", metavar="X,Y")

    a = sub.add_parser("analyze", help="classify and compute flow indices; JSON to stdout")
    common(a)
    a.add_argument("--radius", type=float, default=0.2)

    fl = sub.add_parser("flow", help="trace streamlines of one flow into an SVG")
    common(fl)
    fl.add_argument("--radius", type=float, default=0.2,
                    help="sector-glue check radius and viewport half-width scale")
    fl.add_argument("--flow", required=True,
                    help="eigen1|eigen2|null1|null2|thmE, NAME_perp, or "
                         "glued:NAME@A:B;...;NAME (degrees, last piece covers the rest)")
    fl.add_argument("--out", required=True)
    fl.add_argument("--bbox", default=None, metavar="X0,X1,Y0,Y1")
    fl.add_argument("--step", type=float, default=0.005)
    fl.add_argument("--max-points", type=int, default=400)
    fl.add_argument("--per-ring", type=int, default=8)

    m = sub.add_parser("mesh", help="export the immersion over a chart grid as OBJ")
    common(m, MESH_KINDS)
    m.add_argument("--out", required=True)
    m.add_argument("--bbox", default="-0.5,0.5,-0.5,0.5", metavar="X0,X1,Y0,Y1")
    m.add_argument("--n", type=int, default=41, help="grid points per axis")
    m.add_argument("--markers", action="store_true", help="locate and mark umbilics")

    v = sub.add_parser("verify-paper", help="run the reproduction suite")
    v.add_argument("--only", default=None, help="criterion number or tag, e.g. thmF")
    return p


# -- flows -------------------------------------------------------------------------

def named_flow(f, kind, name, center):
    """The line field called `name` for the given reduction kind."""
    base, perp = (name[:-5], True) if name.endswith("_perp") else (name, False)
    if base in ("eigen1", "eigen2"):
        if kind == "timelike":
            raise UsageError("eigen flows belong to euclid/spacelike; use null1/null2")
        L = eigen_field(f, 0 if base == "eigen1" else 1, "H")
    elif base in ("null1", "null2"):
        if kind != "timelike":
            raise UsageError("null flows belong to the timelike kind")
        L = SmoothNullFlow(f, center, which=1 if base == "null1" else 2)
    elif base == "thmE":
        if kind != "timelike":
            raise UsageError("thmE belongs to the timelike kind")
        L = ThmEField(f)
    else:
        raise UsageError("unknown flow %r" % name)
    if perp:
        L = perp_flow(L, "timelike" if kind == "timelike" else "spacelike")
    return L


def parse_glued(text, f, kind, center, check_radius):
    body = text[len("glued:"):]
    pieces = [p.strip() for p in body.split(";") if p.strip()]
    if not pieces:
        raise UsageError("empty glued flow")
    sectors = []
    for i, piece in enumerate(pieces):
        name, at, rng = piece.partition("@")
        if at:
            lo, colon, hi = rng.partition(":")
            try:
                start, end = float(lo), float(hi)
            except ValueError:
                raise UsageError("bad sector %r (expected NAME@A:B)" % piece)
            if not colon:
                raise UsageError("bad sector %r (expected NAME@A:B)" % piece)
        elif i == len(pieces) - 1:
            start = end = None
        else:
            raise UsageError("only the last glued piece may omit its sector")
        sectors.append(Sector(named_flow(f, kind, name.strip(), center), start, end))
    return glued_field(sectors, center, check_radius=check_radius)


def resolve_flow(f, kind, text, center, radius):
    if text.startswith("glued:"):
        return parse_glued(text, f, kind, center, radius)
    return named_flow(f, kind, text, center)


def flows_for(kind):
    if kind == "timelike":
        return ("null1", "null2", "thmE", "null1_perp", "null2_perp", "thmE_perp")
    return ("eigen1", "eigen2")


# -- analyze ------------------------------------------------------------------------

def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _classification_map(f, kind, center, radius, n=21):
    g = np.linspace(-radius, radius, n)
    X, Y = np.meshgrid(center[0] + g, center[1] + g)
    inside = (X - center[0]) ** 2 + (Y - center[1]) ** 2 <= radius * radius
    xs, ys = X[inside], Y[inside]
    jet = eval_jet2(f, (xs, ys))
    cls = classify_batch(jet, kind)
    counts = {t.value: int(np.sum(type_mask(cls, t))) for t in PointType}
    umb = [(float(x), float(y)) for x, y, c in zip(xs, ys, cls) if c is PointType.UMBILIC]
    return {"grid": n, "points": int(len(xs)), "counts": counts}, umb


def _curvature_summary(f, kind, center, radius, n=12):
    g = np.linspace(-radius, radius, n)   # even n: no sample lands on the center
    X, Y = np.meshgrid(center[0] + g, center[1] + g)
    inside = (X - center[0]) ** 2 + (Y - center[1]) ** 2 <= radius * radius
    pos = neg = zero = skipped = 0
    for x, y in zip(X[inside], Y[inside]):
        try:
            K = float(ribaucour_surface(eval_jet2(f, (float(x), float(y))), kind).gauss())
        except NumericalError:
            skipped += 1
            continue
        if not math.isfinite(K):
            skipped += 1
        elif abs(K) <= 1e-12:
            zero += 1
        elif K > 0:
            pos += 1
        else:
            neg += 1
    return {"samples": pos + neg + zero, "positive": pos, "negative": neg, "zero": zero,
            "skipped": skipped}


def _quasi_on_circle(f, center, radius, n=4096):
    t = 2 * np.pi * np.arange(n) / n
    jet = eval_jet2(f, (center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)))
    cls = classify_batch(jet, "timelike")
    hits = np.flatnonzero(type_mask(cls, PointType.QUASI_UMBILIC))
    a, b = 2 * jet.xy, jet.xx + jet.yy
    rel = (b * b - a * a) / np.maximum(a * a + b * b, 1e-300)
    near = np.flatnonzero(np.abs(rel) < 1e-6)
    return sorted(set(hits.tolist()) | set(near.tolist())), t


def analyze(source, kind, params, center, radius):
    """Build the analysis report (a JSON-ready dict) and the list of failures."""
    f = parse(source, params)
    _positive("radius", radius)
    kind_enum = as_kind(kind)
    warnings = []
    jc = eval_jet2(f, center)
    center_type = classify_point(jc, kind)
    cmap, grid_umbilics = _classification_map(f, kind, center, radius)
    umbilics = [{"location": list(center), "type": center_type.value}] \
        if center_type in (PointType.UMBILIC, PointType.QUASI_UMBILIC) else []
    for p in grid_umbilics:
        if p != tuple(center):
            umbilics.append({"location": list(p), "type": PointType.UMBILIC.value})

    indices, failures = [], []
    for name in flows_for(kind):
        entry = {"flow": name}
        try:
            L = named_flow(f, kind, name, center)
            idx, rep = index_line_field(L, center, radius)
            entry["index"] = idx.to_json()
            entry["indexText"] = str(idx)
            entry["report"] = _clean(rep.to_json())
        except (WindingError, FieldUndefined, NumericalError) as e:
            entry["error"] = "%s: %s" % (type(e).__name__, e)
            rep = getattr(e, "report", None)
            if rep is not None:
                entry["report"] = _clean(rep.to_json())
            failures.append(entry)
        indices.append(entry)

    if kind == "timelike":
        hits, t = _quasi_on_circle(f, center, radius)
        if hits or cmap["counts"][PointType.QUASI_UMBILIC.value]:
            angles = sorted({round(math.degrees(t[i]), 1) for i in hits})
            warnings.append(
                "quasi-umbilic points (merging null directions) inside the disk"
                + (" and on the index circle at angles %s deg" % angles[:8] if angles else ""))
    if center_type is PointType.QUASI_UMBILIC and kind != "timelike":
        warnings.append("center is quasi-umbilic")

    report = {
        "input": {"expression": pretty(f.ast), "source": source, "params": dict(sorted(params.items())),
                  "kind": kind, "ambientKind": kind_enum.value, "center": list(center),
                  "radius": radius},
        "center": {"classification": center_type.value},
        "classificationMap": cmap,
        "umbilics": umbilics,
        "indices": indices,
        "curvature": _curvature_summary(f, kind, center, radius),
        "warnings": warnings,
        "meta": {"version": __version__, "tool": "ribaucour"},
    }
    return report, failures


def _clean(d):
    return {k: (_finite(v) if isinstance(v, float) else v) for k, v in d.items()}


def cmd_analyze(ns):
    center = _pair(ns.center)
    report, failures = analyze(ns.mu, ns.kind, _params(ns.param), center, ns.radius)
    if failures:
        for e in failures:
            print("error: flow %s: %s" % (e["flow"], e["error"]), file=sys.stderr)
            if "report" in e:
                print("  margins: %s" % json.dumps(e["report"], sort_keys=True), file=sys.stderr)
        return EXIT_NUMERIC
    for w in report["warnings"]:
        print("warning: %s" % w, file=sys.stderr)
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# -- flow -----------------------------------------------------------------------------

def _check_region(L, f, kind, bbox, n=24):
    """Raise FieldUndefined if L fails anywhere in the box except at umbilics."""
    xs = np.linspace(bbox[0], bbox[1], n)
    ys = np.linspace(bbox[2], bbox[3], n)
    X, Y = (a.ravel() for a in np.meshgrid(xs, ys))
    cls = classify_batch(eval_jet2(f, (X, Y)), kind)
    keep = ~type_mask(cls, PointType.UMBILIC)
    X, Y = X[keep], Y[keep]
    bad = []
    for x, y in zip(X, Y):
        try:
            L.evaluate(np.array([x]), np.array([y]))
        except FieldUndefined as e:
            bad.append(e)
    if bad:
        e = bad[0]
        raise FieldUndefined(e.point, "%s (%d of %d sampled points)" % (
            e.reason, len(bad), len(X)))


def cmd_flow(ns):
    center = _pair(ns.center)
    _positive("--radius", ns.radius)
    _positive("--step", ns.step)
    if ns.max_points < 2 or ns.per_ring < 1:
        raise UsageError("--max-points must be >= 2 and --per-ring >= 1")
    f = parse(ns.mu, _params(ns.param))
    bbox = _bbox(ns.bbox) if ns.bbox else (center[0] - 0.5, center[0] + 0.5,
                                          center[1] - 0.5, center[1] + 0.5)
    L = resolve_flow(f, ns.kind, ns.flow, center, ns.radius)
    _check_region(L, f, ns.kind, bbox)
    half = 0.5 * min(bbox[1] - bbox[0], bbox[3] - bbox[2])
    mid = (0.5 * (bbox[0] + bbox[1]), 0.5 * (bbox[2] + bbox[3]))
    radii = tuple(half * k for k in (0.2, 0.4, 0.6))
    seeds = ring_seeds(mid, radii, ns.per_ring)
    lines = trace_through(L, seeds, ns.step, ns.max_points, Disk(mid, half * 0.98))
    markers = []
    if classify_point(eval_jet2(f, center), ns.kind) is PointType.UMBILIC:
        markers.append((center, "Umbilic"))
    svg = render_svg(lines, markers, viewport=bbox)
    with open(ns.out, "w", newline="\n") as fh:
        fh.write(svg)
    print("wrote %d streamlines to %s" % (len(lines), ns.out), file=sys.stderr)
    return EXIT_OK


# -- mesh -----------------------------------------------------------------------------

def cmd_mesh(ns):
    if ns.n < 2:
        raise UsageError("--n must be at least 2")
    f = parse(ns.mu, _params(ns.param))
    bbox = _bbox(ns.bbox)
    kind = as_kind(ns.kind)
    chart = []
    if ns.markers:
        if kind.value.startswith("Graph"):
            chart = find_umbilics(f, kind, bbox, n=min(ns.n, 41))
        elif classify_point(eval_jet2(f, _pair(ns.center)), ns.kind) is PointType.UMBILIC:
            chart = [_pair(ns.center)]
    markers = [tuple(map(float, position_of(f, kind, p))) for p in chart]
    obj, skipped = export_mesh(kind, f, bbox + (ns.n, ns.n), markers)
    with open(ns.out, "w", newline="\n") as fh:
        fh.write(obj)
    if skipped:
        print("warning: %d grid cells skipped (surface undefined or not %s there)"
              % (skipped, kind.value), file=sys.stderr)
    print("wrote %s (%d umbilic markers)" % (ns.out, len(markers)), file=sys.stderr)
    return EXIT_OK


# -- verify-paper -----------------------------------------------------------------------

def cmd_verify(ns):
    from . import verify
    try:
        results = verify.run(ns.only)
    except ValueError as e:
        raise UsageError(str(e))
    for r in results:
        print(verify.format_row(r))
    failed = [r.id for r in results if not r.passed]
    print("%d/%d criteria passed%s" % (len(results) - len(failed), len(results),
                                       "" if not failed else "; failing: %s" % failed))
    return EXIT_OK if not failed else 1


COMMANDS = {"analyze": cmd_analyze, "flow": cmd_flow, "mesh": cmd_mesh,
            "verify-paper": cmd_verify}


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        return COMMANDS[ns.command](ns)
    except UsageError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except (EmptyMesh, CausalityViolation, DegenerateNormal, NumericalError) as e:
        print("error: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        rep = getattr(e, "report", None)
        if rep is not None:
            print("  margins: %s" % json.dumps(_clean(rep.to_json()), sort_keys=True),
                  file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
