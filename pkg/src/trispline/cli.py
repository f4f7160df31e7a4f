"""Command line front end: ``trispline {validate,eval,check-c1,export-obj}``.

Exit codes: 0 success, 1 validation or domain failure, 2 usage or parse error.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from .errors import GeometryError, MeshError, TupleValidationError
from .mesh import build_spline, check_c1, load_mesh, surface_obj
from .shapes import load_tuple
from .validation import validate_all

C1_VALUE_TOL = 1e-10
C1_GRADIENT_TOL = 1e-7

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Fail(Exception):
    def __init__(self, code, message, payload=None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _tuple(spec):
    try:
        return load_tuple(spec)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _Fail(EXIT_USAGE, f"cannot read tuple {spec!r}: {exc}") from None


def _spline(args):
    tup = _tuple(args.tuple)
    try:
        mesh = load_mesh(args.mesh)
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"cannot read mesh {args.mesh!r}: {exc}") from None
    except (MeshError, GeometryError) as exc:
        raise _Fail(EXIT_FAIL, f"invalid mesh: {exc}") from None
    try:
        return build_spline(mesh, tup)
    except TupleValidationError as exc:
        raise _Fail(EXIT_FAIL, str(exc), exc.report.to_dict()) from None


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="")


def _fmt(v):
    return "%.17g" % v


def _grid_points(spec, mesh):
    if len(spec) not in (2, 6):
        raise _Fail(EXIT_USAGE, "--grid takes NX NY [XMIN YMIN XMAX YMAX]")
    try:
        nx, ny = int(spec[0]), int(spec[1])
        box = [float(v) for v in spec[2:]] if len(spec) == 6 else list(mesh.bbox())
    except ValueError:
        raise _Fail(EXIT_USAGE, f"bad --grid arguments {spec}") from None
    if nx < 2 or ny < 2:
        raise _Fail(EXIT_USAGE, "grid needs at least 2 points per axis")
    xmin, ymin, xmax, ymax = box
    if not (xmax > xmin and ymax > ymin):
        raise _Fail(EXIT_USAGE, "grid bounding box is empty")
    X, Y = np.meshgrid(np.linspace(xmin, xmax, nx), np.linspace(ymin, ymax, ny))
    return np.column_stack([X.ravel(), Y.ravel()])


def _csv_points(path):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise _Fail(EXIT_USAGE, f"cannot read points {path!r}: {exc}") from None
    if rows and rows[0][0].strip().lower() == "x":
        rows = rows[1:]
    try:
        pts = np.array([[float(r[0]), float(r[1])] for r in rows], dtype=float)
    except (ValueError, IndexError):
        raise _Fail(EXIT_USAGE, f"{path}: expected rows 'x,y'") from None
    return pts.reshape(-1, 2)


# ---------------------------------------------------------------- commands --

def cmd_validate(args):
    tup = _tuple(args.tuple)
    reports = validate_all(tup)
    json.dump({"tuple": tup.name, "reports": [r.to_dict() for r in reports]},
              sys.stdout, indent=2)
    sys.stdout.write("\n")
    admissible, rsd = reports[0], reports[1]
    return EXIT_OK if admissible.passed and rsd.passed else EXIT_FAIL


def cmd_eval(args):
    spline = _spline(args)
    if args.points is not None:
        pts = _csv_points(args.points)
    else:
        pts = _grid_points(args.grid or ["21", "21"], spline.mesh)
    F = spline.eval(pts, fill_value=np.nan)
    if args.gradient:
        G = spline.grad(pts, fill_value=np.nan).as_array()
    buf = io.StringIO()
    buf.write("x,y,F,Fx,Fy\n" if args.gradient else "x,y,F\n")
    for k, (x, y) in enumerate(pts):
        row = [_fmt(x), _fmt(y)]
        inside = np.isfinite(F[k])
        row.append(_fmt(F[k]) if inside else "")
        if args.gradient:
            row += [_fmt(G[k, 0]), _fmt(G[k, 1])] if inside else ["", ""]
        buf.write(",".join(row) + "\n")
    out = _open_out(args.out)
    try:
        out.write(buf.getvalue())
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_check_c1(args):
    if args.samples < 2:
        raise _Fail(EXIT_USAGE, "--samples must be at least 2")
    spline = _spline(args)
    report = check_c1(spline, args.samples)
    ok = report.passes(C1_VALUE_TOL, C1_GRADIENT_TOL)
    payload = report.to_dict()
    payload.update({"pass": ok, "value_tolerance": C1_VALUE_TOL,
                    "gradient_tolerance": C1_GRADIENT_TOL})
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export_obj(args):
    if args.density < 1:
        raise _Fail(EXIT_USAGE, "--density must be at least 1")
    spline = _spline(args)
    text = surface_obj(spline, args.density)
    out = _open_out(args.out)
    try:
        out.write(text)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="trispline",
                                description="C1 triangular Hermite splines with RSD shape functions.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a shape-function tuple")
    v.add_argument("--tuple", required=True, help="built-in name or JSON file")
    v.set_defaults(func=cmd_validate)

    def spline_args(q):
        q.add_argument("--mesh", required=True, help="mesh JSON file")
        q.add_argument("--tuple", required=True, help="built-in name or JSON file")

    e = sub.add_parser("eval", help="evaluate the spline on a grid or a list of points")
    spline_args(e)
    e.add_argument("--grid", nargs="+", metavar="N",
                   help="NX NY [XMIN YMIN XMAX YMAX]; box defaults to the mesh bounding box")
    e.add_argument("--points", help="CSV file with x,y rows")
    e.add_argument("--gradient", action="store_true", help="add Fx, Fy columns")
    e.add_argument("--out", help="output CSV (default stdout)")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check-c1", help="measure value and gradient jumps across interior edges")
    spline_args(c)
    c.add_argument("--samples", type=int, default=101)
    c.set_defaults(func=cmd_check_c1)

    o = sub.add_parser("export-obj", help="write the graph surface as Wavefront OBJ")
    spline_args(o)
    o.add_argument("--density", type=int, default=4)
    o.add_argument("--out", help="output OBJ (default stdout)")
    o.set_defaults(func=cmd_export_obj)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "grid", None) and getattr(args, "points", None):
        print("trispline: --grid and --points are mutually exclusive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"trispline: {exc}", file=sys.stderr)
        if exc.payload is not None:
            json.dump(exc.payload, sys.stderr, indent=2)
            sys.stderr.write("\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
