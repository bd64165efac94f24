"""Command-line front end.

Exit codes: 0 success, 2 domain error (point outside, not a center, ...),
3 invalid body spec / configuration / usage, 4 I/O failure. Domain and spec
errors are reported on stderr as one JSON object ``{"error", "message"}``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import centers, classifier
from .bodies import load_body, unit_disk
from .errors import GeometryError, InvalidSpec
from .metrics import Hilbert, Minkowski

EXIT_OK, EXIT_DOMAIN, EXIT_SPEC, EXIT_IO = 0, 2, 3, 4

TOLERANCE_DEFAULTS = {"fit": centers.DEFAULT_FIT_TOL, "conic": classifier.DEFAULT_CONIC_TOL}
CONFIG_KEYS = {"body", "space", "seed", "tolerances", "format", "out"}


@dataclass
class RunConfig:
    command: str
    body_spec_path: Optional[str] = None
    space: str = "hilbert"
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCE_DEFAULTS))
    output_format: str = "csv"
    output_path: Optional[str] = None

    def tol(self, name: str) -> float:
        return self.tolerances[name]


def fmt(x: float) -> str:
    """12 significant digits, no negative zero."""
    x = float(x)
    if x == 0.0:
        return "0"
    return f"{x:.12g}"


def _round(x: Optional[float]):
    return None if x is None else float(fmt(x))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidSpec(f"usage error: {message}")


def _point(text: str) -> np.ndarray:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}")
    if len(parts) != 2 or not all(math.isfinite(v) for v in parts):
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}")
    return np.array(parts)


def _range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo,hi but got {text!r}")
    if not hi > lo:
        raise argparse.ArgumentTypeError("range needs lo < hi")
    return lo, hi


def _tolerance(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected name=value but got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--body", help="body specification JSON (default: unit disk)")
    common.add_argument("--space", choices=["hilbert", "minkowski"])
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv", "json", "svg"])
    common.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--config", help="JSON run configuration; flags override it")

    parser = _Parser(prog="projmetric", description="Projective-metric geometry experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", parents=[common], help="distance between two points")
    p.add_argument("--from", dest="A", type=_point, required=True)
    p.add_argument("--to", dest="B", type=_point, required=True)

    p = sub.add_parser("midpoint", parents=[common], help="metric midpoint of two points")
    p.add_argument("--from", dest="A", type=_point, required=True)
    p.add_argument("--to", dest="B", type=_point, required=True)

    p = sub.add_parser("centers", parents=[common], help="projective-center scan on a grid")
    p.add_argument("--grid", type=int, default=classifier.DEFAULT_GRID)
    p.add_argument("--pairs", type=int, default=100, help="random pairs per isometry check")

    p = sub.add_parser("classify", parents=[common], help="symmetry verdict for the space")
    p.add_argument("--grid", type=int, default=classifier.DEFAULT_GRID)

    p = sub.add_parser("orbit", parents=[common], help="translation orbit {2ip - 2jq}")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--range", type=_range, default=(0.0, 10.0))
    p.add_argument("--iters", type=int, default=200)

    p = sub.add_parser("reflect", parents=[common], help="apply the point reflection at a center")
    p.add_argument("--center", type=_point, required=True)
    p.add_argument("--points", required=True, help="CSV file of x,y rows")
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise InvalidSpec("run configuration must be a JSON object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise InvalidSpec(f"unknown configuration keys: {sorted(unknown)}")
        cfg.body_spec_path = data.get("body", cfg.body_spec_path)
        cfg.space = data.get("space", cfg.space)
        cfg.seed = data.get("seed", cfg.seed)
        cfg.output_format = data.get("format", cfg.output_format)
        cfg.output_path = data.get("out", cfg.output_path)
        for name, value in data.get("tolerances", {}).items():
            cfg.tolerances[name] = value
    if args.body is not None:
        cfg.body_spec_path = args.body
    if args.space is not None:
        cfg.space = args.space
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format is not None:
        cfg.output_format = args.format
    if args.out is not None:
        cfg.output_path = args.out
    for name, value in args.tol:
        cfg.tolerances[name] = value

    if cfg.space not in ("hilbert", "minkowski"):
        raise InvalidSpec(f"unknown space {cfg.space!r}")
    if cfg.output_format not in ("csv", "json", "svg"):
        raise InvalidSpec(f"unknown output format {cfg.output_format!r}")
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool) or not 0 <= cfg.seed < 2**64:
        raise InvalidSpec("seed must be an unsigned 64-bit integer")
    for name, value in cfg.tolerances.items():
        if name not in TOLERANCE_DEFAULTS:
            raise InvalidSpec(f"unknown tolerance {name!r}")
        if not isinstance(value, (int, float)) or not value > 0:
            raise InvalidSpec(f"tolerance {name!r} must be positive")
    return cfg


def make_space(cfg: RunConfig):
    body = load_body(cfg.body_spec_path) if cfg.body_spec_path else unit_disk()
    if cfg.space == "minkowski":
        return Minkowski(body)
    return Hilbert(body)


def cmd_dist(cfg: RunConfig, args, out) -> int:
    d = make_space(cfg).distance(args.A, args.B)
    if cfg.output_format == "json":
        out.write(json.dumps({"distance": _round(d)}) + "\n")
    else:
        out.write(fmt(d) + "\n")
    return EXIT_OK


def cmd_midpoint(cfg: RunConfig, args, out) -> int:
    M = make_space(cfg).midpoint(args.A, args.B)
    if cfg.output_format == "json":
        out.write(json.dumps({"x": _round(M[0]), "y": _round(M[1])}) + "\n")
    else:
        out.write(f"{fmt(M[0])},{fmt(M[1])}\n")
    return EXIT_OK


def _centers_svg(reports, body) -> str:
    lo, hi = body.bounding_box()
    size = 400.0
    span = float(np.max(hi - lo))

    def xy(P):
        return (P[0] - lo[0]) / span * size, size - (P[1] - lo[1]) / span * size

    outline = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, body.boundary_points(180)))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}">',
        f'<polygon points="{outline}" fill="none" stroke="black"/>',
    ]
    for r in reports:
        # color by log10 residual: blue at 1e-16, red at 1e0
        level = min(max((math.log10(max(r.fit_residual, 1e-16)) + 16.0) / 16.0, 0.0), 1.0)
        color = f"rgb({int(255 * level)},0,{int(255 * (1 - level))})"
        x, y = xy(r.point)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_centers(cfg: RunConfig, args, out) -> int:
    space = make_space(cfg)
    reports = classifier.scan_centers(
        space, args.grid, cfg.tol("fit"), isometry_pairs=args.pairs, seed=cfg.seed
    )
    if cfg.output_format == "svg":
        out.write(_centers_svg(reports, space.body))
    elif cfg.output_format == "json":
        rows = [
            {
                "x": _round(r.point[0]),
                "y": _round(r.point[1]),
                "residual": _round(r.fit_residual),
                "misses_body": r.line_misses_body,
                "is_center": r.is_projective_center,
                "isometry_error": _round(r.reflection_isometry_error),
            }
            for r in reports
        ]
        out.write(json.dumps(rows, indent=2) + "\n")
    else:
        out.write("x,y,residual,misses_body,is_center,isometry_error\n")
        for r in reports:
            iso = "" if r.reflection_isometry_error is None else fmt(r.reflection_isometry_error)
            out.write(
                f"{fmt(r.point[0])},{fmt(r.point[1])},{fmt(r.fit_residual)},"
                f"{str(r.line_misses_body).lower()},{str(r.is_projective_center).lower()},{iso}\n"
            )
    return EXIT_OK


def cmd_classify(cfg: RunConfig, args, out) -> int:
    verdict = classifier.classify(make_space(cfg), args.grid, cfg.tol("fit"), cfg.tol("conic"))
    payload = {
        "kind": verdict.kind,
        "center_fraction": _round(verdict.center_fraction),
        "conic_residual": _round(verdict.conic_residual),
        "grid": verdict.grid,
    }
    out.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_orbit(cfg: RunConfig, args, out) -> int:
    lo, hi = args.range
    if args.iters < 0:
        raise InvalidSpec("--iters must be non-negative")
    values = centers.kronecker_orbit(args.p, args.q, lo, hi, args.iters)
    gap = centers.max_gap(values, lo, hi)
    if cfg.output_format == "json":
        out.write(json.dumps({"values": [_round(v) for v in values], "max_gap": _round(gap)}) + "\n")
    else:
        out.write("value\n")
        out.writelines(fmt(v) + "\n" for v in values)
        out.write(f"max_gap={fmt(gap)}\n")
    return EXIT_OK


def _read_points(path: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            x, y = (float(v) for v in line.split(",")[:2])
        except ValueError:
            if lineno == 1:
                continue  # header
            raise InvalidSpec(f"{path}:{lineno}: expected x,y")
        rows.append((x, y))
    if not rows:
        raise InvalidSpec(f"{path}: no points")
    return np.array(rows)


def cmd_reflect(cfg: RunConfig, args, out) -> int:
    space = make_space(cfg)
    X = _read_points(args.points)
    refl = centers.construct_point_reflection(space, args.center, tol=cfg.tol("fit"))
    R = refl(X)
    nxt = np.roll(np.arange(len(X)), -1)
    out.write("x,y,rx,ry,d_before,d_after\n")
    for i, j in enumerate(nxt):
        before = space.distance(X[i], X[j])
        after = space.distance(R[i], R[j])
        out.write(
            f"{fmt(X[i][0])},{fmt(X[i][1])},{fmt(R[i][0])},{fmt(R[i][1])},{fmt(before)},{fmt(after)}\n"
        )
    return EXIT_OK


COMMANDS = {
    "dist": cmd_dist,
    "midpoint": cmd_midpoint,
    "centers": cmd_centers,
    "classify": cmd_classify,
    "orbit": cmd_orbit,
    "reflect": cmd_reflect,
}


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = make_config(args)
        buf = io.StringIO()
        code = COMMANDS[cfg.command](cfg, args, buf)
        if cfg.output_path:
            Path(cfg.output_path).write_text(buf.getvalue(), encoding="utf-8")
        else:
            sys.stdout.write(buf.getvalue())
        return code
    except GeometryError as exc:
        return _fail(EXIT_DOMAIN, exc)
    except InvalidSpec as exc:
        return _fail(EXIT_SPEC, exc)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    except json.JSONDecodeError as exc:
        return _fail(EXIT_SPEC, InvalidSpec(str(exc)))
    except ValueError as exc:
        return _fail(EXIT_DOMAIN, exc)


if __name__ == "__main__":
    sys.exit(main())
