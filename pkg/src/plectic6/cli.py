"""Command-line front door.

Four subcommands: ``classify`` a form read from a file or stdin,
``scan`` a field specification over a grid, ``normalize`` a form onto
its orbit representative, and ``verify-paper`` to re-derive the
package's reference values.  Exit codes are a stable contract:
0 success or all-pass, 1 verification failure, 2 input error,
3 unsupported operation.

Reports come in two renderings.  ``--format text`` prints numbers with
6 significant digits for reading; ``--format json`` prints 17, enough
to reconstruct every double exactly, under a versioned schema.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from json import dumps as _json_escape
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .classify import (
    DEGENERATE,
    NORMAL_FORM_TAGS,
    TYPE_III,
    NormalizationError,
    UnsupportedTypeError,
    classify,
    normal_form,
    normalize,
    random_orbit_sample,
)
from .fields import (
    GridSpec,
    GridSpecError,
    OmegaF,
    detect_obstruction,
    exterior_derivative_fd,
    is_closed_omega_f,
    parse_field_spec,
    scan,
)
from .forms import is_nondegenerate, parse_form_text, pullback
from .verify import run_verification

__all__ = ["main"]

_DEFAULT_GRID_CAP = 1_000_000
_FD_CLOSED_TOL = 1e-6


# -- report rendering ---------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _json_number(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("cannot render a non-finite number")
    text = format(x, ".17g")
    if not any(c in text for c in ".eE"):
        text += ".0"
    return text


def _render_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return _json_escape(value)
    if isinstance(value, (float, np.floating)):
        return _json_number(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, dict):
        if not value:
            return "{}"
        body = ",\n".join(
            f"{pad}  {_json_escape(str(key))}: {_render_json(val, indent + 1)}"
            for key, val in value.items()
        )
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if len(value) == 0:
            return "[]"
        body = ",\n".join(f"{pad}  {_render_json(v, indent + 1)}" for v in value)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot render {type(value).__name__} as json")


def _document(command: str, inputs: dict, result: dict) -> dict:
    return {
        "schema_version": 1,
        "tool_version": __version__,
        "command": command,
        "input": inputs,
        "result": result,
    }


def _emit(args, document: dict, text_lines: list) -> None:
    if args.format == "json":
        rendered = _render_json(document) + "\n"
    else:
        rendered = "\n".join(text_lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(rendered)
    else:
        sys.stdout.write(rendered)


# -- shared plumbing ----------------------------------------------------------


def _read_form_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    with open(source, "r", encoding="utf-8") as handle:
        return handle.read()


def _grid_cap() -> int:
    raw = os.environ.get("PLECTIC6_GRID_CAP")
    if raw is None:
        return _DEFAULT_GRID_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise GridSpecError(
            f"PLECTIC6_GRID_CAP must be an integer, got {raw!r}"
        ) from None
    if cap <= 0:
        raise GridSpecError("PLECTIC6_GRID_CAP must be positive")
    return cap


# -- classify -----------------------------------------------------------------


def _cmd_classify(args) -> int:
    text = _read_form_text(args.form)
    a = parse_form_text(text)
    tol = 1e-9 if args.tol is None else args.tol
    result = {"n": a.n, "k": a.k}
    lines = [f"form: degree {a.k} on R^{a.n}"]
    if (a.n, a.k) == (6, 3):
        cls = classify(a, tol=tol)
        result.update(
            {
                "nondegenerate": cls.tag != DEGENERATE,
                "lambda": cls.lam,
                "tag": cls.tag,
                "tol": tol,
            }
        )
        lines.append(f"nondegenerate: {'yes' if cls.tag != DEGENERATE else 'no'}")
        lines.append(f"lambda = {_fmt(cls.lam)}")
        lines.append(f"tag = {cls.tag}")
    else:
        flag = is_nondegenerate(a, tol)
        result.update(
            {
                "nondegenerate": flag,
                "tol": tol,
                "note": "type classification needs a 3-form on R^6; "
                "reporting non-degeneracy only",
            }
        )
        lines.append(f"nondegenerate: {'yes' if flag else 'no'}")
        lines.append("(type classification needs a 3-form on R^6)")
    document = _document(
        "classify", {"form": args.form, "form_text": text, "tol": tol}, result
    )
    _emit(args, document, lines)
    return 0


# -- scan ---------------------------------------------------------------------


def _closedness_check(field, grid: GridSpec, fd_step: float) -> dict:
    if isinstance(field, OmegaF):
        closed = is_closed_omega_f(field)
        info = {"method": "symbolic", "closed": closed}
    else:
        total = grid.total_points
        count = min(16, total)
        flats = sorted(set(int(i) for i in np.linspace(0, total - 1, count)))
        shape = grid.shape
        worst = 0.0
        for flat in flats:
            index = tuple(int(i) for i in np.unravel_index(flat, shape))
            deriv = exterior_derivative_fd(field, grid.point(index), h=fd_step)
            worst = max(worst, deriv.max_abs)
        closed = worst <= _FD_CLOSED_TOL
        info = {
            "method": "finite-difference",
            "closed": closed,
            "points_checked": len(flats),
            "fd_step": fd_step,
            "max_fd_coefficient": worst,
            "fd_tol": _FD_CLOSED_TOL,
        }
    if not closed:
        info["warning"] = (
            "field is not closed, hence not multisymplectic; "
            "the scan still reports pointwise linear types"
        )
    return info


def _cmd_scan(args) -> int:
    field = parse_field_spec(args.field, periodic=args.periodic)
    grid = GridSpec.from_string(args.grid)
    tol = 1e-9 if args.tol is None else args.tol
    closedness = _closedness_check(field, grid, args.fd_step)
    report = scan(field, grid, tol=tol, cap=_grid_cap())
    try:
        verdict = detect_obstruction(report, np.zeros(6))
    except GridSpecError:
        verdict = None  # origin off-grid

    result = {
        "periodic": args.periodic,
        "tol": tol,
        "closedness": closedness,
        "shape": list(grid.shape),
        "points": [
            {
                "index": list(rec.index),
                "coords": list(rec.coords),
                "lambda": rec.lam,
                "tag": rec.tag,
            }
            for rec in report.points
        ],
        "boundary_cells": [[list(a), list(b)] for a, b in report.boundary_cells],
        "obstruction": None
        if verdict is None
        else {
            "base": list(verdict.base),
            "base_index": list(verdict.base_index),
            "radii": [
                {"radius": c.radius, "tags": list(c.tags), "distinct": c.distinct}
                for c in verdict.radii
            ],
            "obstruction": verdict.obstruction,
            "note": verdict.note,
        },
    }

    lines = [
        f"field: {args.field}",
        f"grid: {args.grid}  ({grid.total_points} points)",
        f"periodic: {'yes' if args.periodic else 'no'}",
    ]
    if closedness["closed"]:
        lines.append(f"closedness: closed ({closedness['method']} check)")
    else:
        lines.append(f"closedness: NOT closed ({closedness['method']} check)")
        lines.append(f"WARNING: {closedness['warning']}")
    lines.append("points:")
    for rec in report.points:
        coords = ", ".join(_fmt(c) for c in rec.coords)
        lines.append(
            f"  index {rec.index}  coords ({coords})  "
            f"lambda = {_fmt(rec.lam)}  tag = {rec.tag}"
        )
    lines.append(f"boundary cells ({len(report.boundary_cells)}):")
    for pair in report.boundary_cells:
        lines.append(f"  {pair[0]} | {pair[1]}")
    if verdict is None:
        lines.append("obstruction: origin not on the grid, no verdict")
    else:
        word = "yes" if verdict.obstruction else "no"
        lines.append(f"obstruction at origin: {word} ({verdict.note})")

    document = _document(
        "scan",
        {
            "field": args.field,
            "grid": args.grid,
            "periodic": args.periodic,
            "tol": tol,
            "fd_step": args.fd_step,
        },
        result,
    )
    _emit(args, document, lines)
    return 0


# -- normalize ------------------------------------------------------------------


def _cmd_normalize(args) -> int:
    if args.sample is not None:
        a = random_orbit_sample(args.sample, args.seed)
        inputs = {"sample": args.sample, "seed": args.seed}
    else:
        text = _read_form_text(args.form)
        a = parse_form_text(text)
        inputs = {"form": args.form, "form_text": text}
    tol = 1e-6 if args.tol is None else args.tol
    inputs["tol"] = tol

    cls = classify(a)
    if cls.tag == TYPE_III:
        raise UnsupportedTypeError(
            "type (iii) normalization unsupported: only the two open orbits "
            "(type_i, type_ii) have an implemented basis change"
        )
    if cls.tag == DEGENERATE:
        raise UnsupportedTypeError(
            "degenerate form: normalization unsupported (no non-degenerate orbit)"
        )
    g = normalize(a, tol=tol)
    target = normal_form(cls.tag)
    residual = float(np.max(np.abs(pullback(g, a).coeffs - target.coeffs)))

    result = {
        "tag": cls.tag,
        "lambda": cls.lam,
        "matrix": [[float(x) for x in row] for row in g],
        "residual": residual,
        "tol": tol,
    }
    lines = [
        f"tag = {cls.tag}",
        f"lambda = {_fmt(cls.lam)}",
        "g (columns are the new basis vectors):",
    ]
    for row in g:
        lines.append("  " + "  ".join(f"{x: .6g}" for x in row))
    lines.append(f"residual = {_fmt(residual)}  (tol {_fmt(tol)})")
    document = _document("normalize", inputs, result)
    _emit(args, document, lines)
    return 0 if residual <= tol else 1


# -- verify-paper -----------------------------------------------------------------


def _cmd_verify(args) -> int:
    items = run_verification()
    all_passed = all(item.passed for item in items)
    result = {
        "items": [
            {"name": item.name, "passed": item.passed, "details": item.details}
            for item in items
        ],
        "all_passed": all_passed,
    }
    lines = []
    for item in items:
        status = "PASS" if item.passed else "FAIL"
        lines.append(f"{status} {item.name}: {item.details}")
    passed_count = sum(1 for item in items if item.passed)
    lines.append(f"{passed_count}/{len(items)} items passed")
    document = _document("verify-paper", {}, result)
    _emit(args, document, lines)
    return 0 if all_passed else 1


# -- argument parsing -----------------------------------------------------------


def _add_report_args(sub) -> None:
    sub.add_argument(
        "--format", choices=("text", "json"), default="text", help="report rendering"
    )
    sub.add_argument("--output", metavar="PATH", help="write the report to a file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plectic6",
        description="Classify 3-forms on R^6 and scan point-dependent form fields.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser(
        "classify", help="classify a form read from a file or stdin"
    )
    p_classify.add_argument(
        "--form", required=True, metavar="PATH",
        help="form text file, or - for stdin",
    )
    p_classify.add_argument(
        "--tol", type=float, default=None,
        help="classification tolerance (default 1e-9)",
    )
    _add_report_args(p_classify)
    p_classify.set_defaults(handler=_cmd_classify)

    p_scan = sub.add_parser("scan", help="classify a field over a grid")
    p_scan.add_argument(
        "--field", required=True, metavar="SPEC",
        help="field spec: 'omega_f: <expr>' or 'general:' plus lines",
    )
    p_scan.add_argument(
        "--grid", required=True, metavar="SPEC",
        help="per-axis 'min:max:step' or a single number, comma-separated",
    )
    p_scan.add_argument(
        "--tol", type=float, default=None,
        help="classification tolerance (default 1e-9)",
    )
    p_scan.add_argument(
        "--fd-step", type=float, default=1e-4,
        help="finite-difference step for the closedness spot-check",
    )
    p_scan.add_argument(
        "--periodic", action="store_true",
        help="treat coordinates modulo 1 with wrap-around adjacency",
    )
    _add_report_args(p_scan)
    p_scan.set_defaults(handler=_cmd_scan)

    p_norm = sub.add_parser(
        "normalize", help="produce a basis change onto the orbit normal form"
    )
    source = p_norm.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--form", metavar="PATH", help="form text file, or - for stdin"
    )
    source.add_argument(
        "--sample", choices=NORMAL_FORM_TAGS,
        help="use a seeded random orbit sample instead of a file",
    )
    p_norm.add_argument(
        "--seed", type=int, default=0, help="seed for --sample (default 0)"
    )
    p_norm.add_argument(
        "--tol", type=float, default=None,
        help="residual tolerance (default 1e-6)",
    )
    _add_report_args(p_norm)
    p_norm.set_defaults(handler=_cmd_normalize)

    p_verify = sub.add_parser(
        "verify-paper", help="re-derive the package's reference values"
    )
    _add_report_args(p_verify)
    p_verify.set_defaults(handler=_cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except UnsupportedTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NormalizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.best_map is not None:
            print("closest basis change found:", file=sys.stderr)
            for row in exc.best_map:
                print("  " + "  ".join(f"{x: .6g}" for x in row), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
