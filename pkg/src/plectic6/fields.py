"""Point-dependent 3-form fields on R^6, grid scans, obstruction detection.

Two field families: ``OmegaF(f)`` is dx^135 - dx^146 - dx^236 + f(p) dx^245
with a scalar expression f, and ``GeneralField`` carries one expression per
degree-3 multi-index.  ``scan`` classifies a field over a rectangular grid
and records every adjacent pair of grid points whose type tags differ;
``detect_obstruction`` then asks whether a chosen base point is surrounded
by mixed tags at every grid radius.  With ``periodic=True`` coordinates are
reduced to the fundamental domain [0,1)^6 and adjacency wraps around on
axes whose values cover one full period.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .classify import classify
from .expressions import (
    EvalError,
    Expr,
    ExprSyntaxError,
    Num,
    evaluate as evaluate_expr,
    free_variables,
    parse_expr,
)
from .forms import (
    AlternatingForm,
    basis_form,
    multi_indices,
    multi_index_rank,
    wedge,
    zero_form,
)

__all__ = [
    "FieldSpecError",
    "FormField",
    "GeneralField",
    "GridSpec",
    "GridSpecError",
    "ObstructionVerdict",
    "OmegaF",
    "PointRecord",
    "RadiusCheck",
    "ScanReport",
    "UnsupportedFieldError",
    "detect_obstruction",
    "eval_field",
    "exterior_derivative_fd",
    "is_closed_omega_f",
    "parse_field_spec",
    "scan",
]

_N_COEFFS = 20  # number of degree-3 multi-indices on R^6


class FieldSpecError(ValueError):
    """Malformed field specification text."""


class GridSpecError(ValueError):
    """Malformed grid specification, or a grid that violates a precondition."""


class UnsupportedFieldError(ValueError):
    """Operation defined only for a specific field family."""


@dataclass(frozen=True)
class OmegaF:
    """The one-parameter family dx^135 - dx^146 - dx^236 + f(p) dx^245."""

    f: Expr
    periodic: bool = False


@dataclass(frozen=True)
class GeneralField:
    """One scalar expression per degree-3 multi-index, lexicographic order."""

    coeffs: tuple
    periodic: bool = False

    def __post_init__(self):
        if len(self.coeffs) != _N_COEFFS:
            raise FieldSpecError(
                f"a general field needs {_N_COEFFS} coefficient expressions, "
                f"got {len(self.coeffs)}"
            )


FormField = Union[OmegaF, GeneralField]

_OMEGA_SLOTS = tuple(
    (multi_index_rank(6, idx), sign)
    for idx, sign in (((1, 3, 5), 1.0), ((1, 4, 6), -1.0), ((2, 3, 6), -1.0))
)
_OMEGA_F_SLOT = multi_index_rank(6, (2, 4, 5))


def _prepare_point(p: Sequence[float], periodic: bool) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (6,) or not np.all(np.isfinite(p)):
        raise ValueError("expected a point given by six finite reals")
    if periodic:
        p = p - np.floor(p)
    return p


def eval_field(field: FormField, p: Sequence[float]) -> AlternatingForm:
    """The 3-form at ``p`` (reduced mod 1 per axis when periodic)."""
    p = _prepare_point(p, field.periodic)
    coeffs = np.zeros(_N_COEFFS)
    try:
        if isinstance(field, OmegaF):
            for slot, sign in _OMEGA_SLOTS:
                coeffs[slot] = sign
            coeffs[_OMEGA_F_SLOT] = evaluate_expr(field.f, p)
        else:
            for slot, expr in enumerate(field.coeffs):
                coeffs[slot] = evaluate_expr(expr, p)
    except EvalError as exc:
        raise EvalError(f"{exc} at point {tuple(p)}") from None
    return AlternatingForm(6, 3, coeffs)


def is_closed_omega_f(field: FormField) -> bool:
    """Sufficient closedness criterion for the OmegaF family.

    d(omega) = df ^ dx^245, so the form is closed whenever f depends on
    x2, x4, x5 only.  Dependence is syntactic; a coefficient like x1*0
    fails the criterion even though it is semantically constant.
    """
    if not isinstance(field, OmegaF):
        raise UnsupportedFieldError(
            "the symbolic closedness criterion applies to omega_f fields only; "
            "use exterior_derivative_fd for general fields"
        )
    return free_variables(field.f) <= {"x2", "x4", "x5"}


def exterior_derivative_fd(
    field: FormField, p: Sequence[float], h: float = 1e-4
) -> AlternatingForm:
    """Central-difference approximation of the exterior derivative at ``p``.

    Accumulates dx^j ^ (field(p + h e_j) - field(p - h e_j)) / (2h) over
    the six axes; exact up to O(h^2) for smooth coefficients.
    """
    if h <= 0:
        raise ValueError("finite-difference step h must be positive")
    p = np.asarray(p, dtype=float)
    result = zero_form(6, 4)
    for j in range(6):
        step = np.zeros(6)
        step[j] = h
        diff = (eval_field(field, p + step).coeffs - eval_field(field, p - step).coeffs)
        partial = AlternatingForm(6, 3, diff / (2.0 * h))
        result = result + wedge(basis_form(6, (j + 1,)), partial)
    return result


# -- grids --------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Six axes, each (start, stop, step); a frozen axis has start == stop."""

    axes: tuple

    def __post_init__(self):
        if len(self.axes) != 6:
            raise GridSpecError(f"a grid needs 6 axes, got {len(self.axes)}")
        for d, (start, stop, step) in enumerate(self.axes):
            if not (np.isfinite(start) and np.isfinite(stop) and np.isfinite(step)):
                raise GridSpecError(f"axis {d + 1}: values must be finite")
            if stop < start:
                raise GridSpecError(f"axis {d + 1}: max {stop} below min {start}")
            if stop > start and step <= 0:
                raise GridSpecError(f"axis {d + 1}: step must be positive")

    @classmethod
    def from_string(cls, text: str) -> "GridSpec":
        """Parse 'min:max:step' per axis, or a bare number for a frozen axis."""
        parts = [part.strip() for part in text.split(",")]
        if len(parts) != 6:
            raise GridSpecError(f"expected 6 comma-separated axes, got {len(parts)}")
        axes = []
        for d, part in enumerate(parts):
            pieces = part.split(":")
            try:
                if len(pieces) == 1:
                    value = float(pieces[0])
                    axes.append((value, value, 0.0))
                elif len(pieces) == 3:
                    axes.append(tuple(float(x) for x in pieces))
                else:
                    raise ValueError
            except ValueError:
                raise GridSpecError(
                    f"axis {d + 1}: expected 'min:max:step' or a single number, "
                    f"got {part!r}"
                ) from None
        return cls(tuple(axes))

    def axis_values(self, d: int) -> np.ndarray:
        start, stop, step = self.axes[d]
        if stop == start:
            return np.array([start])
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)

    @property
    def shape(self) -> tuple:
        return tuple(len(self.axis_values(d)) for d in range(6))

    @property
    def total_points(self) -> int:
        return int(np.prod(self.shape))

    def point(self, index: Sequence[int]) -> np.ndarray:
        return np.array(
            [self.axis_values(d)[index[d]] for d in range(6)], dtype=float
        )


def _wrap_axes(grid: GridSpec, periodic: bool) -> tuple:
    """Which axes wrap around: periodic, >= 3 values, covering one period."""
    if not periodic:
        return (False,) * 6
    flags = []
    for d in range(6):
        count = len(grid.axis_values(d))
        step = grid.axes[d][2]
        flags.append(count >= 3 and abs(count * step - 1.0) <= 1e-9)
    return tuple(flags)


# -- scanning -----------------------------------------------------------------


@dataclass(frozen=True)
class PointRecord:
    """Classification of the field at one grid point."""

    index: tuple
    coords: tuple
    lam: float
    tag: str


@dataclass(frozen=True)
class ScanReport:
    """Per-point classifications plus the type boundaries of the grid."""

    grid: GridSpec
    periodic: bool
    tol: float
    points: tuple
    boundary_cells: tuple


def _point_record(field: FormField, grid: GridSpec, tol: float, index: tuple) -> PointRecord:
    coords = grid.point(index)
    cls = classify(eval_field(field, coords), tol=tol)
    return PointRecord(index, tuple(float(c) for c in coords), cls.lam, cls.tag)


def _scan_chunk(args) -> list:
    field, grid, tol, start, stop = args
    shape = grid.shape
    return [
        _point_record(
            field, grid, tol, tuple(int(i) for i in np.unravel_index(flat, shape))
        )
        for flat in range(start, stop)
    ]


def scan(
    field: FormField,
    grid: GridSpec,
    tol: float = 1e-9,
    cap: int = 1_000_000,
    workers: int = 1,
) -> ScanReport:
    """Classify the field at every grid point, in lexicographic index order.

    Degenerate points are recorded with the ``degenerate`` tag; expression
    evaluation errors abort the scan with the offending point named.  With
    ``workers > 1`` the points are split into fixed contiguous chunks and
    classified in separate processes; the report is assembled in the same
    lexicographic order either way, so the output is identical.
    """
    total = grid.total_points
    if total > cap:
        raise GridSpecError(f"grid has {total} points, above the cap of {cap}")
    shape = grid.shape
    if workers > 1 and total > 1:
        bounds = np.linspace(0, total, min(workers, total) + 1).astype(int)
        chunks = [
            (field, grid, tol, int(a), int(b)) for a, b in zip(bounds, bounds[1:])
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [rec for part in pool.map(_scan_chunk, chunks) for rec in part]
    else:
        records = _scan_chunk((field, grid, tol, 0, total))

    tags = np.array([rec.tag for rec in records], dtype=object).reshape(shape)
    wraps = _wrap_axes(grid, field.periodic)
    cells = []
    for d in range(6):
        count = shape[d]
        if count < 2:
            continue
        for index in np.ndindex(*shape):
            here = tags[index]
            if index[d] + 1 < count:
                neighbor = index[:d] + (index[d] + 1,) + index[d + 1 :]
                if tags[neighbor] != here:
                    cells.append((index, neighbor))
            elif wraps[d]:
                neighbor = index[:d] + (0,) + index[d + 1 :]
                if tags[neighbor] != here:
                    cells.append((neighbor, index))
    cells.sort()
    return ScanReport(
        grid=grid,
        periodic=field.periodic,
        tol=tol,
        points=tuple(records),
        boundary_cells=tuple(cells),
    )


# -- obstruction detection ------------------------------------------------------


@dataclass(frozen=True)
class RadiusCheck:
    """Tags found within a closed grid ball of the given radius (in steps)."""

    radius: int
    tags: tuple
    distinct: bool


@dataclass(frozen=True)
class ObstructionVerdict:
    """Whether every grid neighbourhood of the base point mixes type tags."""

    base: tuple
    base_index: tuple
    radii: tuple
    obstruction: bool
    note: str


def detect_obstruction(report: ScanReport, base: Sequence[float]) -> ObstructionVerdict:
    """Check each grid radius around ``base`` for the presence of >= 2 tags.

    The ball of radius r holds the grid points at most r index steps away
    along every axis (wrapping on periodic axes that cover a full period).
    The verdict is positive only when every radius from 1 up to the
    largest one the grid supports contains at least two distinct tags.
    A positive verdict is a finite-resolution witness, nothing stronger.
    """
    base = np.asarray(base, dtype=float)
    if base.shape != (6,):
        raise GridSpecError("base point must have six coordinates")
    base_index = []
    for d in range(6):
        values = report.grid.axis_values(d)
        hits = np.nonzero(np.abs(values - base[d]) <= 1e-9)[0]
        if hits.size == 0:
            raise GridSpecError(
                f"base point is not on the grid (axis {d + 1} value {base[d]})"
            )
        base_index.append(int(hits[0]))
    base_index = tuple(base_index)

    shape = report.grid.shape
    wraps = _wrap_axes(report.grid, report.periodic)
    nearest = {}
    max_dist = 0
    for rec in report.points:
        dist = 0
        for d in range(6):
            dd = abs(rec.index[d] - base_index[d])
            if wraps[d]:
                dd = min(dd, shape[d] - dd)
            dist = max(dist, dd)
        max_dist = max(max_dist, dist)
        if dist < nearest.get(rec.tag, np.inf):
            nearest[rec.tag] = dist

    radii = []
    for r in range(1, max_dist + 1):
        inside = tuple(sorted(tag for tag, d in nearest.items() if d <= r))
        radii.append(RadiusCheck(r, inside, len(inside) >= 2))
    obstruction = bool(radii) and all(check.distinct for check in radii)
    return ObstructionVerdict(
        base=tuple(float(c) for c in base),
        base_index=base_index,
        radii=tuple(radii),
        obstruction=obstruction,
        note=(
            "witnessed at grid resolution; not a proof for the continuum"
            if obstruction
            else "no obstruction witnessed at this grid resolution"
        ),
    )


# -- the field mini-language -----------------------------------------------------


def _parse_spec_expr(text: str, offset: int) -> Expr:
    try:
        return parse_expr(text)
    except ExprSyntaxError as exc:
        raise ExprSyntaxError(exc.raw_message, exc.position + offset) from None


def parse_field_spec(text: str, periodic: bool = False) -> FormField:
    """Parse field text: 'omega_f: <expr>' or 'general:' plus coefficient lines.

    General coefficient lines read '<i> <j> <k> <expr>' with 1 <= i < j < k <= 6;
    omitted multi-indices get the zero expression, repeats are errors.  Blank
    lines and '#' comments are allowed.
    """
    stripped = text.lstrip()
    lead = len(text) - len(stripped)
    if stripped.startswith("omega_f:"):
        body = stripped[len("omega_f:") :]
        if not body.strip():
            raise FieldSpecError("omega_f spec needs an expression after the colon")
        offset = lead + len("omega_f:") + (len(body) - len(body.lstrip()))
        return OmegaF(_parse_spec_expr(body.strip(), offset), periodic)
    if not stripped.startswith("general:"):
        raise FieldSpecError("field spec must start with 'omega_f:' or 'general:'")
    head, _, rest = stripped.partition("\n")
    if head[len("general:") :].strip():
        raise FieldSpecError("unexpected text after 'general:'")

    indices = list(multi_indices(6, 3))
    exprs: dict = {}
    for lineno, line in enumerate(rest.splitlines(), start=2):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        pieces = content.split(None, 3)
        if len(pieces) != 4:
            raise FieldSpecError(
                f"line {lineno}: expected '<i> <j> <k> <expression>'"
            )
        try:
            idx = tuple(int(piece) for piece in pieces[:3])
        except ValueError:
            raise FieldSpecError(f"line {lineno}: indices must be integers") from None
        if not (1 <= idx[0] < idx[1] < idx[2] <= 6):
            raise FieldSpecError(
                f"line {lineno}: indices must be strictly increasing in 1..6"
            )
        if idx in exprs:
            raise FieldSpecError(f"line {lineno}: repeated multi-index {idx}")
        try:
            exprs[idx] = parse_expr(pieces[3])
        except ExprSyntaxError as exc:
            raise FieldSpecError(f"line {lineno}: {exc}") from None
    coeffs = tuple(exprs.get(idx, Num(0.0)) for idx in indices)
    return GeneralField(coeffs, periodic)
