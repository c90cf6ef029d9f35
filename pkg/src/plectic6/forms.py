"""Dense real exterior algebra on R^n.

A degree-k alternating form is stored as one float per strictly
increasing multi-index (i1 < ... < ik), with 1-based indices and the
multi-indices in lexicographic order, so a 3-form on R^6 is a vector of
C(6,3) = 20 coefficients.

All sign conventions of the package live in this module:

* wedge: ``dx^I ^ dx^J = sign * dx^{sorted(I+J)}`` where ``sign`` is the
  parity of merging the two sorted index blocks, i.e. ``(-1)**inv`` with
  ``inv`` the number of pairs ``(i, j) in I x J`` with ``i > j``.
* interior product: contracting ``dx^{i1...ik}`` with ``e_{ip}`` removes
  the p-th listed index with sign ``(-1)**(p-1)``.

With these rules ``i_{e_j} dvol = (-1)**(j-1) dx^{1...^j...n}``, and a
basis monomial evaluates on vectors as the determinant of the selected
component rows.
"""

from __future__ import annotations

import math
import numbers
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .linalg import matrix_rank

__all__ = [
    "AlternatingForm",
    "FormInputError",
    "basis_form",
    "contract",
    "evaluate",
    "flat_matrix",
    "form_from_terms",
    "format_form_text",
    "forms_close",
    "is_invertible",
    "is_nondegenerate",
    "multi_indices",
    "multi_index_rank",
    "parse_form_text",
    "pullback",
    "random_form",
    "random_invertible",
    "standard_volume",
    "wedge",
    "zero_form",
]


class FormInputError(ValueError):
    """Malformed multi-index, coefficient layout, or form-file text."""


@lru_cache(maxsize=None)
def multi_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All strictly increasing k-tuples from 1..n, lexicographically ordered."""
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _rank_table(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {idx: pos for pos, idx in enumerate(multi_indices(n, k))}


def multi_index_rank(n: int, indices: tuple[int, ...]) -> int:
    """Position of a multi-index in the canonical coefficient layout."""
    _check_multi_index(n, indices)
    return _rank_table(n, len(indices))[tuple(indices)]


def _check_multi_index(n: int, indices: Sequence[int]) -> tuple[int, ...]:
    idx = tuple(int(i) for i in indices)
    for i in idx:
        if not 1 <= i <= n:
            raise FormInputError(f"index {i} out of range 1..{n}")
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise FormInputError(f"indices {idx} are not strictly increasing")
    return idx


@dataclass(frozen=True, eq=False)
class AlternatingForm:
    """A degree-k alternating form on R^n, dense canonical coefficients."""

    n: int
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise FormInputError("dimension and degree must be non-negative")
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        want = math.comb(self.n, self.k)
        if c.size != want:
            raise FormInputError(
                f"a degree-{self.k} form on R^{self.n} needs {want} "
                f"coefficients, got {c.size}"
            )
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    # -- value semantics ------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlternatingForm):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __add__(self, other: "AlternatingForm") -> "AlternatingForm":
        self._check_same_space(other)
        return AlternatingForm(self.n, self.k, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlternatingForm") -> "AlternatingForm":
        self._check_same_space(other)
        return AlternatingForm(self.n, self.k, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "AlternatingForm":
        if not isinstance(scalar, numbers.Real):
            return NotImplemented
        return AlternatingForm(self.n, self.k, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "AlternatingForm":
        return self * (1.0 / float(scalar))

    def __neg__(self) -> "AlternatingForm":
        return AlternatingForm(self.n, self.k, -self.coeffs)

    def _check_same_space(self, other: "AlternatingForm") -> None:
        if self.n != other.n or self.k != other.k:
            raise FormInputError(
                f"forms live in different spaces: ({self.n},{self.k}) "
                f"vs ({other.n},{other.k})"
            )

    # -- inspection -----------------------------------------------------

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0.0))

    def coefficient(self, indices: Sequence[int]) -> float:
        idx = _check_multi_index(self.n, indices)
        if len(idx) != self.k:
            raise FormInputError(f"multi-index {idx} has wrong length for degree {self.k}")
        return float(self.coeffs[_rank_table(self.n, self.k)[idx]])

    def terms(self) -> list[tuple[tuple[int, ...], float]]:
        """Nonzero (multi-index, coefficient) pairs in canonical order."""
        idx = multi_indices(self.n, self.k)
        return [(idx[i], float(c)) for i, c in enumerate(self.coeffs) if c != 0.0]

    def __str__(self) -> str:
        if self.k == 0:
            return f"{self.coeffs[0]:g}"
        parts = []
        for idx, c in self.terms():
            mono = "dx" + "".join(str(i) for i in idx)
            if c == 1.0:
                term = mono
            elif c == -1.0:
                term = f"-{mono}"
            else:
                term = f"{c:g} {mono}"
            if parts and not term.startswith("-"):
                parts.append("+ " + term)
            elif parts:
                parts.append("- " + term[1:])
            else:
                parts.append(term)
        return " ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"AlternatingForm(n={self.n}, k={self.k}, {self})"


# -- constructors --------------------------------------------------------


def zero_form(n: int, k: int) -> AlternatingForm:
    return AlternatingForm(n, k, np.zeros(math.comb(n, k)))


def basis_form(n: int, indices: Sequence[int]) -> AlternatingForm:
    """The monomial dx^{i1...ik} (coefficient 1 at one multi-index)."""
    idx = _check_multi_index(n, indices)
    c = np.zeros(math.comb(n, len(idx)))
    c[_rank_table(n, len(idx))[idx]] = 1.0
    return AlternatingForm(n, len(idx), c)


def form_from_terms(
    n: int, k: int, terms: Mapping[Sequence[int], float] | Iterable[tuple[Sequence[int], float]]
) -> AlternatingForm:
    """Build a form from (multi-index, coefficient) pairs; repeats are an error."""
    pairs = terms.items() if isinstance(terms, Mapping) else terms
    c = np.zeros(math.comb(n, k))
    seen: set[tuple[int, ...]] = set()
    for indices, value in pairs:
        idx = _check_multi_index(n, indices)
        if len(idx) != k:
            raise FormInputError(f"multi-index {idx} has wrong length for degree {k}")
        if idx in seen:
            raise FormInputError(f"repeated multi-index {idx}")
        seen.add(idx)
        c[_rank_table(n, k)[idx]] = float(value)
    return AlternatingForm(n, k, c)


def standard_volume(n: int) -> AlternatingForm:
    """dx^1 ^ ... ^ dx^n."""
    return basis_form(n, tuple(range(1, n + 1)))


# -- wedge ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int, q: int):
    """Index/sign arrays realizing the structure constants of ^."""
    left = multi_indices(n, p)
    right = multi_indices(n, q)
    out_rank = _rank_table(n, p + q) if p + q <= n else {}
    li, ri, oi, sg = [], [], [], []
    for a_pos, idx_a in enumerate(left):
        set_a = set(idx_a)
        for b_pos, idx_b in enumerate(right):
            if set_a & set(idx_b):
                continue
            inversions = sum(1 for i in idx_a for j in idx_b if i > j)
            li.append(a_pos)
            ri.append(b_pos)
            oi.append(out_rank[tuple(sorted(idx_a + idx_b))])
            sg.append(-1.0 if inversions % 2 else 1.0)
    return (
        np.array(li, dtype=np.intp),
        np.array(ri, dtype=np.intp),
        np.array(oi, dtype=np.intp),
        np.array(sg),
    )


def wedge(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    """Exterior product.  Degrees above n give the zero form of that degree."""
    if a.n != b.n:
        raise FormInputError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.k == 0:
        return AlternatingForm(b.n, b.k, float(a.coeffs[0]) * b.coeffs)
    if b.k == 0:
        return AlternatingForm(a.n, a.k, float(b.coeffs[0]) * a.coeffs)
    k = a.k + b.k
    out = np.zeros(math.comb(a.n, k))
    if k <= a.n:
        li, ri, oi, sg = _wedge_table(a.n, a.k, b.k)
        np.add.at(out, oi, sg * a.coeffs[li] * b.coeffs[ri])
    return AlternatingForm(a.n, k, out)


# -- interior product -------------------------------------------------------


@lru_cache(maxsize=None)
def _contract_table(n: int, k: int):
    """(form_idx, component_idx, out_idx, sign) arrays for i_v."""
    out_rank = _rank_table(n, k - 1)
    fi, vi, oi, sg = [], [], [], []
    for pos, idx in enumerate(multi_indices(n, k)):
        for p, i in enumerate(idx):
            fi.append(pos)
            vi.append(i - 1)
            oi.append(out_rank[idx[:p] + idx[p + 1 :]])
            sg.append(-1.0 if p % 2 else 1.0)
    return (
        np.array(fi, dtype=np.intp),
        np.array(vi, dtype=np.intp),
        np.array(oi, dtype=np.intp),
        np.array(sg),
    )


def contract(v: Sequence[float], a: AlternatingForm) -> AlternatingForm:
    """Interior product i_v a (contraction of the first slot with v)."""
    if a.k == 0:
        raise FormInputError("cannot contract a 0-form")
    vec = np.asarray(v, dtype=float).reshape(-1)
    if vec.size != a.n:
        raise FormInputError(f"vector has {vec.size} components, expected {a.n}")
    fi, vi, oi, sg = _contract_table(a.n, a.k)
    out = np.zeros(math.comb(a.n, a.k - 1))
    np.add.at(out, oi, sg * vec[vi] * a.coeffs[fi])
    return AlternatingForm(a.n, a.k - 1, out)


def flat_matrix(a: AlternatingForm) -> np.ndarray:
    """Matrix of v -> i_v a: column j holds the coefficients of i_{e_j} a."""
    if a.k == 0:
        raise FormInputError("cannot contract a 0-form")
    fi, vi, oi, sg = _contract_table(a.n, a.k)
    m = np.zeros((math.comb(a.n, a.k - 1), a.n))
    np.add.at(m, (oi, vi), sg * a.coeffs[fi])
    return m


def is_nondegenerate(a: AlternatingForm, tol: float = 1e-9) -> bool:
    """True iff v -> i_v a is injective (numerical rank n).

    Pivots count when their magnitude exceeds ``tol`` times the largest
    absolute coefficient of ``a`` (or ``tol`` itself for the zero form).
    """
    scale = a.max_abs or 1.0
    return matrix_rank(flat_matrix(a), tol * scale) == a.n


# -- pullback and evaluation -----------------------------------------------


@lru_cache(maxsize=None)
def _index_array(n: int, k: int) -> np.ndarray:
    arr = np.array(multi_indices(n, k), dtype=np.intp) - 1
    arr.flags.writeable = False
    return arr


def pullback(g: np.ndarray, a: AlternatingForm) -> AlternatingForm:
    """(g*a)(v1,...,vk) = a(g v1,..., g vk), column convention for g."""
    mat = np.asarray(g, dtype=float)
    if mat.shape != (a.n, a.n):
        raise FormInputError(f"linear map must be {a.n}x{a.n}, got {mat.shape}")
    if a.k == 0:
        return a
    rows = _index_array(a.n, a.k)
    # minors[i, j] = det(g[rows_i, cols_j]); pullback is the transpose action.
    blocks = mat[rows[:, None, :, None], rows[None, :, None, :]]
    minors = np.linalg.det(blocks)
    return AlternatingForm(a.n, a.k, a.coeffs @ minors)


def evaluate(a: AlternatingForm, vectors: Sequence[Sequence[float]]) -> float:
    """Value of the form on k vectors (sum of coefficient-weighted minors)."""
    if a.k == 0:
        return float(a.coeffs[0])
    v = np.column_stack([np.asarray(u, dtype=float).reshape(-1) for u in vectors])
    if v.shape != (a.n, a.k):
        raise FormInputError(f"expected {a.k} vectors of dimension {a.n}")
    mats = v[_index_array(a.n, a.k), :]
    return float(a.coeffs @ np.linalg.det(mats))


def is_invertible(g: np.ndarray, min_det: float = 1e-12) -> bool:
    mat = np.asarray(g, dtype=float)
    return mat.shape[0] == mat.shape[1] and abs(np.linalg.det(mat)) > min_det


# -- approximate comparison --------------------------------------------------


def forms_close(a: AlternatingForm, b: AlternatingForm, tol: float = 1e-9) -> bool:
    """Componentwise equality within tol scaled by the operands' magnitude."""
    if a.n != b.n or a.k != b.k:
        return False
    scale = max(a.max_abs, b.max_abs)
    if scale == 0.0:
        return True
    return bool(np.all(np.abs(a.coeffs - b.coeffs) <= tol * scale))


# -- random inputs (seeded; used by orbit sampling and tests) ----------------


def _as_rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_form(n: int, k: int, rng) -> AlternatingForm:
    """Coefficients uniform in [-1, 1]."""
    r = _as_rng(rng)
    return AlternatingForm(n, k, r.uniform(-1.0, 1.0, math.comb(n, k)))


def random_invertible(n: int, rng, min_det: float = 0.1) -> np.ndarray:
    """Uniform [-1,1] entries, resampled until |det| > min_det."""
    r = _as_rng(rng)
    while True:
        g = r.uniform(-1.0, 1.0, (n, n))
        if abs(np.linalg.det(g)) > min_det:
            return g


# -- form text format ---------------------------------------------------------

_HEADER_RE = re.compile(r"^form\s+n=(\d+)\s+k=(\d+)$")


def parse_form_text(text: str) -> AlternatingForm:
    """Parse the plain-text form format.

    First significant line ``form n=<n> k=<k>``; each further line holds
    k strictly increasing indices and a coefficient.  ``#`` starts a
    comment, blank lines are skipped, repeated multi-indices are an
    error, missing multi-indices default to 0.
    """
    n = k = None
    coeffs = None
    seen: set[tuple[int, ...]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = _HEADER_RE.match(line)
            if not m:
                raise FormInputError(
                    f"line {lineno}: expected header 'form n=<n> k=<k>', got {line!r}"
                )
            n, k = int(m.group(1)), int(m.group(2))
            if k > n:
                raise FormInputError(f"line {lineno}: degree {k} exceeds dimension {n}")
            coeffs = np.zeros(math.comb(n, k))
            continue
        parts = line.split()
        if len(parts) != k + 1:
            raise FormInputError(
                f"line {lineno}: expected {k} indices and a coefficient, got {line!r}"
            )
        try:
            idx = _check_multi_index(n, [int(p) for p in parts[:k]])
        except (ValueError, FormInputError) as exc:
            raise FormInputError(f"line {lineno}: {exc}") from None
        if idx in seen:
            raise FormInputError(f"line {lineno}: repeated multi-index {idx}")
        seen.add(idx)
        try:
            value = float(parts[k])
        except ValueError:
            raise FormInputError(f"line {lineno}: bad coefficient {parts[k]!r}") from None
        coeffs[_rank_table(n, k)[idx]] = value
    if n is None:
        raise FormInputError("empty form text: missing 'form n=<n> k=<k>' header")
    return AlternatingForm(n, k, coeffs)


def format_form_text(a: AlternatingForm) -> str:
    """Inverse of :func:`parse_form_text` (nonzero terms only)."""
    lines = [f"form n={a.n} k={a.k}"]
    for idx, c in a.terms():
        lines.append(" ".join(str(i) for i in idx) + f" {c!r}")
    return "\n".join(lines) + "\n"
