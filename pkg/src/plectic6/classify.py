"""Linear-type classification of 3-forms on R^6.

For a 3-form ``a`` and a volume form ``W`` on R^6, the assignment
``v -> (i_v a) ^ a`` produces degree-5 forms, and degree-5 forms
correspond to vectors once ``W`` is fixed (``i_v W`` runs over all of
them).  The resulting 6x6 matrix ``A`` satisfies

    trace(A @ A) = lam,

and the sign of ``lam`` does not depend on the choice of ``W``.  It is a
GL(6)-invariant that separates the non-degenerate 3-forms into exactly
three orbits, with canonical representatives

    type_i   (lam > 0):  dx^123 + dx^456
    type_ii  (lam < 0):  dx^135 - dx^146 - dx^236 - dx^245
    type_iii (lam = 0):  dx^156 - dx^246 + dx^345

After rescaling, ``K = A / sqrt(|lam|/6)`` squares to +id (lam > 0,
a paracomplex structure) or -id (lam < 0, a complex structure); the
constructive normalizer below exploits that to produce an explicit
basis change onto the canonical representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .forms import (
    AlternatingForm,
    FormInputError,
    contract,
    evaluate,
    form_from_terms,
    is_nondegenerate,
    multi_index_rank,
    pullback,
    random_invertible,
    standard_volume,
    wedge,
)
from .linalg import matrix_rank, null_space

__all__ = [
    "Classification",
    "DEGENERATE",
    "HitchinEndo",
    "NORMAL_FORM_TAGS",
    "NormalizationError",
    "TYPE_I",
    "TYPE_II",
    "TYPE_III",
    "UnsupportedTypeError",
    "build_J",
    "classify",
    "lambda_invariant",
    "normal_form",
    "normalize",
    "random_orbit_sample",
    "volume_coordinates",
]

TYPE_I = "type_i"
TYPE_II = "type_ii"
TYPE_III = "type_iii"
DEGENERATE = "degenerate"

NORMAL_FORM_TAGS = (TYPE_I, TYPE_II, TYPE_III)

_NORMAL_FORM_TERMS = {
    TYPE_I: {(1, 2, 3): 1.0, (4, 5, 6): 1.0},
    TYPE_II: {(1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): -1.0},
    TYPE_III: {(1, 5, 6): 1.0, (2, 4, 6): -1.0, (3, 4, 5): 1.0},
}


class UnsupportedTypeError(Exception):
    """Operation not defined for this linear type (e.g. normalizing type_iii)."""


class NormalizationError(RuntimeError):
    """No candidate basis change passed post-hoc verification.

    Carries ``best_map`` / ``best_residual`` with the closest attempt, so
    callers can report how far off the search ended up.
    """

    def __init__(self, message: str, best_map=None, best_residual=None):
        super().__init__(message)
        self.best_map = best_map
        self.best_residual = best_residual


@dataclass(frozen=True)
class HitchinEndo:
    """Endomorphism part A of v -> (i_v a) ^ a, relative to a volume form."""

    endo: np.ndarray
    volume: AlternatingForm


@dataclass(frozen=True)
class Classification:
    """Trace invariant plus the resulting type tag."""

    lam: float
    tag: str
    tol: float


def _default_volume(omega: Optional[AlternatingForm]) -> AlternatingForm:
    return standard_volume(6) if omega is None else omega


def _check_three_form(a: AlternatingForm) -> None:
    if a.n != 6 or a.k != 3:
        raise FormInputError(f"expected a 3-form on R^6, got degree {a.k} on R^{a.n}")


def _check_volume(omega: AlternatingForm) -> float:
    if omega.n != 6 or omega.k != 6:
        raise FormInputError("volume form must have degree 6 on R^6")
    c = float(omega.coeffs[0])
    if c == 0.0:
        raise FormInputError("volume form is zero")
    return c


def volume_coordinates(b: AlternatingForm, omega: AlternatingForm) -> np.ndarray:
    """The unique v with i_v omega = b, for a degree-(n-1) form b.

    On monomials, ``i_{e_j} omega = (-1)**(j-1) * omega_coeff * dx^{..no j..}``
    fixes every sign.
    """
    c = _check_volume(omega)
    if b.n != omega.n or b.k != omega.n - 1:
        raise FormInputError("first argument must have degree n-1 in the same dimension")
    n = omega.n
    v = np.empty(n)
    for j in range(1, n + 1):
        complement = tuple(i for i in range(1, n + 1) if i != j)
        sign = -1.0 if (j - 1) % 2 else 1.0
        v[j - 1] = sign * b.coeffs[multi_index_rank(n, complement)] / c
    return v


def build_J(a: AlternatingForm, omega: Optional[AlternatingForm] = None) -> HitchinEndo:
    """Matrix of v -> (i_v a) ^ a in volume coordinates (column convention).

    Defined for any 3-form; non-degeneracy is not required.
    """
    _check_three_form(a)
    omega = _default_volume(omega)
    _check_volume(omega)
    cols = []
    for j in range(1, 7):
        e = np.zeros(6)
        e[j - 1] = 1.0
        cols.append(volume_coordinates(wedge(contract(e, a), a), omega))
    return HitchinEndo(np.column_stack(cols), omega)


def lambda_invariant(a: AlternatingForm, omega: Optional[AlternatingForm] = None) -> float:
    """trace(A @ A) for the endomorphism relative to ``omega``.

    Quartic in the coefficients of ``a``; rescaling the volume form by c
    rescales the value by 1/c^2, leaving its sign alone.
    """
    endo = build_J(a, omega).endo
    return float(np.trace(endo @ endo))


def classify(
    a: AlternatingForm,
    omega: Optional[AlternatingForm] = None,
    tol: float = 1e-9,
) -> Classification:
    """Type tag by the sign of the trace invariant.

    The zero band |lam| <= tol * scale**4 / vol**2 (scale the largest
    absolute coefficient of ``a``, vol the volume coefficient) keeps the
    verdict invariant under rescaling either input.  Degenerate forms get
    the ``degenerate`` tag, never an error.
    """
    _check_three_form(a)
    omega = _default_volume(omega)
    vol = abs(_check_volume(omega))
    lam = lambda_invariant(a, omega)
    if not is_nondegenerate(a, tol):
        return Classification(lam, DEGENERATE, tol)
    threshold = tol * a.max_abs**4 / vol**2
    if lam > threshold:
        tag = TYPE_I
    elif lam < -threshold:
        tag = TYPE_II
    else:
        tag = TYPE_III
    return Classification(lam, tag, tol)


def normal_form(tag: str) -> AlternatingForm:
    """Canonical representative of a non-degenerate orbit."""
    if tag not in _NORMAL_FORM_TERMS:
        raise FormInputError(f"unknown normal-form tag {tag!r}")
    return form_from_terms(6, 3, _NORMAL_FORM_TERMS[tag])


def random_orbit_sample(tag: str, seed: int) -> AlternatingForm:
    """Pullback of a normal form along a seeded random map with |det| > 0.1."""
    rng = np.random.default_rng(seed)
    return pullback(random_invertible(6, rng), normal_form(tag))


# -- constructive normalizer -------------------------------------------------


def normalize(
    a: AlternatingForm,
    omega: Optional[AlternatingForm] = None,
    tol: float = 1e-6,
) -> np.ndarray:
    """A map g with pullback(g, a) equal to the orbit's normal form.

    Only the open orbits (type_i, type_ii) are supported.  The result is
    always verified post hoc: the max-abs residual against the normal
    form must come out <= tol, otherwise the deterministic retry
    branches (sign of K, basis orientation) are exhausted and
    :class:`NormalizationError` is raised -- never a silent wrong answer.
    """
    omega = _default_volume(omega)
    cls = classify(a, omega)
    if cls.tag not in (TYPE_I, TYPE_II):
        raise UnsupportedTypeError(
            f"normalization is implemented for type_i and type_ii forms only, got {cls.tag}"
        )
    endo = build_J(a, omega).endo
    k_mat = endo / math.sqrt(abs(cls.lam) / 6.0)
    target = normal_form(cls.tag)
    candidates = (
        _paracomplex_candidates(a, k_mat)
        if cls.tag == TYPE_I
        else _complex_candidates(a, k_mat)
    )
    best_map = None
    best_res = math.inf
    for g in candidates:
        res = float(np.max(np.abs(pullback(g, a).coeffs - target.coeffs)))
        if res <= tol:
            return g
        if res < best_res:
            best_map, best_res = g, res
    raise NormalizationError(
        f"no basis change reached residual <= {tol} (best {best_res:.3e})",
        best_map=best_map,
        best_residual=best_res,
    )


def _paracomplex_candidates(a: AlternatingForm, k_mat: np.ndarray) -> Iterator[np.ndarray]:
    """K^2 = +id: split into the +-1 eigenspaces and scale the top forms to 1.

    The restriction of ``a`` to each 3-dimensional eigenspace is a top
    form there; dividing one basis vector by its value makes both
    restrictions the standard determinant, and mixed evaluations vanish
    on this orbit, so the assembled basis pulls ``a`` back to
    dx^123 + dx^456 exactly.
    """
    eye = np.eye(6)
    for k_signed in (k_mat, -k_mat):
        ntol = 1e-8 * max(1.0, float(np.max(np.abs(k_signed))))
        plus = null_space(k_signed - eye, ntol)
        minus = null_space(k_signed + eye, ntol)
        if plus.shape[1] != 3 or minus.shape[1] != 3:
            continue
        for swap in (False, True):
            u = plus[:, [0, 2, 1]] if swap else plus
            c_plus = evaluate(a, (u[:, 0], u[:, 1], u[:, 2]))
            c_minus = evaluate(a, (minus[:, 0], minus[:, 1], minus[:, 2]))
            if abs(c_plus) < 1e-300 or abs(c_minus) < 1e-300:
                continue
            yield np.column_stack(
                (
                    u[:, 0] / c_plus,
                    u[:, 1],
                    u[:, 2],
                    minus[:, 0] / c_minus,
                    minus[:, 1],
                    minus[:, 2],
                )
            )


def _complex_candidates(a: AlternatingForm, k_mat: np.ndarray) -> Iterator[np.ndarray]:
    """K^2 = -id: adapt a basis to the complex structure J = +-K.

    Complex-trilinear alternating forms on a 3-dimensional complex space
    form a single complex line, so Psi(u,v,w) = a(u,v,w) - i*a(Ju,v,w)
    is pinned down by its value c on any J-basis (u1,u2,u3).  Scaling u1
    by 1/c (complex scalar action: mu*u = Re(mu) u + Im(mu) Ju) makes
    Psi the standard pattern, and the real basis (u1, Ju1, u2, Ju2, u3,
    Ju3) then realizes dx^135 - dx^146 - dx^236 - dx^245.
    """
    for sigma in (-1.0, 1.0):
        j_mat = sigma * k_mat
        basis = _complex_basis(j_mat)
        if basis is None:
            continue
        u1, u2, u3 = basis
        for swap in (False, True):
            v2, v3 = (u3, u2) if swap else (u2, u3)
            c = complex(evaluate(a, (u1, v2, v3)), -evaluate(a, (j_mat @ u1, v2, v3)))
            if abs(c) < 1e-300:
                continue
            mu = 1.0 / c
            w1 = mu.real * u1 + mu.imag * (j_mat @ u1)
            yield np.column_stack((w1, j_mat @ w1, v2, j_mat @ v2, v3, j_mat @ v3))


def _complex_basis(j_mat: np.ndarray):
    """Greedy basis (u1, u2, u3) with (u1, Ju1, ..., u3, Ju3) spanning R^6."""
    chosen: list[np.ndarray] = []
    for j in range(6):
        e = np.zeros(6)
        e[j] = 1.0
        trial = chosen + [e, j_mat @ e]
        m = np.column_stack(trial)
        if matrix_rank(m, 1e-8 * max(1.0, float(np.max(np.abs(m))))) == len(trial):
            chosen = trial
            if len(chosen) == 6:
                return chosen[0], chosen[2], chosen[4]
    return None
