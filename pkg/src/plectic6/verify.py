"""Built-in verification suite for the package's reference values.

Each item re-derives one block of the library's published reference
numbers from scratch: the six contraction 2-forms of the one-parameter
family alpha^t, its endomorphism matrix and trace invariant, the
classification of the three normal forms, and the sign rule of the
three-point scan.  Failures come back as report content, never as
exceptions, so a broken build still produces a readable FAIL list.

The contraction item goes through the module attribute
``forms.contract`` on purpose: rebinding that single symbol is enough
to poison this item while leaving the rest of the suite intact, which
is what the mutation check in the test suite exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import forms
from .classify import NORMAL_FORM_TAGS, build_J, classify, lambda_invariant, normal_form
from .expressions import parse_expr
from .fields import GridSpec, OmegaF, detect_obstruction, scan
from .forms import AlternatingForm

__all__ = ["VerifyItem", "alpha_family", "run_verification"]


@dataclass(frozen=True)
class VerifyItem:
    name: str
    passed: bool
    details: str


def alpha_family(t: float) -> AlternatingForm:
    """The 3-form dx^135 - dx^146 - dx^236 + t dx^245."""
    return forms.form_from_terms(
        6,
        3,
        {(1, 3, 5): 1.0, (1, 4, 6): -1.0, (2, 3, 6): -1.0, (2, 4, 5): float(t)},
    )


def _expected_contraction(j: int, t: float) -> AlternatingForm:
    table = {
        1: {(3, 5): 1.0, (4, 6): -1.0},
        2: {(3, 6): -1.0, (4, 5): t},
        3: {(1, 5): -1.0, (2, 6): 1.0},
        4: {(1, 6): 1.0, (2, 5): -t},
        5: {(1, 3): 1.0, (2, 4): t},
        6: {(1, 4): -1.0, (2, 3): -1.0},
    }
    return forms.form_from_terms(6, 2, table[j])


def _expected_endo(t: float) -> np.ndarray:
    return np.array(
        [
            [0.0, -2.0 * t, 0.0, 0.0, 0.0, 0.0],
            [-2.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -2.0 * t, 0.0, 0.0],
            [0.0, 0.0, -2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 2.0],
            [0.0, 0.0, 0.0, 0.0, 2.0 * t, 0.0],
        ]
    )


def _check_contractions() -> VerifyItem:
    for t in (-1.0, 1.0, 2.0):
        a = alpha_family(t)
        for j in range(1, 7):
            e = np.zeros(6)
            e[j - 1] = 1.0
            got = forms.contract(e, a)
            want = _expected_contraction(j, t)
            if not np.array_equal(got.coeffs, want.coeffs):
                return VerifyItem(
                    "contractions",
                    False,
                    f"i_e{j} alpha^{t:g} = {got}, expected {want}",
                )
    return VerifyItem(
        "contractions",
        True,
        "all six contraction 2-forms coefficient-exact for t in {-1, 1, 2}",
    )


def _check_endomorphism() -> VerifyItem:
    worst_entry = 0.0
    worst_square = 0.0
    for t in (-1.0, 0.0, 1.0, 2.0):
        endo = build_J(alpha_family(t)).endo
        worst_entry = max(worst_entry, float(np.max(np.abs(endo - _expected_endo(t)))))
        square_dev = np.abs(endo @ endo - 4.0 * t * np.eye(6))
        worst_square = max(worst_square, float(np.max(square_dev)))
    passed = worst_entry <= 1e-12 and worst_square <= 1e-9
    return VerifyItem(
        "endomorphism-matrix",
        passed,
        f"max entry deviation {worst_entry:.2e} (tol 1e-12), "
        f"max A^2 - 4t*id deviation {worst_square:.2e} (tol 1e-9), t in {{-1, 0, 1, 2}}",
    )


def _check_trace_invariant() -> VerifyItem:
    worst = 0.0
    for t in (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0):
        lam = lambda_invariant(alpha_family(t))
        dev = abs(lam - 24.0 * t) / max(1.0, abs(24.0 * t))
        worst = max(worst, dev)
    if worst > 1e-9:
        return VerifyItem(
            "trace-invariant", False, f"lambda(alpha^t) off by {worst:.2e} relative"
        )
    lam_ii = lambda_invariant(normal_form("type_ii"))
    if lam_ii != -24.0:
        return VerifyItem(
            "trace-invariant", False, f"lambda of the type_ii normal form is {lam_ii!r}"
        )
    return VerifyItem(
        "trace-invariant",
        True,
        f"lambda(alpha^t) = 24t within {worst:.2e} relative over 7 values; "
        "type_ii normal form gives -24 exactly",
    )


def _check_normal_forms() -> VerifyItem:
    for tag in NORMAL_FORM_TAGS:
        got = classify(normal_form(tag)).tag
        if got != tag:
            return VerifyItem(
                "normal-form-classification",
                False,
                f"normal form {tag} classified as {got}",
            )
    return VerifyItem(
        "normal-form-classification",
        True,
        "all three normal forms classify back to their own tags",
    )


def _check_scan_sign_rule() -> VerifyItem:
    field = OmegaF(parse_expr("x2"))
    grid = GridSpec.from_string("0,-1:1:1,0,0,0,0")
    report = scan(field, grid)
    tags = [rec.tag for rec in report.points]
    lams = [rec.lam for rec in report.points]
    want_tags = ["type_ii", "type_iii", "type_i"]
    want_lams = [-24.0, 0.0, 24.0]
    if tags != want_tags:
        return VerifyItem("scan-sign-rule", False, f"tags {tags}, expected {want_tags}")
    lam_dev = max(
        abs(lam - want) / max(1.0, abs(want)) for lam, want in zip(lams, want_lams)
    )
    if lam_dev > 1e-9:
        return VerifyItem(
            "scan-sign-rule", False, f"lambda values off by {lam_dev:.2e} relative"
        )
    verdict = detect_obstruction(report, np.zeros(6))
    if not verdict.obstruction:
        return VerifyItem(
            "scan-sign-rule", False, "no obstruction witnessed at the origin"
        )
    return VerifyItem(
        "scan-sign-rule",
        True,
        "f(x) = x2 gives tags (ii, iii, i) with lambda (-24, 0, 24) and an "
        "obstruction witness at the origin",
    )


_CHECKS = (
    _check_contractions,
    _check_endomorphism,
    _check_trace_invariant,
    _check_normal_forms,
    _check_scan_sign_rule,
)


def run_verification() -> list:
    """Run every verification item, trapping exceptions as failures."""
    items = []
    for check in _CHECKS:
        try:
            items.append(check())
        except Exception as exc:  # a crash is a failure, not an abort
            name = check.__name__.removeprefix("_check_").replace("_", "-")
            items.append(VerifyItem(name, False, f"raised {exc!r}"))
    return items
