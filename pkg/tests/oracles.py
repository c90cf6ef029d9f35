"""Brute-force reference implementations used to cross-check the library.

Everything here works from first principles on (multi-index -> coefficient)
dictionaries: form values are permutation sums, the wedge is the alternation
of the tensor product with the determinant normalization, and pullback is
evaluation on mapped vectors.  Deliberately slow and index-by-index; no code
is shared with the package under test.
"""

import itertools
import math


def perm_sign(perm):
    """Parity of a permutation given as a tuple of 0-based positions."""
    inversions = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inversions % 2 else 1


def basis_value(indices, vectors):
    """dx^{i1...ik} evaluated on k vectors, as an explicit permutation sum."""
    k = len(indices)
    total = 0.0
    for perm in itertools.permutations(range(k)):
        product = 1.0
        for slot, which in enumerate(perm):
            product *= vectors[which][indices[slot] - 1]
        total += perm_sign(perm) * product
    return total


def form_value(terms, vectors):
    """Value of sum(c_I dx^I) on a list of vectors."""
    return sum(c * basis_value(idx, vectors) for idx, c in terms.items())


def wedge_value(p, q, terms_a, terms_b, vectors):
    """(a ^ b)(v_1..v_{p+q}) via the shuffle-free alternation formula."""
    total = 0.0
    for perm in itertools.permutations(range(p + q)):
        first = [vectors[i] for i in perm[:p]]
        second = [vectors[i] for i in perm[p:]]
        total += perm_sign(perm) * form_value(terms_a, first) * form_value(terms_b, second)
    return total / (math.factorial(p) * math.factorial(q))


def wedge_coefficients(n, p, q, terms_a, terms_b):
    """Coefficient dictionary of a ^ b, by evaluating on basis vectors."""
    out = {}
    for idx in itertools.combinations(range(1, n + 1), p + q):
        basis = [[1.0 if row == i - 1 else 0.0 for row in range(n)] for i in idx]
        value = wedge_value(p, q, terms_a, terms_b, basis)
        if value != 0.0:
            out[idx] = value
    return out


def contract_value(terms, v, vectors):
    """(i_v a)(w_1..w_{k-1}) = a(v, w_1, ..., w_{k-1})."""
    return form_value(terms, [v] + list(vectors))


def pullback_value(terms, g, vectors):
    """(g* a)(v_1..v_k) = a(g v_1, ..., g v_k); g acts by columns."""
    n = len(g)
    mapped = [
        [sum(g[row][col] * vec[col] for col in range(n)) for row in range(n)]
        for vec in vectors
    ]
    return form_value(terms, mapped)
