"""Closed-form amplitude polynomials of transit count vectors.

Every family of wave paths sharing a transit count vector ``k`` contributes
a single polynomial amplitude ``a(x, k)`` in the reflection coefficients
x_0..x_M.  The polynomial is a sum over the branch-count box V(k) (see
:func:`layerwave.lattice.branch_box`): with ``kt`` the left shift of ``k``
and ``u = min(1, kt)``,

    a(x, k) = sum over b in V(k) of
              C(k, b) * C(kt - u, b - u) * (-x)^(kt - b) * x^(k - b) * y^(2b)

where C is the entrywise product of binomial coefficients and
y_n^2 = 1 - x_n^2.  The squared-transmission factors y only ever occur
through y^2, so evaluation needs no square roots and is exact on rational
input.  Each term has total degree 2|k| - 1, counting y-degree doubly, and
integer coefficients (kept exact here by Python integers; no overflow is
possible).
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

from .core import Scalar
from .errors import ValidationError
from .lattice import TransitCount, branch_box, is_transit_count, left_shift


@dataclass(frozen=True)
class AmplitudeTerm:
    """One monomial: coeff * prod x_n^x_exponents[n] * (1-x_n^2)^q_exponents[n]."""

    coeff: int
    x_exponents: tuple[int, ...]
    q_exponents: tuple[int, ...]


def amplitude_terms(k: Sequence[int]) -> list[AmplitudeTerm]:
    """Expand a(x, k) into its terms, one per branch-count vector.

    Terms are ordered lexicographically in the branch-count vector b; the
    box is never empty, and no coefficient vanishes.
    """
    u, hi = branch_box(k)
    kt = left_shift(k)
    terms = []
    for b in itertools.product(*(range(lo, h + 1) for lo, h in zip(u, hi))):
        coeff = 1
        for kn, bn in zip(k, b):
            coeff *= math.comb(kn, bn)
        parity = 0
        for ktn, un, bn in zip(kt, u, b):
            coeff *= math.comb(ktn - un, bn - un)
            parity += ktn - bn
        if parity & 1:
            coeff = -coeff
        x_exp = tuple((ktn - bn) + (kn - bn) for kn, ktn, bn in zip(k, kt, b))
        terms.append(AmplitudeTerm(coeff, x_exp, b))
    return terms


def amplitude_eval(x: Sequence[Scalar], k: Sequence[int]) -> Scalar:
    """Evaluate a(x, k); exact when x is rational.

    Powers of x_n and of (1 - x_n^2) are built once per call by repeated
    multiplication, so the float result is reproducible and the cost is
    O(|V(k)| * M) past the table setup.
    """
    if len(x) != len(k):
        raise ValidationError(
            f"x has {len(x)} entries but k has {len(k)}")
    u, hi = branch_box(k)
    kt = left_shift(k)
    one = 1 if not isinstance(x[0], float) else 1.0

    xmax = [kn + ktn for kn, ktn in zip(k, kt)]
    xpow, qpow = [], []
    for xn, xm, h in zip(x, xmax, hi):
        row = [one]
        for _ in range(xm):
            row.append(row[-1] * xn)
        xpow.append(row)
        qn = one - xn * xn
        qrow = [one]
        for _ in range(h):
            qrow.append(qrow[-1] * qn)
        qpow.append(qrow)

    total = 0 if one == 1 else 0.0
    for b in itertools.product(*(range(lo, h + 1) for lo, h in zip(u, hi))):
        coeff = 1
        for kn, bn in zip(k, b):
            coeff *= math.comb(kn, bn)
        parity = 0
        for ktn, un, bn in zip(kt, u, b):
            coeff *= math.comb(ktn - un, bn - un)
            parity += ktn - bn
        if parity & 1:
            coeff = -coeff
        xf = one
        qf = one
        for n, bn in enumerate(b):
            xf = xf * xpow[n][(kt[n] - bn) + (k[n] - bn)]
            qf = qf * qpow[n][bn]
        total = total + coeff * xf * qf
    return total


def eval_batch(x: Sequence[Scalar], ks: Sequence[TransitCount]) -> list[Scalar]:
    """Pure-Python batch evaluation (the fallback behind the compiled kernel)."""
    return [amplitude_eval(x, k) for k in ks]


def redundancy_ratio_check(k: Sequence[int], n: int) -> TransitCount | None:
    """Partner vector k + e_n when k has three consecutive ones at n-1, n, n+1.

    For such pairs the amplitude polynomials are proportional:
    a(x, k') / a(x, k) = -2 * x_{n-1} * x_n identically.  Returns None when
    the pattern does not hold.
    """
    if not is_transit_count(k):
        raise ValidationError(f"{k} is not a transit count vector")
    layers = len(k) - 1
    if not 1 <= n <= layers - 1:
        raise ValidationError(f"index {n} outside 1..{layers - 1}")
    if k[n - 1] == 1 and k[n] == 1 and k[n + 1] == 1:
        return tuple(v + 1 if i == n else v for i, v in enumerate(k))
    return None


def write_terms_csv(k: Sequence[int], fp: TextIO) -> None:
    """Symbolic dump: coefficient, x exponents, q = (1-x^2) exponents."""
    width = len(k)
    writer = csv.writer(fp)
    writer.writerow(["coeff"] + [f"x{i}" for i in range(width)]
                    + [f"q{i}" for i in range(width)])
    for term in amplitude_terms(k):
        writer.writerow([term.coeff] + list(term.x_exponents)
                        + list(term.q_exponents))
