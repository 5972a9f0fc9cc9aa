"""Numeric sweeps for the two eigenvalue inequalities and the divisor gap.

Both inequalities are evaluated in floating point with the eigenvalue bounds
from :func:`mubnet.rigidity.lambda_gap`; a strict inequality is accepted only
with a margin of ``SLACK``.  Margins under ``TIGHT`` are listed so they can be
re-examined exactly.  The divisor statements use integer arithmetic only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .rigidity import lambda_gap

SLACK = 1e-12
TIGHT = 1e-9
PROP_DMAX_CAP = 100_000


class DomainError(ValueError):
    pass


def _domain(d: int, k: int) -> None:
    if k < 2 or k * k > d:
        raise DomainError(f"need 2 <= k <= sqrt(d), got d={d}, k={k}")


def lemma_a1_sides(d: int, k: int) -> tuple[float, float]:
    """(LHS, RHS) of sqrt((d-1)(k-2))/(d-2) < g/(1+g), g = d lambda_+ / (d-1)."""
    _domain(d, k)
    lp = lambda_gap(d, k).lambda_plus
    g = d / (d - 1) * lp
    return math.sqrt((d - 1) * (k - 2)) / (d - 2), g / (1 + g)


def lemma_a2_sides(d: int, k: int) -> tuple[float, float]:
    """(LHS, RHS) of sqrt(k-2)(k-1)/sqrt(k) < (d - 2 - d lambda_-)/sqrt(d-1)."""
    _domain(d, k)
    lm = lambda_gap(d, k).lambda_minus
    return math.sqrt(k - 2) * (k - 1) / math.sqrt(k), (d - 2 - d * lm) / math.sqrt(d - 1)


def check_lemma_A1(d: int, k: int) -> bool:
    lhs, rhs = lemma_a1_sides(d, k)
    return lhs + SLACK < rhs


def check_lemma_A2(d: int, k: int) -> bool:
    lhs, rhs = lemma_a2_sides(d, k)
    return lhs + SLACK < rhs


def divisor_gap(d: int) -> int:
    """d minus the largest divisor of d^2 below d (exhaustive scan)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    sq = d * d
    for c in range(d - 1, 0, -1):
        if sq % c == 0:
            return d - c
    raise AssertionError("unreachable: 1 divides d^2")


def f_ratio_ok(d: int) -> bool:
    """0 < j^2/(d-j) < 1 for every integer 1 <= j <= sqrt(d) - 1 (exact)."""
    j = 1
    while (j + 1) * (j + 1) <= d:
        f = Fraction(j * j, d - j)
        if not 0 < f < 1:
            return False
        j += 1
    return True


# ---------------------------------------------------------------------------
# sweeps


def _lemma_arrays(d_max: int):
    """Vectorised sides for all 4 <= d <= d_max, 2 <= k <= sqrt(d)."""
    ds, ks = [], []
    for k in range(2, math.isqrt(d_max) + 1):
        d = np.arange(max(4, k * k), d_max + 1)
        ds.append(d)
        ks.append(np.full(len(d), k))
    d = np.concatenate(ds).astype(float)
    k = np.concatenate(ks).astype(float)
    disc = (d - 2) ** 2 - 4 * (d - 1) * (k - 3 + 1 / k)
    s = np.sqrt(disc)
    lp = (d - 2 + s) / (2 * d)
    lm = (d - 2 - s) / (2 * d)
    g = d / (d - 1) * lp
    a1 = (np.sqrt((d - 1) * (k - 2)) / (d - 2), g / (1 + g))
    a2 = (np.sqrt(k - 2) * (k - 1) / np.sqrt(k), (d - 2 - d * lm) / np.sqrt(d - 1))
    return d.astype(int), k.astype(int), disc, a1, a2


@dataclass(frozen=True)
class SweepReport:
    d_max: int
    prop_d_max: int
    lemma_a1_checked: int
    lemma_a1_violations: tuple[tuple[int, int], ...]
    lemma_a2_checked: int
    lemma_a2_violations: tuple[tuple[int, int], ...]
    prop_a3_checked: int
    prop_a3_violations: tuple[int, ...]
    tight: tuple[tuple[str, int, int, float], ...] = field(default=())
    monotone_violations: tuple[tuple[str, int, int], ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not (self.lemma_a1_violations or self.lemma_a2_violations
                    or self.prop_a3_violations or self.monotone_violations)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "lemmaA1": {"range": {"d": [4, self.d_max], "k": "2..isqrt(d)"},
                        "checked": self.lemma_a1_checked,
                        "violations": [list(v) for v in self.lemma_a1_violations]},
            "lemmaA2": {"range": {"d": [4, self.d_max], "k": "2..isqrt(d)"},
                        "checked": self.lemma_a2_checked,
                        "violations": [list(v) for v in self.lemma_a2_violations]},
            "propA3": {"range": {"d": [2, self.prop_d_max]},
                       "checked": self.prop_a3_checked,
                       "violations": list(self.prop_a3_violations)},
            "monotonicity": {"violations": [list(v) for v in self.monotone_violations]},
            "tight": [list(t) for t in self.tight],
        }


def sweep(d_max: int, prop_d_max: Optional[int] = None) -> SweepReport:
    """Both lemmas over 4 <= d <= d_max, and the divisor gap over
    2 <= d <= prop_d_max (default min(d_max^2, 10^5))."""
    if d_max < 4:
        raise ValueError("d_max must be at least 4")
    if prop_d_max is None:
        prop_d_max = min(d_max * d_max, PROP_DMAX_CAP)
    d, k, disc, a1, a2 = _lemma_arrays(d_max)
    if np.any(disc < 0):
        raise AssertionError("negative discriminant inside the lemma domain")
    bad1 = ~(a1[0] + SLACK < a1[1])
    bad2 = ~(a2[0] + SLACK < a2[1])
    tight = []
    for name, (lhs, rhs) in (("A1", a1), ("A2", a2)):
        for i in np.flatnonzero(np.abs(rhs - lhs) < TIGHT):
            tight.append((name, int(d[i]), int(k[i]), float(rhs[i] - lhs[i])))

    # monotonicity in k for fixed d: A1 RHS non-increasing, LHS non-decreasing
    mono = []
    order = np.lexsort((k, d))
    ds, rhs1, lhs1 = d[order], a1[1][order], a1[0][order]
    same = ds[1:] == ds[:-1]
    for i in np.flatnonzero(same & (rhs1[1:] > rhs1[:-1] + SLACK)):
        mono.append(("A1_rhs", int(ds[i]), int(k[order][i + 1])))
    for i in np.flatnonzero(same & (lhs1[1:] + SLACK < lhs1[:-1])):
        mono.append(("A1_lhs", int(ds[i]), int(k[order][i + 1])))

    gaps = kernels.divisor_gaps(prop_d_max)
    prop_bad = tuple(dd for dd in range(2, prop_d_max + 1) if gaps[dd] < math.isqrt(dd))
    return SweepReport(
        d_max, prop_d_max,
        len(d), tuple((int(d[i]), int(k[i])) for i in np.flatnonzero(bad1)),
        len(d), tuple((int(d[i]), int(k[i])) for i in np.flatnonzero(bad2)),
        prop_d_max - 1, prop_bad, tuple(tight), tuple(mono))
