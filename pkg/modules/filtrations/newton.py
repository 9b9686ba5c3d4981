"""
Newton Polyhedron Membership - Exact Rational LP
Integral closure of monomial ideals over a polynomial ring

A monomial x^a lies in the integral closure of I^n exactly when a lies in
n * NP(I), where NP(I) = conv(exponents of I) + R^v_{>=0}. Membership is a
small feasibility problem

    lambda_g >= 0,   sum lambda_g = n,   sum lambda_g * g <= a

solved by a dense Fraction tableau with Bland's rule (no cycling, no
floating point). The polyhedron is never stored as facets.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from modules.monomial_core.engine import (
    ExponentVector,
    MonomialIdeal,
    exponent_vector,
    is_m_primary,
    minimize,
    power,
    standard_monomials,
)
from shared.errors import DomainError, UnsupportedError

logger = logging.getLogger(__name__)


class SimplexTableau:
    """
    Dense tableau for  min c.x  s.t.  A x = b, x >= 0,  b >= 0

    The caller supplies a feasible starting basis (slack or artificial
    columns). Pivoting uses Bland's smallest-index rule.
    """

    def __init__(self, A: List[List[Fraction]], b: List[Fraction], c: List[Fraction], basis: List[int]):
        self.m = len(A)
        self.n = len(c)
        self.A = [list(row) for row in A]
        self.b = list(b)
        self.c = list(c)
        self.basis = list(basis)
        self.pivots = 0
        # reduced costs relative to the starting basis
        self.reduced = list(c)
        self.value = Fraction(0)
        for i, j in enumerate(self.basis):
            cj = self.c[j]
            if cj:
                for k in range(self.n):
                    self.reduced[k] -= cj * self.A[i][k]
                self.value += cj * self.b[i]

    def pivot(self, i: int, j: int):
        piv = self.A[i][j]
        row = [v / piv for v in self.A[i]]
        self.A[i] = row
        self.b[i] = self.b[i] / piv
        for k in range(self.m):
            if k != i and self.A[k][j]:
                f = self.A[k][j]
                self.A[k] = [v - f * w for v, w in zip(self.A[k], row)]
                self.b[k] -= f * self.b[i]
        f = self.reduced[j]
        if f:
            self.reduced = [v - f * w for v, w in zip(self.reduced, row)]
            self.value += f * self.b[i]
        self.basis[i] = j
        self.pivots += 1

    def solve(self) -> str:
        """Run to optimality; returns 'optimal' or 'unbounded'"""
        while True:
            entering = next((j for j in range(self.n) if self.reduced[j] < 0), None)
            if entering is None:
                return 'optimal'
            best = None
            for i in range(self.m):
                if self.A[i][entering] > 0:
                    ratio = self.b[i] / self.A[i][entering]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return 'unbounded'
            self.pivot(best[1], entering)


def _phase_one(points: Sequence[ExponentVector], a: ExponentVector, n: int) -> Tuple[bool, Optional[Tuple[List[Fraction], Fraction]]]:
    """
    Phase-one feasibility of  sum lambda_g g <= a,  sum lambda_g = n

    Columns: lambda_1..lambda_g, slack_1..slack_v, artificial t.
    Minimizing t reaches 0 exactly when the system is feasible. On failure
    the optimal duals give a separating cut (w, c): w >= 0, c <= w.g for
    every generator, and w.a < n*c, so every b with w.b < n*c is outside
    n * NP as well.
    """
    g = len(points)
    v = len(a)
    width = g + v + 1
    A = []
    b = []
    for i in range(v):
        row = [Fraction(p[i]) for p in points] + [Fraction(int(k == i)) for k in range(v)] + [Fraction(0)]
        A.append(row)
        b.append(Fraction(a[i]))
    A.append([Fraction(1)] * g + [Fraction(0)] * v + [Fraction(1)])
    b.append(Fraction(n))
    c = [Fraction(0)] * (width - 1) + [Fraction(1)]
    basis = list(range(g, g + v)) + [width - 1]
    tableau = SimplexTableau(A, b, c, basis)
    status = tableau.solve()
    logger.debug("LP a=%s n=%d: %s after %d pivots, t=%s", a, n, status, tableau.pivots, tableau.value)
    if status == 'optimal' and tableau.value == 0:
        return True, None
    weights = [tableau.reduced[g + k] for k in range(v)]
    threshold = 1 - tableau.reduced[width - 1]
    return False, (weights, threshold)


def _require_polynomial(I: MonomialIdeal):
    if I.ring.is_quotient:
        raise UnsupportedError(
            f"integral closure is only supported over a polynomial ring, not {I.ring.describe()}")
    if not is_m_primary(I):
        raise DomainError(f"{I} is not m-primary in {I.ring.describe()}")


def newton_membership(a: Sequence[int], I: MonomialIdeal, n: int) -> bool:
    """
    Is x^a in the integral closure of I^n?

    Examples:
        a=(2,1), I=(x^3,y^3), n=1 -> True
        a=(1,1), I=(x^2,y^3), n=1 -> False

    Raises:
        UnsupportedError: quotient ambient
        DomainError: I not m-primary or n < 1
    """
    _require_polynomial(I)
    if n < 1:
        raise DomainError(f"Newton membership needs a positive multiple, got {n}")
    vec = exponent_vector(a, I.nvars)
    if any(all(x <= y for x, y in zip(gen, vec)) for gen in I.generators) and n == 1:
        return True
    return _phase_one(I.generators, vec, n)[0]


def integral_closure_power(I: MonomialIdeal, n: int) -> MonomialIdeal:
    """
    Integral closure of I^n

    Every minimal generator lies in the pure-power box of I^n (anything
    outside is already in I^n), so the standard monomials of I^n are the
    only candidates. Candidates lying over a confirmed member skip the LP, and
    so do candidates cut off by an earlier infeasibility certificate.
    """
    _require_polynomial(I)
    return _closure_cached(I, n)


@lru_cache(maxsize=1024)
def _closure_cached(I: MonomialIdeal, n: int) -> MonomialIdeal:
    if n <= 0:
        return power(I, 0)
    In = power(I, n)
    found: List[ExponentVector] = []
    cuts = []
    for a in sorted(standard_monomials(In), key=lambda p: (sum(p), p)):
        if any(all(x <= y for x, y in zip(m, a)) for m in found):
            continue
        if any(sum(w * x for w, x in zip(weights, a)) < n * threshold for weights, threshold in cuts):
            continue
        inside, cut = _phase_one(I.generators, a, n)
        if inside:
            found.append(a)
        else:
            cuts.append(cut)
    logger.debug("closure of %s^%d: %d new generators, %d cuts", I, n, len(found), len(cuts))
    return MonomialIdeal(I.ring, minimize(list(In.generators) + found))


def integral_closure(I: MonomialIdeal) -> MonomialIdeal:
    """
    Examples:
        (x^3, y^3) -> (x^3, x^2*y, x*y^2, y^3)
        (x^2, y^3) -> (x^2, x*y^2, y^3)
    """
    return integral_closure_power(I, 1)

