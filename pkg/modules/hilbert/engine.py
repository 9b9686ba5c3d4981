"""
Hilbert Engine - Functions, Polynomials and Defect Tables
Fits P_F exactly in the binomial basis and derives the tables built on it:
postulation numbers, chi = P - H, dimension-two cohomology lengths and
Ratliff-Rush torsion lengths
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd
import sympy

from config.modules_config import get_setting
from modules.filtrations.engine import (
    FiltrationSpec,
    MultiIndex,
    graded_piece,
    rr_closed_filtration,
)
from modules.hilbert.binomial_basis import (
    Alpha,
    evaluate_multi,
    evaluate_uni,
    multi_basis_row,
    multi_exponents,
    uni_basis_row,
    uni_to_alpha,
)
from modules.monomial_core.engine import colength, intersect
from shared.errors import FitError, InputError, UnsupportedError

logger = logging.getLogger(__name__)


def index_columns(arity: int) -> List[str]:
    return ['n'] if arity == 1 else [f"n{i + 1}" for i in range(arity)]


# ============================================================================
# RESULT TYPES
# ============================================================================

@dataclass
class HilbertSummary:
    """
    Fitted Hilbert polynomial of a filtration

    coefficients maps alpha -> e_alpha. For univariate filtrations alpha is
    (d - i,), so e_i sits at key (d - i,) and `e` gives the plain tuple.
    postulation_number is None either for s > 1 or when P = H everywhere.
    """
    filtration: str
    arity: int
    dimension: int
    function_table: Dict[MultiIndex, int]
    polynomial: Dict[Alpha, Fraction]
    coefficients: Dict[Alpha, int]
    fit_certificate: Dict[str, object]
    postulation_number: Optional[int] = None

    @property
    def e(self) -> Tuple[int, ...]:
        if self.arity != 1:
            raise InputError("e_i is defined for Z-graded filtrations; use coefficients for e_alpha")
        d = self.dimension
        return tuple(self.coefficients[(d - i,)] for i in range(d + 1))

    def coefficient(self, alpha) -> int:
        if isinstance(alpha, int):
            alpha = (self.dimension - alpha,)
        return self.coefficients.get(tuple(alpha), 0)

    def evaluate(self, n) -> int:
        """P(n), polynomially extended to every integer index"""
        if self.arity == 1:
            k = n[0] if isinstance(n, tuple) else n
            return int(evaluate_uni(self.e, k))
        return int(evaluate_multi(self.coefficients, tuple(n), self.dimension))

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for alpha in multi_exponents(self.arity, self.dimension):
            label = f"e_{self.dimension - alpha[0]}" if self.arity == 1 else f"e_{alpha}"
            rows.append({'coefficient': label, 'alpha': str(alpha), 'value': self.coefficients[alpha]})
        return pd.DataFrame(rows, columns=['coefficient', 'alpha', 'value'])


@dataclass
class DefectTable:
    """chi(n) = P(n) - H(n) over a window"""
    filtration: str
    arity: int
    rows: Dict[MultiIndex, int]
    stabilization_bound: Optional[int] = None

    def to_frame(self) -> pd.DataFrame:
        columns = index_columns(self.arity)
        data = [list(n) + [chi] for n, chi in sorted(self.rows.items())]
        return pd.DataFrame(data, columns=columns + ['chi'])


@dataclass
class CohomologyTable:
    """
    h1_n = lambda(breve F(n) / F(n)) and h2_n = chi(n) + h1_n for n >= 0

    derived_rows holds values that come from an identity rather than a
    measurement (the n = -1 row, h2 = e_1 + e_2).
    """
    filtration: str
    arity: int
    rows: Dict[MultiIndex, Tuple[int, int]]
    derived_rows: Dict[MultiIndex, int] = field(default_factory=dict)

    def h1(self, n) -> int:
        return self.rows[_as_index(n)][0]

    def h2(self, n) -> int:
        n = _as_index(n)
        if n in self.rows:
            return self.rows[n][1]
        return self.derived_rows[n]

    def to_frame(self) -> pd.DataFrame:
        columns = index_columns(self.arity)
        data = [list(n) + [None, h2, True] for n, h2 in sorted(self.derived_rows.items())]
        data += [list(n) + [h1, h2, False] for n, (h1, h2) in sorted(self.rows.items())]
        return pd.DataFrame(data, columns=columns + ['h1', 'h2', 'derived'])


@dataclass
class TorsionTable:
    """lambda((breve F(n + e_i) cap F(n)) / F(n + e_i)) along one axis"""
    filtration: str
    arity: int
    axis: int
    rows: Dict[MultiIndex, int]

    def to_frame(self) -> pd.DataFrame:
        columns = index_columns(self.arity)
        data = [list(n) + [length] for n, length in sorted(self.rows.items())]
        return pd.DataFrame(data, columns=columns + ['length'])


def _as_index(n) -> MultiIndex:
    return (n,) if isinstance(n, int) else tuple(n)


# ============================================================================
# HILBERT FUNCTION
# ============================================================================

def hilbert_function(F: FiltrationSpec, n) -> int:
    """
    H(n) = lambda(R / F(n)); 0 whenever n^+ = 0

    Examples:
        m-adic in k[x,y], n=3 -> 6
        product (m, m), n=(1,1) -> 3
    """
    return colength(graded_piece(F, n))


def hilbert_table(F: FiltrationSpec, window: Optional[Iterable] = None) -> Dict[MultiIndex, int]:
    return {n: hilbert_function(F, n) for n in _window(F, window)}


def _default_window(F: FiltrationSpec, base: Optional[int] = None) -> List[MultiIndex]:
    if F.arity == 1:
        top = get_setting('fit_base', base) + get_setting('fit_margin')
        return [(k,) for k in range(0, top + 1)]
    return list(itertools.product(range(F.dimension + 3), repeat=F.arity))


def _window(F: FiltrationSpec, window: Optional[Iterable], base: Optional[int] = None) -> List[MultiIndex]:
    if window is None:
        return _default_window(F, base)
    indices = [_as_index(n) for n in window]
    for n in indices:
        if len(n) != F.arity:
            raise InputError(f"window index {n} does not match arity {F.arity}")
    return indices


# ============================================================================
# FITTING
# ============================================================================

def _exact(values) -> Dict[int, Fraction]:
    return {i: Fraction(int(sympy.Rational(v).p), int(sympy.Rational(v).q)) for i, v in enumerate(values)}


def fit_polynomial(F: FiltrationSpec, margin: Optional[int] = None, base: Optional[int] = None,
                   max_base: Optional[int] = None) -> HilbertSummary:
    """
    Fit P_F for a Z-graded filtration

    Solves the (d+1)x(d+1) system on n0..n0+d, then checks the next
    `margin` indices, never fewer than 2(d+1). A failed check advances n0.

    Examples:
        m-adic in k[x,y] -> e = (1, 0, 0)
        (x^3,y^3,z^3,x^2y,xy^2,yz^2,xyz) -> e = (27, 18, 4, -1)

    Raises:
        InputError: arity != 1
        FitError: no verified fit up to max_base, or a non-integer coefficient
    """
    if F.arity != 1:
        raise InputError(f"fit_polynomial needs a Z-graded filtration, got arity {F.arity}")
    d = F.dimension
    margin = max(get_setting('fit_margin', margin), 2 * (d + 1))
    base = get_setting('fit_base', base)
    max_base = get_setting('fit_max_base', max_base)

    table: Dict[MultiIndex, int] = {}

    def H(k: int) -> int:
        if (k,) not in table:
            table[(k,)] = hilbert_function(F, k)
        return table[(k,)]

    attempts = []
    for b in range(base, max_base + 1):
        grid = list(range(b, b + d + 1))
        checks = list(range(b + d + 1, b + d + 1 + margin))
        matrix = sympy.Matrix([uni_basis_row(k, d) for k in grid])
        rhs = sympy.Matrix([H(k) for k in grid])
        solution = list(matrix.LUsolve(rhs))
        mismatches = [k for k in checks if evaluate_uni(solution, k) != H(k)]
        if mismatches:
            logger.debug("fit of %s at base %d fails at %s", F.describe(), b, mismatches)
            attempts.append({'base': b, 'mismatches': mismatches})
            continue
        exact = _exact(solution)
        if any(v.denominator != 1 for v in exact.values()):
            raise FitError(f"fit of {F.describe()} has non-integer coefficients {[str(v) for v in exact.values()]}",
                           diagnostics={'base': b, 'coefficients': [str(v) for v in exact.values()]})
        if b > base:
            logger.warning("fit of %s advanced to base %d", F.describe(), b)
        e = [int(exact[i]) for i in range(d + 1)]
        summary = HilbertSummary(
            filtration=F.describe(),
            arity=1,
            dimension=d,
            function_table=table,
            polynomial={alpha: exact[i] for i, alpha in enumerate(uni_to_alpha(e))},
            coefficients=uni_to_alpha(e),
            fit_certificate={'base': b, 'grid': grid, 'verification': checks, 'attempts': attempts},
        )
        summary.postulation_number = postulation_number(F, summary)
        summary.function_table = dict(sorted(table.items()))
        logger.debug("fit of %s: e=%s at base %d", F.describe(), e, b)
        return summary
    raise FitError(f"no verified fit for {F.describe()} with base up to {max_base}",
                   diagnostics={'attempts': attempts, 'margin': margin})


def _side_for(points: int, s: int) -> int:
    """Smallest side k with k^s >= points"""
    k = 1
    while k ** s < points:
        k += 1
    return k


def fit_polynomial_multi(F: FiltrationSpec, margin: Optional[int] = None, base: Optional[int] = None,
                         max_base: Optional[int] = None) -> HilbertSummary:
    """
    Fit the multi-graded P_F for s base ideals

    The grid base + [0..d]^s determines every e_alpha with |alpha| <= d;
    the check grid is (base + d + 1) + [0..margin-1]^s, widened until it
    holds at least 2(d+1) points.

    Example:
        (m, m) in k[x,y] -> e_(2,0) = e_(1,1) = e_(0,2) = 1, lower terms 0
    """
    s = F.arity
    d = F.dimension
    base = get_setting('fit_base', base)
    max_base = get_setting('fit_max_base', max_base)
    margin = max(get_setting('fit_margin', margin), _side_for(2 * (d + 1), s))
    alphas = multi_exponents(s, d)

    table: Dict[MultiIndex, int] = {}

    def H(n: MultiIndex) -> int:
        if n not in table:
            table[n] = hilbert_function(F, n)
        return table[n]

    attempts = []
    for b in range(base, max_base + 1):
        grid = [tuple(b + j for j in offsets) for offsets in itertools.product(range(d + 1), repeat=s)]
        start = b + d + 1
        checks = [tuple(start + j for j in offsets) for offsets in itertools.product(range(margin), repeat=s)]
        matrix = sympy.Matrix([multi_basis_row(n, d) for n in grid])
        rhs = sympy.Matrix([H(n) for n in grid])
        try:
            solution, params = matrix.gauss_jordan_solve(rhs)
        except ValueError:
            logger.debug("multi fit of %s at base %d is inconsistent", F.describe(), b)
            attempts.append({'base': b, 'mismatches': 'inconsistent grid'})
            continue
        if params.shape[0]:
            raise FitError(f"fit grid for {F.describe()} does not determine the polynomial",
                           diagnostics={'base': b, 'free_parameters': params.shape[0]})
        coefficients = {alpha: solution[i] for i, alpha in enumerate(alphas)}
        mismatches = [n for n in checks if evaluate_multi(coefficients, n, d) != H(n)]
        if mismatches:
            logger.debug("multi fit of %s at base %d fails at %s", F.describe(), b, mismatches[:4])
            attempts.append({'base': b, 'mismatches': mismatches})
            continue
        exact = _exact(list(solution))
        if any(v.denominator != 1 for v in exact.values()):
            raise FitError(f"fit of {F.describe()} has non-integer coefficients",
                           diagnostics={'base': b, 'coefficients': {str(a): str(exact[i]) for i, a in enumerate(alphas)}})
        if b > base:
            logger.warning("multi fit of %s advanced to base %d", F.describe(), b)
        logger.debug("multi fit of %s verified at base %d", F.describe(), b)
        return HilbertSummary(
            filtration=F.describe(),
            arity=s,
            dimension=d,
            function_table=dict(sorted(table.items())),
            polynomial={alpha: exact[i] for i, alpha in enumerate(alphas)},
            coefficients={alpha: int(exact[i]) for i, alpha in enumerate(alphas)},
            fit_certificate={'base': b, 'grid': grid, 'verification': checks, 'attempts': attempts},
        )
    raise FitError(f"no verified multi-graded fit for {F.describe()} with base up to {max_base}",
                   diagnostics={'attempts': attempts, 'margin': margin})


def fit_summary(F: FiltrationSpec, **settings) -> HilbertSummary:
    """fit_polynomial for s = 1, fit_polynomial_multi otherwise"""
    if F.arity == 1:
        return fit_polynomial(F, **settings)
    return fit_polynomial_multi(F, **settings)


# ============================================================================
# POSTULATION AND DEFECT
# ============================================================================

def postulation_number(F: FiltrationSpec, summary: Optional[HilbertSummary] = None) -> Optional[int]:
    """
    Largest n with P(n) != H(n); None stands for minus infinity

    Scans down from just below the fitted grid. H(n) = 0 for n <= 0, and a
    nonzero P of degree d cannot vanish on d + 1 consecutive negatives, so
    the scan stops at -(d + 1).

    Examples:
        m-adic in k[x,y] -> -2
        m^2-adic in k[x,y] -> -1
        (x^3,y^3,z^3,x^2y,xy^2,yz^2,xyz) -> 0
    """
    if F.arity != 1:
        raise InputError("postulation numbers are defined for Z-graded filtrations only")
    summary = summary or fit_polynomial(F)
    d = summary.dimension
    for k in range(summary.fit_certificate['base'] - 1, -(d + 2), -1):
        h = summary.function_table.get((k,))
        if h is None:
            h = hilbert_function(F, k)
        if summary.evaluate(k) != h:
            return k
    return None


def defect_table(F: FiltrationSpec, window: Optional[Iterable] = None,
                 summary: Optional[HilbertSummary] = None) -> DefectTable:
    """
    chi(n) = P(n) - H(n) on a window (H uses clamped indices)

    Examples:
        m-adic k[x,y], window 0..5 -> all zeros
        (x^3,y^3,z^3,x^2y,xy^2,yz^2,xyz) at n=0 -> 1
    """
    summary = summary or fit_summary(F)
    indices = _window(F, window, summary.fit_certificate['base'])
    rows = {n: summary.evaluate(n) - hilbert_function(F, n) for n in indices}
    if F.arity == 1:
        pn = summary.postulation_number
        bound = None if pn is None else pn + 1
    else:
        bound = _multi_stable_bound(rows)
    return DefectTable(summary.filtration, F.arity, dict(sorted(rows.items())), bound)


def _multi_stable_bound(rows: Dict[MultiIndex, int]) -> Optional[int]:
    """Least b with chi(n) = 0 for every row n >= (b, ..., b)"""
    if not rows:
        return None
    lows = sorted({min(n) for n in rows})
    bound = None
    for b in reversed(lows):
        if any(chi for n, chi in rows.items() if min(n) >= b):
            break
        bound = b
    return bound


# ============================================================================
# DIMENSION TWO COHOMOLOGY
# ============================================================================

def _require_cohen_macaulay(F: FiltrationSpec, what: str):
    ring = F.ring
    if ring.is_quotient and not ring.asserted_cohen_macaulay:
        raise UnsupportedError(f"{what} needs a Cohen-Macaulay ring; {ring.describe()} carries no cm assertion")


def cohomology_table_dim2(F: FiltrationSpec, window: Optional[Iterable] = None,
                          summary: Optional[HilbertSummary] = None) -> CohomologyTable:
    """
    Lengths of the top two local cohomology modules in dimension 2

    h1_n = lambda(R/F(n)) - lambda(R/breve F(n)) and h2_n = chi(n) + h1_n.
    For Z-graded F the n = -1 row is h2 = e_1 + e_2, marked derived.

    Example:
        (x^4, x^3y, xy^3, y^4) adic: h1_1 = 1

    Raises:
        UnsupportedError: d != 2, or a quotient ring without a cm assertion
        InputError: negative index in the window
    """
    if F.dimension != 2:
        raise UnsupportedError(f"cohomology tables are implemented for d = 2, got d = {F.dimension}")
    _require_cohen_macaulay(F, "the cohomology table")
    summary = summary or fit_summary(F)
    indices = _window(F, window, summary.fit_certificate['base'])
    if any(k < 0 for n in indices for k in n):
        raise InputError("cohomology rows are measured for n >= 0 only")
    breve = rr_closed_filtration(F)
    rows = {}
    for n in indices:
        H = hilbert_function(F, n)
        h1 = H - colength(graded_piece(breve, n))
        chi = summary.evaluate(n) - H
        rows[n] = (h1, chi + h1)
    derived = {}
    if F.arity == 1:
        derived[(-1,)] = summary.coefficient(1) + summary.coefficient(2)
    return CohomologyTable(summary.filtration, F.arity, dict(sorted(rows.items())), derived)


def g_torsion_table(F: FiltrationSpec, axis: int = 0, window: Optional[Iterable] = None) -> TorsionTable:
    """
    Ratliff-Rush torsion along axis i

    Each row is colength(F(n + e_i)) - colength(breve F(n + e_i) cap F(n)).

    Examples:
        (x^4, x^3y, xy^3, y^4) adic, n=0 -> 1
        any Ratliff-Rush closed F -> zeros
    """
    if not 0 <= axis < F.arity:
        raise InputError(f"axis {axis + 1} out of range for arity {F.arity}")
    breve = rr_closed_filtration(F)
    rows = {}
    for n in _window(F, window):
        shifted = tuple(k + int(i == axis) for i, k in enumerate(n))
        top = graded_piece(F, shifted)
        meet = intersect(graded_piece(breve, shifted), graded_piece(F, n))
        rows[n] = colength(top) - colength(meet)
    return TorsionTable(F.describe(), F.arity, axis, dict(sorted(rows.items())))
