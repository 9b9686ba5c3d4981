"""
Binomial Bases for Hilbert Polynomials

Univariate form, degree d:
    P(n) = sum_{i=0..d} (-1)^i e_i C(n + d - 1 - i, d - i)

Multi-graded form, degree d in s variables:
    P(n) = sum_{|alpha| <= d} (-1)^{d - |alpha|} e_alpha prod_j C(n_j + alpha_j - 1, alpha_j)

Binomials use the generalized definition C(a, k) = a (a-1) ... (a-k+1) / k!
so both forms extend to every integer n.
"""

import itertools
from math import comb
from typing import Dict, List, Sequence, Tuple

import sympy

Alpha = Tuple[int, ...]


def binom(a: int, k: int) -> int:
    """
    Generalized binomial coefficient for integer a and k >= 0

    Examples:
        binom(4, 2) -> 6
        binom(-1, 2) -> 1
        binom(1, 2) -> 0
    """
    if k < 0:
        return 0
    if a >= 0:
        return comb(a, k)
    return (-1) ** k * comb(k - a - 1, k)


# ============================================================================
# UNIVARIATE
# ============================================================================

def uni_basis_row(n: int, d: int) -> List[int]:
    """Signed basis values (-1)^i C(n+d-1-i, d-i) for i = 0..d"""
    return [(-1) ** i * binom(n + d - 1 - i, d - i) for i in range(d + 1)]


def evaluate_uni(coefficients: Sequence, n: int):
    """P(n) from e_0..e_d"""
    d = len(coefficients) - 1
    return sum(e * b for e, b in zip(coefficients, uni_basis_row(n, d)))


# ============================================================================
# MULTI-GRADED
# ============================================================================

def multi_exponents(s: int, d: int) -> List[Alpha]:
    """
    Every alpha in N^s with |alpha| <= d, top degree first, lex descending

    Example:
        s=2, d=1 -> [(1, 0), (0, 1), (0, 0)]
    """
    alphas = [a for a in itertools.product(range(d + 1), repeat=s) if sum(a) <= d]
    return sorted(alphas, key=lambda a: (-sum(a), tuple(-x for x in a)))


def multi_basis_value(n: Sequence[int], alpha: Alpha, d: int) -> int:
    value = (-1) ** (d - sum(alpha))
    for nj, aj in zip(n, alpha):
        value *= binom(nj + aj - 1, aj)
    return value


def multi_basis_row(n: Sequence[int], d: int) -> List[int]:
    return [multi_basis_value(n, alpha, d) for alpha in multi_exponents(len(n), d)]


def evaluate_multi(coefficients: Dict[Alpha, int], n: Sequence[int], d: int):
    """P(n) from the e_alpha table"""
    return sum(e * multi_basis_value(n, alpha, d) for alpha, e in coefficients.items())


def uni_to_alpha(coefficients: Sequence[int]) -> Dict[Alpha, int]:
    """e_i -> e_alpha with alpha = (d - i,), the s = 1 case of the multi form"""
    d = len(coefficients) - 1
    return {(d - i,): e for i, e in enumerate(coefficients)}


# ============================================================================
# STANDARD BASIS ROUND TRIP
# ============================================================================

def _symbols(s: int):
    return sympy.symbols(f"n1:{s + 1}") if s > 1 else (sympy.Symbol('n'),)


def _basis_expr(alpha: Alpha, d: int, syms) -> sympy.Expr:
    expr = sympy.Integer((-1) ** (d - sum(alpha)))
    for sym, aj in zip(syms, alpha):
        expr *= sympy.expand_func(sympy.binomial(sym + aj - 1, aj))
    return sympy.expand(expr)


def to_standard_basis(coefficients: Dict[Alpha, int], d: int) -> Dict[Tuple[int, ...], sympy.Rational]:
    """
    Expand a binomial-basis table into monomial coefficients

    Returns:
        {exponent tuple of n_1..n_s: rational coefficient}, zero terms dropped
    """
    s = len(next(iter(coefficients)))
    syms = _symbols(s)
    total = sum((e * _basis_expr(alpha, d, syms) for alpha, e in coefficients.items()), sympy.Integer(0))
    poly = sympy.Poly(sympy.expand(total), *syms)
    return {monom: sympy.Rational(c) for monom, c in zip(poly.monoms(), poly.coeffs())}


def from_standard_basis(monomials: Dict[Tuple[int, ...], sympy.Rational], s: int, d: int) -> Dict[Alpha, sympy.Rational]:
    """
    Inverse of to_standard_basis

    The basis polynomial for alpha has leading monomial n^alpha with a
    nonzero coefficient, so the change of basis is triangular and solved
    exactly by sympy.
    """
    syms = _symbols(s)
    alphas = multi_exponents(s, d)
    columns = []
    for alpha in alphas:
        poly = sympy.Poly(_basis_expr(alpha, d, syms), *syms)
        columns.append(dict(zip(poly.monoms(), poly.coeffs())))
    rows = alphas
    matrix = sympy.Matrix([[col.get(monom, 0) for col in columns] for monom in rows])
    rhs = sympy.Matrix([monomials.get(monom, 0) for monom in rows])
    solution = matrix.LUsolve(rhs)
    return {alpha: sympy.Rational(solution[i]) for i, alpha in enumerate(alphas)}
