"""
Monomial Core - Exact Arithmetic of Monomial Ideals
Ideals of k[x_1..x_v] or k[x_1..x_v]/q (q monomial) kept as canonical
minimal generating sets of exponent vectors

Layers:
1. Vectors:     ExponentVector helpers (divisibility, lcm, formatting)
2. Ring:        AmbientRing with its Krull dimension
3. Ideal:       MonomialIdeal in canonical minimal form
4. Arithmetic:  add / multiply / power / colon / intersect / containment
5. Counting:    colength by staircase enumeration of the pure-power box

The field k never materializes; everything is lattice combinatorics.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from shared.errors import DomainError, InputError

logger = logging.getLogger(__name__)

ExponentVector = Tuple[int, ...]


# ============================================================================
# LAYER 1: VECTORS
# ============================================================================

def exponent_vector(values: Iterable[int], nvars: int) -> ExponentVector:
    """
    Validate and freeze a sequence of exponents

    Raises:
        InputError: wrong length or a negative entry
    """
    vec = tuple(int(v) for v in values)
    if len(vec) != nvars:
        raise InputError(f"exponent vector {vec} has length {len(vec)}, ring has {nvars} variables")
    if any(v < 0 for v in vec):
        raise InputError(f"exponent vector {vec} has a negative entry")
    return vec


def divides(a: ExponentVector, b: ExponentVector) -> bool:
    """x^a divides x^b"""
    return all(x <= y for x, y in zip(a, b))


def lcm(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    return tuple(max(x, y) for x, y in zip(a, b))


def quotient_vector(b: ExponentVector, a: ExponentVector) -> ExponentVector:
    """Exponent of the generator of (x^b : x^a)"""
    return tuple(max(y - x, 0) for x, y in zip(a, b))


def format_monomial(a: ExponentVector, names: Sequence[str]) -> str:
    """
    Render an exponent vector as a product of variables

    Examples:
        (2, 1), ('x', 'y') -> "x^2*y"
        (0, 0), ('x', 'y') -> "1"
    """
    parts = []
    for name, e in zip(names, a):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return '*'.join(parts) if parts else '1'


def minimize(vectors: Iterable[ExponentVector],
             discard: Sequence[ExponentVector] = ()) -> Tuple[ExponentVector, ...]:
    """
    Minimal elements of a set of exponent vectors under divisibility

    Vectors divisible by a member of `discard` are dropped. Candidates are
    visited by total degree, so a divisor is always kept before its
    multiples; the kept set lives in a growing numpy buffer for the
    vectorized divisibility test. Buffers hold Python ints (object dtype)
    so exponents never overflow.

    Returns:
        Lexicographically sorted tuple of minimal vectors
    """
    candidates = sorted(set(vectors), key=lambda a: (sum(a), a))
    if not candidates:
        return ()
    nvars = len(candidates[0])
    discard_arr = np.array(discard, dtype=object).reshape(-1, nvars)
    buffer = np.empty((max(16, len(candidates)), nvars), dtype=object)
    count = 0
    kept = []
    for a in candidates:
        row = np.array(a, dtype=object)
        if len(discard_arr) and (discard_arr <= row).all(axis=1).any():
            continue
        if count and (buffer[:count] <= row).all(axis=1).any():
            continue
        buffer[count] = row
        count += 1
        kept.append(a)
    return tuple(sorted(kept))


# ============================================================================
# LAYER 2: RING
# ============================================================================

@dataclass(frozen=True)
class AmbientRing:
    """
    k[x_1..x_v] modulo a monomial ideal q (q = 0 by default)

    `quotient_generators` holds the minimal generators of q. The
    Cohen-Macaulay flag is user input and is never computed.
    """
    variable_names: Tuple[str, ...]
    quotient_generators: Tuple[ExponentVector, ...] = ()
    asserted_cohen_macaulay: bool = False

    def __post_init__(self):
        names = tuple(self.variable_names)
        if not names:
            raise InputError("a ring needs at least one variable")
        if len(set(names)) != len(names):
            raise InputError(f"duplicate variable names in {names}")
        gens = tuple(exponent_vector(g, len(names)) for g in self.quotient_generators)
        if any(not any(g) for g in gens):
            raise InputError("the quotient ideal must be proper")
        object.__setattr__(self, 'variable_names', names)
        object.__setattr__(self, 'quotient_generators', minimize(gens))

    @property
    def nvars(self) -> int:
        return len(self.variable_names)

    @property
    def is_quotient(self) -> bool:
        return bool(self.quotient_generators)

    @cached_property
    def dimension(self) -> int:
        return krull_dim(self)

    @property
    def quotient(self) -> 'MonomialIdeal':
        """q as an ideal of the polynomial ring"""
        return MonomialIdeal(self.polynomial_ring(), self.quotient_generators)

    def polynomial_ring(self) -> 'AmbientRing':
        return AmbientRing(self.variable_names)

    def describe(self) -> str:
        text = f"k[{', '.join(self.variable_names)}]"
        if self.is_quotient:
            q = ', '.join(format_monomial(g, self.variable_names) for g in self.quotient_generators)
            text += f"/({q})"
        return text


def krull_dim(ring: AmbientRing) -> int:
    """
    Largest variable subset A with no generator of q supported inside A

    Examples:
        k[x,y,z] -> 3
        k[x1..x4]/(x4^3) -> 3
        k[x,y]/(xy) -> 1
    """
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in ring.quotient_generators]
    for size in range(ring.nvars, -1, -1):
        for subset in itertools.combinations(range(ring.nvars), size):
            chosen = frozenset(subset)
            if not any(support <= chosen for support in supports):
                return size
    return 0


# ============================================================================
# LAYER 3: IDEAL
# ============================================================================

@dataclass(frozen=True)
class MonomialIdeal:
    """
    Monomial ideal in canonical form: minimal, lexicographically sorted,
    with every generator lying in q removed

    The zero ideal has no generators; the unit ideal is {(0,...,0)}.
    Construct through `minimal_generators` unless the generators are known
    to be canonical already.
    """
    ring: AmbientRing
    generators: Tuple[ExponentVector, ...] = field(default=())

    @property
    def nvars(self) -> int:
        return self.ring.nvars

    @property
    def is_zero(self) -> bool:
        return not self.generators

    @property
    def is_unit(self) -> bool:
        return any(not any(g) for g in self.generators)

    @cached_property
    def _matrix(self) -> np.ndarray:
        rows = list(self.generators) + list(self.ring.quotient_generators)
        return np.array(rows, dtype=object).reshape(-1, self.nvars)

    def with_quotient(self) -> Tuple[ExponentVector, ...]:
        """Generators of I + q in the polynomial ring"""
        return minimize(self.generators + self.ring.quotient_generators)

    def __contains__(self, a) -> bool:
        return contains_monomial(self, a)

    def __add__(self, other: 'MonomialIdeal') -> 'MonomialIdeal':
        return add(self, other)

    def __mul__(self, other: 'MonomialIdeal') -> 'MonomialIdeal':
        return multiply(self, other)

    def __pow__(self, n: int) -> 'MonomialIdeal':
        return power(self, n)

    def __le__(self, other: 'MonomialIdeal') -> bool:
        return contains_ideal(other, self)

    def __ge__(self, other: 'MonomialIdeal') -> bool:
        return contains_ideal(self, other)

    def __str__(self) -> str:
        if self.is_zero:
            return '(0)'
        names = self.ring.variable_names
        return '(' + ', '.join(format_monomial(g, names) for g in self.generators) + ')'


def minimal_generators(gens: Iterable[Sequence[int]], ring: AmbientRing) -> MonomialIdeal:
    """
    Canonical minimal form of the ideal generated by `gens`

    Examples:
        {x^2, x^2*y, y} -> (x^2, y)
        in k[x1..x4]/(x4^3): {x4^3, x1} -> (x1)

    Raises:
        InputError: a vector does not match the ring's variable count
    """
    vectors = [exponent_vector(g, ring.nvars) for g in gens]
    return MonomialIdeal(ring, minimize(vectors, ring.quotient_generators))


def unit_ideal(ring: AmbientRing) -> MonomialIdeal:
    return MonomialIdeal(ring, ((0,) * ring.nvars,))


def zero_ideal(ring: AmbientRing) -> MonomialIdeal:
    return MonomialIdeal(ring, ())


def maximal_ideal(ring: AmbientRing) -> MonomialIdeal:
    basis = [tuple(int(i == j) for j in range(ring.nvars)) for i in range(ring.nvars)]
    return minimal_generators(basis, ring)


def _same_ring(I: MonomialIdeal, J: MonomialIdeal):
    if I.ring != J.ring:
        raise InputError(f"ideals live in different rings: {I.ring.describe()} vs {J.ring.describe()}")


# ============================================================================
# LAYER 4: ARITHMETIC
# ============================================================================

def add(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    _same_ring(I, J)
    return MonomialIdeal(I.ring, minimize(I.generators + J.generators, I.ring.quotient_generators))


def multiply(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    """Pairwise exponent sums, minimized"""
    _same_ring(I, J)
    if I.is_zero or J.is_zero:
        return zero_ideal(I.ring)
    A = np.array(I.generators, dtype=object)
    B = np.array(J.generators, dtype=object)
    sums = (A[:, None, :] + B[None, :, :]).reshape(-1, I.nvars)
    vectors = [tuple(int(x) for x in row) for row in sums]
    return MonomialIdeal(I.ring, minimize(vectors, I.ring.quotient_generators))


@lru_cache(maxsize=4096)
def power(I: MonomialIdeal, n: int) -> MonomialIdeal:
    """
    I^n by iterated products, I^0 = unit ideal

    Raises:
        InputError: negative exponent
    """
    if n < 0:
        raise InputError(f"negative power {n}")
    if n == 0:
        return unit_ideal(I.ring)
    if n == 1:
        return I
    return multiply(power(I, n - 1), I)


def _colon_by_monomial(gens: Sequence[ExponentVector], a: ExponentVector) -> Tuple[ExponentVector, ...]:
    arr = np.array(gens, dtype=object)
    shifted = np.where(arr >= np.array(a, dtype=object), arr - np.array(a, dtype=object), 0)
    return minimize(tuple(int(x) for x in row) for row in shifted)


def _intersect_generators(A: Sequence[ExponentVector], B: Sequence[ExponentVector]) -> Tuple[ExponentVector, ...]:
    if not A or not B:
        return ()
    left = np.array(A, dtype=object)
    right = np.array(B, dtype=object)
    maxima = np.maximum(left[:, None, :], right[None, :, :]).reshape(-1, left.shape[1])
    return minimize(tuple(int(x) for x in row) for row in maxima)


def colon(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    """
    (I : J) = intersection over g in gens(J) of (I : g)

    In a quotient ring the computation is ((I + q) : J) in the polynomial
    ring, then reduced modulo q.

    Raises:
        DomainError: J is the zero ideal
    """
    _same_ring(I, J)
    if J.is_zero:
        raise DomainError("colon by the zero ideal is undefined")
    base = I.with_quotient()
    if not base:
        return zero_ideal(I.ring)
    result = None
    for g in J.generators:
        piece = _colon_by_monomial(base, g)
        result = piece if result is None else _intersect_generators(result, piece)
    return MonomialIdeal(I.ring, minimize(result, I.ring.quotient_generators))


def intersect(I: MonomialIdeal, J: MonomialIdeal) -> MonomialIdeal:
    """Componentwise max over generator pairs of I + q and J + q, reduced modulo q"""
    _same_ring(I, J)
    gens = _intersect_generators(I.with_quotient(), J.with_quotient())
    return MonomialIdeal(I.ring, minimize(gens, I.ring.quotient_generators))


def contains_monomial(I: MonomialIdeal, a: Sequence[int]) -> bool:
    """True iff some generator of I or of q divides x^a"""
    row = np.array(exponent_vector(a, I.nvars), dtype=object)
    matrix = I._matrix
    return bool(len(matrix)) and bool((matrix <= row).all(axis=1).any())


def equals(I: MonomialIdeal, J: MonomialIdeal) -> bool:
    _same_ring(I, J)
    return I.generators == J.generators


def contains_ideal(I: MonomialIdeal, J: MonomialIdeal) -> bool:
    """I contains J"""
    _same_ring(I, J)
    return all(contains_monomial(I, g) for g in J.generators)


def is_m_primary(I: MonomialIdeal) -> bool:
    """
    I + q contains a pure power of every variable and I is proper

    For monomial ideals this is exactly m-primary.
    """
    if I.is_unit:
        return False
    gens = I.with_quotient()
    for i in range(I.nvars):
        if not any(g[i] > 0 and all(e == 0 for j, e in enumerate(g) if j != i) for g in gens):
            return False
    return True


def pure_power_bounds(I: MonomialIdeal) -> Optional[Tuple[int, ...]]:
    """Smallest b_i with x_i^{b_i} in I + q, or None when some variable has none"""
    gens = I.with_quotient()
    bounds = []
    for i in range(I.nvars):
        exps = [g[i] for g in gens if all(e == 0 for j, e in enumerate(g) if j != i)]
        if not exps:
            return None
        bounds.append(min(exps))
    return tuple(bounds)


# ============================================================================
# LAYER 5: COUNTING
# ============================================================================

def _count_outside(gens: Tuple[ExponentVector, ...], memo: dict) -> int:
    """
    Lattice points of N^k divisible by no member of `gens`

    Slices along the first axis only change at the distinct first
    coordinates of the generators, so each run of equal slices is counted
    once and multiplied by its width.
    """
    if gens in memo:
        return memo[gens]
    if any(not any(g) for g in gens):
        memo[gens] = 0
        return 0
    if not gens:
        raise DomainError("infinite colength")
    if len(gens[0]) == 1:
        total = min(g[0] for g in gens)
        memo[gens] = total
        return total
    cuts = sorted({g[0] for g in gens})
    if cuts[0] > 0:
        raise DomainError("infinite colength")
    total = 0
    for idx, cut in enumerate(cuts):
        active = minimize(g[1:] for g in gens if g[0] <= cut)
        inner = _count_outside(active, memo) if active else None
        if idx + 1 == len(cuts):
            if inner != 0:
                raise DomainError("infinite colength")
            break
        if inner is None:
            raise DomainError("infinite colength")
        total += (cuts[idx + 1] - cut) * inner
    memo[gens] = total
    return total


def colength(I: MonomialIdeal) -> int:
    """
    Length of R/I: standard monomials of I + q inside the pure-power box

    Examples:
        (x^2, xy, y^2) -> 3
        (x, y) -> 1

    Raises:
        DomainError: I is not m-primary ("infinite colength")
    """
    if I.is_unit:
        return 0
    if pure_power_bounds(I) is None:
        raise DomainError(f"infinite colength: {I} is not m-primary in {I.ring.describe()}")
    return _count_outside(I.with_quotient(), {})


def standard_monomials(I: MonomialIdeal) -> List[ExponentVector]:
    """
    Every exponent vector of the pure-power box outside I + q, in lex order

    Raises:
        DomainError: I is not m-primary
    """
    if I.is_unit:
        return []
    bounds = pure_power_bounds(I)
    if bounds is None:
        raise DomainError(f"infinite colength: {I} is not m-primary in {I.ring.describe()}")
    matrix = I._matrix
    points = []
    for a in itertools.product(*(range(b) for b in bounds)):
        row = np.array(a, dtype=object)
        if not (matrix <= row).all(axis=1).any():
            points.append(a)
    return points
