"""
Filtrations - Admissible Filtrations of Monomial Ideals
Adic, normal (integral closure), per-axis products, Ratliff-Rush closures
and axis restrictions, all evaluated lazily through one memoizing spec
"""

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from config.modules_config import get_setting
from modules.filtrations.newton import integral_closure_power
from modules.monomial_core.engine import (
    AmbientRing,
    MonomialIdeal,
    colon,
    is_m_primary,
    multiply,
    power,
    unit_ideal,
)
from shared.errors import DomainError, InputError, UnstableError, UnsupportedError

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]


class FiltrationKind(Enum):
    """How graded pieces are produced"""
    ADIC = "adic"                  # I_1^{n_1} ... I_s^{n_s}
    NORMAL = "normal"              # integral closure of the product of powers
    PRODUCT = "product"            # A_1(n_1) ... A_s(n_s), A_i adic or normal per axis
    RATLIFF_RUSH = "ratliff_rush"  # breve of an inner filtration
    RESTRICTION = "restriction"    # n -> inner(n * e_axis), a Z-graded sub-filtration


@dataclass(eq=False)
class FiltrationSpec:
    """
    Declarative description of an admissible filtration with a memo table

    The memo table is per spec, keyed on the clamped multi-index; readers
    share it, insertion happens under a lock.
    """
    ring: AmbientRing
    base_ideals: Tuple[MonomialIdeal, ...]
    kind: FiltrationKind = FiltrationKind.ADIC
    axis_kinds: Tuple[FiltrationKind, ...] = ()
    inner: Optional['FiltrationSpec'] = None
    axis: Optional[int] = None
    kmax: Optional[int] = None
    rr_window: Optional[int] = None
    name: str = ''
    _cache: Dict[MultiIndex, MonomialIdeal] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def arity(self) -> int:
        if self.kind == FiltrationKind.RESTRICTION:
            return 1
        return len(self.base_ideals)

    @property
    def dimension(self) -> int:
        return self.ring.dimension

    @property
    def is_adic(self) -> bool:
        if self.kind == FiltrationKind.ADIC:
            return True
        if self.kind == FiltrationKind.PRODUCT:
            return all(k == FiltrationKind.ADIC for k in self.axis_kinds)
        if self.kind == FiltrationKind.RESTRICTION:
            return self.inner.is_adic
        return False

    def first_piece(self) -> MonomialIdeal:
        """F(1) for Z-graded filtrations"""
        return graded_piece(self, (1,) * self.arity)

    def describe(self) -> str:
        if self.kind == FiltrationKind.RATLIFF_RUSH:
            return f"rr({self.inner.describe()})"
        if self.kind == FiltrationKind.RESTRICTION:
            return f"{self.inner.describe()}[axis {self.axis + 1}]"
        if self.kind == FiltrationKind.PRODUCT:
            parts = [f"{k.value}({I})" for k, I in zip(self.axis_kinds, self.base_ideals)]
            return f"product({', '.join(parts)})"
        return f"{self.kind.value}({', '.join(str(I) for I in self.base_ideals)})"


# ============================================================================
# CONSTRUCTORS
# ============================================================================

def _check_bases(ring: AmbientRing, ideals: Sequence[MonomialIdeal]):
    if not ideals:
        raise InputError("a filtration needs at least one base ideal")
    for I in ideals:
        if I.ring != ring:
            raise InputError(f"base ideal {I} lives in {I.ring.describe()}, not {ring.describe()}")
        if not is_m_primary(I):
            raise DomainError(f"base ideal {I} is not m-primary in {ring.describe()}")


def adic_filtration(*ideals: MonomialIdeal, name: str = '') -> FiltrationSpec:
    ring = ideals[0].ring if ideals else None
    _check_bases(ring, ideals)
    return FiltrationSpec(ring, tuple(ideals), FiltrationKind.ADIC, name=name)


def _require_polynomial(ring: AmbientRing):
    if ring.is_quotient:
        raise UnsupportedError(f"normal filtrations need a polynomial ambient, not {ring.describe()}")


def normal_filtration(*ideals: MonomialIdeal, name: str = '') -> FiltrationSpec:
    ring = ideals[0].ring if ideals else None
    _check_bases(ring, ideals)
    _require_polynomial(ring)
    return FiltrationSpec(ring, tuple(ideals), FiltrationKind.NORMAL, name=name)


def product_filtration(parts: Sequence[Tuple[FiltrationKind, MonomialIdeal]], name: str = '') -> FiltrationSpec:
    """
    F(n) = A_1(n_1) ... A_s(n_s) where A_i is the adic or normal filtration of I_i

    Raises:
        InputError: an axis kind other than adic/normal
    """
    kinds = tuple(k for k, _ in parts)
    ideals = tuple(I for _, I in parts)
    ring = ideals[0].ring if ideals else None
    _check_bases(ring, ideals)
    if any(k not in (FiltrationKind.ADIC, FiltrationKind.NORMAL) for k in kinds):
        raise InputError("per-axis kinds must be adic or normal")
    if FiltrationKind.NORMAL in kinds:
        _require_polynomial(ring)
    return FiltrationSpec(ring, ideals, FiltrationKind.PRODUCT, axis_kinds=kinds, name=name)


def rr_closed_filtration(F: FiltrationSpec, kmax: Optional[int] = None,
                         window: Optional[int] = None, name: str = '') -> FiltrationSpec:
    """
    Wrap F so that graded_piece returns the Ratliff-Rush piece breve F(n)

    Examples:
        breve of adic (x^4, x^3y, xy^3, y^4) at n=1 -> I + (x^2y^2)
        breve F(0) -> unit ideal
    """
    return FiltrationSpec(F.ring, F.base_ideals, FiltrationKind.RATLIFF_RUSH, inner=F,
                          kmax=kmax, rr_window=window, name=name or (f"rr({F.name})" if F.name else ''))


def restrict_to_axis(F: FiltrationSpec, axis: int) -> FiltrationSpec:
    """The Z-graded sub-filtration F^(i) = {F(n e_i)}"""
    if not 0 <= axis < F.arity:
        raise InputError(f"axis {axis + 1} out of range for a filtration of arity {F.arity}")
    if F.arity == 1:
        return F
    return FiltrationSpec(F.ring, (F.base_ideals[axis],), FiltrationKind.RESTRICTION, inner=F, axis=axis,
                          name=f"{F.name}^({axis + 1})" if F.name else '')


# ============================================================================
# EVALUATION
# ============================================================================

def clamp(n: Sequence[int]) -> MultiIndex:
    """n -> n^+ componentwise"""
    return tuple(max(int(k), 0) for k in n)


def _normalize_index(F: FiltrationSpec, n) -> MultiIndex:
    if isinstance(n, int):
        n = (n,)
    n = tuple(n)
    if len(n) != F.arity:
        raise InputError(f"multi-index {n} has length {len(n)}, filtration has arity {F.arity}")
    return clamp(n)


def _product_of_powers(ideals: Sequence[MonomialIdeal], n: MultiIndex) -> MonomialIdeal:
    piece = unit_ideal(ideals[0].ring)
    for I, k in zip(ideals, n):
        if k:
            piece = multiply(piece, power(I, k))
    return piece


def _evaluate(F: FiltrationSpec, n: MultiIndex) -> MonomialIdeal:
    if not any(n):
        return unit_ideal(F.ring)
    if F.kind == FiltrationKind.ADIC:
        return _product_of_powers(F.base_ideals, n)
    if F.kind == FiltrationKind.NORMAL:
        product = _product_of_powers(F.base_ideals, n)
        return integral_closure_power(product, 1)
    if F.kind == FiltrationKind.PRODUCT:
        piece = unit_ideal(F.ring)
        for kind, I, k in zip(F.axis_kinds, F.base_ideals, n):
            if not k:
                continue
            axis_piece = power(I, k) if kind == FiltrationKind.ADIC else integral_closure_power(I, k)
            piece = multiply(piece, axis_piece)
        return piece
    if F.kind == FiltrationKind.RATLIFF_RUSH:
        return ratliff_rush_piece(F.inner, n, kmax=F.kmax, window=F.rr_window)
    if F.kind == FiltrationKind.RESTRICTION:
        index = tuple(n[0] if i == F.axis else 0 for i in range(F.inner.arity))
        return graded_piece(F.inner, index)
    raise InputError(f"unknown filtration kind {F.kind}")


def graded_piece(F: FiltrationSpec, n) -> MonomialIdeal:
    """
    F(n) with n clamped to n^+, memoized per spec

    Examples:
        adic m, F(3) -> m^3
        F(-2) -> F(0) = unit ideal
        normal (x^3, y^3), F(1) -> (x^3, x^2y, xy^2, y^3)
    """
    key = _normalize_index(F, n)
    cached = F._cache.get(key)
    if cached is not None:
        return cached
    piece = _evaluate(F, key)
    with F._lock:
        F._cache.setdefault(key, piece)
    return F._cache[key]


def ratliff_rush_piece(F: FiltrationSpec, n, kmax: Optional[int] = None,
                       window: Optional[int] = None) -> MonomialIdeal:
    """
    breve F(n): union of the increasing chain C_k = (F(n + k e) : F(e)^k)

    e = (1, ..., 1). The chain stops once `window` consecutive links are
    equal (C_k = C_{k+1} = C_{k+2} with the default window 2).

    Raises:
        UnstableError: no stable run before k_max, carrying the chain so far
    """
    n = _normalize_index(F, n)
    if not any(n):
        return unit_ideal(F.ring)
    e = (1,) * F.arity
    Fe = graded_piece(F, e)

    def link(k):
        return colon(graded_piece(F, tuple(x + k for x in n)), power(Fe, k))

    return _stable_union(link, kmax, window, f"{F.describe()} at {n}")


def ratliff_rush_closure(I: MonomialIdeal, n: int = 1, kmax: Optional[int] = None,
                         window: Optional[int] = None) -> MonomialIdeal:
    """
    Ratliff-Rush closure of I^n: union of (I^{n+k} : I^k)

    Works for any nonzero monomial ideal; m-primary is not required.

    Examples:
        (x^4, x^3y, xy^3, y^4), n=1 -> I + (x^2y^2)
        (x^2) in k[x,y] -> (x^2)
    """
    if n <= 0:
        return unit_ideal(I.ring)
    if I.is_zero:
        raise DomainError("Ratliff-Rush closure of the zero ideal is undefined")

    def link(k):
        return colon(power(I, n + k), power(I, k))

    return _stable_union(link, kmax, window, f"{I}^{n}")


def _stable_union(link, kmax: Optional[int], window: Optional[int], label: str) -> MonomialIdeal:
    kmax = get_setting('rr_kmax', kmax)
    window = get_setting('rr_window', window)
    chain: List[MonomialIdeal] = []
    equal_run = 0
    for k in range(1, kmax + 1):
        current = link(k)
        if chain and current == chain[-1]:
            equal_run += 1
        else:
            equal_run = 0
        chain.append(current)
        if equal_run >= window:
            logger.debug("RR chain for %s stable after k=%d", label, k)
            return current
    logger.warning("RR chain for %s did not stabilize within k_max=%d", label, kmax)
    raise UnstableError(f"Ratliff-Rush chain for {label} did not stabilize within k_max={kmax}",
                        partial_chain=[str(c) for c in chain])
