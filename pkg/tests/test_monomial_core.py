import random

import pytest

from modules.monomial_core.engine import (
    AmbientRing,
    colength,
    colon,
    contains_ideal,
    contains_monomial,
    format_monomial,
    intersect,
    is_m_primary,
    krull_dim,
    maximal_ideal,
    minimal_generators,
    multiply,
    power,
    pure_power_bounds,
    standard_monomials,
    unit_ideal,
    zero_ideal,
)
from shared.errors import DomainError, InputError
from tests.conftest import ideal_of
from tests.oracles import brute_colength, brute_colon, brute_intersect, covering_bounds, members


def random_m_primary(rng, ring, extra=3, top=5):
    """Pure powers of every variable plus a few random monomials"""
    v = ring.nvars
    gens = [tuple(rng.randint(1, top) if i == j else 0 for i in range(v)) for j in range(v)]
    for _ in range(extra):
        gens.append(tuple(rng.randint(0, top - 1) for _ in range(v)))
    return minimal_generators([g for g in gens if any(g)], ring)


# ============================================================================
# CANONICAL FORM
# ============================================================================

def test_minimal_generators_drops_multiples(plane):
    I = ideal_of(plane, (2, 0), (2, 1), (0, 1))
    assert I.generators == ((0, 1), (2, 0))


def test_minimal_generators_drops_quotient_members(narita_ring):
    I = ideal_of(narita_ring, (0, 0, 0, 3), (1, 0, 0, 0))
    assert I.generators == ((1, 0, 0, 0),)


def test_equal_ideals_compare_equal(plane):
    assert ideal_of(plane, (1, 0), (0, 1), (1, 1)) == ideal_of(plane, (0, 1), (1, 0))


def test_wrong_vector_length_is_input_error(plane):
    with pytest.raises(InputError):
        ideal_of(plane, (1, 0, 0))


def test_ring_rejects_duplicate_variables():
    with pytest.raises(InputError):
        AmbientRing(('x', 'x'))


def test_format_monomial():
    assert format_monomial((2, 1, 0), ('x', 'y', 'z')) == 'x^2*y'
    assert format_monomial((0, 0), ('x', 'y')) == '1'


def test_str_of_ideal(plane):
    assert str(ideal_of(plane, (1, 1), (2, 0))) == '(x*y, x^2)'


# ============================================================================
# RINGS
# ============================================================================

@pytest.mark.parametrize("quotient, expected", [
    ((), 3),
    (((0, 0, 3),), 2),
    (((1, 1, 0),), 2),
    (((1, 1, 0), (0, 0, 1)), 1),
])
def test_krull_dim(space, quotient, expected):
    ring = AmbientRing(space.variable_names, quotient)
    assert krull_dim(ring) == expected


def test_narita_ring_dimension(narita_ring):
    assert narita_ring.dimension == 3
    assert narita_ring.describe() == 'k[x1, x2, x3, x4]/(x4^3)'


# ============================================================================
# ARITHMETIC
# ============================================================================

def test_power_of_maximal_ideal(plane_m):
    assert power(plane_m, 3).generators == ((0, 3), (1, 2), (2, 1), (3, 0))


def test_power_zero_is_unit(plane_m):
    assert power(plane_m, 0).is_unit


def test_gap_ideal_square_is_m8(plane, gap_ideal):
    assert power(gap_ideal, 2) == power(maximal_ideal(plane), 8)


def test_colon_by_monomial(plane):
    I = ideal_of(plane, (3, 0), (1, 2), (0, 3))
    J = ideal_of(plane, (1, 0))
    assert colon(I, J) == ideal_of(plane, (2, 0), (0, 2), (0, 3))


def test_colon_by_zero_ideal_is_domain_error(plane_m, plane):
    with pytest.raises(DomainError):
        colon(plane_m, zero_ideal(plane))


def test_intersect(plane):
    I = ideal_of(plane, (2, 0))
    J = ideal_of(plane, (1, 1))
    assert intersect(I, J) == ideal_of(plane, (2, 1))


def test_containment(plane_m, gap_ideal):
    assert contains_ideal(plane_m, gap_ideal)
    assert not contains_ideal(gap_ideal, plane_m)
    assert contains_monomial(gap_ideal, (2, 3))
    assert not contains_monomial(gap_ideal, (2, 2))


def test_quotient_arithmetic_reduces_mod_q(plane):
    ring = AmbientRing(plane.variable_names, ((0, 2),))
    m = maximal_ideal(ring)
    J = ideal_of(ring, (1, 0))
    assert multiply(J, m) == power(m, 2)


@pytest.mark.parametrize("seed", range(8))
def test_multiplication_commutes(plane, seed):
    rng = random.Random(seed)
    I = random_m_primary(rng, plane)
    J = random_m_primary(rng, plane)
    assert multiply(I, J) == multiply(J, I)
    assert contains_ideal(I, multiply(I, J))


@pytest.mark.parametrize("seed", range(10))
def test_colon_times_divisor_lands_in_ideal(plane, space, seed):
    rng = random.Random(300 + seed)
    ring = plane if seed % 2 else space
    I = random_m_primary(rng, ring, extra=3, top=4)
    J = random_m_primary(rng, ring, extra=2, top=3)
    assert contains_ideal(I, multiply(colon(I, J), J))
    assert contains_ideal(colon(I, J), I)


@pytest.mark.parametrize("a", range(5))
@pytest.mark.parametrize("b", range(5))
def test_power_exponents_add(gap_ideal, a, b):
    assert power(gap_ideal, a + b) == multiply(power(gap_ideal, a), power(gap_ideal, b))


@pytest.mark.parametrize("seed", range(8))
def test_product_has_larger_colength(space, seed):
    rng = random.Random(400 + seed)
    I = random_m_primary(rng, space, extra=3, top=3)
    J = random_m_primary(rng, space, extra=3, top=3)
    assert colength(multiply(I, J)) >= colength(I)
    assert colength(multiply(I, J)) >= colength(J)


def test_colon_of_squares_by_maximal_ideal(plane, plane_m):
    I = ideal_of(plane, (2, 0), (0, 2))
    assert colon(I, plane_m) == ideal_of(plane, (2, 0), (1, 1), (0, 2))


def test_intersect_of_crossed_ideals(plane):
    I = ideal_of(plane, (2, 0), (0, 1))
    J = ideal_of(plane, (1, 0), (0, 2))
    assert intersect(I, J) == ideal_of(plane, (2, 0), (1, 1), (0, 2))


@pytest.mark.parametrize("seed", range(10))
def test_colon_and_intersect_match_box_membership(plane, space, seed):
    rng = random.Random(500 + seed)
    ring = plane if seed % 2 else space
    I = random_m_primary(rng, ring, extra=3, top=4)
    J = random_m_primary(rng, ring, extra=2, top=3)
    quotient, meet = colon(I, J), intersect(I, J)
    bounds = covering_bounds(I, J, quotient, meet)
    assert members(quotient, bounds) == brute_colon(I, J, bounds)
    assert members(meet, bounds) == brute_intersect(I, J, bounds)


@pytest.mark.parametrize("seed", range(4))
def test_colon_matches_box_membership_in_quotient(seed):
    rng = random.Random(600 + seed)
    ring = AmbientRing(('x', 'y', 'z'), ((0, 0, 2), (1, 1, 0)))
    I = random_m_primary(rng, ring, extra=3, top=4)
    J = random_m_primary(rng, ring, extra=2, top=3)
    quotient = colon(I, J)
    bounds = covering_bounds(I, J, quotient)
    assert members(quotient, bounds) == brute_colon(I, J, bounds)


def test_huge_exponents_stay_exact(plane):
    big = 2 ** 70
    I = ideal_of(plane, (big, 0), (0, 1))
    J = ideal_of(plane, (1, 0))
    assert multiply(I, J) == ideal_of(plane, (big + 1, 0), (1, 1))
    assert colon(I, J) == ideal_of(plane, (big - 1, 0), (0, 1))
    assert contains_monomial(I, (big, 0))
    assert not contains_monomial(I, (big - 1, 0))
    assert power(I, 2).generators[-1] == (2 * big, 0)


# ============================================================================
# COUNTING
# ============================================================================

@pytest.mark.parametrize("gens, expected", [
    (((2, 0), (1, 1), (0, 2)), 3),
    (((1, 0), (0, 1)), 1),
    (((2, 0), (1, 1), (0, 3)), 4),
    (((4, 0), (3, 1), (1, 3), (0, 4)), 11),
])
def test_colength_plane(plane, gens, expected):
    assert colength(ideal_of(plane, *gens)) == expected


def test_colength_marley(marley_ideal):
    assert colength(marley_ideal) == 14


def test_colength_in_quotient(narita_ideal):
    assert colength(narita_ideal) == len(standard_monomials(narita_ideal))


def test_unit_ideal_has_colength_zero(plane):
    assert colength(unit_ideal(plane)) == 0


def test_non_m_primary_has_infinite_colength(plane):
    I = ideal_of(plane, (2, 0), (1, 1))
    assert not is_m_primary(I)
    assert pure_power_bounds(I) is None
    with pytest.raises(DomainError, match="infinite colength"):
        colength(I)


def test_unit_ideal_is_not_m_primary(plane):
    assert not is_m_primary(unit_ideal(plane))


@pytest.mark.parametrize("seed", range(12))
def test_colength_matches_box_count(space, seed):
    rng = random.Random(1000 + seed)
    I = random_m_primary(rng, space, extra=4, top=4)
    assert colength(I) == brute_colength(I)
    assert colength(I) == len(standard_monomials(I))


@pytest.mark.parametrize("seed", range(6))
def test_colength_matches_box_count_in_quotient(seed):
    rng = random.Random(2000 + seed)
    ring = AmbientRing(('x', 'y', 'z'), ((0, 0, 2), (1, 1, 0)))
    I = random_m_primary(rng, ring, extra=3, top=4)
    assert colength(I) == brute_colength(I)
