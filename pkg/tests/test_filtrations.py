import itertools

import pytest

from modules.filtrations.engine import (
    FiltrationKind,
    adic_filtration,
    graded_piece,
    normal_filtration,
    product_filtration,
    ratliff_rush_closure,
    ratliff_rush_piece,
    restrict_to_axis,
    rr_closed_filtration,
)
from modules.filtrations.newton import integral_closure, integral_closure_power, newton_membership
from modules.monomial_core.engine import AmbientRing, contains_ideal, maximal_ideal, multiply, power, pure_power_bounds
from shared.errors import DomainError, InputError, UnstableError, UnsupportedError
from tests.conftest import ideal_of
from tests.oracles import box, closure_by_powers, in_ideal, rr_by_powers


# ============================================================================
# GRADED PIECES
# ============================================================================

def test_adic_pieces(plane_m):
    F = adic_filtration(plane_m)
    assert graded_piece(F, 3) == power(plane_m, 3)
    assert graded_piece(F, 0).is_unit


def test_negative_index_clamps_to_unit(plane_m):
    F = adic_filtration(plane_m)
    assert graded_piece(F, -2).is_unit


def test_multi_index_length_must_match(plane_m):
    F = adic_filtration(plane_m, plane_m)
    with pytest.raises(InputError):
        graded_piece(F, (1,))


def test_multi_adic_is_product_of_powers(plane, plane_m):
    Q = ideal_of(plane, (2, 0), (0, 2))
    F = adic_filtration(plane_m, Q)
    assert graded_piece(F, (1, 2)) == plane_m * power(Q, 2)
    assert graded_piece(F, (0, 1)) == Q


def test_normal_pieces(plane):
    Q = ideal_of(plane, (3, 0), (0, 3))
    F = normal_filtration(Q)
    assert graded_piece(F, 1) == power(maximal_ideal(plane), 3)
    assert graded_piece(F, 2) == power(maximal_ideal(plane), 6)


def test_product_filtration_mixes_kinds(plane, plane_m):
    Q = ideal_of(plane, (3, 0), (0, 3))
    F = product_filtration([(FiltrationKind.NORMAL, Q), (FiltrationKind.ADIC, plane_m)])
    assert F.arity == 2
    assert graded_piece(F, (1, 1)) == power(plane_m, 4)
    assert F.describe() == 'product(normal((y^3, x^3)), adic((y, x)))'


def test_product_rejects_nested_kinds(plane_m):
    with pytest.raises(InputError):
        product_filtration([(FiltrationKind.RATLIFF_RUSH, plane_m)])


def test_restriction_reads_one_axis(plane, plane_m):
    Q = ideal_of(plane, (2, 0), (0, 2))
    F = adic_filtration(plane_m, Q)
    sub = restrict_to_axis(F, 1)
    assert sub.arity == 1
    assert graded_piece(sub, 3) == power(Q, 3)
    with pytest.raises(InputError):
        restrict_to_axis(F, 2)


def test_base_ideal_must_be_m_primary(plane):
    with pytest.raises(DomainError):
        adic_filtration(ideal_of(plane, (2, 0), (1, 1)))


def test_base_ideals_share_a_ring(plane_m, space_m):
    with pytest.raises(InputError):
        adic_filtration(plane_m, space_m)


def test_normal_filtration_needs_polynomial_ring(narita_ideal):
    with pytest.raises(UnsupportedError):
        normal_filtration(narita_ideal)


def test_dimension_and_first_piece(narita_ideal):
    F = adic_filtration(narita_ideal)
    assert F.dimension == 3
    assert F.first_piece() == narita_ideal


# ============================================================================
# RATLIFF-RUSH
# ============================================================================

def test_ratliff_rush_adds_missing_monomial(plane, gap_ideal):
    closure = ratliff_rush_closure(gap_ideal)
    assert closure == power(maximal_ideal(plane), 4)
    assert (2, 2) in closure


def test_ratliff_rush_of_powers_of_m_is_trivial(plane_m):
    for n in (1, 2, 3):
        assert ratliff_rush_closure(plane_m, n) == power(plane_m, n)


def test_ratliff_rush_needs_no_m_primary_hypothesis(plane):
    I = ideal_of(plane, (2, 0))
    assert ratliff_rush_closure(I) == I


def test_rr_filtration_pieces(plane, gap_ideal):
    F = rr_closed_filtration(adic_filtration(gap_ideal))
    m = maximal_ideal(plane)
    assert graded_piece(F, 1) == power(m, 4)
    assert graded_piece(F, 2) == power(m, 8)
    assert graded_piece(F, 0).is_unit
    assert F.describe() == 'rr(adic((y^4, x*y^3, x^3*y, x^4)))'


def test_multi_graded_rr_piece(plane_m):
    F = adic_filtration(plane_m, plane_m)
    assert ratliff_rush_piece(F, (1, 0)) == plane_m


def test_unstable_chain_carries_partial_chain(gap_ideal):
    with pytest.raises(UnstableError) as excinfo:
        ratliff_rush_closure(gap_ideal, kmax=2)
    assert len(excinfo.value.partial_chain) == 2


@pytest.mark.parametrize("gens, n", [
    (((4, 0), (3, 1), (1, 3), (0, 4)), 1),
    (((4, 0), (3, 1), (1, 3), (0, 4)), 2),
    (((5, 0), (4, 1), (1, 4), (0, 5)), 1),
    (((3, 0), (0, 3)), 1),
    (((2, 0), (1, 1), (0, 3)), 2),
])
def test_ratliff_rush_matches_power_oracle(plane, gens, n):
    I = ideal_of(plane, *gens)
    closure = ratliff_rush_closure(I, n)
    bounds = pure_power_bounds(power(I, n))
    expected = rr_by_powers(I, n, bounds)
    assert {a for a in box(bounds) if in_ideal(a, closure)} == expected


# ============================================================================
# INTEGRAL CLOSURE
# ============================================================================

def test_closure_of_parameter_ideal(plane):
    Q = ideal_of(plane, (3, 0), (0, 3))
    assert integral_closure(Q) == power(maximal_ideal(plane), 3)


def test_closure_of_integrally_closed_ideal(plane):
    I = ideal_of(plane, (2, 0), (1, 1), (0, 3))
    assert integral_closure(I) == I
    assert integral_closure_power(I, 2) == power(I, 2)


def test_newton_membership_boundary_points(plane):
    Q = ideal_of(plane, (3, 0), (0, 3))
    assert newton_membership((2, 1), Q, 1)
    assert not newton_membership((1, 1), Q, 1)
    assert newton_membership((3, 3), Q, 2)
    assert not newton_membership((2, 3), Q, 2)


def test_closure_needs_polynomial_ring(narita_ideal):
    with pytest.raises(UnsupportedError):
        integral_closure(narita_ideal)


@pytest.mark.parametrize("gens, n", [
    (((3, 0), (0, 3)), 1),
    (((3, 0), (0, 3)), 2),
    (((4, 0), (3, 1), (1, 3), (0, 4)), 1),
    (((5, 0), (0, 2)), 1),
    (((2, 0, 0), (0, 2, 0), (0, 0, 2)), 1),
    (((3, 0, 0), (0, 2, 0), (0, 0, 1)), 2),
])
def test_closure_matches_power_oracle(gens, n):
    ring = AmbientRing(('x', 'y', 'z')[:len(gens[0])])
    I = ideal_of(ring, *gens)
    closure = integral_closure_power(I, n)
    bounds = pure_power_bounds(power(I, n))
    expected = closure_by_powers(I, n, bounds)
    assert {a for a in box(bounds) if in_ideal(a, closure)} == expected


# ============================================================================
# FILTRATION AXIOMS AND CLOSURE ORDER
# ============================================================================

def filtration_of_kind(kind, plane):
    m = maximal_ideal(plane)
    gap = ideal_of(plane, (4, 0), (3, 1), (1, 3), (0, 4))
    wide = ideal_of(plane, (3, 0), (1, 1), (0, 3))
    Q = ideal_of(plane, (3, 0), (0, 3))
    return {
        'adic': lambda: adic_filtration(gap),
        'normal': lambda: normal_filtration(wide),
        'rr': lambda: rr_closed_filtration(adic_filtration(gap)),
        'multi-adic': lambda: adic_filtration(m, Q),
        'product': lambda: product_filtration([(FiltrationKind.NORMAL, Q), (FiltrationKind.ADIC, m)]),
    }[kind]()


@pytest.mark.parametrize("kind", ['adic', 'normal', 'rr', 'multi-adic', 'product'])
def test_filtration_axioms_on_small_grid(plane, kind):
    F = filtration_of_kind(kind, plane)
    s = F.arity
    grid = list(itertools.product(range(4), repeat=s))
    assert graded_piece(F, (0,) * s).is_unit
    for n in grid:
        piece = graded_piece(F, n)
        for i in range(s):
            step = tuple(x + (j == i) for j, x in enumerate(n))
            assert contains_ideal(piece, graded_piece(F, step))
        for k in grid:
            total = tuple(a + b for a, b in zip(n, k))
            assert contains_ideal(graded_piece(F, total), multiply(piece, graded_piece(F, k)))


@pytest.mark.parametrize("gens", [
    ((3, 0), (0, 3)),
    ((4, 0), (3, 1), (1, 3), (0, 4)),
    ((5, 0), (1, 1), (0, 2)),
])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_closure_of_powers_scales_newton_polyhedron(plane, gens, n):
    I = ideal_of(plane, *gens)
    assert integral_closure_power(I, n) == integral_closure(power(I, n))


@pytest.mark.parametrize("gens", [
    ((3, 0), (0, 3)),
    ((4, 0), (3, 1), (1, 3), (0, 4)),
    ((5, 0), (4, 1), (1, 4), (0, 5)),
])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_ratliff_rush_sits_between_power_and_closure(plane, gens, n):
    In = power(ideal_of(plane, *gens), n)
    rr = ratliff_rush_closure(In)
    assert contains_ideal(rr, In)
    assert contains_ideal(integral_closure(In), rr)
