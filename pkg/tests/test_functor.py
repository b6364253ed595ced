"""Bridge layer: correction-scalar identities, the window monomial
identity, the arrow pattern from pole orders, segment and multisegment
images, window-against-letter matrix checks, and the truncated completed
comparison."""

from collections import Counter

import pytest

from klrlab.functor import (
    NormalizationTables,
    build_quiver,
    c_identities_check,
    central_structure_check,
    completed_swap_check,
    ffq_identity_check,
    functor_on_segment,
    functor_on_simple,
    pole_orders_from_denominator,
)
from klrlab.qaffine import (
    burnside_irreducible,
    check_uq_relations,
    trivial_rep,
    vector_rep,
)


def fequal(a, b):
    """Equality of unreduced fraction pairs by cross-multiplication."""
    return a[0] * b[1] == b[0] * a[1]


# -- correction scalars -------------------------------------------------------


@pytest.mark.parametrize("N,starts", [
    (3, [0]),
    (3, [-1]),
    (2, [-2]),
    (2, [0, 1]),
])
def test_c_identities_windows(N, starts):
    rep = c_identities_check(N, starts)
    assert rep.ok, rep.failures
    assert rep.checked >= 40


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_elementary_block_specializes_to_axis_factors(r):
    # freezing the first argument at zero recovers the one-variable factor;
    # freezing the second negates its reflection
    t = NormalizationTables(3)
    num, den = t.elementary_block(r)
    at_zero_u = (num.substitute({1: 0}), den.substitute({1: 0}))
    assert fequal(at_zero_u, t.axis_factor(r))
    swapped = t.axis_factor(-r)
    negated = (-swapped[0], swapped[1])
    at_zero_v = (num.substitute({2: 0}).extend_vars(3, (0, 2, 1)),
                 den.substitute({2: 0}).extend_vars(3, (0, 2, 1)))
    assert fequal(at_zero_v, negated)


def test_correction_rejects_negative_distance():
    with pytest.raises(ValueError):
        NormalizationTables(2).base_correction(-1)


def test_tables_reject_rank_one():
    with pytest.raises(ValueError):
        NormalizationTables(1)


def test_window_prefactor_values():
    t = NormalizationTables(3)
    # interior and near edge carry one inverse power, the far edge an
    # extra sign, everything else is untouched
    assert t.window_prefactor(0, 0) == (1, -1)
    assert t.window_prefactor(0, 1) == (1, -1)
    assert t.window_prefactor(0, 2) == (1, 0)
    assert t.window_prefactor(0, 3) == (-1, -1)
    assert t.window_prefactor(0, -1) == (1, 0)
    assert t.window_prefactor(0, 4) == (1, 0)


# -- the two-window monomial identity ----------------------------------------


@pytest.mark.parametrize("a,b,N", [
    (0, 0, 2),
    (0, 0, 3),
    (0, 1, 2),
    (0, 2, 3),
    (1, 1, 3),
    (-1, 2, 3),
    (0, 5, 3),
])
def test_ffq_identity(a, b, N):
    rep = ffq_identity_check(a, b, N)
    assert rep.ok, rep.failures


# -- arrow patterns from pole orders ------------------------------------------


def test_quiver_integer_line_is_a_path():
    orders = pole_orders_from_denominator(2)
    quiver = build_quiver(range(6), orders)
    assert quiver.vertices == (0, 1, 2, 3, 4, 5)
    assert quiver.arrows == ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5))
    assert quiver.cartan == (
        (2, -1, 0, 0, 0, 0),
        (-1, 2, -1, 0, 0, 0),
        (0, -1, 2, -1, 0, 0),
        (0, 0, -1, 2, -1, 0),
        (0, 0, 0, -1, 2, -1),
        (0, 0, 0, 0, -1, 2),
    )


def test_quiver_singleton():
    quiver = build_quiver([4], pole_orders_from_denominator(3))
    assert quiver.vertices == (4,)
    assert quiver.arrows == ()
    assert quiver.cartan == ((2,),)


def test_quiver_distant_vertices_disconnect():
    quiver = build_quiver([0, 2], pole_orders_from_denominator(3))
    assert quiver.arrows == ()
    assert quiver.cartan == ((2, 0), (0, 2))


def test_quiver_pole_orders_match_scalar_table():
    solver = pole_orders_from_denominator(2)
    table = NormalizationTables(2)
    for i in range(-2, 3):
        for j in range(-2, 3):
            if i != j:
                assert solver(i, j) == table.pole_order(i, j)


def test_quiver_rejects_bad_input():
    with pytest.raises(ValueError):
        build_quiver([0, 0], NormalizationTables(2).pole_order)
    with pytest.raises(ValueError):
        build_quiver([0, 1], lambda i, j: 1)
    with pytest.raises(ValueError):
        build_quiver([0, 1], lambda i, j: -1)


# -- segment images -----------------------------------------------------------


def test_segment_single_letter_is_vector_rep():
    m = functor_on_segment(0, 0, 3)
    assert m.dim() == 3
    assert Counter(m.weights) == Counter(vector_rep(3).weights)
    assert check_uq_relations(m).ok
    assert burnside_irreducible(m)


def test_segment_full_window_is_trivial():
    m = functor_on_segment(0, 2, 3)
    assert m.dim() == 1
    assert m.weights == trivial_rep(3).weights


def test_segment_overlong_is_zero():
    assert functor_on_segment(0, 3, 3).dim() == 0
    assert functor_on_segment(-1, 1, 2).dim() == 0


def test_segment_middle_degree():
    m = functor_on_segment(1, 2, 3)
    assert m.dim() == 3
    assert check_uq_relations(m).ok


def test_segment_rejects_reversed_endpoints():
    with pytest.raises(ValueError):
        functor_on_segment(2, 1, 3)


# -- multisegment images ------------------------------------------------------


def test_simple_single_segment_delegates():
    via_ms = functor_on_simple([(1, 2)], 3)
    via_seg = functor_on_segment(1, 2, 3)
    assert via_ms.dim() == via_seg.dim()
    assert Counter(via_ms.weights) == Counter(via_seg.weights)


def test_simple_empty_multisegment_is_trivial():
    assert functor_on_simple([], 3).dim() == 1


def test_simple_two_segments_head_of_reducible_pair():
    m = functor_on_simple([(1, 2), (0, 0)], 3)
    assert m.dim() == 8
    assert check_uq_relations(m).ok
    assert burnside_irreducible(m)


def test_simple_image_ignores_input_order():
    reordered = functor_on_simple([(0, 0), (1, 2)], 3)
    assert reordered.dim() == 8


def test_simple_trivial_factor_drops_out():
    # a full-window segment contributes a one-dimensional tensor factor
    with_trivial = functor_on_simple([(1, 2), (0, 2), (0, 0)], 3)
    without = functor_on_simple([(1, 2), (0, 0)], 3)
    assert with_trivial.dim() == without.dim()


def test_simple_window_plus_letter_is_vector_rep_sized():
    m = functor_on_simple([(0, 2), (1, 1)], 3)
    assert m.dim() == 3
    assert Counter(m.weights) == Counter(vector_rep(3).weights)


def test_simple_overlong_segment_kills_image():
    assert functor_on_simple([(0, 4), (1, 1)], 3).dim() == 0


@pytest.mark.parametrize("ms,N,dim", [
    ([(1, 1), (0, 0)], 2, 3),
    ([(2, 2), (1, 1), (0, 0)], 3, 10),
])
def test_simple_consecutive_letters_fuse_to_symmetric_powers(ms, N, dim):
    m = functor_on_simple(ms, N)
    assert m.dim() == dim
    assert burnside_irreducible(m)


# -- window-against-letter matrix identities ----------------------------------


@pytest.mark.parametrize("a,b,j,N", [
    (0, 0, 0, 2),
    (0, 0, 1, 2),
    (0, 0, -1, 2),
    (0, 0, 3, 2),
    (0, 1, 0, 2),
    (0, 0, 0, 3),
    (0, 0, 1, 3),
    (0, 0, 2, 3),
    (0, 0, 3, 3),
    (0, 0, -1, 3),
    (0, 1, 1, 3),
    (0, 2, 0, 3),
])
def test_central_structure(a, b, j, N):
    rep = central_structure_check(a, b, j, N)
    assert rep.ok, rep.failures
    assert rep.checked >= 10


# -- completed comparison -------------------------------------------------------


@pytest.mark.parametrize("i,j,N", [
    (0, 1, 2),
    (1, 0, 2),
    (0, 0, 2),
    (0, 2, 3),
    (0, 3, 3),
    (2, 3, 3),
    (-1, 0, 3),
])
def test_completed_swap(i, j, N):
    rep = completed_swap_check(i, j, N)
    assert rep.ok, rep.failures


def test_completed_swap_deeper_truncation():
    rep = completed_swap_check(0, 1, 2, order=5)
    assert rep.ok, rep.failures
