"""Multisegment layer: ordering, simple-module construction by image of the
composite swap, character tables, decomposition, two-segment case reports,
self-duality shifts, and the nilpotency filtration."""

from fractions import Fraction

import pytest

from klrlab.modules import (
    MatrixKLRModule,
    check_module_relations,
    convolution,
    convolution_list,
    find_isomorphism,
    graded_character,
    segment_module,
    solve_module_maps,
    spectral_twist,
)
from klrlab.rings import LaurentHalf, quantum_factorial
from klrlab.rmatrix import renormalized_r
from klrlab.simples import (
    Segment,
    all_pairs_isomorphic,
    convolution_character,
    cut_simple,
    decompose,
    dual_shift_check,
    enumerate_multisegments,
    exact_sequence_check,
    head_shift,
    image_with_inclusion,
    irreducibility_report,
    is_ordered,
    kato_block_character,
    kernel_with_inclusion,
    multisegment_content,
    operator_algebra_dimension,
    order_multisegment,
    pair_swap_isomorphic,
    rigidity_nilpotency,
    segment_case_analysis,
    segment_character,
    shifted_module,
    simple_character_table,
    simple_module,
    standard_module,
    submodule_from_vectors,
)

ONE = LaurentHalf.one()


def ms(*pairs):
    return tuple(Segment(a, b) for a, b in pairs)


# -- segments and ordering ----------------------------------------------------


def test_segment_rejects_reversed_endpoints():
    with pytest.raises(ValueError):
        Segment(2, 1)


def test_segment_basic_data():
    s = Segment(1, 3)
    assert s.length == 3
    assert s.letters() == (1, 2, 3)


def test_order_multisegment_examples():
    assert order_multisegment([(0, 1), (1, 2)]) == ms((1, 2), (0, 1))
    assert order_multisegment([(2, 2), (2, 5)]) == ms((2, 5), (2, 2))
    assert order_multisegment([]) == ()


def test_order_multisegment_is_stable_for_ties():
    a, b = Segment(0, 1), Segment(0, 1)
    ordered = order_multisegment([a, b])
    assert ordered[0] is a and ordered[1] is b


def test_is_ordered():
    assert is_ordered(ms((1, 2), (0, 1)))
    assert is_ordered(ms((2, 5), (2, 2)))
    assert not is_ordered(ms((0, 1), (1, 2)))


def test_multisegment_content():
    assert multisegment_content(ms((1, 2), (0, 1))) == {0: 1, 1: 2, 2: 1}


def test_enumerate_multisegments_small():
    assert set(enumerate_multisegments({0: 1, 1: 1})) == {
        ms((0, 1)), ms((1, 1), (0, 0))}
    assert enumerate_multisegments({0: 2}) == [ms((0, 0), (0, 0))]
    assert len(enumerate_multisegments({0: 2, 1: 2})) == 3
    assert enumerate_multisegments({}) == [()]


def test_enumerate_multisegments_all_ordered_with_content():
    content = {0: 1, 1: 2, 2: 1}
    out = enumerate_multisegments(content)
    assert len(out) == len(set(out))
    for m in out:
        assert is_ordered(m)
        assert multisegment_content(m) == content


def test_enumerate_multisegments_rejects_negative():
    with pytest.raises(ValueError):
        enumerate_multisegments({0: -1})


def test_head_shift_values():
    assert head_shift(ms((1, 2), (0, 1))) == 0
    assert head_shift(ms((1, 1), (0, 0))) == -1
    assert head_shift(ms((0, 0), (0, 0))) == 0  # equal pairs do not count
    assert head_shift(ms((0, 1), (0, 1), (0, 0))) == 2


# -- simple modules -----------------------------------------------------------


def test_simple_singleton_is_the_segment_module():
    s = simple_module([(1, 3)])
    assert s.dim() == 1
    assert s.d == 0
    assert s.character() == {(1, 2, 3): ONE}


def test_simple_overlap_pair():
    # the head of L(1,2) o L(0,1): 6 - 4 = 2 dimensional
    s = simple_module([(1, 2), (0, 1)])
    assert s.dim() == 2
    assert s.d == 0
    assert s.character() == {(1, 0, 2, 1): ONE, (1, 2, 0, 1): ONE}


def test_simple_repeated_segment_is_whole_standard():
    s = simple_module([(0, 1), (0, 1)])
    std = standard_module(ms((0, 1), (0, 1)))
    assert s.dim() == std.dim() == 6
    assert s.character() == graded_character(std)


def test_simple_rejects_unordered_input():
    with pytest.raises(ValueError):
        simple_module([(0, 1), (1, 2)])


def test_simple_module_passes_relations():
    s = simple_module([(1, 2), (0, 1)])
    assert check_module_relations(s.module).ok


def test_cut_simple_keeps_inclusion():
    s, inc = cut_simple([(1, 1), (0, 0)])
    assert s.dim() == 1
    assert s.d == -1
    assert inc.degree == 1          # inclusion carries degree -d
    assert inc.check() == []
    assert s.character() == {(1, 0): ONE}


def test_pair_swap_isomorphic():
    assert pair_swap_isomorphic((0, 1), (0, 1))        # equal
    assert pair_swap_isomorphic((0, 5), (1, 3))        # containment
    assert pair_swap_isomorphic((0, 1), (3, 4))        # unlinked
    assert not pair_swap_isomorphic((1, 2), (0, 1))    # overlap
    assert not pair_swap_isomorphic((1, 1), (0, 0))    # adjacent


def test_all_pairs_isomorphic_matches_full_rank():
    # when every pairwise swap is an isomorphism the composite is too,
    # so the cut loses nothing
    m = ms((0, 2), (0, 2))
    assert all_pairs_isomorphic(m)
    s, _ = cut_simple(m)
    assert s.dim() == standard_module(m).dim() == 20


# -- submodules, images, kernels ----------------------------------------------


def test_image_and_kernel_of_overlap_swap():
    g = renormalized_r(segment_module(1, 2), segment_module(0, 1))
    img, inc = image_with_inclusion(g)
    assert img.dim() == 2
    assert inc.check() == []
    ker, kinc = kernel_with_inclusion(g)
    assert ker.dim() == 4
    assert kinc.check() == []
    assert check_module_relations(img).ok
    assert check_module_relations(ker).ok
    # kernel is q L(0,2) o L(1,1): the identification raises degree by 1
    K = convolution(segment_module(0, 2), segment_module(1, 1))
    assert find_isomorphism(K, ker, 1) is not None
    assert find_isomorphism(K, ker, 0) is None


def test_submodule_rejects_inhomogeneous_vector():
    P = convolution(segment_module(0, 0), segment_module(0, 0))
    with pytest.raises(ValueError):
        submodule_from_vectors(P, {(0, 0): [[Fraction(1), Fraction(1)]]})


def test_submodule_rejects_unstable_span():
    P = convolution(segment_module(0, 0), segment_module(1, 1))
    word = (0, 1)
    block = [[Fraction(1)] + [Fraction(0)] * (
        len(P.component_degrees(word)) - 1)]
    with pytest.raises(ArithmeticError):
        submodule_from_vectors(P, {word: block})


def test_shifted_module_moves_degrees():
    m = shifted_module(segment_module(0, 2), 3)
    assert m.component_degrees((0, 1, 2)) == (3,)
    assert graded_character(m) == {(0, 1, 2): LaurentHalf.q(3)}


# -- characters and decomposition ---------------------------------------------


def test_convolution_character_matches_built_modules():
    cases = [
        [(0, 1), (1, 2)],
        [(0, 0), (0, 0), (1, 1)],
        [(2, 3), (0, 1)],
        [(0, 2), (1, 1)],
    ]
    for pairs in cases:
        built = graded_character(
            convolution_list([segment_module(a, b) for a, b in pairs]))
        assert convolution_character(
            [segment_character(p) for p in pairs]) == built


def test_convolution_character_empty_product():
    assert convolution_character([]) == {(): ONE}


def test_convolution_character_kato_eight():
    ch = convolution_character([segment_character((0, 0))] * 8)
    assert ch == {(0,) * 8: quantum_factorial(8).shift(-56)}


def test_kato_block_characters():
    # dim_q of the repeated-letter block of L(a)^{o m}
    for a in (0, 3):
        for m in (1, 2, 3, 4):
            expected = quantum_factorial(m).shift(-m * (m - 1))
            assert kato_block_character(a, m) == expected


def test_character_table_single_letter():
    assert simple_character_table({4: 1}) == {ms((4, 4)): {(4,): ONE}}


def test_character_table_two_letters():
    table = simple_character_table({0: 1, 1: 1})
    assert table == {
        ms((0, 1)): {(0, 1): ONE},
        ms((1, 1), (0, 0)): {(1, 0): ONE},
    }


def test_character_table_kato_weight():
    table = simple_character_table({0: 2})
    assert table == {
        ms((0, 0), (0, 0)): {(0, 0): ONE + LaurentHalf.q(-2)}}


def test_character_table_accepts_word():
    assert simple_character_table((0, 1)) == simple_character_table(
        {0: 1, 1: 1})


def test_character_table_letter_cap():
    with pytest.raises(ValueError):
        simple_character_table({0: 9})


def test_decompose_segment_module():
    assert decompose(segment_module(2, 4)) == [(ms((2, 4)), 0, 1)]


def test_decompose_standard_overlap():
    std = standard_module(ms((1, 2), (0, 1)))
    assert decompose(std) == [
        (ms((1, 2), (0, 1)), 0, 1),
        (ms((1, 1), (0, 2)), 1, 1),
    ]


def test_decompose_chain_order_convolution():
    m = convolution(segment_module(0, 0), segment_module(1, 1))
    assert decompose(m) == [
        (ms((1, 1), (0, 0)), 1, 1),
        (ms((0, 1)), 0, 1),
    ]


def test_decompose_kato_square():
    m = convolution(segment_module(0, 0), segment_module(0, 0))
    assert decompose(m) == [(ms((0, 0), (0, 0)), 0, 1)]


def test_decompose_sees_grading_shifts():
    std = shifted_module(standard_module(ms((1, 2), (0, 1))), 2)
    assert decompose(std) == [
        (ms((1, 2), (0, 1)), 2, 1),
        (ms((1, 1), (0, 2)), 3, 1),
    ]


def test_decompose_simple_is_singleton():
    for pairs in ([(0, 2)], [(1, 2), (0, 1)], [(1, 1), (0, 0)],
                  [(2, 2), (2, 2)]):
        s = simple_module(pairs)
        assert decompose(s) == [(ms(*pairs), 0, 1)]


def test_decompose_rejects_spectral_modules():
    with pytest.raises(ValueError):
        decompose(spectral_twist(segment_module(0, 1), "z"))


# -- two-segment case analysis ------------------------------------------------


def test_case_analysis_overlap():
    r = segment_case_analysis((1, 3), (0, 2))
    assert r["case"] == "overlap" and not r["swapped"]
    assert r["s"] == {"predicted": 2, "computed": 2}
    assert r["lambda"] == {"predicted": 0, "computed": 0}
    assert r["irreducible"] == {"predicted": False, "computed": False}
    assert r["ok"]


def test_case_analysis_adjacent_mirrored():
    r = segment_case_analysis((0, 2), (3, 4))
    assert r["case"] == "adjacent" and r["swapped"]
    assert r["lambda"] == {"predicted": -1, "computed": -1}
    assert r["ok"]


def test_case_analysis_containment_is_irreducible():
    r = segment_case_analysis((0, 5), (1, 3))
    assert r["case"] == "contains"
    assert r["irreducible"] == {"predicted": True, "computed": True}
    assert r["ok"]


def test_case_analysis_equal_and_unlinked():
    r = segment_case_analysis((1, 2), (1, 2))
    assert r["case"] == "equal" and r["ok"]
    assert r["s"] == {"predicted": 1, "computed": 1}
    r = segment_case_analysis((0, 1), (3, 4))
    assert r["case"] == "unlinked" and r["swapped"] and r["ok"]


def test_case_analysis_chain_is_mirrored_overlap():
    r = segment_case_analysis((0, 1), (1, 2))
    assert r["case"] == "overlap" and r["swapped"]
    assert r["ok"]


@pytest.mark.parametrize("pair", [
    ((1, 2), (0, 1)), ((1, 3), (0, 2)), ((2, 4), (0, 2)),
    ((0, 0), (1, 1)), ((3, 5), (3, 5)), ((1, 4), (2, 3)),
    ((5, 6), (0, 1)), ((2, 3), (0, 1)), ((0, 2), (1, 4)),
])
def test_case_analysis_agrees_with_computation(pair):
    assert segment_case_analysis(*pair)["ok"]


# -- exact sequences ----------------------------------------------------------


def shifted_char(module, e2):
    return {w: c.shift(e2) for w, c in graded_character(module).items()}


def test_exact_sequence_small_overlap():
    r = exact_sequence_check((1, 2), (0, 1))
    assert r["case"] == "overlap"
    assert r["dims"] == (4, 6, 6, 4)
    assert r["rank"] == 2
    end = convolution(segment_module(0, 2), segment_module(1, 1))
    assert r["kernel_character"] == shifted_char(end, 2)
    assert r["cokernel_character"] == shifted_char(end, -2)
    assert all(r["checks"].values())
    assert r["ok"]


def test_exact_sequence_large_overlap():
    r = exact_sequence_check((1, 3), (0, 2))
    assert r["dims"] == (15, 20, 20, 15)
    assert r["rank"] == 5
    end = convolution(segment_module(0, 3), segment_module(1, 2))
    assert r["kernel_character"] == shifted_char(end, 2)
    assert r["cokernel_character"] == shifted_char(end, -2)
    assert r["ok"]


def test_exact_sequence_adjacent():
    r = exact_sequence_check((2, 3), (0, 1))
    assert r["case"] == "adjacent"
    assert r["dims"] == (1, 6, 6, 1)
    assert r["rank"] == 5
    assert r["kernel_character"] == {(0, 1, 2, 3): LaurentHalf.q(1)}
    assert r["cokernel_character"] == {(0, 1, 2, 3): LaurentHalf.q(-1)}
    assert r["ok"]


def test_exact_sequence_accepts_mirrored_pair():
    r = exact_sequence_check((0, 1), (1, 2))
    assert r["swapped"]
    assert r["dims"] == (4, 6, 6, 4)
    assert r["ok"]


def test_exact_sequence_rejects_other_cases():
    for pair in (((1, 2), (1, 2)), ((0, 5), (1, 3)), ((0, 1), (3, 4))):
        with pytest.raises(ValueError):
            exact_sequence_check(*pair)


# -- self-duality -------------------------------------------------------------


@pytest.mark.parametrize("pairs,shift", [
    ([(1, 2)], 0),
    ([(0, 0), (0, 0)], -2),
    ([(1, 2), (0, 1)], 0),
    ([(2, 2), (2, 2), (2, 2)], -6),
])
def test_dual_shift(pairs, shift):
    r = dual_shift_check(pairs)
    assert r["expected_shift"] == shift
    assert r["character_bar"]
    assert r["character_shift"]
    assert r["isomorphism"]
    assert r["ok"]


# -- nilpotency filtration ------------------------------------------------------


def test_rigidity_two_strand():
    r = rigidity_nilpotency(0, 1, 2)
    assert r["dim"] == 6 and r["ker_dim"] == 3
    assert r["nilpotent"] and r["power_nonzero"]
    assert r["kernel_equals_image"]
    assert r["ok"]


def test_rigidity_three_strand():
    r = rigidity_nilpotency(0, 1, 3)
    assert r["dim"] == 20 and r["ker_dim"] == 10
    assert r["ok"]


def test_rigidity_base_case():
    for N in (2, 3):
        r = rigidity_nilpotency(1, 0, N)
        assert r["base_case_isomorphic"]
        assert r["ok"]


def test_rigidity_rejects_bad_arguments():
    with pytest.raises(ValueError):
        rigidity_nilpotency(0, 1, 1)
    with pytest.raises(ValueError):
        rigidity_nilpotency(0, -1, 2)


# -- irreducibility -----------------------------------------------------------


def test_operator_algebra_of_segment_module():
    dim, filled, _ = operator_algebra_dimension(segment_module(0, 2))
    assert (dim, filled) == (1, True)


def test_irreducible_head():
    r = irreducibility_report(simple_module([(1, 2), (0, 1)]))
    assert r["irreducible"]
    assert r["fills_matrix_space"]
    assert r["operator_algebra_dim"] == 4
    assert r["end0_dim"] == 1


def test_irreducible_kato_square():
    r = irreducibility_report(simple_module([(0, 0), (0, 0)]))
    assert r["irreducible"] and r["operator_algebra_dim"] == 4


def test_reducible_standard_module():
    r = irreducibility_report(standard_module(ms((1, 2), (0, 1))))
    assert not r["irreducible"]
    assert r["reason"] == "proper socle"
    assert r["socle_dim"] == 4


def test_reducible_adjacent_convolution():
    r = irreducibility_report(convolution(segment_module(1, 1),
                                          segment_module(0, 0)))
    assert not r["irreducible"]
    assert r["socle_dim"] == 1


def test_semisimple_sum_is_not_irreducible():
    # two copies of L(0,2) three degrees apart: semisimple but decomposable
    M = MatrixKLRModule((), {(0, 1, 2): (0, 3)}, {}, strands=3)
    assert check_module_relations(M).ok
    r = irreducibility_report(M)
    assert not r["irreducible"]
    assert r["socle_dim"] == 2
    assert r["end_total_dim"] == 4


def test_simple_images_are_irreducible():
    for pairs in ([(1, 1), (0, 0)], [(1, 1), (0, 2)], [(2, 3), (0, 1)]):
        assert irreducibility_report(simple_module(pairs))["irreducible"]


# -- hom spaces around the cut --------------------------------------------------


def test_head_hom_is_one_dimensional():
    # maps std -> simple exist only in the head degree, and uniquely
    std = standard_module(ms((1, 2), (0, 1)))
    s = simple_module([(1, 2), (0, 1)])
    assert len(solve_module_maps(std, s.module, 0)) == 1
    assert len(solve_module_maps(std, s.module, 1)) == 0
    assert len(solve_module_maps(std, s.module, -1)) == 0
