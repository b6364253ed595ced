"""Quantum affine layer: the vector representation, evaluation and spectral
twisting, coproduct tensors, relation checking, normalized intertwiners and
their denominators, minuscule fusion, irreducibility, and the staircase
transfer scalar."""

from fractions import Fraction

import pytest

from klrlab.linalg import SMat
from klrlab.qaffine import (
    UqAffModule,
    affine_cartan,
    affinization,
    burnside_irreducible,
    check_uq_relations,
    dominant_extremal_vector,
    evaluate_at,
    fuse_fundamental,
    g_lemma_check,
    invert_spectral_variable,
    lift_spectral,
    module_to_dict,
    normalized_R_VV,
    solve_hom,
    solve_normalized_R,
    span_submodule,
    specialize_spectral,
    tensor,
    tensor_chain,
    trivial_rep,
    vector_rep,
    vv_braid_identity_check,
    vv_unitarity_check,
)
from klrlab.rings import Rq, Rz, ZPoly, rq_from_text, zpoly_to_text


def mq(n):
    return Rq.minus_q_power(n)


def fundamental_at_one(ell, N):
    c0 = mq(ell - 1)
    return evaluate_at(fuse_fundamental(ell, c0, N), Rq.ONE / c0)


def expected_denominator(k, l, N):
    out = ZPoly.const(Rq.ONE)
    for s in range(1, min(k, l, N - k, N - l) + 1):
        root = mq(abs(k - l) + 2 * s)
        out = out * ZPoly((-root, Rq.ONE))
    return out


# -- diagram and basic modules ------------------------------------------------


def test_affine_cartan_small():
    assert affine_cartan(2) == ((2, -2), (-2, 2))
    assert affine_cartan(3) == ((2, -1, -1), (-1, 2, -1), (-1, -1, 2))
    row = affine_cartan(5)[0]
    assert row == (2, -1, 0, 0, -1)


def test_affine_cartan_rejects_rank_one():
    with pytest.raises(ValueError):
        affine_cartan(1)


def test_vector_rep_weights_and_actions():
    V = vector_rep(2)
    assert V.dim() == 2
    assert V.weights == ((-1, 1), (1, -1))
    # raising at node 1 sends u_2 to u_1, node 0 sends u_1 to u_2
    assert V.raising[1].cols[1] == {0: Rq.ONE}
    assert V.raising[0].cols[0] == {1: Rq.ONE}
    assert V.lowering[1].cols[0] == {1: Rq.ONE}


def test_vector_rep_weight_rows_sum_to_zero():
    for N in (2, 3, 4, 5):
        for w in vector_rep(N).weights:
            assert sum(w) == 0


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_vector_rep_relations(N):
    assert check_uq_relations(vector_rep(N)).ok


def test_trivial_rep_relations():
    T = trivial_rep(3)
    assert T.dim() == 1
    assert T.weights == ((0, 0, 0),)
    assert check_uq_relations(T).ok


def test_module_validation_errors():
    V = vector_rep(2)
    with pytest.raises(ValueError):
        UqAffModule(2, ("a",), ((1, 1),), V.raising, V.lowering)
    with pytest.raises(ValueError):
        UqAffModule(2, ("a", "b"), ((1, -1), (0,)), V.raising, V.lowering)
    with pytest.raises(ValueError):
        UqAffModule(2, ("a",), ((0, 0),), V.raising, V.lowering)
    with pytest.raises(ValueError):
        UqAffModule(1, ("a",), ((0,),), (SMat(1, 1),), (SMat(1, 1),))


def test_relation_checker_catches_corruption():
    V = vector_rep(3)
    raising = list(V.raising)
    bad = SMat(3, 3)
    bad.set(0, 1, Rq.q_power(1))  # wrong scalar on the node-1 raising arrow
    bad.set(2, 2, Rq.ONE)  # and an arrow that breaks the weight step
    raising[1] = bad
    M = UqAffModule(3, V.labels, V.weights, raising, V.lowering)
    rep = check_uq_relations(M)
    assert not rep.ok
    names = {name for name, _ in rep.failures}
    assert "raise-weight-step" in names


# -- evaluation and the spectral variable -------------------------------------


def test_evaluate_scales_only_the_affine_node():
    V = vector_rep(3)
    c = Rq.q_power(4)
    M = evaluate_at(V, c)
    assert M.raising[0] == V.raising[0].scale(c)
    assert M.lowering[0] == V.lowering[0].scale(Rq.ONE / c)
    for i in (1, 2):
        assert M.raising[i] == V.raising[i]
        assert M.lowering[i] == V.lowering[i]
    assert check_uq_relations(M).ok


def test_evaluate_rejects_bad_parameters():
    V = vector_rep(2)
    with pytest.raises(ValueError):
        evaluate_at(V, Rq.ZERO)
    with pytest.raises(TypeError):
        evaluate_at(affinization(V), Rq.ONE)


def test_evaluation_composes_multiplicatively():
    V = vector_rep(3)
    x, y = Rq.q_power(2), mq(3)
    twice = evaluate_at(evaluate_at(V, x), y)
    once = evaluate_at(V, x * y)
    assert twice.raising == once.raising
    assert twice.lowering == once.lowering


def test_affinization_carries_z_and_keeps_relations():
    V = vector_rep(3)
    A = affinization(V)
    assert A.field is Rz
    zv = Rz(ZPoly.gen())
    assert A.raising[0] == lift_spectral(V).raising[0].scale(zv)
    assert check_uq_relations(A).ok


# -- tensor products ----------------------------------------------------------


def test_tensor_weights_add_and_relations_hold():
    V = vector_rep(3)
    W = tensor(V, evaluate_at(V, Rq.q_power(2)))
    assert W.dim() == 9
    assert W.weights[0 * 3 + 1] == tuple(
        a + b for a, b in zip(V.weights[0], V.weights[1]))
    assert check_uq_relations(W).ok


def test_tensor_evaluation_distributes():
    V = vector_rep(3)
    F = fuse_fundamental(2, mq(1), 3)
    x = Rq.q_power(2)
    lhs = evaluate_at(tensor(V, F), x)
    rhs = tensor(evaluate_at(V, x), evaluate_at(F, x))
    assert lhs.raising == rhs.raising
    assert lhs.lowering == rhs.lowering


def test_tensor_is_coassociative_on_the_flattened_basis():
    V = vector_rep(2)
    A = evaluate_at(V, Rq.q_power(2))
    B = evaluate_at(V, mq(3))
    left = tensor(tensor(V, A), B)
    right = tensor(V, tensor(A, B))
    assert left.weights == right.weights
    assert left.raising == right.raising
    assert left.lowering == right.lowering
    assert tensor_chain([V, A, B]).raising == left.raising


def test_mixed_spectral_tensor_relations():
    V = vector_rep(3)
    M = tensor(lift_spectral(V), affinization(V))
    assert M.field is Rz
    assert check_uq_relations(M).ok


# -- the normalized swap on the vector representation -------------------------


def test_normalized_R_VV_frozen_entries():
    R = normalized_R_VV(2)
    zv = Rz(ZPoly.gen())
    one = Rz.ONE
    q = Rz(ZPoly.const(Rq.q_power(1)))
    den = zv - q * q
    # diagonal letter pairs are fixed
    assert R.cols[0][0] == one
    assert R.cols[3][3] == one
    # u_1 (x) u_2: stay keeps x-power 1, swap carries q(z-1)
    assert R.cols[1][1] == (one - q * q) / den
    assert R.cols[1][2] == q * (zv - one) / den
    # u_2 (x) u_1: stay picks up the z factor
    assert R.cols[2][2] == (one - q * q) * zv / den
    assert R.cols[2][1] == q * (zv - one) / den


@pytest.mark.parametrize("N", [2, 3])
def test_normalized_R_VV_intertwines(N):
    V = vector_rep(N)
    R = normalized_R_VV(N)
    src = tensor(lift_spectral(V), affinization(V))
    tgt = tensor(affinization(V), lift_spectral(V))
    for A, B in zip(list(src.raising) + list(src.lowering),
                    list(tgt.raising) + list(tgt.lowering)):
        assert R.compose(A) == B.compose(R)


@pytest.mark.parametrize("N", [2, 3])
def test_solver_reproduces_closed_form(N):
    V = vector_rep(N)
    X, den = solve_normalized_R(V, V)
    assert X == normalized_R_VV(N)
    assert zpoly_to_text(den) == "z - q^2"


def test_solver_unitarity_under_variable_inversion():
    V = vector_rep(3)
    X, _den = solve_normalized_R(V, V)
    Y = X.map_values(invert_spectral_variable)
    assert Y.compose(X) == SMat.identity(9, Rz.ONE)


def test_specialize_spectral_and_pole_refusal():
    V = vector_rep(2)
    X, den = solve_normalized_R(V, V)
    good = specialize_spectral(X, Rq.q_power(4))
    assert good.cols[0][0] == Rq.ONE
    with pytest.raises(ArithmeticError):
        specialize_spectral(X, Rq.q_power(2))


# -- denominators of fundamental pairs ----------------------------------------


@pytest.mark.parametrize("N,k,l", [
    (2, 1, 1),
    (3, 1, 1), (3, 1, 2), (3, 2, 1), (3, 2, 2),
    (4, 2, 2), (4, 1, 3),
])
def test_denominators_match_closed_form(N, k, l):
    X, den = solve_normalized_R(fundamental_at_one(k, N),
                                fundamental_at_one(l, N))
    assert den == expected_denominator(k, l, N)


def test_denominator_examples_text():
    _X, den = solve_normalized_R(fundamental_at_one(1, 3),
                                 fundamental_at_one(2, 3))
    assert zpoly_to_text(den) == "z + q^3"
    _X, den = solve_normalized_R(fundamental_at_one(2, 4),
                                 fundamental_at_one(2, 4))
    assert zpoly_to_text(den) == "(z - q^2)*(z - q^4)"


# -- fusion --------------------------------------------------------------------


def test_fuse_dimensions_and_relations():
    for N, ell, dim in ((2, 1, 2), (3, 2, 3), (4, 2, 6), (4, 3, 4)):
        M = fuse_fundamental(ell, mq(ell - 1), N)
        assert M.dim() == dim
        assert check_uq_relations(M).ok


def test_fuse_weights_frozen_for_degree_two():
    M = fuse_fundamental(2, mq(1), 3)
    assert M.weight_multiset() == ((-1, 0, 1), (0, 1, -1), (1, -1, 0))


def test_fuse_top_weight_is_minuscule():
    M = fundamental_at_one(2, 4)
    vec = dominant_extremal_vector(M)
    wts = {M.weights[k] for k in vec}
    assert wts == {(-1, 0, 1, 0)}


def test_fuse_trivial_degrees():
    for ell, c in ((0, mq(1)), (3, mq(2))):
        M = fuse_fundamental(ell, c, 3)
        assert M.dim() == 1
        assert M.weights == ((0, 0, 0),)


def test_fuse_rejects_bad_parameters():
    with pytest.raises(ValueError):
        fuse_fundamental(2, mq(2), 3)  # parity mismatch
    with pytest.raises(ValueError):
        fuse_fundamental(2, Rq.q_power(1) * 2, 3)  # not a power of -q
    with pytest.raises(ValueError):
        fuse_fundamental(4, mq(3), 3)  # degree out of range
    with pytest.raises(ValueError):
        fuse_fundamental(2, Rq.ZERO, 3)


def test_fuse_parses_cli_style_parameter():
    M = fuse_fundamental(2, rq_from_text("(-q)^3"), 3)
    assert M.dim() == 3


# -- submodule spans -----------------------------------------------------------


def test_span_submodule_rejects_unstable_span():
    V = vector_rep(2)
    W = tensor(V, evaluate_at(V, Rq.q_power(4)))
    with pytest.raises(ArithmeticError):
        span_submodule(W, [{0: Rq.ONE}])


def test_span_submodule_full_span_roundtrip():
    V = vector_rep(2)
    full = [{k: Rq.ONE} for k in range(2)]
    M, incl = span_submodule(V, full)
    assert M.dim() == 2
    assert M.raising == V.raising
    assert len(incl) == 2


# -- irreducibility ------------------------------------------------------------


def test_burnside_generic_tensor_is_irreducible():
    V = vector_rep(2)
    M = tensor(V, evaluate_at(V, Rq.q_power(4)))
    assert burnside_irreducible(M) is True


def test_burnside_detects_the_pole_point():
    V = vector_rep(2)
    M = tensor(V, evaluate_at(V, Rq.q_power(2)))
    assert burnside_irreducible(M) is False


def test_burnside_edge_cases():
    assert burnside_irreducible(trivial_rep(3)) is True
    V = vector_rep(3)
    with pytest.raises(ValueError):
        burnside_irreducible(tensor(V, V), bound=4)
    with pytest.raises(TypeError):
        burnside_irreducible(affinization(V))


def test_extremal_vector_unique_for_vector_rep():
    V = vector_rep(3)
    assert dominant_extremal_vector(V) == {0: Rq.ONE}


def test_extremal_vector_rejects_wide_kernels():
    V = vector_rep(2)
    M = tensor(V, evaluate_at(V, Rq.q_power(2)))
    with pytest.raises(ArithmeticError):
        dominant_extremal_vector(M)


# -- hom spaces ----------------------------------------------------------------


def test_solve_hom_identity_line():
    V = vector_rep(3)
    homs = solve_hom(V, V)
    assert len(homs) == 1
    mat = homs[0]
    diag = {mat.cols[j].get(j) for j in range(3)}
    assert len(diag) == 1 and None not in diag


def test_solve_hom_between_distinct_evaluations_is_zero():
    V = vector_rep(3)
    homs = solve_hom(V, evaluate_at(V, Rq.q_power(2)))
    assert homs == []


# -- symbolic pair identities ---------------------------------------------------


@pytest.mark.parametrize("N", [2, 3])
def test_symbolic_unitarity_and_braid(N):
    assert vv_unitarity_check(N)
    assert vv_braid_identity_check(N)


# -- staircase transfer scalar ---------------------------------------------------


@pytest.mark.parametrize("b,N", [(0, 2), (2, 2), (0, 3), (2, 3)])
def test_transfer_scalar_matches(b, N):
    report = g_lemma_check(b, N)
    assert report["invariant_dimension"] == 1
    assert report["ok"]


def test_transfer_scalar_text():
    report = g_lemma_check(2, 2)
    assert report["transfer_scalar"] == "((q)*z - q)/(z - q^2)"


# -- serialization ---------------------------------------------------------------


def test_module_to_dict_snapshot():
    import json

    V = vector_rep(2)
    d = module_to_dict(V)
    json.dumps(d)
    assert d["nodes"] == 2 and d["dim"] == 2
    assert d["weights"] == [[-1, 1], [1, -1]]
    assert d["raising"]["0"] == [[1, 0, "1"]]
    assert d["raising"]["1"] == [[0, 1, "1"]]
    assert d["lowering"]["0"] == [[0, 1, "1"]]
