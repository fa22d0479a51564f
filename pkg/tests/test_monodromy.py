import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundary_lacunas.families import parse_class
from boundary_lacunas.monodromy import (
    CycleVector,
    apply_word,
    coupling_blocks,
    dot_graph,
    eta_matrix,
    generator,
    generator_inverse,
    is_indecomposable,
    model_from_eta,
    obstruction,
    orientation_flip,
    rank_report,
)

F4_PRINTED = [[0, 1, 0, 0], [-1, 0, 0, 0], [1, 0, -2, 1], [-1, 1, 1, -2]]

# B_k instance as printed, with its symbolic signs evaluated at k = 7; None is an ellipsis
_ = None
B7_PRINTED = [
    [-2, 1, 0, _, _, _, 0],
    [0, 0, -1, 0, _, _, 0],
    [_, 1, 0, 1, 0, _, 0],
    [_, 0, -1, _, _, _, 0],
    [_, _, 0, _, 0, 1, 0],
    [_, _, _, _, -1, 0, -1],
    [0, 0, 0, 0, 0, 1, 0],
]
del _


def c_pattern(k):
    """Zero first row, then the tridiagonal (1, -2, 1) band."""
    eta = np.zeros((k, k), dtype=int)
    for i in range(1, k):
        eta[i, i - 1] = 1
        eta[i, i] = -2
        if i + 1 < k:
            eta[i, i + 1] = 1
    return eta


def b_pattern(k):
    """Row 1 = (-2, 1, 0...); row i >= 2 has (-1)^(k-i+2) beside an empty diagonal, column 1 aside."""
    eta = np.zeros((k, k), dtype=int)
    eta[0, 0], eta[0, 1] = -2, 1
    for i in range(2, k + 1):
        sign = (-1) ** (k - i + 2)
        for j in (i - 1, i + 1):
            if 2 <= j <= k:
                eta[i - 1, j - 1] = sign
    return eta


MODELS = [("F4", None, "+")] + [(f, k, "+") for f in "BC" for k in range(2, 11)]
model_st = st.sampled_from(MODELS).map(lambda a: eta_matrix(parse_class(*a)))


def test_f4_matrix_entry_by_entry():
    for sign in "+-":
        assert [list(r) for r in eta_matrix(parse_class("F4", None, sign)).eta] == F4_PRINTED


def test_b7_matches_printed_instance():
    eta = eta_matrix(parse_class("B", 7, "+")).eta
    for i, row in enumerate(B7_PRINTED):
        for j, v in enumerate(row):
            if v is not None:
                assert eta[i][j] == v, (i + 1, j + 1)


@pytest.mark.parametrize("k", range(2, 11))
def test_b_and_c_patterns(k):
    np.testing.assert_array_equal(eta_matrix(parse_class("C", k, "+")).eta_array(), c_pattern(k))
    np.testing.assert_array_equal(eta_matrix(parse_class("B", k, "-")).eta_array(), b_pattern(k))


def test_b_pattern_agrees_with_printed_instance():
    b7 = b_pattern(7)
    for i, row in enumerate(B7_PRINTED):
        for j, v in enumerate(row):
            if v is not None:
                assert b7[i, j] == v


def test_stabilized_classes_are_rejected():
    with pytest.raises(ValueError):
        eta_matrix(parse_class("B", 3, "+", (1, 0)))


@given(model_st, st.data())
def test_generators_are_unimodular_with_expected_order(model, data):
    i = data.draw(st.integers(1, model.dim))
    m = generator(model, i)
    assert round(abs(np.linalg.det(m))) == 1
    ident = np.eye(model.dim, dtype=int)
    if any(model.eta[i - 1]):
        assert np.array_equal(m @ m, ident) == (model.eta[i - 1][i - 1] == -2)
    else:
        # a zero row (beta_0 of C_k) gives the identity
        assert np.array_equal(m, ident)
    assert np.array_equal(m @ generator_inverse(model, i), ident)


@given(model_st, st.data(), st.integers(-4, 6))
def test_transvection_powers_closed_form(model, data, power):
    zero_diag = [i for i in range(1, model.dim + 1) if model.eta[i - 1][i - 1] == 0]
    if not zero_diag:
        return
    i = data.draw(st.sampled_from(zero_diag))
    m = generator(model, i) if power >= 0 else generator_inverse(model, i)
    mp = np.linalg.matrix_power(m, abs(power))
    e = np.zeros((model.dim, 1), dtype=int)
    e[i - 1, 0] = 1
    expected = np.eye(model.dim, dtype=int) + power * e @ model.eta_array()[i - 1 : i]
    assert np.array_equal(mp, expected)


@given(model_st, st.data())
def test_word_action_matches_matrix_product(model, data):
    letters = [s * i for i in range(1, model.dim + 1) for s in (1, -1)]
    word = data.draw(st.lists(st.sampled_from(letters), max_size=6))
    v = data.draw(st.lists(st.integers(-3, 3), min_size=model.dim, max_size=model.dim))
    mat = np.eye(model.dim, dtype=int)
    for g in word:
        mat = (generator(model, g) if g > 0 else generator_inverse(model, -g)) @ mat
    assert list(apply_word(model, word, CycleVector(v)).coeffs) == list(mat @ np.array(v))


@given(model_st, st.data())
def test_inverse_letters_cancel_with_coupling(model, data):
    dim = model.dim
    v = data.draw(st.lists(st.integers(-3, 3), min_size=dim, max_size=dim))
    c = data.draw(st.lists(st.integers(-2, 2), min_size=dim, max_size=dim))
    i = data.draw(st.integers(1, dim))
    vec = CycleVector(v, c)
    assert apply_word(model, [i, -i], vec) == vec
    assert apply_word(model, [-i, i], vec) == vec


@pytest.mark.parametrize("args", MODELS, ids=lambda a: f"{a[0]}{a[1] or ''}")
def test_coupling_graph_connected(args):
    model = eta_matrix(parse_class(*args))
    assert is_indecomposable(model)
    assert is_indecomposable(orientation_flip(model, [1, model.dim]))


def test_block_diagonal_control_is_decomposable():
    eta = np.zeros((5, 5), dtype=int)
    eta[:2, :2] = [[-2, 1], [1, -2]]
    eta[2:, 2:] = [[0, 1, 0], [-1, 0, 1], [0, 1, -2]]
    model = model_from_eta(eta)
    assert not is_indecomposable(model)
    assert coupling_blocks(model) == [[1, 2], [3, 4, 5]]


@settings(max_examples=50)
@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_permuted_block_diagonal_stays_decomposable(a, b, rnd):
    n = a + b
    eta = np.zeros((n, n), dtype=int)
    eta[:a, :a] = np.array([[rnd.randint(-2, 2) for _ in range(a)] for _ in range(a)])
    eta[a:, a:] = np.array([[rnd.randint(-2, 2) for _ in range(b)] for _ in range(b)])
    perm = list(range(n))
    rnd.shuffle(perm)
    assert not is_indecomposable(eta[np.ix_(perm, perm)])


def test_rank_reports():
    assert rank_report(parse_class("F4", None, "-")).to_json() == {"absolute": 5, "relative": 4, "model_dim": 4}
    for k in range(2, 11):
        for fam in "BC":
            r = rank_report(parse_class(fam, k, "+"))
            assert (r.absolute, r.relative) == (k + 1, k)


def test_obstruction_grows_linearly():
    model = eta_matrix(parse_class("F4", None, "+"))
    verdict = obstruction(model, CycleVector.basis(4, 2))
    assert verdict.obstructed and verdict.coupling != 0
    steps = np.diff(verdict.growth)
    assert np.all(steps == verdict.coupling)
    # replay: gamma_g^m after the word adds m * coupling
    start = apply_word(model, verdict.word, CycleVector.basis(4, 2))
    g = verdict.generator
    after = apply_word(model, [g] * 3, start)
    assert after.coeffs[g - 1] - start.coeffs[g - 1] == 3 * verdict.coupling


def test_obstruction_absent_when_transvections_cannot_couple():
    # reflections only: the orbit is finite and no eta_ii = 0 generator exists
    model = model_from_eta([[-2, 1], [1, -2]])
    assert not obstruction(model, CycleVector([1, 0])).obstructed


def test_obstruction_rejects_zero_class():
    with pytest.raises(ValueError):
        obstruction(eta_matrix(parse_class("C", 3, "+")), CycleVector([0, 0, 0]))


def test_dot_output_lists_edges():
    text = dot_graph(eta_matrix(parse_class("C", 3, "+")))
    assert text.startswith('graph "C3+"') and "b1 -- b2" in text and "b2 -- b3" in text
