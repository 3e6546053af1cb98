from fractions import Fraction

import numpy as np
import pytest

from errors import ParameterError
from group_ring import RingElement
from lamplighter import A, T, HElement, h_mul
from representations import assemble_operator, build, markov_matrix, permutation, word_permutation
from representations.quotient import quotient_image, quotient_mul
from representations.tree import act, mask_to_word, one_plus_u_power, tree_action, truncate, word_to_mask


def test_level_one_matrix():
    assert markov_matrix("tree", 1).to_lists() == [[2, 2], [2, 2]]


def test_level_two_matrix():
    assert markov_matrix("tree", 2).to_lists() == [
        [2, 1, 0, 1],
        [1, 0, 1, 2],
        [0, 1, 2, 1],
        [1, 2, 1, 0],
    ]


def test_level_two_generators():
    rep = build("tree", 2)
    assert rep.t_perm == (0, 3, 2, 1)
    at = permutation(rep, h_mul(A, T))
    assert list(at) == [1, 2, 3, 0]


def test_tree_action_on_words():
    assert tree_action(T, "10", 2) == "11"
    assert tree_action(T, "11", 2) == "10"
    assert tree_action(A, "000", 3) == "100"
    with pytest.raises(ParameterError):
        tree_action(T, "102", 3)
    with pytest.raises(ParameterError):
        tree_action(T, 8, 3)


def test_word_mask_conversion():
    assert word_to_mask("011", 3) == 6
    assert mask_to_word(6, 3) == "011"


def test_inverse_power_of_one_plus_u():
    for n in (1, 3, 6):
        assert one_plus_u_power(1, n) == 0b11 & ((1 << n) - 1)
        for s in range(1 << n):
            assert act(T, act(HElement((), -1), s, n), n) == s


@pytest.mark.parametrize("n", [1, 4, 8])
def test_markov_matrix_is_symmetric_stochastic(n):
    m = markov_matrix("tree", n)
    assert m.symmetric
    assert set(m.row_sums()) == {4}
    assert set(m.col_sums()) == {4}


def test_levels_are_compatible():
    x = HElement((-2, 3), 5)
    for s in range(1 << 5):
        assert truncate(act(x, s, 5), 4) == act(x, truncate(s, 4), 4)


def test_relation_words_act_trivially():
    rep = build("tree", 6)
    comm = ["t^-1", "a^-1", "t", "a^-1", "t^-1", "a", "t", "a"]
    assert np.array_equal(word_permutation(rep, comm), np.arange(rep.dim))
    assert np.array_equal(word_permutation(rep, ["a", "a"]), np.arange(rep.dim))
    with pytest.raises(ParameterError):
        word_permutation(rep, ["s"])


def test_word_permutation_matches_direct_action():
    rep = build("tree", 5)
    word = ["t", "a", "t^-1", "t^-1"]
    x = HElement((1,), -1)
    assert np.array_equal(word_permutation(rep, word), permutation(rep, x))


@pytest.mark.parametrize("n", [0, 17])
def test_tree_level_bounds(n):
    with pytest.raises(ParameterError):
        build("tree", n)


def test_unknown_kind():
    with pytest.raises(ParameterError):
        build("torus", 2)


def test_quotient_order_and_symmetry():
    rep = build("quotient", 3)
    assert rep.dim == 24
    m = markov_matrix("quotient", 3)
    assert m.symmetric
    assert set(m.row_sums()) == {4}


@pytest.mark.parametrize("n", [1, 13])
def test_quotient_bounds(n):
    with pytest.raises(ParameterError):
        build("quotient", n)


def test_quotient_map_is_a_homomorphism():
    x, y = HElement((-3, 1), 4), HElement((0, 2, 7), -5)
    for n in (2, 3, 5):
        assert quotient_mul(quotient_image(x, n), quotient_image(y, n), n) == quotient_image(h_mul(x, y), n)


def test_assemble_operator_rejects_fractions():
    with pytest.raises(ParameterError):
        assemble_operator(build("tree", 2), RingElement.from_terms([(T, Fraction(1, 2))]))


def test_assemble_operator_of_a():
    m = assemble_operator(build("tree", 1), RingElement.from_terms([(A, 3)]))
    assert m.to_lists() == [[0, 3], [3, 0]]


def test_level_one_generators():
    rep = build("tree", 1)
    assert rep.t_perm == (0, 1)
    assert rep.a_perm == (1, 0)


def test_a_flips_the_first_bit_at_level_two():
    assert [tree_action(A, w, 2) for w in ("00", "10", "01", "11")] == ["10", "00", "11", "01"]
    assert tree_action(T, "01", 2) == "01"


def test_identity_fixes_every_state():
    assert list(permutation(build("tree", 4), HElement())) == list(range(16))


def test_delta_e_assembles_to_identity():
    m = assemble_operator(build("tree", 3), RingElement.from_terms([(HElement(), 1)]))
    assert m.to_lists() == [[int(r == c) for c in range(8)] for r in range(8)]


def test_conjugate_matches_table_composition():
    rep = build("tree", 3)
    x = HElement((-1,), 0)
    assert np.array_equal(permutation(rep, x), word_permutation(rep, ["t^-1", "a", "t"]))


def test_a_squared_is_trivial_in_quotients():
    for n in (2, 5, 8):
        rep = build("quotient", n)
        assert np.array_equal(word_permutation(rep, ["a", "a"]), np.arange(rep.dim))
