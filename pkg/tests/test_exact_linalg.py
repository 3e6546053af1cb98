from fractions import Fraction

import pytest
from sympy import isprime

from errors import ParameterError
from exact_linalg import (
    IntMatrix,
    SparseIntMatrix,
    choose_primes,
    cluster_eigenvalues,
    cokernel,
    integer_rank,
    max_rank,
    rank_mod_p,
    smith_normal_form,
    sym_eigenvalues,
)


def test_snf_of_the_relator_exponent_matrix():
    m = IntMatrix.from_rows([[2, 0, 0], [0, 0, 0], [0, 0, 0], [-1, 0, 0]])
    assert smith_normal_form(m) == [1]
    assert cokernel(m) == ([], 2)


def test_snf_keeps_torsion():
    m = IntMatrix.from_rows([[2, 0], [0, 0]])
    assert smith_normal_form(m) == [2]
    assert cokernel(m) == ([2], 1)


def test_snf_of_zero_matrix_is_empty():
    m = IntMatrix.from_rows([[0, 0], [0, 0]])
    assert smith_normal_form(m) == []
    assert cokernel(m) == ([], 2)


def test_int_matrix_rejects_ragged_rows():
    with pytest.raises(ParameterError):
        IntMatrix.from_rows([[1, 2], [3]])


def test_from_triplets_sums_duplicates_and_drops_zeros():
    m = SparseIntMatrix.from_triplets(2, [(0, 1, 2), (0, 1, 3), (1, 0, 5), (1, 1, 1), (1, 1, -1)])
    assert m.entries == ((0, 1, 5), (1, 0, 5))
    assert m.symmetric


def test_symmetric_flag_detects_asymmetry():
    assert not SparseIntMatrix.from_dense([[0, 1], [0, 0]]).symmetric


def test_shifted_subtracts_diagonal():
    m = SparseIntMatrix.from_dense([[2, 2], [2, 2]]).shifted(4)
    assert m.to_lists() == [[-2, 2], [2, -2]]
    assert m.trace() == -4


def test_rank_mod_p_and_integer_rank():
    m = SparseIntMatrix.from_dense([[2, 1, 0], [4, 2, 0], [0, 0, 3]])
    assert integer_rank(m) == 2
    assert rank_mod_p(m, 7) == 2
    assert rank_mod_p(m, 3) == 1


def test_small_prime_undercounts_rank():
    m = SparseIntMatrix.from_dense([[2, 0], [0, 2]])
    assert rank_mod_p(m, 2) == 0
    assert integer_rank(m) == 2
    assert max_rank(m, choose_primes(0, 3))["rank"] == 2


def test_rank_mod_p_rejects_composite_modulus():
    with pytest.raises(ParameterError):
        rank_mod_p(SparseIntMatrix.identity(2), 15)


def test_choose_primes_is_deterministic():
    primes = choose_primes(5, 4)
    assert primes == choose_primes(5, 4)
    assert len(set(primes)) == 4
    assert all(isprime(p) and p < 2**31 for p in primes)


def test_max_rank_needs_three_primes():
    with pytest.raises(ParameterError):
        max_rank(SparseIntMatrix.identity(2), [2147483647, 2147483629])


def test_max_rank_reports_exact_rank_for_small_dims():
    info = max_rank(SparseIntMatrix.from_dense([[1, 1], [1, 1]]))
    assert info["rank"] == 1
    assert info["exact_rank"] == 1
    assert info["spread"] == 0


def test_sym_eigenvalues():
    values = sym_eigenvalues(SparseIntMatrix.from_dense([[2, 2], [2, 2]]))
    assert values == pytest.approx([0.0, 4.0], abs=1e-12)


def test_sym_eigenvalues_rejects_non_symmetric():
    with pytest.raises(ParameterError):
        sym_eigenvalues([[0, 1], [0, 0]])


def test_cluster_eigenvalues_snaps_integers():
    measure = cluster_eigenvalues([-1e-12, 1e-12, 1.5, 3.9999999999], tol=1e-8)
    assert [(a.value, a.multiplicity, a.fraction) for a in measure.pairs] == [
        (0, 2, Fraction(1, 2)),
        (1.5, 1, Fraction(1, 4)),
        (4, 1, Fraction(1, 4)),
    ]
    assert measure.fraction_at(4) == Fraction(1, 4)
    assert measure.multiplicity_at(7) == 0


def test_cluster_eigenvalues_rejects_bad_tolerance():
    with pytest.raises(ParameterError):
        cluster_eigenvalues([0.0], tol=0)


@pytest.mark.parametrize(
    "rows,factors",
    [([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 1, 1]), ([[2, 0], [0, 3]], [1, 6])],
)
def test_snf_examples(rows, factors):
    assert smith_normal_form(IntMatrix.from_rows(rows)) == factors


@pytest.mark.parametrize("rows,rank", [([[0, 0], [0, 0]], 0), ([[2, 2], [2, 2]], 1), ([[-2, 2], [2, -2]], 1)])
def test_rank_mod_101(rows, rank):
    assert rank_mod_p(SparseIntMatrix.from_dense(rows), 101) == rank


def test_sym_eigenvalues_trivial_cases():
    assert sym_eigenvalues([[1, 0], [0, 1]]) == pytest.approx([1.0, 1.0])
    assert sym_eigenvalues([[-4, 0, 0], [0, 0, 0], [0, 0, 4]]) == pytest.approx([-4.0, 0.0, 4.0])


def test_cluster_examples():
    merged = cluster_eigenvalues([0.0, 1e-12, 2.0], tol=1e-8)
    assert [(a.value, a.multiplicity, a.fraction) for a in merged.pairs] == [(0, 2, Fraction(2, 3)), (2, 1, Fraction(1, 3))]
    single = cluster_eigenvalues([1.0, 1.0, 1.0], tol=1e-8)
    assert [(a.value, a.multiplicity, a.fraction) for a in single.pairs] == [(1, 3, Fraction(1))]
