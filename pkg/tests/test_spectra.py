from fractions import Fraction

import pytest

import config
import spectra
from errors import ParameterError, ResourceLimitError
from group_ring import even_moments, projector_sequence
from representations import markov_matrix
from spectra import (
    atom_table,
    convergence_report,
    counting_measure,
    exact_multiplicity,
    numerical_multiplicity,
    tail_mass_bound,
    target_fraction,
    theoretical_moment,
    theoretical_projector,
    total_atom_mass,
    unlocalized_eigenvalues,
)


def test_atom_table_small():
    table = atom_table(3)
    assert [(a.p, a.q, a.weight) for a in table.entries] == [
        (1, 2, Fraction(1, 3)),
        (1, 3, Fraction(1, 7)),
        (2, 3, Fraction(1, 7)),
    ]
    assert [a.lam for a in table.entries] == pytest.approx([0.0, 2.0, -2.0], abs=1e-12)


def test_atom_table_rejects_small_q():
    with pytest.raises(ParameterError):
        atom_table(1)


def test_total_atom_mass():
    assert total_atom_mass(2) == Fraction(1, 3)
    assert total_atom_mass(3) == Fraction(13, 21)
    assert abs(float(total_atom_mass(40)) - 1) < 1e-9


def test_tail_mass_bound():
    assert tail_mass_bound(3) == Fraction(5, 4)
    assert theoretical_moment(1, 3)[1] == pytest.approx(20.0)


@pytest.mark.parametrize("lam,expected", [(0, Fraction(1, 3)), (2, Fraction(1, 7)), (-2, Fraction(1, 7)), (4, 0), (-4, 0)])
def test_target_fraction(lam, expected):
    assert target_fraction(lam) == expected


def test_moments_agree_with_atoms():
    moments = even_moments(5)
    for k in range(1, 6):
        value, tail = theoretical_moment(k, 40)
        assert abs(moments[k] - value) <= tail + 1e-6


def test_projectors_agree_with_atoms():
    s = projector_sequence(5)
    for k, exact in enumerate(s, start=1):
        value, tail = theoretical_projector(k, 40)
        assert abs(float(exact) - value) <= tail + 1e-6
    with pytest.raises(ParameterError):
        theoretical_projector(0, 40)


def test_counting_measure_level_one():
    measure = counting_measure(markov_matrix("tree", 1), level=1)
    assert [(a.value, a.multiplicity, a.fraction) for a in measure.pairs] == [
        (0, 1, Fraction(1, 2)),
        (4, 1, Fraction(1, 2)),
    ]


def test_counting_measure_level_two():
    measure = counting_measure(markov_matrix("tree", 2))
    assert [a.value for a in measure.pairs] == [-2, 0, 2, 4]
    assert unlocalized_eigenvalues(measure, 2) == []


def test_counting_measure_fractions_sum_to_one():
    measure = counting_measure(markov_matrix("tree", 7))
    assert sum(a.fraction for a in measure.pairs) == 1


def test_quotient_spectrum_is_dihedral():
    measure = counting_measure(markov_matrix("quotient", 2))
    assert [(a.value, a.multiplicity) for a in measure.pairs] == [(-4, 1), (-2, 2), (0, 2), (2, 2), (4, 1)]


def test_dense_cap(monkeypatch):
    monkeypatch.setattr(config, "DENSE_MAX_DIM", 2)
    with pytest.raises(ResourceLimitError) as info:
        counting_measure(markov_matrix("tree", 2))
    assert info.value.dim == 4


@pytest.mark.parametrize("n,mult", [(1, 1), (2, 1), (3, 3)])
def test_tree_kernel_multiplicity(n, mult):
    assert exact_multiplicity(markov_matrix("tree", n), 0) == (mult, Fraction(mult, 1 << n))


def test_quotient_kernel_and_top_eigenvalue():
    m = markov_matrix("quotient", 2)
    assert exact_multiplicity(m, 0) == (2, Fraction(1, 4))
    assert exact_multiplicity(m, 4)[0] == 1
    assert exact_multiplicity(m, 2) == (2, Fraction(1, 4))


@pytest.mark.parametrize("n", range(1, 11))
def test_exact_and_numerical_multiplicities_agree(n):
    m = markov_matrix("tree", n)
    for lam in config.INTEGER_EIGENVALUES:
        assert exact_multiplicity(m, lam)[0] == numerical_multiplicity(m, lam)


def test_exact_multiplicity_rejects_non_integer_lambda():
    with pytest.raises(ParameterError):
        exact_multiplicity(markov_matrix("tree", 2), Fraction(1, 2))


def test_convergence_report_tree():
    report = convergence_report(range(1, 7), 0)
    assert report["target"] == Fraction(1, 3)
    rows = report["rows"]
    assert [r["level"] for r in rows] == [1, 2, 3, 4, 5, 6]
    assert rows[0]["fraction"] == Fraction(1, 2)
    assert all(r["ok"] and r["spread"] == 0 for r in rows)
    assert rows[-1]["distance"] < rows[0]["distance"]


# exact kernel fractions, frozen from full runs
TREE_KERNEL_FRACTIONS = [
    Fraction(1, 2), Fraction(1, 4), Fraction(3, 8), Fraction(5, 16), Fraction(11, 32), Fraction(21, 64),
    Fraction(43, 128), Fraction(85, 256), Fraction(171, 512), Fraction(341, 1024), Fraction(683, 2048),
    Fraction(1365, 4096),
]
QUOTIENT_KERNEL_FRACTIONS = {
    4: Fraction(11, 32), 5: Fraction(11, 32), 6: Fraction(21, 64), 7: Fraction(43, 128),
    8: Fraction(341, 1024), 9: Fraction(171, 512), 10: Fraction(341, 1024), 11: Fraction(683, 2048),
}
CONVERGENCE_TOL = 0.05


def test_tree_kernel_converges_to_one_third():
    report = convergence_report(range(1, 13), 0, workers=1)
    rows = {r["level"]: r for r in report["rows"]}
    assert [rows[n]["fraction"] for n in range(1, 13)] == TREE_KERNEL_FRACTIONS
    assert rows[12]["distance"] < rows[4]["distance"]
    assert rows[12]["distance"] < CONVERGENCE_TOL


def test_quotient_kernel_converges_to_one_third():
    report = convergence_report(range(4, 12), 0, rep_kind="quotient", workers=1)
    rows = {r["level"]: r for r in report["rows"]}
    assert {n: r["fraction"] for n, r in rows.items()} == QUOTIENT_KERNEL_FRACTIONS
    assert rows[11]["distance"] < rows[4]["distance"]
    assert rows[11]["distance"] < CONVERGENCE_TOL


@pytest.mark.parametrize("lam", [-2, 2])
def test_tree_kernel_at_two_approaches_one_seventh(lam):
    report = convergence_report([12], lam, workers=1)
    assert report["target"] == Fraction(1, 7)
    (row,) = report["rows"]
    assert row["fraction"] == Fraction(585, 4096)
    assert row["distance"] < CONVERGENCE_TOL


def test_convergence_report_crosscheck():
    report = convergence_report([2, 3], 2, crosscheck=True)
    assert report["target"] == Fraction(1, 7)
    assert all(r["agree"] for r in report["rows"])


def test_convergence_report_records_failed_levels():
    report = convergence_report([1, 17], 0)
    ok, failed = report["rows"]
    assert ok["ok"]
    assert not failed["ok"] and failed["error_kind"] == "parameter"


def test_convergence_report_unexpected_error_becomes_a_row(monkeypatch):
    real = spectra.kernel_row

    def flaky(kind, level, *args):
        if level == 2:
            raise RuntimeError("boom")
        return real(kind, level, *args)

    monkeypatch.setattr(spectra, "kernel_row", flaky)
    report = convergence_report([1, 2], 0, workers=1)
    ok, failed = report["rows"]
    assert ok["ok"]
    assert failed == {"level": 2, "ok": False, "error": "boom", "error_kind": "error"}


def test_convergence_report_parallel_matches_serial():
    serial = convergence_report([1, 2, 3], 0, workers=1)
    parallel = convergence_report([3, 1, 2], 0, workers=2)
    assert serial == parallel


@pytest.mark.parametrize("lam", [1, 3, 6])
def test_convergence_report_rejects_lambda(lam):
    with pytest.raises(ParameterError):
        convergence_report([1], lam)


def test_atom_count_is_a_totient_sum():
    assert len(atom_table(5).entries) == 9
    assert [(a.p, a.q) for a in atom_table(2).entries] == [(1, 2)]


def test_theoretical_moment_small_tables():
    value, tail = theoretical_moment(0, 40)
    assert value == pytest.approx(1.0, abs=1e-9)
    value, tail = theoretical_moment(1, 3)
    assert value == pytest.approx(8 / 7)
    assert tail >= 4 - value


def test_theoretical_projector_zero_atom_only():
    value, tail = theoretical_projector(1, 2)
    assert value == pytest.approx(1 / 3)
    assert tail > 5 / 12


def test_trivial_measures():
    from exact_linalg import SparseIntMatrix

    measure = counting_measure(SparseIntMatrix.identity(4))
    assert [(a.value, a.multiplicity, a.fraction) for a in measure.pairs] == [(1, 4, Fraction(1))]
    assert exact_multiplicity(SparseIntMatrix.identity(8), 0) == (0, Fraction(0))
    assert exact_multiplicity(markov_matrix("tree", 1), 4) == (1, Fraction(1, 2))


def test_level_one_distance():
    row = convergence_report([1], 0)["rows"][0]
    assert row["distance"] == Fraction(1, 6)
