"""Checker behavior: what passes, what fails, and what is vacuous."""

import numpy as np
import pytest

from sepsets import (
    ALL_METHODS,
    AxiomReport,
    CapExceededError,
    ImportanceVector,
    OutcomeTable,
    ScoreMethod,
    TableError,
    Tolerance,
    check_data_model_equivalence,
    check_elimination,
    check_empty_set,
    check_marginal_contribution,
    check_minimalism,
    check_monotonicity,
    check_null_feature,
    check_separable_importance,
    check_symmetry,
    check_triviality,
    new_value_table,
    score_vector,
)
from sepsets.axioms import report_rows_markdown

from conftest import random_table

TOL = Tolerance(1e-9)


def additive_table(rng, n):
    singles = rng.uniform(0.5, 2.0, n)
    values = np.zeros(1 << n)
    for s in range(1 << n):
        values[s] = sum(singles[f] for f in range(n) if (s >> f) & 1)
    return new_value_table(n, values)


def test_additive_tables_pass_everything(rng):
    table = additive_table(rng, 5)
    assert check_empty_set(table, TOL).passed
    assert check_monotonicity(table, TOL).passed
    for method in ALL_METHODS:
        v = score_vector(method, table)
        assert check_triviality(table, v, TOL).passed
        assert check_marginal_contribution(table, v, TOL).passed
        assert check_minimalism(table, v, TOL).passed
        assert check_elimination(method, table, TOL).passed
        for variant in ("z_pair", "z_empty"):
            report = check_symmetry(table, v, variant, TOL)
            assert report.passed  # vacuous or genuinely equal scores


def test_empty_set_check(toy_table):
    assert check_empty_set(toy_table, TOL).passed
    bad = new_value_table(2, [0.25, 0.5, 0.5, 1.0])
    report = check_empty_set(bad, TOL)
    assert not report.passed
    assert report.residual == pytest.approx(0.25)


def test_monotonicity_witness():
    table = new_value_table(2, [0.0, 1.0, 0.5, 0.8])
    report = check_monotonicity(table, TOL)
    assert not report.passed
    # Adding feature 1 to {0} drops the value by 0.2, the worst drop.
    assert report.residual == pytest.approx(0.2)
    w = report.witness
    assert w.lhs == pytest.approx(1.0) and w.rhs == pytest.approx(0.8)


def test_marginal_contribution_ablation_is_exact(rng):
    table = random_table(rng, 5)
    v = score_vector(ScoreMethod.ABLATION, table)
    report = check_marginal_contribution(table, v, TOL)
    assert report.passed and report.residual == 0.0


def test_marginal_contribution_fails_for_undercut_scores(rng):
    table = random_table(rng, 4)
    base = score_vector(ScoreMethod.ABLATION, table).scores
    v = ImportanceVector(ScoreMethod.ABLATION, base - 0.5)
    report = check_marginal_contribution(table, v, TOL)
    assert not report.passed
    assert report.residual == pytest.approx(0.5)


def test_mci_passes_marginal_contribution_and_elimination(rng):
    for _ in range(10):
        table = random_table(rng, int(rng.integers(2, 8)))
        v = score_vector(ScoreMethod.MCI, table)
        assert check_marginal_contribution(table, v, TOL).passed
        assert check_elimination(ScoreMethod.MCI, table, TOL).passed


def test_bivariate_passes_elimination(rng):
    # Dropping features never changes a singleton's value.
    for _ in range(5):
        table = random_table(rng, 5)
        assert check_elimination(ScoreMethod.BIVARIATE, table, TOL).passed


def test_ablation_and_shapley_fail_elimination_on_duplicates(toy_table):
    for method in (ScoreMethod.ABLATION, ScoreMethod.SHAPLEY):
        report = check_elimination(method, toy_table, TOL)
        assert not report.passed
        assert report.witness is not None
        assert report.witness.rhs > report.witness.lhs
    # Ablation of a duplicate jumps from 0 to 1/2 once its twin is gone.
    ablation = check_elimination(ScoreMethod.ABLATION, toy_table, TOL)
    assert ablation.residual == pytest.approx(0.5)


def test_elimination_cap():
    with pytest.raises(CapExceededError):
        check_elimination(ScoreMethod.BIVARIATE, new_value_table(13, np.zeros(1 << 13)), TOL)


def test_minimalism_reference_is_mci(rng, toy_table):
    for _ in range(5):
        table = random_table(rng, int(rng.integers(2, 7)))
        v = score_vector(ScoreMethod.MCI, table)
        report = check_minimalism(table, v, TOL)
        assert report.passed and report.residual == 0.0
    # On the duplicate-pair table the averaged rules land elsewhere
    # (bivariate happens to coincide with the max marginal here).
    for method, expected in [
        (ScoreMethod.BIVARIATE, True),
        (ScoreMethod.ABLATION, False),
        (ScoreMethod.SHAPLEY, False),
        (ScoreMethod.MCI, True),
    ]:
        v = score_vector(method, toy_table)
        assert check_minimalism(toy_table, v, TOL).passed == expected


def test_triviality_item1_fails_for_silent_scores():
    table = new_value_table(2, [0.0, 1.0, 0.0, 1.0])
    v = ImportanceVector(ScoreMethod.BIVARIATE, np.zeros(2))
    report = check_triviality(table, v, TOL)
    assert not report.passed
    assert report.witness.subset == 0b01
    assert report.residual == pytest.approx(1.0)


def test_triviality_item2_fails_for_scored_dummy():
    # Feature 1 never changes the value but carries a score.
    table = new_value_table(2, [0.0, 1.0, 0.0, 1.0])
    v = ImportanceVector(ScoreMethod.SHAPLEY, np.array([1.0, 0.7]))
    report = check_triviality(table, v, TOL)
    assert not report.passed
    assert report.witness.feature == 1
    assert report.residual == pytest.approx(0.7)


def test_triviality_vacuous_on_silence():
    table = new_value_table(2, np.zeros(4))
    v = ImportanceVector(ScoreMethod.MCI, np.zeros(2), (0, 0))
    report = check_triviality(table, v, TOL)
    assert report.passed and report.vacuous


def test_null_feature_applies_only_to_constant_axes():
    grid = OutcomeTable(((0.0, 1.0), (0.0, 1.0)), np.array([0.0, 1.0, 0.0, 1.0]))
    scored = ImportanceVector(ScoreMethod.BIVARIATE, np.array([0.4, 0.9]))
    null_axis = check_null_feature(grid, scored, 0, TOL)
    assert not null_axis.passed
    assert null_axis.residual == pytest.approx(0.4)
    live_axis = check_null_feature(grid, scored, 1, TOL)
    assert live_axis.passed and live_axis.vacuous


def test_data_model_equivalence_vacuous_without_perfection(toy_table):
    other = new_value_table(3, np.zeros(8))
    report = check_data_model_equivalence(toy_table, other, ScoreMethod.MCI, False, TOL)
    assert report.passed and report.vacuous
    strict = check_data_model_equivalence(toy_table, other, ScoreMethod.MCI, True, TOL)
    assert not strict.passed
    assert strict.residual == pytest.approx(0.5)


def test_symmetry_variants_disagree_on_context_scope():
    # The pair scores equally given the other is absent, but feature 1
    # still matters when feature 0 is present, so the wide quantifier
    # finds no interchangeable pair.
    table = new_value_table(2, [0.0, 1.0, 1.0, 2.5])
    v = ImportanceVector(ScoreMethod.BIVARIATE, np.array([1.0, 1.0]))
    narrow = check_symmetry(table, v, "z_pair", TOL)
    assert narrow.passed and not narrow.vacuous
    wide = check_symmetry(table, v, "z_empty", TOL)
    assert wide.passed and wide.vacuous


def test_symmetry_flags_unequal_scores_on_duplicates(toy_table):
    v = ImportanceVector(ScoreMethod.BIVARIATE, np.array([0.5, 0.9, 1 / 3]))
    report = check_symmetry(toy_table, v, "z_pair", TOL)
    assert not report.passed
    assert report.witness.feature == 0 and report.witness.feature_b == 1
    assert report.residual == pytest.approx(0.4)


def test_symmetry_rejects_unknown_variant(toy_table):
    v = score_vector(ScoreMethod.MCI, toy_table)
    with pytest.raises(TableError):
        check_symmetry(toy_table, v, "z_full", TOL)


def test_separable_importance_item1_holds_on_toy(toy_table):
    for method in ALL_METHODS:
        report = check_separable_importance(toy_table, method, 0b011, TOL)
        assert report.item1.passed and not report.item1.vacuous
        assert report.item2.passed and not report.item2.vacuous


def test_separable_importance_item1_vacuous_on_nonseparable(toy_table):
    report = check_separable_importance(toy_table, ScoreMethod.MCI, 0b001, TOL)
    assert report.item1.vacuous
    # MCI scores happen to be additive across {0} anyway, so the
    # converse direction has bite and catches the non-separability.
    assert not report.item2.vacuous
    assert not report.item2.passed
    assert report.item2.residual == pytest.approx(0.5)
    assert report.item2.witness.subset == 0b011
    # Shapley additivity breaks across {0}, so there item 2 is vacuous.
    shap = check_separable_importance(toy_table, ScoreMethod.SHAPLEY, 0b001, TOL)
    assert shap.item1.vacuous and shap.item2.vacuous


def test_separable_importance_item2_violation():
    # Bivariate scores are additive across {0} here, yet the set is not
    # separable: the converse direction fails with a subset witness.
    table = new_value_table(2, [0.0, 1.0, 1.0, 2.3])
    report = check_separable_importance(table, ScoreMethod.BIVARIATE, 0b01, TOL)
    assert report.item1.vacuous
    assert not report.item2.passed
    assert report.item2.witness.subset == 0b11
    assert report.item2.witness.lhs == pytest.approx(2.3)
    assert report.item2.witness.rhs == pytest.approx(2.0)
    assert report.item2.residual == pytest.approx(0.3)


def test_axiom_report_contract():
    with pytest.raises(SepsetsContractError := (TableError, ValueError)):
        AxiomReport("x", True, 1.0, 1e-9)  # passed but residual beyond tol
    with pytest.raises(SepsetsContractError):
        AxiomReport("x", True, 0.0, 1e-9, witness=None, vacuous=False, detail="").__class__(
            "x", False, 1.0, 1e-9, witness=None
        )  # failed reports need a witness


def test_report_markdown_rendering(toy_table):
    rows = [
        ("empty", check_empty_set(toy_table, TOL)),
        ("elim", check_elimination(ScoreMethod.ABLATION, toy_table, TOL)),
    ]
    text = report_rows_markdown(rows)
    assert "| empty |" in text
    assert "FAIL" in text
    assert "pass" in text
