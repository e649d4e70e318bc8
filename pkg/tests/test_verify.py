"""Verification suites: one per statement, each over a declared family."""

import math

import numpy as np
import pytest

from morreymax import (
    EquivalenceReport,
    MorreyParams,
    RadialProfile,
    SpecValidationError,
    TestFamily,
    check_corollary1,
    check_lemma1_equivalence,
    check_lemma5_inequality,
    check_remark_decay,
    check_strong_type_p,
    check_theorem_boundedness,
    check_weak_type,
    make_indicator_train,
    make_step_profile,
    morrey_norm_direct_1d,
    reduced_functional,
    run_counterexample,
    validate_nonincreasing,
)


class TestTestFamily:
    def test_deterministic_generation(self):
        a = TestFamily(seed=9, count=4).profiles()
        b = TestFamily(seed=9, count=4).profiles()
        assert [f.breakpoints for f in a] == [f.breakpoints for f in b]
        assert [f.pieces for f in a] == [f.pieces for f in b]

    def test_seed_changes_family(self):
        a = TestFamily(seed=9, count=4).profiles()
        b = TestFamily(seed=10, count=4).profiles()
        assert [f.breakpoints for f in a] != [f.breakpoints for f in b]

    @pytest.mark.parametrize("kind", ["steps", "power", "mixed"])
    def test_profiles_radially_decreasing(self, kind):
        fam = TestFamily(seed=2, count=6, kind=kind)
        assert fam.radial_decreasing
        for f in fam.profiles():
            assert validate_nonincreasing(f).ok

    def test_trains_flagged_non_monotone(self):
        fam = TestFamily(seed=2, count=2, kind="trains", train_counts=(2, 5))
        assert not fam.radial_decreasing

    def test_validation(self):
        with pytest.raises(SpecValidationError):
            TestFamily(kind="wavelets")
        with pytest.raises(SpecValidationError):
            TestFamily(count=0)
        with pytest.raises(SpecValidationError):
            TestFamily(lambdas=(1.5,), dimension=1)
        with pytest.raises(SpecValidationError):
            TestFamily(decades=-1.0)


class TestLemma1:
    def test_block_subfamily_constant_ratio(self):
        """Dilation covariance forces one ratio for all block radii."""
        params = MorreyParams(lam=0.5)
        ratios = []
        for R in (0.25, 1.0, 4.0):
            f = make_step_profile([0.0, R], [1.0])
            direct = morrey_norm_direct_1d(f, params, even=True).value
            reduced = reduced_functional(RadialProfile(f, 1), params).value
            ratios.append(direct / reduced)
        assert max(ratios) == pytest.approx(min(ratios), rel=1e-9)

    def test_random_family_window(self):
        rep = check_lemma1_equivalence(TestFamily(seed=42, count=25, lambdas=(0.25, 0.5, 0.75)))
        assert rep.passed
        assert rep.ratios and rep.min_ratio >= 1.0 - 1e-12
        assert rep.max_ratio <= 2.0
        assert rep.max_ratio / rep.min_ratio <= 4.0

    def test_trains_rejected(self):
        with pytest.raises(SpecValidationError):
            check_lemma1_equivalence(TestFamily(kind="trains", count=2))


class TestCorollary1:
    def test_paths_agree(self):
        rep = check_corollary1(TestFamily(seed=11, count=8, lambdas=(0.5,)))
        assert rep.passed
        assert all(row["rel_gap"] <= 1e-8 for row in rep.rows)

    def test_maximal_hardy_constant_recorded(self):
        rep = check_corollary1(TestFamily(seed=11, count=4, lambdas=(0.5,)))
        note = next(n for n in rep.notes if "maximal/Hardy" in n)
        measured = float(note.rsplit(" ", 1)[1])
        assert 1.0 <= measured <= 3.0


class TestLemma5:
    def test_family_passes_with_sharp_instance(self):
        rep = check_lemma5_inequality(TestFamily(seed=42, count=20, lambdas=(0.25, 0.5, 0.75)))
        assert rep.passed
        sharp_rows = [r for r in rep.rows if str(r["instance"]).startswith("sharp")]
        assert len(sharp_rows) == 3
        for row in sharp_rows:
            assert row["gap"] <= 1e-8 * row["bound"]

    def test_dimension_two(self):
        rep = check_lemma5_inequality(
            TestFamily(seed=7, count=10, dimension=2, lambdas=(0.2, 1.0, 1.8))
        )
        assert rep.passed

    def test_report_invariants(self):
        rep = check_lemma5_inequality(TestFamily(seed=1, count=5))
        assert rep.passed == (not rep.failures)
        assert all(math.isfinite(r) and r > 0 for r in rep.ratios)
        summary = rep.to_json_summary()
        assert set(summary) == {"suite", "pass", "min_ratio", "max_ratio", "witness"}
        assert summary["suite"] == "lemma5" and summary["pass"] is True


class TestTheorem:
    def test_composed_bound(self):
        lam = 0.5
        rep = check_theorem_boundedness(TestFamily(seed=13, count=12, lambdas=(lam,)))
        assert rep.passed
        assert rep.max_ratio <= (1.0 / (1.0 - lam)) * (1.0 + 1e-10)

    def test_lambda_zero_skipped(self):
        rep = check_theorem_boundedness(TestFamily(seed=13, count=3, lambdas=(0.0,)))
        assert rep.passed
        assert not rep.ratios
        assert any("lambda = 0" in n for n in rep.notes)


class TestCounterexample:
    def test_growth_table(self):
        rep = run_counterexample((1, 3, 10, 100), 0.5)
        rows = {row["K"]: row for row in rep.rows}
        assert rep.passed
        # norms stay at sqrt(2) while the minorant grows like ln K
        for row in rows.values():
            assert row["upper"] == pytest.approx(math.sqrt(2.0), rel=1e-12)
            assert (row["witness_lo"], row["witness_hi"]) == (0.0, 2.0)
        assert rows[3]["minorant"] == pytest.approx(math.log(2.0) / 3.0, rel=1e-14)
        assert rows[100]["minorant"] == pytest.approx(math.lgamma(100) / 100.0, rel=1e-14)
        assert rows[100]["minorant_over_logK"] == pytest.approx(0.7798500182, rel=1e-9)
        assert rows[10]["minorant"] < rows[100]["minorant"]
        assert rows[10]["integral_minorant"] < rows[100]["integral_minorant"]

    def test_input_validation(self):
        with pytest.raises(SpecValidationError):
            run_counterexample((0, 10), 0.5)
        with pytest.raises(SpecValidationError):
            run_counterexample((10, 10), 0.5)
        with pytest.raises(SpecValidationError):
            run_counterexample((1, 10), 1.0)


class TestWeakType:
    def test_default_family(self):
        rep = check_weak_type()
        assert rep.passed
        maxima = [row["max_ratio"] for row in rep.rows]
        assert len(maxima) == 3
        assert max(maxima) / min(maxima) <= 4.0
        for row in rep.rows:
            assert row["drift"] <= 1e-3
            assert row["above_sup"] == 0.0
        # block, K=10, K=100 maxima frozen as regression anchors
        assert maxima[0] == pytest.approx(1.34543426, rel=2e-4)
        assert maxima[1] == pytest.approx(1.42241817, rel=2e-4)
        assert maxima[2] == pytest.approx(1.50512853, rel=2e-4)

    def test_requires_trains(self):
        with pytest.raises(SpecValidationError):
            check_weak_type(TestFamily(seed=1, count=2, kind="steps"))

    def test_deterministic(self):
        a = check_weak_type(TestFamily(kind="trains", count=2, train_counts=(0, 10)))
        b = check_weak_type(TestFamily(kind="trains", count=2, train_counts=(0, 10)))
        assert a.rows == b.rows
        assert a.to_json_summary() == b.to_json_summary()


class TestStrongType:
    def test_small_family_bracketed(self):
        rep = check_strong_type_p(
            TestFamily(kind="trains", count=2, train_counts=(0, 10)), ps=(2.0,)
        )
        assert rep.passed
        for row in rep.rows:
            assert row["width"] <= 0.05
            assert math.isfinite(row["ratio"]) and row["ratio"] > 0
        ratios = [row["ratio"] for row in rep.rows]
        assert max(ratios) / min(ratios) <= 4.0


class TestDecay:
    def test_default_profiles(self):
        rep = check_remark_decay()
        assert rep.passed
        for row in rep.rows:
            assert row["ratio"] == pytest.approx(1.0, rel=0.02)

    def test_train_integral_three(self):
        f = make_indicator_train(2)
        rep = check_remark_decay(profiles=(f,), xs=(1e3, 1e4, 1e5))
        assert rep.passed
        for row in rep.rows:
            assert row["integral"] == 3.0
            assert row["x_mf"] == pytest.approx(3.0, rel=0.02)

    def test_zero_rejected(self):
        with pytest.raises(SpecValidationError):
            check_remark_decay(profiles=(make_step_profile([0, 1], [0]),))


class TestDeterminism:
    def test_lemma5_reports_identical(self):
        fam = TestFamily(seed=21, count=6, lambdas=(0.4,))
        a = check_lemma5_inequality(fam)
        b = check_lemma5_inequality(fam)
        assert a.ratios == b.ratios
        assert a.rows == b.rows
        assert a.notes == b.notes

    def test_scaling_leaves_ratios_unchanged(self):
        """Suite ratios are scale-free: rerunning on c*f gives the same list."""
        fam = TestFamily(seed=21, count=5, lambdas=(0.5,))
        params = MorreyParams(lam=0.5)
        for f in fam.profiles():
            base = (
                morrey_norm_direct_1d(f, params, even=True).value
                / reduced_functional(RadialProfile(f, 1), params).value
            )
            g = f.scaled(7.0)
            scaled = (
                morrey_norm_direct_1d(g, params, even=True).value
                / reduced_functional(RadialProfile(g, 1), params).value
            )
            assert scaled == pytest.approx(base, rel=1e-12)


class TestReportShape:
    def test_failure_flag_matches(self):
        rep = EquivalenceReport(
            suite="demo", ratios=[1.0], failures=[], rows=[], config={}
        )
        assert rep.passed and rep.witness is not None or rep.witness is None
        bad = EquivalenceReport(
            suite="demo",
            ratios=[1.0],
            failures=[{"instance": 0, "reason": "x"}],
            rows=[],
            config={},
        )
        assert not bad.passed
        assert bad.witness == {"instance": 0, "reason": "x"}

    def test_empty_ratios_summary(self):
        rep = EquivalenceReport(suite="demo", ratios=[], failures=[], rows=[], config={})
        summary = rep.to_json_summary()
        assert summary["min_ratio"] is None and summary["max_ratio"] is None
