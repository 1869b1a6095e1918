import math

import numpy as np
import pandas as pd
import pytest

from estimation import EstimatorConfig
from function_core import (
    ComposeUnivariate,
    Exp,
    LinearFunctional,
    MultiPoly,
    Poly,
    QuasiPolynomial,
    named_series,
)
from measure_sets import check_subset
from verify_suites import (
    SUITES,
    SuiteContext,
    calibrate_structural_constant,
    composition_experiment,
    composition_growth,
    default_bodies,
    halfmeasure_report,
    quasipoly_verification,
    run_suite,
    tested_exponent,
)

FAST = EstimatorConfig(n_segments=4, n_subsets=4, n_eval=128, n_sharpness_segments=1, workers=1)


def test_tested_exponent(small_run, z1_power):
    assert tested_exponent(z1_power(3, 2), SuiteContext(small_run)) == 3.0
    assert tested_exponent(z1_power(3, 2), SuiteContext(small_run, d=1.5)) == 1.5


@pytest.mark.parametrize("n", [1, 2, 3])
def test_default_bodies_are_nested(rng, n):
    pairs = default_bodies(n)
    assert len(pairs) == 3
    for V, omega in pairs:
        check_subset(omega, V, rng)
        assert 0 < omega.volume < V.volume


def test_unknown_suite(small_run, z1_power):
    with pytest.raises(ValueError):
        run_suite("nope", z1_power(1), small_run)


def test_registry_names():
    assert set(SUITES) == {"remez1d", "convex", "logbmo", "bourgain", "orlicz", "holder",
                           "quasipoly", "prop3", "composition"}


# ============================================================
# SUITES
# ============================================================

def test_remez1d_suite(small_run, z1_power):
    progress = []
    reports = run_suite("remez1d", z1_power(2, 2), small_run,
                        progress_cb=lambda done, total, name: progress.append((done, total, name)))
    assert len(reports) == 1
    assert reports[0].passed
    assert reports[0].seed == small_run.seed
    assert reports[0].runtime_ms is not None
    assert progress == [(1, 1, "remez1d")]


def test_convex_suite(small_run, z1_power):
    reports = run_suite("convex", z1_power(2, 2), small_run)
    assert [r.check_id for r in reports] == ["convex"] * 3
    assert all(r.passed for r in reports)


def test_logbmo_suite(small_run, z1_power):
    reports = run_suite("logbmo", z1_power(1), small_run)
    assert len(reports) == 2
    for r in reports:
        assert r.passed
        assert r.measured_lhs == pytest.approx(1.0, abs=0.05)
        assert r.details["bound"] == pytest.approx(1.0 + math.log(4.0))


def test_bourgain_suite(small_run, z1_power):
    reports = run_suite("bourgain", z1_power(1), small_run)
    assert [r.check_id for r in reports] == ["bourgain-halfmeasure", "bourgain-fit"]
    assert reports[0].passed
    assert reports[0].measured_lhs <= reports[0].bound_rhs
    assert reports[1].details["certified"] is False
    assert len(reports[1].details["table"]) == 80


def test_orlicz_suite(small_run, z1_power):
    homogeneity, l1 = run_suite("orlicz", z1_power(2, 2), small_run)
    assert homogeneity.passed
    assert homogeneity.details["norm_of_2f"] == pytest.approx(2.0 * homogeneity.details["norm"], rel=1e-3)
    assert l1.check_id == "orlicz-l1"
    assert not l1.skipped and l1.passed
    assert l1.details["certified"] is False
    assert l1.bound_rhs >= (1.0 + l1.details["c1_fit"]) * l1.details["mean_abs"] * (1.0 - 1e-12)


def test_holder_suite(small_run, z1_power):
    (report,) = run_suite("holder", z1_power(1), small_run)
    assert not report.skipped
    assert report.measured_lhs == pytest.approx(2.0 / math.sqrt(3.0), rel=0.03)
    assert report.bound_rhs >= 1.0


def test_non_polynomial_skips_composition(small_run, z1_power):
    (report,) = run_suite("composition", Exp(z1_power(1)), small_run)
    assert report.skipped and report.passed


def test_non_quasipolynomial_skips_quasipoly(small_run, z1_power):
    coeffs, radius = named_series("geometric", 16)
    f = ComposeUnivariate(coeffs, z1_power(1), radius)
    (report,) = run_suite("quasipoly", f, small_run)
    assert report.skipped


# ============================================================
# QUASIPOLYNOMIALS / STRUCTURAL CONSTANT
# ============================================================

def test_quasipoly_verification(rng, small_run):
    # (1 + z) e^z: k = 1, m = 2, M = 1
    q = QuasiPolynomial(((MultiPoly.from_terms(1, {(0,): 1.0, (1,): 1.0}), LinearFunctional.of([1.0])),))
    reports = quasipoly_verification(q, 2, 6, rng, small_run, seed=7, c_structural=10.0)
    assert [r.check_id for r in reports] == ["quasipoly-zeros", "quasipoly-degree"]
    assert all(r.passed for r in reports)
    assert reports[0].inputs["m"] == 2
    assert reports[1].bound_rhs == pytest.approx(10.0 * (math.sqrt(2.0) + 2.0))


def test_structural_constant_is_frozen():
    c = calibrate_structural_constant(2.0, 1)
    assert c >= 1.5
    assert calibrate_structural_constant(2.0, 1) == c


def test_prop3_suite(small_run, z1_power):
    reports = run_suite("prop3", z1_power(1), small_run)
    assert [r.check_id for r in reports] == ["prop3-reciprocal", "prop3-composition", "prop3-product", "prop3-rolle"]
    assert all(r.passed for r in reports)


# ============================================================
# COMPOSITION EXPERIMENT
# ============================================================

def test_composition_experiment_table(rng):
    f = Poly(MultiPoly.variable(1, 0, 0.2))
    table = composition_experiment(f, "exp", (2, 4), 2.0, rng, FAST)
    assert list(table.columns) == ["k", "degree", "classical_bound", "d_emp"]
    assert list(table["degree"]) == list(table["classical_bound"]) == [2, 4]
    assert np.all(table["d_emp"] <= table["classical_bound"] + 1e-9)


def test_composition_experiment_validation(rng, z1_power):
    with pytest.raises(ValueError):
        composition_experiment(z1_power(1), "exp", (2,), 2.0, rng, FAST)
    with pytest.raises(ValueError):
        composition_experiment(Exp(Poly(MultiPoly.variable(1, 0, 0.1))), "exp", (2,), 2.0, rng, FAST)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_composition_degree_stays_bounded_as_k_grows(seed):
    f = Poly(MultiPoly.variable(1, 0, 0.5))
    table = composition_experiment(f, "exp", (2, 4, 8, 16), 2.0, np.random.default_rng(seed))
    assert table["classical_bound"].iloc[-1] == 8 * table["classical_bound"].iloc[0]
    assert composition_growth(table) < 2.0


def test_composition_growth_needs_a_positive_start():
    table = pd.DataFrame({"k": [4, 2], "degree": [4, 2], "classical_bound": [4, 2], "d_emp": [0.3, 0.0]})
    assert composition_growth(table) is None
    table["d_emp"] = [0.3, 0.2]
    assert composition_growth(table) == pytest.approx(1.5)


def test_composition_suite_reports_growth(small_run):
    reports = run_suite("composition", Poly(MultiPoly.variable(1, 0, 0.25)), small_run)
    assert [r.check_id for r in reports] == ["composition"] * 4 + ["composition-growth"]
    growth = reports[-1]
    assert not growth.skipped
    assert growth.bound_rhs == 2.0
    assert growth.details["classical_growth"] == 8.0
    assert growth.passed == (growth.measured_lhs <= 2.0)


# ============================================================
# HALF-MEASURE RECORD
# ============================================================

def test_halfmeasure_report_at_exactly_one_half():
    report = halfmeasure_report([0.9, 0.5], 4096, {}, seed=7)
    assert not report.passed
    assert report.measured_lhs > report.bound_rhs
    assert report.details["failures"] == 1


def test_halfmeasure_report_just_above_one_half():
    report = halfmeasure_report([0.75, 2049 / 4096], 4096, {})
    assert report.passed
    assert report.measured_lhs == report.bound_rhs
    assert report.slack == 0.0
