import math

import numpy as np
import pytest

from bounds import (
    ball_pair_bound,
    bg_bound,
    bg_simplified,
    chebyshev_T,
    chebyshev_closed_form,
    convex_body_bound,
    default_bernstein_radii,
    distribution_bound,
    log_chebyshev_T,
    logbmo_bound,
    quasipoly_degree_bound,
    quasipoly_zero_bound,
    remez_from_valency,
    remez_interval_bound,
    structural_degree_bounds,
    valency_index_bound,
)


# ============================================================
# CHEBYSHEV POLYNOMIALS
# ============================================================

@pytest.mark.parametrize("k,x,expected", [
    (0, 5.0, 1.0),
    (1, 0.3, 0.3),
    (2, 3.0, 17.0),
    (3, 2.0, 26.0),
    (3, -2.0, -26.0),
    (4, 0.5, -0.5),
])
def test_chebyshev_values(k, x, expected):
    assert chebyshev_T(k, x) == pytest.approx(expected)


def test_chebyshev_matches_numpy_series():
    for k in range(12):
        for x in (-3.5, -1.0, -0.2, 0.7, 1.0, 1.5, 4.0):
            ref = np.polynomial.chebyshev.chebval(x, [0] * k + [1])
            assert chebyshev_T(k, x) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_closed_form_agrees_with_recursion_outside_interval():
    assert chebyshev_closed_form(5, 1.7) == pytest.approx(np.polynomial.chebyshev.chebval(1.7, [0] * 5 + [1]))


def test_log_chebyshev_for_large_degree():
    # T_k(x) ~ (x + sqrt(x^2 - 1))^k / 2
    k, x = 500, 3.0
    expected = k * math.log(x + math.sqrt(8.0)) - math.log(2.0)
    assert log_chebyshev_T(k, x) == pytest.approx(expected)
    assert chebyshev_T(k, x) == math.inf


def test_chebyshev_rejects_negative_degree():
    with pytest.raises(ValueError):
        chebyshev_T(-1, 2.0)


# ============================================================
# REMEZ-TYPE BOUNDS
# ============================================================

def test_bg_bound_values():
    # beta = 1/2, T_1(3) = 3
    assert bg_bound(1, 1, 0.5).value == pytest.approx(3.0)
    assert bg_bound(2, 1, 0.5).value == pytest.approx(17.0)
    assert bg_bound(3, 2, 1.0).value == 1.0


def test_bg_bound_validates_lambda():
    with pytest.raises(ValueError):
        bg_bound(1, 1, 0.0)
    with pytest.raises(ValueError):
        bg_bound(1, 1, 1.5)


def test_bg_bound_decreases_with_lambda():
    values = [bg_bound(3, 2, lam).value for lam in (0.1, 0.3, 0.6, 0.9)]
    assert values == sorted(values, reverse=True)


@pytest.mark.parametrize("k,n,lam", [(1, 1, 0.5), (3, 2, 0.2), (5, 3, 0.05), (2, 4, 0.9)])
def test_simplified_bound_dominates_exact(k, n, lam):
    assert bg_simplified(k, n, 1.0, lam).value >= bg_bound(k, n, lam).value * (1 - 1e-12)


def test_remez_interval_bound():
    res = remez_interval_bound(1.0, 1.0, 2.0)
    assert res.value == pytest.approx(16.0)
    assert res.formula_id == "remez"
    assert res.log_value == pytest.approx(2 * math.log(4.0))


def test_measures_are_validated():
    with pytest.raises(ValueError):
        remez_interval_bound(1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        convex_body_bound(2, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        ball_pair_bound(0.5, 1.0, 1.0)


def test_convex_and_ball_pair_bounds():
    assert convex_body_bound(2, 1.0, 0.5, 1.0).value == pytest.approx(16.0)
    assert ball_pair_bound(1.0, 0.25, 2.0).value == pytest.approx(256.0)


def test_huge_bounds_keep_their_log():
    res = remez_interval_bound(1.0, 1e-3, 200.0)
    assert res.value == math.inf
    assert res.log_value == pytest.approx(200.0 * math.log(4000.0))


def test_remez_from_valency():
    res = remez_from_valency(1.0, 0.5, 2.0, c=1.5)
    assert res.value == pytest.approx(8.0 ** 3)
    assert res.formula_id == "remez-valency"


# ============================================================
# QUASIPOLYNOMIALS / STRUCTURAL
# ============================================================

def test_quasipoly_zero_bound_values():
    b = quasipoly_zero_bound(1, 0, 1.0)
    assert b.fine == pytest.approx((2.0 / math.pi) * (math.sqrt(2.0) + 1.0) * 16.0)
    assert b.fine == pytest.approx(24.592, abs=1e-3)
    assert b.coarse == pytest.approx(32.0 * math.sqrt(2.0))
    assert quasipoly_zero_bound(3, 2, 1.0).coarse == pytest.approx(128.0)


@pytest.mark.parametrize("k,m,M", [(1, 1, 0.0), (2, 3, 0.5), (5, 10, 4.0), (10, 0, 2.0)])
def test_fine_bound_undercuts_coarse(k, m, M):
    b = quasipoly_zero_bound(k, m, M)
    assert b.fine < b.coarse


def test_zero_parameters_give_zero_bounds():
    b = quasipoly_zero_bound(1, 0, 0.0)
    assert b.fine == b.coarse == 0.0


def test_quasipoly_parameters_are_validated():
    with pytest.raises(ValueError):
        quasipoly_zero_bound(0, 1, 1.0)
    with pytest.raises(ValueError):
        quasipoly_degree_bound(1, -1, 1.0)


def test_quasipoly_degree_bound():
    assert quasipoly_degree_bound(3, 2, 1.0, c_structural=2.0) == pytest.approx(2.0 * (2.0 + 2.0))


def test_structural_degree_bounds():
    assert structural_degree_bounds("composition", {"k": 3, "v_f": 2}) == 6.0
    assert structural_degree_bounds("reciprocal", {"v_h": 4}, c=2.0) == 8.0
    assert structural_degree_bounds("product", {"v_f": 1, "v_g": 2}) == 3.0
    assert structural_degree_bounds("rolle", {"m": 2, "M": 5}) == 7.0
    assert structural_degree_bounds("bernstein", {"b": 1.5}, c=2.0) == 3.0


def test_structural_degree_bounds_validation():
    with pytest.raises(ValueError):
        structural_degree_bounds("sum", {})
    with pytest.raises(ValueError):
        structural_degree_bounds("product", {"v_f": 1})
    with pytest.raises(ValueError):
        structural_degree_bounds("rolle", {"m": -1, "M": 1})


def test_valency_index_and_default_radii():
    assert valency_index_bound(3, A=2.0) == 6.0
    assert default_bernstein_radii(2.0) == pytest.approx((1.5, 1.25))
    with pytest.raises(ValueError):
        default_bernstein_radii(1.0)


# ============================================================
# DISTRIBUTION / BMO
# ============================================================

def test_distribution_bound_caps_at_volume():
    assert distribution_bound(1.0, 1.0, 1.0, 1, 2.0) == 2.0
    assert distribution_bound(1e-4, 1.0, 1.0, 1, 2.0) == pytest.approx(8e-4)


def test_logbmo_bound():
    assert logbmo_bound(1.0, 1) == pytest.approx(1.0 + math.log(4.0))
    assert logbmo_bound(2.0, 3) == pytest.approx(2.0 * (1.0 + math.log(12.0)))
    with pytest.raises(ValueError):
        logbmo_bound(0.0, 1)
