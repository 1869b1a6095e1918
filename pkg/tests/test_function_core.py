import math

import numpy as np
import pytest

from function_core import (
    ComplexLine,
    ComplexVector,
    ComposeUnivariate,
    DimensionMismatch,
    DirectionalDerivative,
    EvaluationOverflow,
    Exp,
    LinearFunctional,
    LineGeometryError,
    MultiPoly,
    Poly,
    Product,
    Quasi,
    QuasiPolynomial,
    ReciprocalExp,
    Scale,
    SpecParseError,
    as_quasipolynomial,
    axis_lines,
    axis_segment,
    check_compose_domain,
    complexify_real_line,
    evaluate,
    evaluate_batch,
    expr_to_spec,
    load_function_spec,
    named_series,
    parse_function_spec,
    polynomial_degree,
    restrict_complex_line,
    restrict_real_segment,
    sample_complex_line,
    sample_real_segment,
)


def z(n, j):
    return MultiPoly.variable(n, j)


# ============================================================
# POLYNOMIALS
# ============================================================

def test_multipoly_merges_duplicates_and_drops_zeros():
    p = MultiPoly(1, (((1,), 1.0), ((1,), -1.0), ((0,), 2.0)))
    assert p.terms == (((0,), 2 + 0j),)
    assert p.degree == 0


def test_zero_polynomial_has_degree_zero():
    assert MultiPoly.zero(3).is_zero
    assert MultiPoly.zero(3).degree == 0


def test_multipoly_values_and_degree():
    p = z(2, 0) ** 2 + z(2, 0) * z(2, 1) * 2.0
    assert p.degree == 2
    assert p.values(np.array([[1.0, 2.0]]))[0] == pytest.approx(5.0)


def test_multipoly_power_matches_expansion():
    p = (z(1, 0) + 1.0) ** 2
    assert p.values(np.array([[3.0]]))[0] == pytest.approx(16.0)
    assert p.degree == 2


def test_directional_derivative_of_polynomial():
    p = z(2, 0) ** 2 * z(2, 1)
    d = p.directional([1.0, 1.0])
    # d/dz1 + d/dz2 of z1^2 z2 = 2 z1 z2 + z1^2
    assert d.values(np.array([[1.0, 3.0]]))[0] == pytest.approx(7.0)


def test_exponents_must_match_dimension():
    with pytest.raises(DimensionMismatch):
        MultiPoly(2, (((1,), 1.0),))


def test_adding_mismatched_dimensions_raises():
    with pytest.raises(DimensionMismatch):
        z(1, 0) + z(2, 0)


# ============================================================
# QUASIPOLYNOMIALS
# ============================================================

def test_quasipolynomial_parameters():
    q = QuasiPolynomial((
        (z(2, 0) ** 2, LinearFunctional.of([3.0, 4.0])),
        (MultiPoly.constant(2, 1.0), LinearFunctional.of([1.0, 0.0])),
    ))
    assert q.k == 2
    assert q.degree == (1 + 2) + (1 + 0)
    assert q.spectrum_norm == pytest.approx(5.0)


def test_quasipolynomial_drops_zero_terms():
    q = QuasiPolynomial((
        (MultiPoly.zero(1), LinearFunctional.of([1.0])),
        (MultiPoly.constant(1, 1.0), LinearFunctional.of([2.0])),
    ))
    assert q.k == 1


def test_quasipolynomial_needs_a_nonzero_term():
    with pytest.raises(ValueError):
        QuasiPolynomial(((MultiPoly.zero(1), LinearFunctional.of([1.0])),))


def test_quasipolynomial_values():
    q = QuasiPolynomial(((MultiPoly.constant(1, 1.0), LinearFunctional.of([1.0])),))
    assert evaluate(Quasi(q), [1.0]) == pytest.approx(math.e)


# ============================================================
# EXPRESSIONS
# ============================================================

def test_expression_nodes_evaluate():
    g = Poly(z(1, 0))
    assert evaluate(Exp(g), [0.5]) == pytest.approx(math.exp(0.5))
    assert evaluate(ReciprocalExp(g), [0.5]) == pytest.approx(math.exp(-0.5))
    assert evaluate(Product(g, g), [3.0]) == pytest.approx(9.0)
    assert evaluate(Scale(2j, g), [3.0]) == pytest.approx(6j)


def test_compose_univariate_geometric_series():
    coeffs, radius = named_series("geometric", 64)
    assert radius == 1.0
    f = ComposeUnivariate(coeffs, Poly(z(1, 0).scale(0.5)), radius)
    assert evaluate(f, [1.0]) == pytest.approx(2.0)


def test_unknown_named_series():
    with pytest.raises(SpecParseError):
        named_series("sinc")


def test_evaluate_batch_rejects_wrong_dimension():
    with pytest.raises(DimensionMismatch):
        evaluate_batch(Poly(z(2, 0)), np.zeros((3, 1)))


def test_evaluate_batch_raises_on_overflow():
    f = Exp(Poly(z(1, 0).scale(1000.0)))
    with pytest.raises(EvaluationOverflow):
        evaluate_batch(f, np.array([[1.0]]))


def test_symbolic_directional_derivative_of_polynomial():
    f = DirectionalDerivative(ComplexVector.basis(1, 0), 2, Poly(z(1, 0) ** 3))
    assert evaluate(f, [2.0]) == pytest.approx(12.0)


def test_symbolic_directional_derivative_of_quasipolynomial():
    q = QuasiPolynomial(((z(1, 0), LinearFunctional.of([2.0])),))
    f = DirectionalDerivative(ComplexVector.basis(1, 0), 1, Quasi(q))
    # (z e^{2z})' = (1 + 2z) e^{2z}
    assert evaluate(f, [0.5]) == pytest.approx(2.0 * math.e)


def test_cauchy_directional_derivative_of_non_symbolic_node():
    f = DirectionalDerivative(ComplexVector.basis(1, 0), 1, Exp(Poly(z(1, 0))))
    assert evaluate(f, [0.3]) == pytest.approx(math.exp(0.3), rel=1e-8)


def test_directional_derivative_matches_central_difference():
    f = Poly(z(2, 0) ** 3 + z(2, 0) * z(2, 1) ** 2)
    a = np.array([1.0, 0.5j])
    Z = np.array([[0.3 + 0.1j, -0.2 + 0.4j], [0.5, 0.25j], [-0.1 - 0.3j, 0.2]])
    exact = evaluate_batch(DirectionalDerivative(ComplexVector.of(a), 1, f), Z)

    def error(h):
        central = (evaluate_batch(f, Z + h * a) - evaluate_batch(f, Z - h * a)) / (2.0 * h)
        return float(np.max(np.abs(central - exact)))

    # a cubic leaves exactly h^2/6 f''' in the central difference
    assert 50.0 < error(1e-3) / error(1e-4) < 200.0
    assert error(1e-4) < 1e-7


def test_directional_derivative_dimension_check():
    with pytest.raises(DimensionMismatch):
        DirectionalDerivative(ComplexVector.basis(2, 0), 1, Poly(z(1, 0)))


def test_polynomial_degree_and_quasi_view():
    p = Poly(z(2, 0) ** 3)
    assert polynomial_degree(p) == 3
    assert polynomial_degree(Scale(2.0, p)) == 3
    assert polynomial_degree(Exp(p)) is None
    q = as_quasipolynomial(p)
    assert q.k == 1 and q.degree == 4 and q.spectrum_norm == 0.0
    assert as_quasipolynomial(Exp(p)) is None


# ============================================================
# LINES AND SEGMENTS
# ============================================================

def test_complex_line_rejects_non_unit_direction():
    with pytest.raises(LineGeometryError):
        ComplexLine(ComplexVector.of([0.0, 0.0]), ComplexVector.of([2.0, 0.0]), 1.5)


def test_complex_line_rejects_non_orthogonal_base():
    with pytest.raises(LineGeometryError):
        ComplexLine(ComplexVector.of([0.5, 0.0]), ComplexVector.of([1.0, 0.0]), 1.5)


def test_complex_line_rejects_base_outside_ball():
    with pytest.raises(LineGeometryError):
        ComplexLine(ComplexVector.of([0.0, 2.0]), ComplexVector.of([1.0, 0.0]), 1.5)


def test_sampled_lines_in_one_dimension_pass_through_origin(rng):
    for _ in range(5):
        line = sample_complex_line(1, 1.5, rng)
        assert line.x.norm == 0.0
        assert line.v.norm == pytest.approx(1.0)


def test_sampled_lines_are_orthogonal(rng):
    for _ in range(20):
        line = sample_complex_line(3, 1.5, rng)
        assert abs(line.x.inner(line.v)) < 1e-12
        assert line.x.norm < 1.0


def test_axis_line_trace_radius():
    line = axis_lines(2, 1.5)[1]
    assert line.trace_radius(1.25) == pytest.approx(1.25 / 1.5)
    assert line.trace_radius(0.0) == 0.0


def test_line_restriction_and_exact_derivative():
    line = axis_lines(1, 2.0)[0]
    F = restrict_complex_line(Poly(z(1, 0) ** 3), line)
    assert F(0.5) == pytest.approx(1.0)
    # F(w) = (2w)^3, F'(w) = 24 w^2
    assert F.derivative(0.5) == pytest.approx(6.0)
    assert restrict_complex_line(Exp(Poly(z(1, 0))), line).derivative is None


def test_quasipolynomial_restriction_factorises_along_the_line(rng):
    q = QuasiPolynomial((
        (z(2, 0) ** 2 + 1.0, LinearFunctional.of([1.0, -0.5j])),
        (z(2, 1) * 2.0, LinearFunctional.of([0.25, 0.75])),
    ))
    w = np.sqrt(rng.random(16)) * np.exp(2j * np.pi * rng.random(16))
    for _ in range(5):
        line = sample_complex_line(2, 2.0, rng)
        y, v = line.x.array, line.v.array
        stretch = math.sqrt(4.0 - line.x.norm ** 2)
        expected = np.zeros(w.size, dtype=complex)
        for p, f in q.terms:
            expected += p.values(line.points(w)) * np.exp(f.apply(y)) * np.exp(w * stretch * f.apply(v))
        assert np.allclose(restrict_complex_line(Quasi(q), line)(w), expected, rtol=1e-12, atol=1e-12)


def test_real_segment_restriction():
    seg = axis_segment(2, 1)
    g = restrict_real_segment(Poly(z(2, 1) ** 2), seg)
    np.testing.assert_allclose(g(np.array([0.5, -1.0])), [0.25, 1.0])


def test_sampled_segments_are_chords_of_unit_ball(rng):
    for complex_directions in (False, True):
        seg = sample_real_segment(3, rng, complex_directions=complex_directions)
        assert np.linalg.norm(seg.point(seg.t_lo)) == pytest.approx(1.0)
        assert np.linalg.norm(seg.point(seg.t_hi)) == pytest.approx(1.0)


@pytest.mark.parametrize("complex_directions", [False, True])
def test_complexified_line_contains_the_segment(rng, complex_directions):
    seg = sample_real_segment(2, rng, complex_directions=complex_directions)
    line, to_disk = complexify_real_line(seg, 1.5)
    assert abs(line.x.inner(line.v)) < 1e-12
    t = np.linspace(seg.t_lo, seg.t_hi, 9)
    np.testing.assert_allclose(line.points(to_disk(t)), seg.points(t), atol=1e-12)


def test_restricting_to_wrong_dimension():
    with pytest.raises(DimensionMismatch):
        restrict_real_segment(Poly(z(1, 0)), axis_segment(2, 0))


# ============================================================
# SPEC FILES
# ============================================================

POLY_SPEC = {"dim": 2, "expr": {"kind": "poly", "terms": [[[2, 0], 1.0], [[0, 1], [0.0, -1.0]]]}}


def test_parse_polynomial_spec():
    f = parse_function_spec(POLY_SPEC)
    assert isinstance(f, Poly)
    assert evaluate(f, [2.0, 1.0]) == pytest.approx(4.0 - 1j)


def test_parse_nested_spec():
    spec = {"dim": 1, "expr": {
        "kind": "product",
        "left": {"kind": "compose", "named": "exp", "length": 30,
                 "arg": {"kind": "poly", "terms": [[[1], 1.0]]}},
        "right": {"kind": "quasi", "terms": [{"poly": [[[0], 1.0]], "functional": [-1.0]}]},
    }}
    f = parse_function_spec(spec)
    assert evaluate(f, [0.7]) == pytest.approx(1.0)


def test_spec_serialiser_inverts_parser():
    spec = {"dim": 2, "expr": {"kind": "scale", "factor": [0.0, 2.0], "arg": {
        "kind": "dderiv", "direction": [1.0, 0.0], "order": 1, "arg": POLY_SPEC["expr"]}}}
    f = parse_function_spec(spec)
    assert parse_function_spec(expr_to_spec(f)) == f


@pytest.mark.parametrize("payload", [
    [],
    {"dim": 0, "expr": POLY_SPEC["expr"]},
    {"dim": 2, "expr": {"kind": "sinh", "arg": {}}},
    {"dim": 2, "expr": {"kind": "poly", "terms": [[[1], 1.0]]}},
    {"dim": 2, "expr": {"kind": "poly", "terms": [], "extra": 1}},
    {"dim": 1, "expr": {"kind": "compose", "named": "exp", "series": [1.0],
                        "arg": {"kind": "poly", "terms": [[[1], 1.0]]}}},
    {"dim": 1, "expr": {"kind": "quasi", "terms": [{"poly": [], "functional": [1.0]}]}},
    {"dim": 1, "expr": {"kind": "poly", "terms": [[[1], True]]}},
])
def test_malformed_specs_are_rejected(payload):
    with pytest.raises(SpecParseError):
        parse_function_spec(payload)


def test_load_function_spec(write_spec, tmp_path):
    f = load_function_spec(write_spec(POLY_SPEC))
    assert polynomial_degree(f) == 2
    with pytest.raises(SpecParseError):
        load_function_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecParseError):
        load_function_spec(bad)


def test_compose_domain_warning(rng):
    coeffs, radius = named_series("geometric", 16)
    inside = ComposeUnivariate(coeffs, Poly(z(1, 0).scale(0.1)), radius)
    outside = ComposeUnivariate(coeffs, Poly(z(1, 0)), radius)
    assert check_compose_domain(inside, 2.0, rng) == []
    assert len(check_compose_domain(outside, 2.0, rng)) == 1
