"""Analytic functions on complex balls and their restrictions to lines.

Functions are expression trees: polynomials, quasipolynomials sum p_i e^{f_i},
exponentials, products, univariate power-series compositions, directional
derivatives (a,D)^m and reciprocals e^{-g}. Every node evaluates on a batch of
points Z of shape (N, n); single points go through `evaluate`.

Complex lines are parametrized as

    l_{x,v} = { x + v z sqrt(s^2 - |x|^2) },   <x, v> = 0,  |v| = 1,

so that the unit disk in z is the trace of B_c(0, s) on the line.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from config import (
    CAUCHY_DERIVATIVE_NODES,
    CAUCHY_DERIVATIVE_RADIUS,
    COMPOSE_SERIES_LENGTH,
    LINE_TOLERANCE,
)

logger = logging.getLogger("FunctionCore")


class DimensionMismatch(ValueError):
    """Point or sub-expression dimension differs from the expression's."""


class EvaluationOverflow(ArithmeticError):
    """Evaluation produced inf or nan."""


class SpecParseError(ValueError):
    """Malformed function-spec document."""


class LineGeometryError(ValueError):
    """Line or segment violates its geometric constraints."""


def hermitian_inner(x, v):
    """<x, v> = sum x_j conj(v_j)."""
    return complex(np.vdot(np.asarray(v, dtype=complex), np.asarray(x, dtype=complex)))


# ============================================================
# VECTORS, POLYNOMIALS, FUNCTIONALS
# ============================================================

@dataclass(frozen=True)
class ComplexVector:
    entries: tuple

    def __post_init__(self):
        entries = tuple(complex(e) for e in self.entries)
        if len(entries) < 1:
            raise ValueError("a complex vector needs at least one entry")
        if not all(math.isfinite(e.real) and math.isfinite(e.imag) for e in entries):
            raise ValueError(f"non-finite vector entries: {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, values):
        return cls(tuple(np.asarray(values, dtype=complex).ravel()))

    @classmethod
    def basis(cls, n, j):
        e = np.zeros(n, dtype=complex)
        e[j] = 1.0
        return cls.of(e)

    @property
    def dim(self):
        return len(self.entries)

    @property
    def array(self):
        return np.array(self.entries, dtype=complex)

    @property
    def norm(self):
        return float(np.linalg.norm(self.array))

    def inner(self, other):
        return hermitian_inner(self.array, other.array)


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial in z_1..z_n: terms are (exponent tuple, coefficient)."""

    dim: int
    terms: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("polynomial dimension must be at least 1")
        merged = {}
        for exponents, coeff in self.terms:
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != self.dim:
                raise DimensionMismatch(
                    f"exponent tuple {exponents} does not match dimension {self.dim}"
                )
            if any(e < 0 for e in exponents):
                raise ValueError(f"negative exponent in {exponents}")
            merged[exponents] = merged.get(exponents, 0j) + complex(coeff)
        cleaned = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def from_terms(cls, dim, terms):
        items = terms.items() if isinstance(terms, dict) else terms
        return cls(dim, tuple(items))

    @classmethod
    def zero(cls, dim):
        return cls(dim, ())

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, (((0,) * dim, value),))

    @classmethod
    def variable(cls, dim, j, coeff=1.0):
        exponents = [0] * dim
        exponents[j] = 1
        return cls(dim, ((tuple(exponents), coeff),))

    @property
    def is_zero(self):
        return not self.terms

    @property
    def degree(self):
        # the zero polynomial counts as degree 0
        if not self.terms:
            return 0
        return max(sum(e) for e, _ in self.terms)

    def values(self, Z):
        Z = np.asarray(Z, dtype=complex)
        if not self.terms:
            return np.zeros(Z.shape[0], dtype=complex)
        exps = np.array([e for e, _ in self.terms], dtype=int)
        coeffs = np.array([c for _, c in self.terms], dtype=complex)
        monomials = np.prod(Z[:, None, :] ** exps[None, :, :], axis=2)
        return monomials @ coeffs

    def partial(self, j):
        out = []
        for exponents, coeff in self.terms:
            if exponents[j] == 0:
                continue
            lowered = list(exponents)
            lowered[j] -= 1
            out.append((tuple(lowered), coeff * exponents[j]))
        return MultiPoly(self.dim, tuple(out))

    def directional(self, a):
        """(a, D) p = sum_j a_j dp/dz_j."""
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.dim,):
            raise DimensionMismatch(f"direction of shape {a.shape} for dimension {self.dim}")
        result = MultiPoly.zero(self.dim)
        for j in range(self.dim):
            if a[j] != 0:
                result = result + self.partial(j).scale(a[j])
        return result

    def scale(self, c):
        return MultiPoly(self.dim, tuple((e, coeff * complex(c)) for e, coeff in self.terms))

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = MultiPoly.constant(self.dim, other)
        if other.dim != self.dim:
            raise DimensionMismatch(f"adding dimension {other.dim} to {self.dim}")
        return MultiPoly(self.dim, self.terms + other.terms)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        if other.dim != self.dim:
            raise DimensionMismatch(f"multiplying dimension {other.dim} by {self.dim}")
        out = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return MultiPoly(self.dim, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative polynomial power")
        result = MultiPoly.constant(self.dim, 1.0)
        for _ in range(k):
            result = result * self
        return result


@dataclass(frozen=True)
class LinearFunctional:
    """z -> sum_j c_j z_j."""

    coefficients: ComplexVector

    @classmethod
    def of(cls, values):
        return cls(ComplexVector.of(values))

    @property
    def dim(self):
        return self.coefficients.dim

    @property
    def norm(self):
        return self.coefficients.norm

    def values(self, Z):
        return np.asarray(Z, dtype=complex) @ self.coefficients.array

    def apply(self, a):
        return complex(np.asarray(a, dtype=complex) @ self.coefficients.array)


@dataclass(frozen=True)
class QuasiPolynomial:
    """sum_i p_i(z) e^{f_i(z)}; zero p_i terms are dropped on construction."""

    terms: tuple

    def __post_init__(self):
        kept = tuple((p, f) for p, f in self.terms if not p.is_zero)
        if not kept:
            raise ValueError("a quasipolynomial needs at least one nonzero term")
        dims = {p.dim for p, _ in kept} | {f.dim for _, f in kept}
        if len(dims) != 1:
            raise DimensionMismatch(f"quasipolynomial terms of mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "terms", kept)

    @property
    def dim(self):
        return self.terms[0][0].dim

    @property
    def k(self):
        return len(self.terms)

    @property
    def degree(self):
        return sum(1 + p.degree for p, _ in self.terms)

    @property
    def spectrum_norm(self):
        return max(f.norm for _, f in self.terms)

    def values(self, Z):
        Z = np.asarray(Z, dtype=complex)
        total = np.zeros(Z.shape[0], dtype=complex)
        for p, f in self.terms:
            total += p.values(Z) * np.exp(f.values(Z))
        return total


# ============================================================
# EXPRESSION TREE
# ============================================================

class AnalyticExpr:
    """Base node. Subclasses are frozen dataclasses with `dim` and `values(Z)`."""

    def children(self):
        return ()


@dataclass(frozen=True)
class Poly(AnalyticExpr):
    poly: MultiPoly

    @property
    def dim(self):
        return self.poly.dim

    def values(self, Z):
        return self.poly.values(Z)


@dataclass(frozen=True)
class Quasi(AnalyticExpr):
    quasi: QuasiPolynomial

    @property
    def dim(self):
        return self.quasi.dim

    def values(self, Z):
        return self.quasi.values(Z)


@dataclass(frozen=True)
class Exp(AnalyticExpr):
    arg: AnalyticExpr

    @property
    def dim(self):
        return self.arg.dim

    def values(self, Z):
        return np.exp(self.arg.values(Z))

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class ReciprocalExp(AnalyticExpr):
    """e^{-g}, i.e. 1/h for h = e^g."""

    arg: AnalyticExpr

    @property
    def dim(self):
        return self.arg.dim

    def values(self, Z):
        return np.exp(-self.arg.values(Z))

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Product(AnalyticExpr):
    left: AnalyticExpr
    right: AnalyticExpr

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatch(f"product of dimensions {self.left.dim} and {self.right.dim}")

    @property
    def dim(self):
        return self.left.dim

    def values(self, Z):
        return self.left.values(Z) * self.right.values(Z)

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Scale(AnalyticExpr):
    factor: complex
    arg: AnalyticExpr

    def __post_init__(self):
        object.__setattr__(self, "factor", complex(self.factor))

    @property
    def dim(self):
        return self.arg.dim

    def values(self, Z):
        return self.factor * self.arg.values(Z)

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class ComposeUnivariate(AnalyticExpr):
    """phi(g(z)) for a truncated power series phi(w) = sum c_j w^j."""

    coefficients: tuple
    arg: AnalyticExpr
    convergence_radius: float = math.inf

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("empty power series")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dim(self):
        return self.arg.dim

    def values(self, Z):
        w = self.arg.values(Z)
        return np.polynomial.polynomial.polyval(w, np.array(self.coefficients, dtype=complex))

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class DirectionalDerivative(AnalyticExpr):
    """(a, D)^m applied to `arg`.

    Poly/Quasi arguments are differentiated symbolically; anything else by a
    Cauchy integral along the direction a.
    """

    direction: ComplexVector
    order: int
    arg: AnalyticExpr
    _symbolic: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("derivative order must be non-negative")
        if self.direction.dim != self.arg.dim:
            raise DimensionMismatch(
                f"direction of dimension {self.direction.dim} for dimension {self.arg.dim}"
            )
        object.__setattr__(
            self, "_symbolic",
            symbolic_directional(self.arg, self.direction.array, self.order),
        )

    @property
    def dim(self):
        return self.arg.dim

    def values(self, Z):
        if self._symbolic is not None:
            return self._symbolic.values(Z)
        return _cauchy_directional(self.arg, self.direction.array, self.order, Z)

    def children(self):
        return (self.arg,)


def _cauchy_directional(expr, a, m, Z):
    """g^(m)(0) for g(w) = f(Z + w a): m!/(K rho^m) sum_k g(rho w_k) w_k^{-m}."""
    Z = np.asarray(Z, dtype=complex)
    if m == 0:
        return expr.values(Z)
    a_norm = float(np.linalg.norm(a))
    if a_norm == 0:
        return np.zeros(Z.shape[0], dtype=complex)
    rho = CAUCHY_DERIVATIVE_RADIUS / a_norm
    K = max(CAUCHY_DERIVATIVE_NODES, 4 * (m + 1))
    roots = np.exp(2j * np.pi * np.arange(K) / K)
    shifts = (rho * roots)[None, :, None] * a[None, None, :]
    pts = (Z[:, None, :] + shifts).reshape(-1, Z.shape[1])
    g = expr.values(pts).reshape(Z.shape[0], K)
    return math.factorial(m) * (g @ roots ** (-m)) / (K * rho ** m)


def is_symbolic(expr):
    if isinstance(expr, (Poly, Quasi)):
        return True
    if isinstance(expr, Scale):
        return is_symbolic(expr.arg)
    return False


def symbolic_directional(expr, a, m):
    """(a,D)^m expr as a Poly/Quasi/Scale expression, or None if not symbolic."""
    if not is_symbolic(expr):
        return None
    a = np.asarray(a, dtype=complex)
    if isinstance(expr, Scale):
        inner = symbolic_directional(expr.arg, a, m)
        return Scale(expr.factor, inner)
    if isinstance(expr, Poly):
        p = expr.poly
        for _ in range(m):
            p = p.directional(a)
        return Poly(p)
    terms = list(expr.quasi.terms)
    for _ in range(m):
        # (a,D)(p e^f) = ((a,D)p + f(a) p) e^f
        terms = [(p.directional(a) + p.scale(f.apply(a)), f) for p, f in terms]
        terms = [(p, f) for p, f in terms if not p.is_zero]
        if not terms:
            return Poly(MultiPoly.zero(expr.dim))
    return Quasi(QuasiPolynomial(tuple(terms)))


def iter_nodes(expr):
    yield expr
    for child in expr.children():
        yield from iter_nodes(child)


def polynomial_degree(expr):
    """Total degree when the expression is a (scaled) polynomial, else None."""
    if isinstance(expr, Poly):
        return expr.poly.degree
    if isinstance(expr, Scale):
        return polynomial_degree(expr.arg)
    return None


def as_quasipolynomial(expr):
    """Quasi view of a Poly/Quasi/Scale expression, or None."""
    if isinstance(expr, Quasi):
        return expr.quasi
    if isinstance(expr, Poly):
        zero_functional = LinearFunctional.of(np.zeros(expr.dim))
        return QuasiPolynomial(((expr.poly, zero_functional),))
    if isinstance(expr, Scale):
        inner = as_quasipolynomial(expr.arg)
        if inner is None or expr.factor == 0:
            return None
        return QuasiPolynomial(tuple((p.scale(expr.factor), f) for p, f in inner.terms))
    return None


# ============================================================
# EVALUATION
# ============================================================

def evaluate_batch(expr, Z):
    """Values of expr at the rows of Z, shape (N, n) -> (N,)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    if Z.shape[1] != expr.dim:
        raise DimensionMismatch(f"points of dimension {Z.shape[1]} for a dimension-{expr.dim} function")
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(expr.values(Z), dtype=complex)
    if not np.all(np.isfinite(vals)):
        bad = int(np.count_nonzero(~np.isfinite(vals)))
        raise EvaluationOverflow(f"{bad} of {vals.size} evaluations overflowed")
    return vals


def evaluate(expr, z):
    if isinstance(z, ComplexVector):
        z = z.array
    z = np.asarray(z, dtype=complex).ravel()
    return complex(evaluate_batch(expr, z[None, :])[0])


# ============================================================
# LINES AND SEGMENTS
# ============================================================

@dataclass(frozen=True)
class ComplexLine:
    """l_{x,v} = {x + v z sqrt(s^2 - |x|^2)} with <x,v> = 0, |v| = 1, |x| < s."""

    x: ComplexVector
    v: ComplexVector
    s: float

    def __post_init__(self):
        if self.x.dim != self.v.dim:
            raise DimensionMismatch(f"base of dimension {self.x.dim}, direction {self.v.dim}")
        if abs(self.v.norm - 1.0) > LINE_TOLERANCE:
            raise LineGeometryError(f"direction norm {self.v.norm} is not 1")
        if abs(self.x.inner(self.v)) > LINE_TOLERANCE:
            raise LineGeometryError(f"<x,v> = {self.x.inner(self.v)} is not 0")
        if not self.x.norm < self.s:
            raise LineGeometryError(f"|x| = {self.x.norm} is not below s = {self.s}")

    @property
    def dim(self):
        return self.x.dim

    @property
    def scale(self):
        return math.sqrt(self.s ** 2 - self.x.norm ** 2)

    def points(self, z):
        z = np.asarray(z, dtype=complex).ravel()
        return self.x.array[None, :] + (self.scale * z)[:, None] * self.v.array[None, :]

    def trace_radius(self, t):
        """z-radius of l ∩ B_c(0, t)."""
        gap = t ** 2 - self.x.norm ** 2
        return math.sqrt(gap) / self.scale if gap > 0 else 0.0

    def to_record(self):
        return {
            "x": [[e.real, e.imag] for e in self.x.entries],
            "v": [[e.real, e.imag] for e in self.v.entries],
            "s": self.s,
        }


@dataclass(frozen=True)
class RealSegment:
    """{base + t direction : t in [t_lo, t_hi]}, direction a unit vector of R^{2n}."""

    base: ComplexVector
    direction: ComplexVector
    t_lo: float
    t_hi: float
    radius: float = 1.0

    def __post_init__(self):
        if self.base.dim != self.direction.dim:
            raise DimensionMismatch(f"base of dimension {self.base.dim}, direction {self.direction.dim}")
        if not self.t_lo < self.t_hi:
            raise LineGeometryError(f"empty parameter range [{self.t_lo}, {self.t_hi}]")
        if abs(self.direction.norm - 1.0) > 1e-9:
            raise LineGeometryError(f"direction norm {self.direction.norm} is not 1")
        for t in (self.t_lo, self.t_hi):
            if np.linalg.norm(self.point(t)) > self.radius + 1e-9:
                raise LineGeometryError(f"segment end t={t} leaves the ball of radius {self.radius}")

    @property
    def dim(self):
        return self.base.dim

    @property
    def length(self):
        return self.t_hi - self.t_lo

    def point(self, t):
        return self.base.array + float(t) * self.direction.array

    def points(self, t):
        t = np.asarray(t, dtype=float).ravel()
        return self.base.array[None, :] + t[:, None] * self.direction.array[None, :]

    def to_record(self):
        return {
            "base": [[e.real, e.imag] for e in self.base.entries],
            "direction": [[e.real, e.imag] for e in self.direction.entries],
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
        }


@dataclass(frozen=True)
class LineRestriction:
    """F(z) = f(x + v z sqrt(s^2 - |x|^2))."""

    expr: AnalyticExpr
    line: ComplexLine

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        vals = evaluate_batch(self.expr, self.line.points(z_arr)).reshape(z_arr.shape)
        return complex(vals) if vals.ndim == 0 else vals

    @cached_property
    def derivative(self):
        """Exact F' for symbolic expressions, else None."""
        d_expr = symbolic_directional(self.expr, self.line.scale * self.line.v.array, 1)
        if d_expr is None:
            return None
        return LineRestriction(d_expr, self.line)


@dataclass(frozen=True)
class SegmentRestriction:
    """t -> f(base + t direction)."""

    expr: AnalyticExpr
    segment: RealSegment

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        vals = evaluate_batch(self.expr, self.segment.points(t_arr)).reshape(t_arr.shape)
        return complex(vals) if vals.ndim == 0 else vals


@dataclass(frozen=True)
class LineParameterMap:
    """Real segment parameter t -> disk parameter z = (t + offset) / scale."""

    offset: complex
    scale: float

    def __call__(self, t):
        return (np.asarray(t, dtype=float) + self.offset) / self.scale


def _check_dim(expr, dim):
    if expr.dim != dim:
        raise DimensionMismatch(f"dimension-{expr.dim} function on a dimension-{dim} line")


def restrict_complex_line(expr, line):
    _check_dim(expr, line.dim)
    return LineRestriction(expr, line)


def restrict_real_segment(expr, seg):
    _check_dim(expr, seg.dim)
    return SegmentRestriction(expr, seg)


def complexify_real_line(seg, s):
    """Complex line l_x^c containing the real line of `seg`, plus the parameter map.

    The base point is the point of the complex line nearest the origin,
    y = b - <b,u> u, which makes <y, v> = 0 hold exactly.
    """
    if not s > 1:
        raise ValueError(f"s must exceed 1, got {s}")
    b = seg.base.array
    u = seg.direction.array
    u = u / np.linalg.norm(u)
    bu = hermitian_inner(b, u)
    nearest_real = b - bu.real * u
    if np.linalg.norm(nearest_real) >= 1.0:
        raise LineGeometryError("the real line does not meet the unit ball")
    y = b - bu * u
    line = ComplexLine(ComplexVector.of(y), ComplexVector.of(u), float(s))
    return line, LineParameterMap(offset=bu, scale=line.scale)


# ============================================================
# SAMPLING
# ============================================================

def _uniform_in_ball(dim_real, radius, rng):
    g = rng.standard_normal(dim_real)
    g /= np.linalg.norm(g)
    return g * radius * rng.random() ** (1.0 / dim_real)


def sample_complex_line(n, s, rng, base_radius=1.0):
    """x uniform in B_c(0, base_radius), v uniform on the unit sphere of x's complement."""
    if not s > 1:
        raise ValueError(f"s must exceed 1, got {s}")
    if n == 1:
        # C^1 has no nonzero vector orthogonal to x != 0
        theta = rng.uniform(0.0, 2.0 * np.pi)
        return ComplexLine(ComplexVector.of([0.0]), ComplexVector.of([np.exp(1j * theta)]), float(s))
    r = _uniform_in_ball(2 * n, base_radius, rng)
    x = r[:n] + 1j * r[n:]
    w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x_sq = float(np.vdot(x, x).real)
    if x_sq > 0:
        for _ in range(2):
            w = w - (np.vdot(x, w) / x_sq) * x
    w /= np.linalg.norm(w)
    return ComplexLine(ComplexVector.of(x), ComplexVector.of(w), float(s))


def axis_lines(n, s):
    return [ComplexLine(ComplexVector.of(np.zeros(n)), ComplexVector.basis(n, j), float(s)) for j in range(n)]


def _chord(b, u, radius=1.0):
    beta = hermitian_inner(b, u).real
    disc = beta ** 2 - float(np.vdot(b, b).real) + radius ** 2
    root = math.sqrt(max(disc, 0.0))
    return -beta - root, -beta + root


def sample_real_segment(n, rng, complex_directions=False):
    """Full chord of the unit ball through a uniform point along a uniform direction.

    Real directions stay in B(0,1) of R^n; complex ones use B_c(0,1) = B(0,1) of R^{2n}.
    """
    if complex_directions:
        r = _uniform_in_ball(2 * n, 1.0, rng)
        b = r[:n] + 1j * r[n:]
        g = rng.standard_normal(2 * n)
        g /= np.linalg.norm(g)
        u = g[:n] + 1j * g[n:]
    else:
        b = _uniform_in_ball(n, 1.0, rng).astype(complex)
        g = rng.standard_normal(n)
        u = (g / np.linalg.norm(g)).astype(complex)
    t_lo, t_hi = _chord(b, u)
    return RealSegment(ComplexVector.of(b), ComplexVector.of(u), t_lo, t_hi)


def axis_segment(n, j):
    return RealSegment(ComplexVector.of(np.zeros(n)), ComplexVector.basis(n, j), -1.0, 1.0)


# ============================================================
# FUNCTION-SPEC FILES
# ============================================================

NAMED_SERIES = {
    "exp": (lambda j: 1.0 / math.factorial(j), math.inf),
    "geometric": (lambda j: 1.0, 1.0),
    "log1p": (lambda j: 0.0 if j == 0 else (-1.0) ** (j + 1) / j, 1.0),
}

_NODE_FIELDS = {
    "poly": {"kind", "terms"},
    "quasi": {"kind", "terms"},
    "exp": {"kind", "arg"},
    "product": {"kind", "left", "right"},
    "scale": {"kind", "factor", "arg"},
    "compose": {"kind", "series", "named", "length", "radius", "arg"},
    "dderiv": {"kind", "direction", "order", "arg"},
    "recip_exp": {"kind", "arg"},
}


def named_series(name, length=COMPOSE_SERIES_LENGTH):
    """Coefficients and convergence radius of a named power series."""
    if name not in NAMED_SERIES:
        raise SpecParseError(f"unknown series '{name}'; known: {sorted(NAMED_SERIES)}")
    coeff, radius = NAMED_SERIES[name]
    return tuple(coeff(j) for j in range(length)), radius


def _parse_complex(value, where):
    if isinstance(value, bool):
        raise SpecParseError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise SpecParseError(f"{where}: expected a number or [re, im], got {value!r}")


def _parse_vector(value, dim, where):
    if not isinstance(value, list) or len(value) != dim:
        raise SpecParseError(f"{where}: expected {dim} coefficients")
    return ComplexVector.of([_parse_complex(v, f"{where}[{i}]") for i, v in enumerate(value)])


def _parse_poly_terms(value, dim, where):
    if not isinstance(value, list):
        raise SpecParseError(f"{where}: polynomial terms must be a list")
    terms = []
    for i, term in enumerate(value):
        if not isinstance(term, list) or len(term) != 2 or not isinstance(term[0], list):
            raise SpecParseError(f"{where}[{i}]: expected [[exponents], [re, im]]")
        exponents = term[0]
        if len(exponents) != dim or not all(isinstance(e, int) and e >= 0 for e in exponents):
            raise SpecParseError(f"{where}[{i}]: exponents must be {dim} non-negative integers")
        terms.append((tuple(exponents), _parse_complex(term[1], f"{where}[{i}]")))
    return MultiPoly(dim, tuple(terms))


def _require(node, key, where):
    if key not in node:
        raise SpecParseError(f"{where}: missing field '{key}'")
    return node[key]


def _parse_node(node, dim, where):
    if not isinstance(node, dict):
        raise SpecParseError(f"{where}: expected an object")
    kind = node.get("kind")
    if kind not in _NODE_FIELDS:
        raise SpecParseError(f"{where}: unknown kind {kind!r}")
    unknown = set(node) - _NODE_FIELDS[kind]
    if unknown:
        raise SpecParseError(f"{where}: unknown fields {sorted(unknown)} for kind '{kind}'")

    if kind == "poly":
        return Poly(_parse_poly_terms(_require(node, "terms", where), dim, f"{where}.terms"))
    if kind == "quasi":
        terms = _require(node, "terms", where)
        if not isinstance(terms, list) or not terms:
            raise SpecParseError(f"{where}.terms: expected a non-empty list")
        parsed = []
        for i, term in enumerate(terms):
            tw = f"{where}.terms[{i}]"
            if not isinstance(term, dict):
                raise SpecParseError(f"{tw}: expected an object")
            unknown = set(term) - {"poly", "functional"}
            if unknown:
                raise SpecParseError(f"{tw}: unknown fields {sorted(unknown)}")
            p = _parse_poly_terms(_require(term, "poly", tw), dim, f"{tw}.poly")
            f = LinearFunctional(_parse_vector(_require(term, "functional", tw), dim, f"{tw}.functional"))
            parsed.append((p, f))
        try:
            return Quasi(QuasiPolynomial(tuple(parsed)))
        except ValueError as e:
            raise SpecParseError(f"{where}: {e}") from e
    if kind == "exp":
        return Exp(_parse_node(_require(node, "arg", where), dim, f"{where}.arg"))
    if kind == "recip_exp":
        return ReciprocalExp(_parse_node(_require(node, "arg", where), dim, f"{where}.arg"))
    if kind == "product":
        return Product(
            _parse_node(_require(node, "left", where), dim, f"{where}.left"),
            _parse_node(_require(node, "right", where), dim, f"{where}.right"),
        )
    if kind == "scale":
        factor = _parse_complex(_require(node, "factor", where), f"{where}.factor")
        return Scale(factor, _parse_node(_require(node, "arg", where), dim, f"{where}.arg"))
    if kind == "compose":
        arg = _parse_node(_require(node, "arg", where), dim, f"{where}.arg")
        length = node.get("length", COMPOSE_SERIES_LENGTH)
        if not isinstance(length, int) or length < 1:
            raise SpecParseError(f"{where}.length: expected a positive integer")
        if ("series" in node) == ("named" in node):
            raise SpecParseError(f"{where}: give exactly one of 'series' or 'named'")
        if "named" in node:
            coeffs, radius = named_series(node["named"], length)
        else:
            series = node["series"]
            if not isinstance(series, list) or not series:
                raise SpecParseError(f"{where}.series: expected a non-empty list")
            coeffs = tuple(_parse_complex(c, f"{where}.series[{i}]") for i, c in enumerate(series[:length]))
            radius = math.inf
        if "radius" in node:
            radius = float(node["radius"])
        return ComposeUnivariate(coeffs, arg, radius)
    # dderiv
    order = _require(node, "order", where)
    if not isinstance(order, int) or order < 0:
        raise SpecParseError(f"{where}.order: expected a non-negative integer")
    direction = _parse_vector(_require(node, "direction", where), dim, f"{where}.direction")
    return DirectionalDerivative(direction, order, _parse_node(_require(node, "arg", where), dim, f"{where}.arg"))


def parse_function_spec(payload):
    if not isinstance(payload, dict):
        raise SpecParseError("function spec must be an object")
    unknown = set(payload) - {"dim", "expr"}
    if unknown:
        raise SpecParseError(f"unknown top-level fields {sorted(unknown)}")
    dim = _require(payload, "dim", "spec")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecParseError("spec.dim: expected a positive integer")
    try:
        return _parse_node(_require(payload, "expr", "spec"), dim, "spec.expr")
    except DimensionMismatch as e:
        raise SpecParseError(str(e)) from e


def load_function_spec(path):
    try:
        with Path(path).open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise SpecParseError(f"cannot read function spec {path}: {e}") from e
    return parse_function_spec(payload)


def _complex_out(c):
    return [c.real, c.imag]


def _node_to_spec(expr):
    if isinstance(expr, Poly):
        return {"kind": "poly", "terms": [[list(e), _complex_out(c)] for e, c in expr.poly.terms]}
    if isinstance(expr, Quasi):
        return {"kind": "quasi", "terms": [
            {"poly": [[list(e), _complex_out(c)] for e, c in p.terms],
             "functional": [_complex_out(c) for c in f.coefficients.entries]}
            for p, f in expr.quasi.terms
        ]}
    if isinstance(expr, Exp):
        return {"kind": "exp", "arg": _node_to_spec(expr.arg)}
    if isinstance(expr, ReciprocalExp):
        return {"kind": "recip_exp", "arg": _node_to_spec(expr.arg)}
    if isinstance(expr, Product):
        return {"kind": "product", "left": _node_to_spec(expr.left), "right": _node_to_spec(expr.right)}
    if isinstance(expr, Scale):
        return {"kind": "scale", "factor": _complex_out(expr.factor), "arg": _node_to_spec(expr.arg)}
    if isinstance(expr, ComposeUnivariate):
        node = {"kind": "compose", "series": [_complex_out(c) for c in expr.coefficients],
                "length": len(expr.coefficients), "arg": _node_to_spec(expr.arg)}
        if math.isfinite(expr.convergence_radius):
            node["radius"] = expr.convergence_radius
        return node
    if isinstance(expr, DirectionalDerivative):
        return {"kind": "dderiv", "direction": [_complex_out(c) for c in expr.direction.entries],
                "order": expr.order, "arg": _node_to_spec(expr.arg)}
    raise TypeError(f"cannot serialise {type(expr).__name__}")


def expr_to_spec(expr):
    return {"dim": expr.dim, "expr": _node_to_spec(expr)}


def check_compose_domain(expr, r, rng, n_samples=512):
    """Warn when a composition's inner values leave the series' disk of convergence."""
    warnings = []
    compositions = [node for node in iter_nodes(expr) if isinstance(node, ComposeUnivariate)]
    if not compositions:
        return warnings
    n = expr.dim
    pts = []
    for i in range(n_samples):
        p = _uniform_in_ball(2 * n, r, rng)
        if i % 4 == 0:
            p = p / np.linalg.norm(p) * r * (1 - 1e-9)
        pts.append(p[:n] + 1j * p[n:])
    Z = np.array(pts)
    for node in compositions:
        if not math.isfinite(node.convergence_radius):
            continue
        w_max = float(np.max(np.abs(evaluate_batch(node.arg, Z))))
        if w_max >= node.convergence_radius:
            msg = (f"composition inner values reach |w| = {w_max:.4g} on B_c(0,{r}), "
                   f"beyond the series radius {node.convergence_radius:.4g}")
            logger.warning(msg)
            warnings.append(msg)
    return warnings
