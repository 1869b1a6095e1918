"""Closed-form Remez-type constants.

Multiplicative bounds are returned as `BoundValue` with both the value and its
log; values above 1e300 are reported as inf and carried by `log_value`.
"""

import math
from dataclasses import dataclass, field

import numpy as np

LOG_VALUE_CAP = math.log(1e300)


@dataclass(frozen=True)
class BoundValue:
    value: float
    formula_id: str
    inputs: dict = field(default_factory=dict)
    log_value: float = 0.0

    def to_record(self):
        return {
            "formula_id": self.formula_id,
            "inputs": dict(self.inputs),
            "value": self.value,
            "log_value": self.log_value,
        }


@dataclass(frozen=True)
class DegreeBound:
    fine: float
    coarse: float
    k: int
    m: int
    M: float


def _bound(formula_id, log_value, **inputs):
    value = math.exp(log_value) if log_value <= LOG_VALUE_CAP else math.inf
    return BoundValue(value, formula_id, inputs, log_value)


def _require_measures(whole, part, names):
    if not part > 0 or not whole > 0:
        raise ValueError(f"{names[1]} and {names[0]} must be positive, got {whole}, {part}")
    if part > whole:
        raise ValueError(f"{names[1]}={part} exceeds {names[0]}={whole}")


# ============================================================
# CHEBYSHEV POLYNOMIALS
# ============================================================

def chebyshev_closed_form(k, x):
    """((x + sqrt(x^2-1))^k + (x - sqrt(x^2-1))^k) / 2 with a complex square root."""
    root = np.emath.sqrt(x * x - 1.0)
    return float((((x + root) ** k + (x - root) ** k) / 2.0).real)


def log_chebyshev_T(k, x):
    """log |T_k(x)|, exact for large k."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    ax = abs(x)
    if ax < 1.0:
        c = abs(math.cos(k * math.acos(ax)))
        return math.log(c) if c > 0 else -math.inf
    q = ax + math.sqrt(ax * ax - 1.0)
    # T_k(|x|) = (q^k + q^-k) / 2
    return k * math.log(q) - math.log(2.0) + math.log1p(q ** (-2.0 * k))


def chebyshev_T(k, x):
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if abs(x) < 1.0:
        return math.cos(k * math.acos(x))
    sign = -1.0 if (x < 0 and k % 2 == 1) else 1.0
    if k <= 30:
        return sign * chebyshev_closed_form(k, abs(x))
    log_t = log_chebyshev_T(k, x)
    return sign * (math.exp(log_t) if log_t <= 709.0 else math.inf)


# ============================================================
# REMEZ-TYPE BOUNDS
# ============================================================

def bg_bound(k, n, lam):
    """T_k((1+beta)/(1-beta)), beta = (1-lambda)^{1/n}."""
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    if k < 0 or n < 1:
        raise ValueError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    if lam == 1:
        return _bound("bg", 0.0, k=k, n=n, lam=lam)
    beta = (1.0 - lam) ** (1.0 / n)
    return _bound("bg", log_chebyshev_T(k, (1.0 + beta) / (1.0 - beta)), k=k, n=n, lam=lam)


def bg_simplified(k, n, vol_V, vol_omega):
    _require_measures(vol_V, vol_omega, ("vol_V", "vol_omega"))
    if k < 0 or n < 1:
        raise ValueError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    return _bound("bg-simplified", k * math.log(4.0 * n * vol_V / vol_omega),
                  k=k, n=n, vol_V=vol_V, vol_omega=vol_omega)


def remez_interval_bound(len_I, len_omega, d):
    _require_measures(len_I, len_omega, ("len_I", "len_omega"))
    if d < 0:
        raise ValueError(f"d must be non-negative, got {d}")
    return _bound("remez", d * math.log(4.0 * len_I / len_omega), len_I=len_I, len_omega=len_omega, d=d)


def convex_body_bound(n, vol_V, vol_omega, d):
    _require_measures(vol_V, vol_omega, ("vol_V", "vol_omega"))
    if d < 0 or n < 1:
        raise ValueError(f"need d >= 0 and n >= 1, got d={d}, n={n}")
    return _bound("convex", d * math.log(4.0 * n * vol_V / vol_omega),
                  n=n, vol_V=vol_V, vol_omega=vol_omega, d=d)


def ball_pair_bound(R1, R2, d):
    """(4 R1/R2)^d for a ball of radius R2 inside one of radius R1; dimension-free."""
    _require_measures(R1, R2, ("R1", "R2"))
    if d < 0:
        raise ValueError(f"d must be non-negative, got {d}")
    return _bound("ball-pair", d * math.log(4.0 * R1 / R2), R1=R1, R2=R2, d=d)


def remez_from_valency(len_I, len_omega, m, c=1.0):
    """Remez bound with exponent c*m, m a Bernstein-index or valency bound."""
    if m < 0 or c <= 0:
        raise ValueError(f"need m >= 0 and c > 0, got m={m}, c={c}")
    inner = remez_interval_bound(len_I, len_omega, c * m)
    return _bound("remez-valency", inner.log_value, len_I=len_I, len_omega=len_omega, m=m, c=c)


# ============================================================
# QUASIPOLYNOMIALS AND DEGREE ESTIMATES
# ============================================================

def _check_quasi_params(k, m, M):
    if k < 1:
        raise ValueError(f"a quasipolynomial has k >= 1 terms, got {k}")
    if m < 0 or M < 0:
        raise ValueError(f"need m >= 0 and M >= 0, got m={m}, M={M}")


def quasipoly_zero_bound(k, m, M):
    """Zero bound for F + c on the normalized disk: fine and coarse forms."""
    _check_quasi_params(k, m, M)
    root = math.sqrt(k + 1)
    fine = m + (2.0 / math.pi) * (root + 1.0) * 16.0 * M
    coarse = 32.0 * (root * M + m)
    if fine > coarse or (m + M > 0 and not fine < coarse):
        raise ArithmeticError(f"fine bound {fine} does not undercut coarse bound {coarse}")
    return DegreeBound(fine, coarse, k, m, M)


def quasipoly_degree_bound(k, m, M, c_structural=1.0):
    _check_quasi_params(k, m, M)
    return c_structural * (math.sqrt(k + 1) * M + m)


def valency_index_bound(m, A=1.0):
    """Bernstein index on the intermediate disk is at most A*m."""
    if m < 0 or A <= 0:
        raise ValueError(f"need m >= 0 and A > 0, got m={m}, A={A}")
    return A * m


def default_bernstein_radii(r):
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    s = (1.0 + r) / 2.0
    return s, (1.0 + s) / 2.0


_STRUCTURAL_PARAMS = {
    "composition": ("k", "v_f"),
    "reciprocal": ("v_h",),
    "product": ("v_f", "v_g"),
    "rolle": ("m", "M"),
    "bernstein": ("b",),
}


def structural_degree_bounds(kind, params, c=1.0):
    """Chebyshev-degree bound for compositions, reciprocals, products, derivatives."""
    if kind not in _STRUCTURAL_PARAMS:
        raise ValueError(f"unknown structural kind '{kind}'; known: {sorted(_STRUCTURAL_PARAMS)}")
    missing = [p for p in _STRUCTURAL_PARAMS[kind] if p not in params]
    if missing:
        raise ValueError(f"kind '{kind}' needs parameters {missing}")
    vals = {p: float(params[p]) for p in _STRUCTURAL_PARAMS[kind]}
    if any(v < 0 for v in vals.values()) or c < 0:
        raise ValueError(f"structural parameters must be non-negative, got {vals}, c={c}")

    if kind == "composition":
        return c * vals["k"] * vals["v_f"]
    if kind == "reciprocal":
        return c * vals["v_h"]
    if kind == "product":
        return c * (vals["v_f"] + vals["v_g"])
    if kind == "rolle":
        return c * (vals["m"] + vals["M"])
    return c * vals["b"]


# ============================================================
# DISTRIBUTION / BMO
# ============================================================

def distribution_bound(t, sup_norm, d, n, vol_V):
    """min(|V|, 4n|V| (t/sup)^{1/d}) for the sublevel measure of {|f| <= t}."""
    if t < 0 or not sup_norm > 0 or not d > 0:
        raise ValueError(f"need t >= 0, sup_norm > 0, d > 0, got {t}, {sup_norm}, {d}")
    return min(vol_V, 4.0 * n * vol_V * (t / sup_norm) ** (1.0 / d))


def logbmo_bound(d, n):
    """d (1 + log 4n), the layer-cake integral of `distribution_bound`."""
    if not d > 0 or n < 1:
        raise ValueError(f"need d > 0 and n >= 1, got d={d}, n={n}")
    return d * (1.0 + math.log(4.0 * n))
