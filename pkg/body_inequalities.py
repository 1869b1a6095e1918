"""Remez-type checks on convex bodies, plus the distributional consequences.

Every quantity over a body is a Monte Carlo estimate on uniform samples of
that body (`body.sample`); sup norms are refined from the best sample with
Nelder-Mead, with points outside the set scored as 0.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from scipy.integrate import quad, trapezoid
from scipy.optimize import bisect, curve_fit, minimize

from bounds import (
    ball_pair_bound,
    bg_bound,
    bg_simplified,
    convex_body_bound,
)
from config import (
    DEFAULT_SLACK,
    HALF_MEASURE_EVAL,
    N_MC,
    N_RAY_DIRECTIONS,
    ORLICZ_MAX_ITER,
    ORLICZ_RTOL,
    RAY_SCAN_POINTS,
)
from estimation import DegenerateFunctionError, VerificationReport, scan_max
from function_core import evaluate_batch, polynomial_degree, restrict_real_segment
from measure_sets import Ball, IntervalUnion, check_subset

logger = logging.getLogger("BodyInequalities")

BG_MC_SLACK = 0.05


class RaySelectionError(RuntimeError):
    """No sampled ray from x meets omega in positive length."""


class FitError(RuntimeError):
    """Tail fit is underdetermined or did not converge."""


class OrliczConvergenceError(RuntimeError):
    pass


def _abs_values(f, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.abs(evaluate_batch(f, X.astype(complex)))


def _refine_sup(f, body, X, vals):
    k = int(np.argmax(vals))
    best, arg = float(vals[k]), X[k]

    def objective(x):
        if not body.contains(x)[0]:
            return 0.0
        return -float(_abs_values(f, x)[0])

    res = minimize(objective, X[k], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 200 * body.dim})
    if -res.fun > best and body.contains(res.x)[0]:
        best, arg = float(-res.fun), res.x
    return best, np.asarray(arg, dtype=float)


def sup_on_body(f, body, n_mc, rng):
    """(sup |f|, argmax) over a body or measurable set, MC plus refinement."""
    X = body.sample(n_mc, rng)
    return _refine_sup(f, body, X, _abs_values(f, X))


# ============================================================
# RAY SELECTION / REMEZ ON CONVEX BODIES
# ============================================================

@dataclass(frozen=True)
class RayChoice:
    origin: tuple
    direction: tuple
    ratio: float
    len_V: float
    len_omega: float
    target: float
    certified: bool
    omega_on_ray: Optional[IntervalUnion] = None

    def to_record(self):
        return {"origin": list(self.origin), "direction": list(self.direction), "ratio": self.ratio,
                "len_V": self.len_V, "len_omega": self.len_omega, "target": self.target,
                "certified": self.certified}


def _runs_to_union(inside, t_max):
    h = t_max / len(inside)
    pieces = []
    start = None
    for k, flag in enumerate(inside):
        if flag and start is None:
            start = k
        elif not flag and start is not None:
            pieces.append((start * h, k * h))
            start = None
    if start is not None:
        pieces.append((start * h, t_max))
    return IntervalUnion(tuple(pieces), 0.0, t_max)


def select_ray(V, omega, x, n_dirs=N_RAY_DIRECTIONS, rng=None, n_scan=RAY_SCAN_POINTS):
    """Ray from x minimizing mes(l ∩ V) / mes(l ∩ omega) among sampled directions."""
    x = np.asarray(x, dtype=float)
    if not V.contains(x)[0]:
        raise ValueError("ray origin must lie in V")
    n = V.dim
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        rng = rng if rng is not None else np.random.default_rng()
        g = rng.standard_normal((n_dirs, n))
        axes = np.vstack([np.eye(n), -np.eye(n)])
        dirs = np.vstack([axes, g / np.linalg.norm(g, axis=1, keepdims=True)])

    target = n * V.volume / omega.volume
    best = None
    for u in dirs:
        _, t_max = V.ray_extent(x, u)
        if not t_max > 0:
            continue
        ts = (np.arange(n_scan) + 0.5) / n_scan * t_max
        inside = omega.contains(x + ts[:, None] * u)
        len_omega = t_max * float(inside.mean())
        if len_omega == 0:
            continue
        ratio = t_max / len_omega
        if best is None or ratio < best[0]:
            best = (ratio, u, t_max, len_omega, inside)
    if best is None:
        raise RaySelectionError("no sampled ray meets omega; resample directions or move x")
    ratio, u, t_max, len_omega, inside = best
    return RayChoice(tuple(x), tuple(u), ratio, t_max, len_omega, target,
                     ratio <= target * (1 + 1e-12), _runs_to_union(inside, t_max))


def _ray_chain(f, V, omega, x, d, rng, slack):
    # pull x slightly toward the centroid so it is interior
    x = V.centroid + (1.0 - 1e-6) * (x - V.centroid)
    ray = select_ray(V, omega, x, N_RAY_DIRECTIONS, rng)
    u = np.array(ray.direction)

    def g(t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        vals = evaluate_batch(f, (x[None, :] + t_arr[:, None] * u[None, :]).astype(complex))
        return vals if np.ndim(t) else complex(vals[0])

    sup_I = scan_max(g, 0.0, ray.len_V, 256)[0]
    sup_w = max(scan_max(g, lo, hi, 256)[0] for lo, hi in ray.omega_on_ray.pieces)
    measure = ray.omega_on_ray.measure
    log_bound = d * math.log(4.0 * ray.len_V / measure)
    ok = sup_w > 0 and math.log(max(sup_I, 1e-300)) <= log_bound + math.log(sup_w) + math.log1p(slack)
    return {"ray": ray.to_record(), "sup_on_ray": sup_I, "sup_omega_on_ray": sup_w,
            "ray_bound_log": log_bound, "ray_pass": bool(ok)}


def verify_convex_body(f, V, omega, d, n_mc=N_MC, rng=None, slack=DEFAULT_SLACK, seed=None):
    """sup_V|f| <= (4n|V|/|omega|)^d sup_omega|f| (1+slack), compared in logs."""
    rng = rng if rng is not None else np.random.default_rng()
    check_subset(omega, V, rng)
    n = V.dim
    sup_V, x_star = sup_on_body(f, V, n_mc, rng)
    sup_w, _ = sup_on_body(f, omega, n_mc, rng)
    bound = convex_body_bound(n, V.volume, omega.volume, d)
    inputs = {"V": V.to_record(), "omega": omega.to_record(), "d": d, "n_mc": n_mc}
    details = {"vol_V": V.volume, "vol_omega": omega.volume, "bound_log": bound.log_value}

    if sup_w == 0:
        return VerificationReport(check_id="convex", inputs=inputs, measured_lhs=sup_V, bound_rhs=0.0,
                                  passed=sup_V == 0, slack=slack, seed=seed, details=details)

    log_rhs = bound.log_value + math.log(sup_w)
    log_lhs = math.log(sup_V) if sup_V > 0 else -math.inf
    passed = log_lhs <= log_rhs + math.log1p(slack)

    if isinstance(V, Ball) and isinstance(omega, Ball):
        pair = ball_pair_bound(V.radius, omega.radius, d)
        details["ball_pair_bound_log"] = pair.log_value
        details["ball_pair_pass"] = bool(log_lhs <= pair.log_value + math.log(sup_w) + math.log1p(slack))

    k = polynomial_degree(f)
    if k is not None:
        bg = _bg_details(k, V, omega, log_lhs, sup_w, slack)
        details.update(bg)
        passed = passed and bg["bg_pass"] and bg["bg_dominated"]

    try:
        details.update(_ray_chain(f, V, omega, x_star, d, rng, slack))
    except RaySelectionError as e:
        logger.warning(f"ray chain unavailable: {e}")
        details["ray"] = None

    return VerificationReport(
        check_id="convex", inputs=inputs, measured_lhs=sup_V,
        bound_rhs=math.exp(log_rhs) if log_rhs < 690 else math.inf,
        passed=bool(passed), slack=slack, seed=seed, details=details,
    )


def _bg_details(k, V, omega, log_lhs, sup_w, slack):
    n = V.dim
    lam = min(omega.volume / V.volume, 1.0)
    bg = bg_bound(k, n, lam)
    bgs = bg_simplified(k, n, V.volume, omega.volume)
    bg_pass = log_lhs <= bg.log_value + math.log(sup_w) + math.log1p(max(slack, BG_MC_SLACK))
    dominated = bgs.log_value >= bg.log_value - 1e-12 * max(1.0, abs(bg.log_value))
    return {"bg_log": bg.log_value, "bg_simplified_log": bgs.log_value,
            "bg_pass": bool(bg_pass), "bg_dominated": bool(dominated)}


def verify_brudnyi_ganzburg(p, V, omega, n_mc=N_MC, rng=None, slack=DEFAULT_SLACK, seed=None):
    """sup_V|p| <= T_k((1+beta)/(1-beta)) sup_omega|p| for a polynomial of degree k.

    Monte Carlo sups get at least BG_MC_SLACK; the simplified bound must dominate the exact one.
    """
    k = polynomial_degree(p)
    if k is None:
        raise ValueError("the Brudnyi-Ganzburg check needs a polynomial")
    rng = rng if rng is not None else np.random.default_rng()
    check_subset(omega, V, rng)
    sup_V, _ = sup_on_body(p, V, n_mc, rng)
    sup_w, _ = sup_on_body(p, omega, n_mc, rng)
    inputs = {"V": V.to_record(), "omega": omega.to_record(), "k": k, "n_mc": n_mc}
    if sup_w == 0:
        return VerificationReport.skip("bg", "p vanishes on omega", slack, inputs=inputs, seed=seed)
    log_lhs = math.log(sup_V) if sup_V > 0 else -math.inf
    details = _bg_details(k, V, omega, log_lhs, sup_w, slack)
    log_rhs = details["bg_log"] + math.log(sup_w)
    return VerificationReport(
        check_id="bg", inputs=inputs, measured_lhs=sup_V,
        bound_rhs=math.exp(log_rhs) if log_rhs < 690 else math.inf,
        passed=details["bg_pass"] and details["bg_dominated"], slack=slack, seed=seed, details=details,
    )


# ============================================================
# DISTRIBUTION FUNCTION / LOG-BMO
# ============================================================

def distribution_function(f, V, t, n_mc=N_MC, rng=None):
    """|V| * fraction of uniform samples with |f| <= t; t may be an array."""
    rng = rng if rng is not None else np.random.default_rng()
    vals = _abs_values(f, V.sample(n_mc, rng))
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = V.volume * np.mean(vals[None, :] <= t_arr[:, None], axis=1)
    return out if np.ndim(t) else float(out[0])


@dataclass(frozen=True)
class LogBmoResult:
    value: float
    stderr: float
    rearrangement_value: float
    sup: float
    diverges: bool
    agrees: bool
    n_mc: int


def log_bmo_integral(f, V, n_mc=N_MC, rng=None):
    """Average of |log(|f| / sup_V |f|)| over V, direct and via the decreasing rearrangement."""
    rng = rng if rng is not None else np.random.default_rng()
    X = V.sample(n_mc, rng)
    vals = _abs_values(f, X)
    sup, _ = _refine_sup(f, V, X, vals)
    if sup == 0:
        raise DegenerateFunctionError("f vanishes on every sample of V")
    if np.any(vals == 0):
        logger.warning(f"f vanishes on {int(np.count_nonzero(vals == 0))} samples; the integral diverges")
        return LogBmoResult(math.inf, math.inf, math.inf, sup, True, False, n_mc)

    logs = np.abs(np.log(vals / sup))
    value = float(logs.mean())
    stderr = float(logs.std(ddof=1) / math.sqrt(n_mc))
    ordered = np.sort(vals)
    s = (np.arange(n_mc) + 0.5) / n_mc
    rearranged = float(trapezoid(np.abs(np.log(ordered / sup)), s) / (s[-1] - s[0]))
    agrees = abs(rearranged - value) <= 3.0 * stderr + 1.0 / n_mc * float(logs.max())
    return LogBmoResult(value, stderr, rearranged, sup, False, bool(agrees), n_mc)


# ============================================================
# BOURGAIN-TYPE TAIL / ORLICZ / REVERSE HOLDER
# ============================================================

def halfmeasure_fraction(f, seg, I, d_tilde, n_eval=HALF_MEASURE_EVAL):
    """mes{t in I : |f(t)| >= 10^{-d_tilde} sup_I |f|} / |I| by a dense midpoint scan."""
    lo, hi = I
    g = restrict_real_segment(f, seg)
    n = max(n_eval, HALF_MEASURE_EVAL)
    sup = scan_max(g, lo, hi, n)[0]
    t = lo + (np.arange(n) + 0.5) / n * (hi - lo)
    return float(np.mean(np.abs(g(t)) >= 10.0 ** (-d_tilde) * sup))


def bourgain_halfmeasure_check(f, seg, I, d_tilde, n_eval=HALF_MEASURE_EVAL):
    return halfmeasure_fraction(f, seg, I, d_tilde, n_eval) > 0.5


@dataclass(frozen=True)
class BourgainFit:
    c1: float
    c2: float
    r_squared: float
    d_tilde: int
    n_points: int


def bourgain_distribution_scan(f, V, lam_grid, n_mc=N_MC, rng=None, d_tilde=1):
    """Fraction of V where |f| > lambda * avg_V|f|, and a fit of c1 exp(-lambda^{c2/d_tilde})."""
    lam = np.asarray(lam_grid, dtype=float)
    if lam.ndim != 1 or lam.size == 0 or np.any(lam <= 0) or np.any(np.diff(lam) <= 0):
        raise ValueError("lambda grid must be positive and increasing")
    rng = rng if rng is not None else np.random.default_rng()
    vals = _abs_values(f, V.sample(n_mc, rng))
    avg = float(vals.mean())
    if avg == 0:
        raise DegenerateFunctionError("f vanishes on every sample of V")
    fraction = np.mean(vals[None, :] > lam[:, None] * avg, axis=1)
    table = pd.DataFrame({"lambda": lam, "fraction": fraction})

    mask = fraction > 0
    if int(mask.sum()) < 3:
        raise FitError(f"only {int(mask.sum())} nonzero tail measures; need 3")

    def model(x, log_c1, c2):
        return log_c1 - x ** (c2 / d_tilde)

    y = np.log(fraction[mask])
    try:
        (log_c1, c2), _ = curve_fit(model, lam[mask], y, p0=(0.0, 1.0),
                                    bounds=([-np.inf, 1e-6], [np.inf, 50.0]))
    except (RuntimeError, ValueError) as e:
        raise FitError(f"tail fit failed: {e}") from e

    residual = float(np.sum((y - model(lam[mask], log_c1, c2)) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 - residual / total if total > 0 else (1.0 if residual == 0 else 0.0)
    table["fitted"] = np.exp(log_c1) * np.exp(-lam ** (c2 / d_tilde))
    if r_squared < 0.9:
        logger.warning(f"tail fit quality R^2 = {r_squared:.3f}")
    return table, BourgainFit(float(np.exp(log_c1)), float(c2), r_squared, d_tilde, int(mask.sum()))


@dataclass(frozen=True)
class OrliczFunction:
    """Phi(t) = exp(t^p) - 1."""

    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError(f"Orlicz exponent must be positive, got {self.p}")

    def __call__(self, t):
        return np.expm1(np.asarray(t, dtype=float) ** self.p)


def orlicz_norm(f, V, phi, n_mc=N_MC, rng=None):
    """inf{A > 0 : int_V Phi(|f|/A) dx <= 1} by bisection on a fixed sample."""
    rng = rng if rng is not None else np.random.default_rng()
    return _solve_orlicz(_abs_values(f, V.sample(n_mc, rng)), phi, V.volume)


def _solve_orlicz(vals, phi, volume):
    if not np.any(vals > 0):
        return 0.0

    def excess(A):
        with np.errstate(over="ignore"):
            return volume * float(np.mean(phi(vals / A))) - 1.0

    hi = float(vals.max())
    for _ in range(ORLICZ_MAX_ITER):
        if excess(hi) <= 0:
            break
        hi *= 2.0
    else:
        raise OrliczConvergenceError("could not bracket the Orlicz norm from above")
    lo = hi
    for _ in range(ORLICZ_MAX_ITER):
        if excess(lo) > 0:
            break
        lo /= 2.0
    else:
        raise OrliczConvergenceError("could not bracket the Orlicz norm from below")
    if lo == hi:
        return hi
    try:
        return float(bisect(excess, lo, hi, rtol=ORLICZ_RTOL, maxiter=ORLICZ_MAX_ITER))
    except RuntimeError as e:
        raise OrliczConvergenceError(str(e)) from e


@dataclass(frozen=True)
class OrliczTailBound:
    norm: float
    mean_abs: float
    c1: float
    q: float
    bound: float


def dominating_tail_constant(vals, q):
    """Smallest c1 with mes{|f| > lambda avg} <= c1 exp(-lambda^q) for every lambda > 0 on the sample."""
    v = np.sort(np.asarray(vals, dtype=float))
    avg = float(v.mean())
    if avg == 0:
        raise DegenerateFunctionError("f vanishes on every sample")
    # share of the sample >= v[i], the tail mass just below lambda = v[i] / avg
    share = 1.0 - np.searchsorted(v, v, side="left") / v.size
    log_c1 = float(np.max(np.log(share) + (v / avg) ** q))
    return math.exp(min(log_c1, 700.0))


def orlicz_tail_bound(f, V, q, n_mc=N_MC, rng=None, c1_fit=0.0):
    """Normalized-measure Orlicz norm for Phi(t) = exp(t^q) - 1 and the bound the tail estimate gives.

    A tail c1 exp(-lambda^q) gives avg Phi(|f|/(K avg|f|)) <= c1 / (K^q - 1),
    so the norm is at most (1 + c1)^{1/q} avg|f|; for q >= 1 that is (1 + c1) avg|f|.
    """
    if not q > 0:
        raise ValueError(f"tail exponent must be positive, got {q}")
    rng = rng if rng is not None else np.random.default_rng()
    vals = _abs_values(f, V.sample(n_mc, rng))
    c1 = max(float(c1_fit), dominating_tail_constant(vals, q))
    mean_abs = float(vals.mean())
    norm = _solve_orlicz(vals, OrliczFunction(q), 1.0)
    with np.errstate(over="ignore"):
        bound = float(np.exp(max(1.0, 1.0 / q) * math.log1p(c1)) * mean_abs)
    return OrliczTailBound(norm=norm, mean_abs=mean_abs, c1=c1, q=q, bound=bound)


def reverse_holder_ratio(f, V, s, n_mc=N_MC, rng=None):
    """(avg |f|^s)^{1/s} / avg |f| on one shared sample."""
    if s < 1:
        raise ValueError(f"s must be at least 1, got {s}")
    rng = rng if rng is not None else np.random.default_rng()
    vals = _abs_values(f, V.sample(n_mc, rng))
    mean = float(vals.mean())
    if mean == 0:
        raise DegenerateFunctionError("avg |f| is 0")
    return float(np.mean(vals ** s) ** (1.0 / s) / mean)


def holder_constant_from_tail(c1, c2, d_tilde, s):
    """(int_0^inf s l^{s-1} min(1, c1 e^{-l^{c2/d_tilde}}) dl)^{1/s}, layer-cake."""
    if c1 <= 0 or c2 <= 0 or s < 1:
        raise ValueError(f"need c1 > 0, c2 > 0, s >= 1, got {c1}, {c2}, {s}")
    q = c2 / d_tilde
    knee = math.log(c1) ** (1.0 / q) if c1 > 1 else 0.0
    tail, _ = quad(lambda lam: s * lam ** (s - 1) * c1 * math.exp(-lam ** q), knee, math.inf)
    return (knee ** s + tail) ** (1.0 / s)
