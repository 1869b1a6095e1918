"""Empirical Chebyshev degree and the one-dimensional Remez check.

A configuration is a real segment (chord of the unit ball), an interval I on
it and a subset omega of I given as an interval union. Its exponent is

    log(sup_I |f| / sup_omega |f|) / log(4 |I| / |omega|),

and the empirical degree is the max over configurations, a lower bound on the
Chebyshev degree. Random configurations come from per-index streams
default_rng([master, k, j]); the sharpness search adds deterministic
configurations around local minima of |f|.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from complex_analysis import run_indexed
from config import (
    DEFAULT_SLACK,
    DEGENERATE_OMEGA_RATIO,
    MAX_OMEGA_PIECES,
    MAX_WORKERS,
    MIN_EVAL,
    MIN_OMEGA_RATIO,
    N_EVAL,
    N_SEGMENTS,
    N_SHARPNESS_SEGMENTS,
    N_SUBSETS,
)
from function_core import axis_segment, restrict_real_segment, sample_real_segment
from measure_sets import IntervalUnion

logger = logging.getLogger("Estimation")

SHARPNESS_WINDOWS = 24
SHARPNESS_WINDOW_POINTS = 128
SHARPNESS_CENTERS = 3
SHARPNESS_LEVELS = 24


class DegenerateFunctionError(RuntimeError):
    """sup over omega vanished for every configuration."""


@dataclass(frozen=True)
class VerificationReport:
    """One inequality check. passed <=> measured_lhs <= bound_rhs * (1 + slack)."""

    check_id: str
    inputs: dict
    measured_lhs: Optional[float]
    bound_rhs: Optional[float]
    passed: bool
    slack: float
    seed: Optional[int] = None
    runtime_ms: Optional[float] = None
    details: dict = field(default_factory=dict)
    skipped: bool = False

    @classmethod
    def compare(cls, check_id, lhs, rhs, slack, **kwargs):
        kwargs.setdefault("inputs", {})
        return cls(check_id=check_id, measured_lhs=float(lhs), bound_rhs=float(rhs),
                   passed=bool(lhs <= rhs * (1.0 + slack)), slack=slack, **kwargs)

    @classmethod
    def skip(cls, check_id, reason, slack=0.0, **kwargs):
        details = dict(kwargs.pop("details", {}))
        details["skip_reason"] = reason
        kwargs.setdefault("inputs", {})
        return cls(check_id=check_id, measured_lhs=None, bound_rhs=None, passed=True,
                   slack=slack, details=details, skipped=True, **kwargs)

    def with_runtime(self, runtime_ms):
        return replace(self, runtime_ms=runtime_ms)


@dataclass(frozen=True)
class EstimatorConfig:
    n_segments: int = N_SEGMENTS
    n_subsets: int = N_SUBSETS
    min_ratio: float = MIN_OMEGA_RATIO
    n_eval: int = N_EVAL
    complex_directions: bool = True
    sharpness: bool = True
    n_sharpness_segments: int = N_SHARPNESS_SEGMENTS
    workers: int = MAX_WORKERS

    def __post_init__(self):
        if self.n_eval < MIN_EVAL:
            raise ValueError(f"n_eval must be at least {MIN_EVAL}, got {self.n_eval}")
        if not DEGENERATE_OMEGA_RATIO <= self.min_ratio < 1:
            raise ValueError(f"min_ratio must lie in [{DEGENERATE_OMEGA_RATIO}, 1), got {self.min_ratio}")
        if self.n_segments < 0 or self.n_subsets < 1:
            raise ValueError("need n_segments >= 0 and n_subsets >= 1")

    @classmethod
    def from_run_config(cls, run_config, **overrides):
        params = dict(n_segments=run_config.n_segments, n_subsets=run_config.n_subsets,
                      n_eval=run_config.n_eval, workers=run_config.workers)
        params.update(overrides)
        return cls(**params)


@dataclass(frozen=True)
class RatioTerm:
    segment: object
    interval: tuple
    omega: IntervalUnion
    sup_I: float
    sup_omega: float
    ratio_log: float
    bound_log: float
    source: str = "random"

    @property
    def term(self):
        return self.ratio_log / self.bound_log

    def to_record(self):
        return {
            "segment": self.segment.to_record(),
            "I": list(self.interval),
            "omega": self.omega.to_record(),
            "sup_I": self.sup_I,
            "sup_omega": self.sup_omega,
            "term": self.term,
            "source": self.source,
        }


@dataclass(frozen=True)
class EmpiricalDegree:
    d_emp: float
    r: float
    n_configs: int
    witness: Optional[RatioTerm]
    ratio_log: float
    bound_log: float
    n_degenerate: int = 0
    label: str = "empirical lower bound"


# ============================================================
# SUP NORMS ON SEGMENTS
# ============================================================

def scan_max(g, lo, hi, n):
    t = np.linspace(lo, hi, n)
    vals = np.abs(g(t))
    k = int(np.argmax(vals))
    best, arg = float(vals[k]), float(t[k])
    a, b = t[max(k - 1, 0)], t[min(k + 1, n - 1)]
    if b > a:
        res = minimize_scalar(lambda s: -abs(g(s)), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, hi - lo)})
        if res.success and -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


def _sup_union(g, omega, n):
    return max(scan_max(g, lo, hi, n)[0] for lo, hi in omega.pieces)


def sup_on_segment(f, seg, n=N_EVAL):
    if n < MIN_EVAL:
        raise ValueError(f"need at least {MIN_EVAL} evaluation points, got {n}")
    return scan_max(restrict_real_segment(f, seg), seg.t_lo, seg.t_hi, n)[0]


def sup_on_subset(f, seg, omega, n=N_EVAL):
    if n < MIN_EVAL:
        raise ValueError(f"need at least {MIN_EVAL} evaluation points, got {n}")
    if omega is None or not omega.pieces:
        raise ValueError("empty omega")
    return _sup_union(restrict_real_segment(f, seg), omega, n)


def _ratio_term(g, seg, interval, omega, n, source):
    lo, hi = interval
    sup_omega = _sup_union(g, omega, n)
    if sup_omega == 0:
        return None
    # omega lies in I, so sup_I >= sup_omega
    sup_I = max(scan_max(g, lo, hi, n)[0], sup_omega)
    return RatioTerm(seg, (lo, hi), omega, sup_I, sup_omega,
                     math.log(sup_I / sup_omega), math.log(4.0 * (hi - lo) / omega.measure), source)


def chebyshev_ratio_term(f, seg, I, omega, n_eval=N_EVAL):
    """Exponent of a single configuration, or None when sup over omega is 0."""
    lo, hi = I
    if not seg.t_lo - 1e-12 <= lo < hi <= seg.t_hi + 1e-12:
        raise ValueError(f"I = {I} is not inside the segment")
    a, b = omega.span
    if a < lo - 1e-12 or b > hi + 1e-12:
        raise ValueError("omega is not inside I")
    return _ratio_term(restrict_real_segment(f, seg), seg, (lo, hi), omega, n_eval, "explicit")


# ============================================================
# CONFIGURATION SAMPLING
# ============================================================

def _sample_interval(seg, rng, j):
    if j == 0:
        return seg.t_lo, seg.t_hi
    length = seg.length * rng.uniform(0.2, 1.0)
    start = seg.t_lo + rng.random() * (seg.length - length)
    return start, start + length


def _sample_omega(lo, hi, rng, min_ratio):
    span = hi - lo
    pieces_count = int(rng.integers(1, MAX_OMEGA_PIECES + 1))
    ratio = math.exp(rng.uniform(math.log(min_ratio), 0.0))
    lengths = ratio * span * rng.dirichlet(np.ones(pieces_count))
    gaps = (1.0 - ratio) * span * rng.dirichlet(np.ones(pieces_count + 1))
    pieces = []
    cursor = lo
    for length, gap in zip(lengths, gaps):
        a = cursor + gap
        b = min(a + length, hi)
        if b - a > 1e-12 * span:
            pieces.append((a, b))
        cursor = b
    if not pieces or sum(b - a for a, b in pieces) < min_ratio * span * (1 - 1e-9):
        pieces = [(lo, lo + ratio * span)]
    return IntervalUnion(tuple(pieces), lo, hi)


def _segments(n, cfg, master):
    segs = [axis_segment(n, j) for j in range(n)]
    for i in range(cfg.n_segments):
        rng = np.random.default_rng([master, 0, i])
        segs.append(sample_real_segment(n, rng, complex_directions=cfg.complex_directions))
    return segs


# ============================================================
# SHARPNESS SEARCH
# ============================================================

def _zoom_grid(c, lo, hi, n_eval):
    parts = [np.linspace(lo, hi, 4 * n_eval)]
    for j in range(1, SHARPNESS_WINDOWS + 1):
        w = (hi - lo) * 2.0 ** (-j)
        parts.append(np.linspace(max(lo, c - w), min(hi, c + w), SHARPNESS_WINDOW_POINTS))
    return np.unique(np.concatenate(parts))


def _levels(g, grid, vals, c, floor):
    found = []
    for k in range(1, len(grid) - 1):
        if vals[k] >= vals[k - 1] and vals[k] >= vals[k + 1] and vals[k] > floor:
            res = minimize_scalar(lambda s: -abs(g(s)), bounds=(grid[k - 1], grid[k + 1]),
                                  method="bounded", options={"xatol": 1e-14})
            found.append(max(float(vals[k]), float(-res.fun)))
    lo, hi = grid[0], grid[-1]
    for j in range(1, SHARPNESS_WINDOWS + 1, 2):
        w = (hi - lo) * 2.0 ** (-j)
        window = vals[(grid >= c - w) & (grid <= c + w)]
        if window.size and window.max() > floor:
            found.append(float(window.max()))

    merged = []
    for level in sorted(found):
        if merged and level <= merged[-1] * (1 + 1e-6):
            merged[-1] = max(merged[-1], level)
        else:
            merged.append(level)
    return merged[:SHARPNESS_LEVELS]


def _component(g, grid, vals, c, level):
    """Largest interval around c on which |f| <= level, from the grid plus root refinement."""
    excess = lambda s: abs(g(s)) - level
    p = int(np.searchsorted(grid, c))

    k = p
    while k < len(grid) and vals[k] <= level:
        k += 1
    if k == len(grid):
        right = grid[-1]
    else:
        inside = grid[k - 1] if k > p else c
        right = brentq(excess, inside, grid[k]) if inside < grid[k] else grid[k]

    k = p - 1
    while k >= 0 and vals[k] <= level:
        k -= 1
    if k < 0:
        left = grid[0]
    else:
        inside = grid[k + 1] if k < p - 1 else c
        left = brentq(excess, grid[k], inside) if grid[k] < inside else grid[k]
    return float(left), float(right)


def _sharpness_terms(g, seg, n_eval):
    lo, hi = seg.t_lo, seg.t_hi
    coarse = np.linspace(lo, hi, 4 * n_eval)
    vals = np.abs(g(coarse))
    minima = [k for k in range(1, len(coarse) - 1) if vals[k] <= vals[k - 1] and vals[k] <= vals[k + 1]]
    minima = sorted(minima, key=lambda k: (vals[k], k))[:SHARPNESS_CENTERS]

    terms = []
    for k in minima:
        res = minimize_scalar(lambda s: abs(g(s)), bounds=(coarse[k - 1], coarse[k + 1]),
                              method="bounded", options={"xatol": 1e-14})
        c = float(res.x) if res.success and res.fun <= vals[k] else float(coarse[k])
        f_c = abs(g(c))
        grid = _zoom_grid(c, lo, hi, n_eval)
        grid_vals = np.abs(g(grid))
        for level in _levels(g, grid, grid_vals, c, f_c):
            a, b = _component(g, grid, grid_vals, c, level * (1 + 1e-9))
            if b - a <= DEGENERATE_OMEGA_RATIO * seg.length or (a <= lo and b >= hi):
                continue
            for interval in ((lo, hi), (a, hi), (lo, b)):
                if interval[1] - interval[0] <= (b - a) * (1 + 1e-12):
                    continue
                omega = IntervalUnion(((a, b),), interval[0], interval[1])
                terms.append(_ratio_term(g, seg, interval, omega, n_eval, "sharpness"))
    return terms


def sharpness_search(f, seg, n_eval=N_EVAL):
    """Deterministic near-extremal configurations on one segment."""
    return [t for t in _sharpness_terms(restrict_real_segment(f, seg), seg, n_eval) if t is not None]


# ============================================================
# ESTIMATOR / VERIFIER
# ============================================================

def _segment_terms(f, seg, k, master, cfg, with_sharpness):
    g = restrict_real_segment(f, seg)
    terms = []
    for j in range(cfg.n_subsets):
        rng = np.random.default_rng([master, 1 + k, j])
        lo, hi = _sample_interval(seg, rng, j)
        omega = _sample_omega(lo, hi, rng, cfg.min_ratio)
        terms.append(_ratio_term(g, seg, (lo, hi), omega, cfg.n_eval, "random"))
    if with_sharpness:
        terms.extend(_sharpness_terms(g, seg, cfg.n_eval))
    return terms


def _collect_terms(f, cfg, rng, progress_cb=None):
    master = int(rng.integers(0, 2 ** 63 - 1))
    segs = _segments(f.dim, cfg, master)
    n_sharp = f.dim + cfg.n_sharpness_segments if cfg.sharpness else 0

    per_segment = run_indexed(
        lambda k, seg: _segment_terms(f, seg, k, master, cfg, k < n_sharp),
        segs, cfg.workers, progress_cb,
    )
    return [term for terms in per_segment for term in terms]


def empirical_chebyshev_degree(f, r, cfg=None, rng=None, progress_cb=None):
    """Max configuration exponent; a lower bound on the Chebyshev degree of f in O_r."""
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    cfg = cfg or EstimatorConfig()
    rng = rng if rng is not None else np.random.default_rng()
    terms = _collect_terms(f, cfg, rng, progress_cb)
    valid = [t for t in terms if t is not None]
    if not valid:
        raise DegenerateFunctionError("sup over omega is 0 for every configuration; f may vanish identically")
    best = max(range(len(valid)), key=lambda i: (valid[i].term, -i))
    w = valid[best]
    logger.info(f"d_emp = {w.term:.6g} over {len(valid)} configurations")
    return EmpiricalDegree(
        d_emp=max(w.term, 0.0), r=r, n_configs=len(valid), witness=w,
        ratio_log=w.ratio_log, bound_log=w.bound_log, n_degenerate=len(terms) - len(valid),
    )


def verify_remez_1d(f, d, cfg=None, rng=None, slack=DEFAULT_SLACK, seed=None):
    """sup_I|f| <= (4|I|/|omega|)^d sup_omega|f| (1+slack) on every configuration.

    Compared in the exponent domain: term <= d + log1p(slack) / log(4|I|/|omega|).
    The reported pair is the worst configuration's term and its threshold, so the
    report's own slack is 0 and the ratio-domain slack sits in inputs.
    """
    if d < 0:
        raise ValueError(f"d must be non-negative, got {d}")
    cfg = cfg or EstimatorConfig()
    rng = rng if rng is not None else np.random.default_rng()
    terms = [t for t in _collect_terms(f, cfg, rng) if t is not None]
    inputs = {"d": d, "n_segments": cfg.n_segments, "n_subsets": cfg.n_subsets, "ratio_slack": slack}
    if not terms:
        return VerificationReport.skip("remez1d", "no configuration with sup_omega > 0",
                                       slack=slack, inputs=inputs, seed=seed)
    allowance = math.log1p(slack)
    excess = [t.ratio_log - d * t.bound_log for t in terms]
    worst = max(range(len(terms)), key=lambda i: (excess[i], -i))
    w = terms[worst]
    failures = sum(1 for t in terms if t.term > d + allowance / t.bound_log)
    return VerificationReport.compare(
        "remez1d", w.term, d + allowance / w.bound_log, 0.0, inputs=inputs, seed=seed,
        details={"domain": "exponent", "n_configs": len(terms), "failures": failures,
                 "witness": w.to_record()},
    )
