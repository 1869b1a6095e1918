"""Measurements of univariate holomorphic functions on disks.

Univariate functions F are vectorised callables z -> F(z) (typically a
`LineRestriction`); when F carries a `derivative` attribute it is used for
F'/F, otherwise F' comes from 4th-order central differences.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from config import (
    CONSTANT_TOLERANCE,
    CONTOUR_ZERO_THRESHOLD,
    DEFAULT_RADIUS,
    DISK_SUP_SAMPLES,
    FD_STEP,
    MAX_WORKERS,
    MIN_DISK_SUP_SAMPLES,
    QUADRATURE_CAP,
    QUADRATURE_NODES,
    RADIUS_PERTURBATIONS,
    TAYLOR_MIN_NODES,
    VALENCY_GRID_SIDE,
    VALENCY_JITTER,
    VALENCY_UNIFORM_DRAWS,
    WINDING_TOLERANCE,
)
from function_core import (
    ComplexLine,
    Exp,
    ReciprocalExp,
    axis_lines,
    restrict_complex_line,
    sample_complex_line,
)

logger = logging.getLogger("ComplexAnalysis")


class ZeroCountError(RuntimeError):
    """Winding number could not be resolved to an integer."""


class _ContourZero(Exception):
    pass


@dataclass(frozen=True)
class DiskSupResult:
    radius: float
    log_sup: float
    n_boundary_samples: int
    argmax_angle: float
    all_zero: bool = False


@dataclass(frozen=True)
class ZeroCount:
    raw_winding: float
    count: int
    contour_radius: float
    n_quadrature: int


@dataclass(frozen=True)
class ValencyReport:
    value: int
    t: float
    n_lines: int
    n_w_samples: int
    witness_line: Optional[ComplexLine]
    witness_w: Optional[complex]
    label: str = "empirical lower bound"


@dataclass(frozen=True)
class BernsteinIndexReport:
    value: float
    s: float
    t: float
    r: float
    n_lines: int
    witness_line: Optional[ComplexLine]
    n_skipped: int = 0


@dataclass(frozen=True)
class TaylorSeries:
    coefficients: tuple
    expansion_radius: float

    @property
    def array(self):
        return np.array(self.coefficients, dtype=complex)


@dataclass(frozen=True)
class BernsteinClassResult:
    member: bool
    first_violation: Optional[int]
    checked_from: int
    checked_to: int


def run_indexed(fn, items, workers=MAX_WORKERS, progress_cb=None):
    """fn(i, item) over items on a thread pool; results come back in index order."""
    total = len(items)
    results = [None] * total
    if workers <= 1:
        for i, item in enumerate(items):
            results[i] = fn(i, item)
            if progress_cb:
                progress_cb(i + 1, total, i)
        return results

    completed = 0
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(fn, i, item): i for i, item in enumerate(items)}
        for fut in as_completed(futures):
            i = futures[fut]
            results[i] = fut.result()
            completed += 1
            if progress_cb:
                progress_cb(completed, total, i)
    return results


def _values(F, z):
    z = np.asarray(z, dtype=complex)
    return np.broadcast_to(np.asarray(F(z), dtype=complex), z.shape)


# ============================================================
# SUP NORMS
# ============================================================

def disk_sup_log(F, radius, n=DISK_SUP_SAMPLES):
    """sup of log|F| over the disk of `radius`, taken on the boundary circle."""
    if n < MIN_DISK_SUP_SAMPLES:
        raise ValueError(f"need at least {MIN_DISK_SUP_SAMPLES} boundary samples, got {n}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    theta = 2.0 * np.pi * np.arange(n) / n
    mags = np.abs(_values(F, radius * np.exp(1j * theta)))
    k = int(np.argmax(mags))
    if mags[k] == 0:
        logger.warning(f"F vanishes at all {n} samples on |z| = {radius}")
        return DiskSupResult(radius, -math.inf, n, 0.0, all_zero=True)

    best, best_theta = float(mags[k]), float(theta[k])
    step = 2.0 * np.pi / n
    res = minimize_scalar(
        lambda th: -abs(complex(_values(F, radius * np.exp(1j * th)))),
        bounds=(best_theta - step, best_theta + step),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if res.success and -res.fun > best:
        best, best_theta = float(-res.fun), float(res.x % (2.0 * np.pi))
    return DiskSupResult(radius, math.log(best), n, best_theta)


# ============================================================
# ZERO COUNTING
# ============================================================

def _fd_derivative(F, z, radius):
    h = FD_STEP * radius
    return (-_values(F, z + 2 * h) + 8 * _values(F, z + h)
            - 8 * _values(F, z - h) + _values(F, z - 2 * h)) / (12 * h)


def _derivative_values(F, dF, z, radius):
    if dF is not None:
        return _values(dF, z)
    return _fd_derivative(F, z, radius)


def _winding(F, dF, radius, n):
    while n <= QUADRATURE_CAP:
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        Fz = _values(F, z)
        mags = np.abs(Fz)
        sup = float(mags.max())
        if sup == 0 or mags.min() < CONTOUR_ZERO_THRESHOLD * sup:
            raise _ContourZero()
        # (1/2 pi i) \oint F'/F dz with dz = i z dtheta
        raw = complex(np.mean(_derivative_values(F, dF, z, radius) / Fz * z))
        count = int(round(raw.real))
        if abs(raw.real - count) < WINDING_TOLERANCE and abs(raw.imag) < WINDING_TOLERANCE:
            if count < 0:
                raise ZeroCountError(f"negative winding {raw.real} on |z| = {radius}")
            return ZeroCount(raw.real, count, radius, n)
        n *= 2
    raise ZeroCountError(f"winding did not settle below {QUADRATURE_CAP} nodes on |z| = {radius}")


def count_zeros(F, radius, n_quadrature=QUADRATURE_NODES, derivative=None):
    """Number of zeros of F in |z| < radius by the argument principle."""
    dF = derivative if derivative is not None else getattr(F, "derivative", None)
    radii = [radius] + [radius * (1.0 + p) for p in RADIUS_PERTURBATIONS]
    for attempt, rho in enumerate(radii):
        try:
            return _winding(F, dF, rho, n_quadrature)
        except _ContourZero:
            logger.warning(f"zero suspected on contour |z| = {rho:.6g} (attempt {attempt + 1}), perturbing radius")
    raise ZeroCountError(f"zero on contour persists after {len(RADIUS_PERTURBATIONS)} radius perturbations")


# ============================================================
# VALENCY
# ============================================================

def _is_constant(boundary_values):
    scale = float(np.max(np.abs(boundary_values)))
    if scale == 0:
        return True
    return float(np.max(np.abs(boundary_values - boundary_values[0]))) <= CONSTANT_TOLERANCE * scale


def _image_samples(F, radius, rng, grid_side, n_uniform):
    radii = radius * (np.arange(grid_side) + 0.5) / grid_side
    angles = 2.0 * np.pi * np.arange(grid_side) / grid_side
    grid = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    image = _values(F, grid)
    diameter = max(float(np.ptp(image.real)), float(np.ptp(image.imag)))
    jitter = VALENCY_JITTER * diameter * (rng.standard_normal(image.size) + 1j * rng.standard_normal(image.size))
    uniform = (rng.uniform(image.real.min(), image.real.max(), n_uniform)
               + 1j * rng.uniform(image.imag.min(), image.imag.max(), n_uniform))
    return np.concatenate([image + jitter, uniform])


def _count_preimages(F, radius, w):
    """Number of solutions of F(z) = w_i in |z| < radius for each w_i."""
    dF = getattr(F, "derivative", None)
    n = QUADRATURE_NODES
    counts = np.full(w.size, -1, dtype=int)
    pending = np.arange(w.size)
    while pending.size and n <= 2 ** 14:
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        Fz = _values(F, z)
        dFz_z = _derivative_values(F, dF, z, radius) * z
        diffs = Fz[None, :] - w[pending, None]
        near = np.abs(diffs).min(axis=1) < CONTOUR_ZERO_THRESHOLD * np.abs(Fz).max()
        raw = np.mean(dFz_z[None, :] / np.where(diffs == 0, 1.0, diffs), axis=1)
        rounded = np.round(raw.real)
        ok = (~near & (np.abs(raw.real - rounded) < WINDING_TOLERANCE)
              & (np.abs(raw.imag) < WINDING_TOLERANCE))
        counts[pending[ok]] = rounded[ok].astype(int)
        pending = pending[~ok]
        n *= 2

    # stragglers go through the perturbing single-value counter; ones that still fail stay at -1
    failed = 0
    for i in pending:
        shifted = lambda zz, c=w[i]: _values(F, zz) - c
        try:
            counts[i] = count_zeros(shifted, radius, derivative=dF).count
        except ZeroCountError:
            failed += 1
    if failed:
        logger.warning(f"dropped {failed} of {w.size} sampled values with preimages on the contour")
    return counts


def _valency_with_witness(F, radius, rng, grid_side=VALENCY_GRID_SIDE,
                          n_uniform=VALENCY_UNIFORM_DRAWS, w_values=None):
    z = radius * np.exp(2j * np.pi * np.arange(QUADRATURE_NODES) / QUADRATURE_NODES)
    if _is_constant(_values(F, z)):
        return 0, None, 0
    if w_values is None:
        w = _image_samples(F, radius, rng, grid_side, n_uniform)
    else:
        w = np.asarray(w_values, dtype=complex).ravel()
    counts = _count_preimages(F, radius, w)
    best = int(np.argmax(counts))
    return int(counts[best]), complex(w[best]), int(w.size)


def valency_on_disk(F, radius, rng, grid_side=VALENCY_GRID_SIDE,
                    n_uniform=VALENCY_UNIFORM_DRAWS, w_values=None):
    """max over sampled w of the number of solutions of F(z) = w in |z| < radius.

    w comes from F's values on a polar grid (jittered) plus uniform draws from
    their bounding box, unless `w_values` is given.
    """
    value, _, _ = _valency_with_witness(F, radius, rng, grid_side, n_uniform, w_values)
    return value


def valency_line_radius(t, r):
    """Line radius s for valency on B_c(0, t): (1+r)/2, or (t+r)/2 once t reaches it."""
    s = (1.0 + r) / 2.0
    if t >= s:
        s = (t + r) / 2.0
    return s


def _line_family(n, s, n_lines, rng):
    # axis lines first, then sampled ones; one child stream per line
    lines = axis_lines(n, s) + [sample_complex_line(n, s, rng) for _ in range(n_lines)]
    return lines, rng.spawn(len(lines))


def valency_global(f, t, n_lines, rng, r=DEFAULT_RADIUS, exact_disk=False,
                   workers=MAX_WORKERS, progress_cb=None):
    """Empirical lower bound on v_f(t): max line valency over a family of complex lines."""
    if not 1.0 <= t < r:
        raise ValueError(f"need 1 <= t < r, got t={t}, r={r}")
    s = valency_line_radius(t, r)
    lines, streams = _line_family(f.dim, s, n_lines, rng)

    def measure(i, line):
        F = restrict_complex_line(f, line)
        radius = line.trace_radius(t) if exact_disk else t / s
        return _valency_with_witness(F, radius, streams[i])

    results = run_indexed(measure, lines, workers, progress_cb)
    best = max(range(len(lines)), key=lambda i: (results[i][0], -i))
    value, w, _ = results[best]
    n_w = max(res[2] for res in results)
    logger.info(f"valency on B_c(0,{t}): {value} over {len(lines)} lines")
    return ValencyReport(
        value=value, t=t, n_lines=len(lines), n_w_samples=n_w,
        witness_line=lines[best] if value > 0 else None,
        witness_w=w,
    )


def reciprocal_valency_pair(g, t, n_lines, rng, r=DEFAULT_RADIUS, workers=MAX_WORKERS):
    """Valencies of e^g and e^{-g} on B_c(0, t) over shared lines and paired values.

    e^{-g} takes the value 1/w exactly where e^g takes w, so each line counts
    preimages of w under e^g and of 1/w under e^{-g} on one joint sample.
    """
    if not 1.0 <= t < r:
        raise ValueError(f"need 1 <= t < r, got t={t}, r={r}")
    s = valency_line_radius(t, r)
    lines, streams = _line_family(g.dim, s, n_lines, rng)
    h, h_inv = Exp(g), ReciprocalExp(g)

    def measure(i, line):
        H = restrict_complex_line(h, line)
        H_inv = restrict_complex_line(h_inv, line)
        radius = t / s
        z = radius * np.exp(2j * np.pi * np.arange(QUADRATURE_NODES) / QUADRATURE_NODES)
        if _is_constant(_values(H, z)):
            return 0, 0
        w = np.concatenate([
            _image_samples(H, radius, streams[i], VALENCY_GRID_SIDE, VALENCY_UNIFORM_DRAWS),
            1.0 / _image_samples(H_inv, radius, streams[i], VALENCY_GRID_SIDE, VALENCY_UNIFORM_DRAWS),
        ])
        w = w[np.isfinite(w) & (w != 0)]
        return int(_count_preimages(H, radius, w).max()), int(_count_preimages(H_inv, radius, 1.0 / w).max())

    results = run_indexed(measure, lines, workers)
    return max(v for v, _ in results), max(v for _, v in results)


# ============================================================
# BERNSTEIN INDEX
# ============================================================

def bernstein_index(f, s, t, r, n_lines, rng, workers=MAX_WORKERS, progress_cb=None):
    """Empirical lower bound on b_f(s,t,r) = sup over lines of M(t/s) - M(1/s)."""
    if not 1.0 < t < s < r:
        raise ValueError(f"need 1 < t < s < r, got s={s}, t={t}, r={r}")
    lines, _ = _line_family(f.dim, s, n_lines, rng)

    def measure(i, line):
        F = restrict_complex_line(f, line)
        outer = disk_sup_log(F, t / s)
        inner = disk_sup_log(F, 1.0 / s)
        if outer.all_zero or inner.all_zero:
            return None
        return outer.log_sup - inner.log_sup

    diffs = run_indexed(measure, lines, workers, progress_cb)
    skipped = sum(1 for d in diffs if d is None)
    if skipped:
        logger.warning(f"skipped {skipped} of {len(lines)} lines where f vanishes identically")
    valid = [i for i, d in enumerate(diffs) if d is not None]
    if not valid:
        return BernsteinIndexReport(0.0, s, t, r, len(lines), None, skipped)
    best = max(valid, key=lambda i: (diffs[i], -i))
    # nested disks: negative differences are round-off
    return BernsteinIndexReport(max(diffs[best], 0.0), s, t, r, len(lines), lines[best], skipped)


# ============================================================
# TAYLOR SERIES / BERNSTEIN CLASS / GROWTH
# ============================================================

def taylor_coefficients(F, expansion_radius, N):
    """a_0..a_N by the trapezoid rule for the Cauchy integral (FFT)."""
    if N < 0:
        raise ValueError("N must be non-negative")
    K = max(TAYLOR_MIN_NODES, 8 * (N + 1))
    z = expansion_radius * np.exp(2j * np.pi * np.arange(K) / K)
    vals = _values(F, z)
    c = np.fft.fft(vals)[: N + 1] / K
    j = np.arange(N + 1)
    coeffs = c / expansion_radius ** j
    floor = 64 * np.finfo(float).eps * float(np.abs(vals).max()) / expansion_radius ** j
    coeffs = np.where(np.abs(coeffs) < floor, 0.0, coeffs)
    return TaylorSeries(tuple(complex(a) for a in coeffs), float(expansion_radius))


def bernstein_class_check(series, N, R, c):
    """Checks |a_j| R^j <= c max_{i<=N} |a_i| R^i on the available j > N."""
    coeffs = np.abs(series.array)
    if len(coeffs) < N + 1:
        raise ValueError(f"series has {len(coeffs)} coefficients, need more than N={N}")
    if not R > 1:
        raise ValueError(f"R must exceed 1, got {R}")
    j = np.arange(len(coeffs))
    with np.errstate(divide="ignore"):
        log_scaled = np.log(coeffs) + j * math.log(R)
    reference = math.log(c) + float(np.max(log_scaled[: N + 1])) if c > 0 else -math.inf
    for idx in range(N + 1, len(coeffs)):
        if log_scaled[idx] > reference + 1e-12:
            return BernsteinClassResult(False, idx, N + 1, len(coeffs) - 1)
    return BernsteinClassResult(True, None, N + 1, len(coeffs) - 1)


def growth_bound_check(F, R, m, M, a, n=DISK_SUP_SAMPLES):
    """sup_{D_{(1+R)/2}} |F| <= a^{m+M} sup_{D_1} |F|, compared in logs."""
    if not R > 1 or not a > 1:
        raise ValueError(f"need R > 1 and a > 1, got R={R}, a={a}")
    outer = disk_sup_log(F, (1.0 + R) / 2.0, n)
    inner = disk_sup_log(F, 1.0, n)
    if inner.all_zero:
        return outer.all_zero
    rhs = (m + M) * math.log(a) + inner.log_sup
    return outer.log_sup <= rhs + 1e-12 * max(1.0, abs(rhs))
