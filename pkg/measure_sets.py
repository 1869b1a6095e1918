"""Measurable sets with exact measures: interval unions, convex bodies, boxes of unions."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

CONTAINMENT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint pieces (lo, hi) inside the parent range [parent_lo, parent_hi]."""

    pieces: tuple
    parent_lo: float
    parent_hi: float

    def __post_init__(self):
        pieces = tuple(sorted((float(lo), float(hi)) for lo, hi in self.pieces))
        if not pieces:
            raise ValueError("an interval union needs at least one piece")
        for lo, hi in pieces:
            if not lo < hi:
                raise ValueError(f"empty piece ({lo}, {hi})")
        for (_, prev_hi), (lo, _) in zip(pieces, pieces[1:]):
            if lo < prev_hi:
                raise ValueError(f"overlapping pieces at {lo}")
        tol = CONTAINMENT_TOLERANCE * max(1.0, self.parent_hi - self.parent_lo)
        if pieces[0][0] < self.parent_lo - tol or pieces[-1][1] > self.parent_hi + tol:
            raise ValueError(f"pieces leave the parent range [{self.parent_lo}, {self.parent_hi}]")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def single(cls, lo, hi, parent_lo=None, parent_hi=None):
        return cls(((lo, hi),), lo if parent_lo is None else parent_lo, hi if parent_hi is None else parent_hi)

    @property
    def measure(self):
        return sum(hi - lo for lo, hi in self.pieces)

    @property
    def span(self):
        return self.pieces[0][0], self.pieces[-1][1]

    def contains(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.zeros(t.shape, dtype=bool)
        for lo, hi in self.pieces:
            inside |= (t >= lo) & (t <= hi)
        return inside

    def sample(self, size, rng):
        lengths = np.array([hi - lo for lo, hi in self.pieces])
        which = rng.choice(len(lengths), size=size, p=lengths / lengths.sum())
        los = np.array([lo for lo, _ in self.pieces])
        return los[which] + rng.random(size) * lengths[which]

    def to_record(self):
        return [[lo, hi] for lo, hi in self.pieces]


# ============================================================
# CONVEX BODIES IN THE REAL UNIT BALL
# ============================================================

class ConvexBody:
    """Shared interface: dim, volume, contains, sample, ray_extent, bounding_box."""

    shape = "body"

    def _check_in_unit_ball(self, points):
        norms = np.linalg.norm(np.atleast_2d(points), axis=1)
        if norms.max() > 1.0 + CONTAINMENT_TOLERANCE:
            raise ValueError(f"{self.shape} leaves the unit ball (reaches |x| = {norms.max():.6g})")

    def sample(self, size, rng):
        lo, hi = self.bounding_box()
        out = []
        have = 0
        while have < size:
            batch = lo + (hi - lo) * rng.random((max(2 * (size - have), 64), self.dim))
            batch = batch[self.contains(batch)]
            out.append(batch)
            have += len(batch)
        return np.concatenate(out)[:size]


@dataclass(frozen=True)
class Ball(ConvexBody):
    center: tuple
    radius: float

    shape = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        c = np.array(self.center)
        if np.linalg.norm(c) + self.radius > 1.0 + CONTAINMENT_TOLERANCE:
            raise ValueError("ball leaves the unit ball")

    @property
    def dim(self):
        return len(self.center)

    @property
    def volume(self):
        n = self.dim
        return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1) + n * math.log(self.radius))

    def contains(self, X):
        X = np.atleast_2d(X)
        return np.linalg.norm(X - np.array(self.center), axis=1) <= self.radius * (1 + 1e-12)

    def sample(self, size, rng):
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        radii = self.radius * rng.random(size) ** (1.0 / self.dim)
        return np.array(self.center) + g * radii[:, None]

    def ray_extent(self, x, u):
        d = np.asarray(x, dtype=float) - np.array(self.center)
        b = float(d @ u)
        disc = b * b - float(d @ d) + self.radius ** 2
        root = math.sqrt(max(disc, 0.0))
        return -b - root, -b + root

    def bounding_box(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    @property
    def centroid(self):
        return np.array(self.center)

    def to_record(self):
        return {"shape": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Box(ConvexBody):
    lo: tuple
    hi: tuple

    shape = "box"

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box corners must have the same positive dimension")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"degenerate box {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        far_corner = np.maximum(np.abs(lo), np.abs(hi))
        self._check_in_unit_ball(far_corner)

    @classmethod
    def cube(cls, n, half_side):
        return cls((-half_side,) * n, (half_side,) * n)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def volume(self):
        return float(np.prod(np.array(self.hi) - np.array(self.lo)))

    def contains(self, X):
        X = np.atleast_2d(X)
        return np.all((X >= np.array(self.lo)) & (X <= np.array(self.hi)), axis=1)

    def sample(self, size, rng):
        lo, hi = np.array(self.lo), np.array(self.hi)
        return lo + (hi - lo) * rng.random((size, self.dim))

    def ray_extent(self, x, u):
        t_lo, t_hi = -math.inf, math.inf
        for xi, ui, a, b in zip(x, u, self.lo, self.hi):
            if ui == 0:
                continue
            t1, t2 = (a - xi) / ui, (b - xi) / ui
            t_lo, t_hi = max(t_lo, min(t1, t2)), min(t_hi, max(t1, t2))
        return t_lo, t_hi

    def bounding_box(self):
        return np.array(self.lo), np.array(self.hi)

    @property
    def centroid(self):
        return (np.array(self.lo) + np.array(self.hi)) / 2.0

    def to_record(self):
        return {"shape": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Simplex(ConvexBody):
    vertices: tuple

    shape = "simplex"

    def __post_init__(self):
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        n = len(verts[0]) if verts else 0
        if n < 1 or len(verts) != n + 1 or any(len(v) != n for v in verts):
            raise ValueError("a simplex in R^n needs n+1 vertices of dimension n")
        object.__setattr__(self, "vertices", verts)
        if abs(np.linalg.det(self._edges)) < 1e-14:
            raise ValueError("degenerate simplex")
        self._check_in_unit_ball(np.array(verts))

    @property
    def _edges(self):
        V = np.array(self.vertices)
        return (V[1:] - V[0]).T

    @property
    def dim(self):
        return len(self.vertices[0])

    @property
    def volume(self):
        return abs(float(np.linalg.det(self._edges))) / math.factorial(self.dim)

    def _barycentric(self, X):
        X = np.atleast_2d(X)
        lam = np.linalg.solve(self._edges, (X - np.array(self.vertices[0])).T).T
        return lam

    def contains(self, X):
        lam = self._barycentric(X)
        return np.all(lam >= -1e-12, axis=1) & (lam.sum(axis=1) <= 1 + 1e-12)

    def ray_extent(self, x, u):
        lam0 = self._barycentric(x)[0]
        mu = np.linalg.solve(self._edges, np.asarray(u, dtype=float))
        # constraints: lam0 + t mu >= 0 and 1 - sum(lam0 + t mu) >= 0
        a = np.concatenate([lam0, [1.0 - lam0.sum()]])
        b = np.concatenate([mu, [-mu.sum()]])
        t_lo, t_hi = -math.inf, math.inf
        for ai, bi in zip(a, b):
            if bi > 0:
                t_lo = max(t_lo, -ai / bi)
            elif bi < 0:
                t_hi = min(t_hi, -ai / bi)
        return t_lo, t_hi

    def bounding_box(self):
        V = np.array(self.vertices)
        return V.min(axis=0), V.max(axis=0)

    @property
    def centroid(self):
        return np.array(self.vertices).mean(axis=0)

    def scaled(self, factor):
        """Homothetic copy about the centroid."""
        V = np.array(self.vertices)
        centroid = V.mean(axis=0)
        return Simplex(tuple(map(tuple, centroid + factor * (V - centroid))))

    def to_record(self):
        return {"shape": "simplex", "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class ProductSet:
    """omega_1 x ... x omega_n of interval unions; exact volume."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a product set needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    shape = "product"

    @property
    def dim(self):
        return len(self.factors)

    @property
    def volume(self):
        return float(np.prod([f.measure for f in self.factors]))

    def contains(self, X):
        X = np.atleast_2d(X)
        inside = np.ones(X.shape[0], dtype=bool)
        for j, factor in enumerate(self.factors):
            inside &= factor.contains(X[:, j])
        return inside

    def sample(self, size, rng):
        return np.column_stack([f.sample(size, rng) for f in self.factors])

    def bounding_box(self):
        spans = [f.span for f in self.factors]
        return np.array([s[0] for s in spans]), np.array([s[1] for s in spans])

    def to_record(self):
        return {"shape": "product", "factors": [f.to_record() for f in self.factors]}


def check_subset(omega, V, rng, n_samples=2048):
    """omega must sit inside V; checked on samples of omega."""
    if omega.dim != V.dim:
        raise ValueError(f"omega of dimension {omega.dim} inside a body of dimension {V.dim}")
    if not np.all(V.contains(omega.sample(n_samples, rng))):
        raise ValueError(f"{omega.shape} set is not contained in the {V.shape}")
    if omega.volume > V.volume * (1 + 1e-12):
        raise ValueError("omega is larger than V")
