"""Green's functions with pole at infinity, capacities, discrete equilibrium
measures, Fekete/Leja configurations and level-set tracing.

Closed forms: disks/circles log+(|z-a|/r), intervals log|f + sqrt(f^2-1)| on
the branch with modulus >= 1, Julia sets by escape iteration with the
Boettcher far-field correction. Everything else goes through the discrete
Frostman collocation solve on a boundary sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, setgeom
from .errors import (DegenerateSampleError, InsufficientCandidatesError,
                     LevelUnreachableError, UnsupportedModeError)
from .measures import DiscreteMeasure
from .setgeom import (Arc, BoundarySample, Circle, Disk, Interval, JuliaSet,
                      UnionSet, sample_boundary)

CLOSED_FORM = "closed-form"
DISCRETE = "discrete"

_JULIA_GREEN_RADIUS = 1e9
_JULIA_GREEN_ITERS = 400


@dataclass(frozen=True)
class GreenModel:
    """Evaluatable Green's function g_S(z, infinity) with its Robin constant.

    capacity = exp(-robin_constant). Discrete models carry the equilibrium
    weights and the boundary sample that produced them; ill_conditioned marks
    solves that returned weights below -1e-6.
    """

    source: object
    mode: str
    robin_constant: float
    equilibrium: DiscreteMeasure | None = None
    sample: BoundarySample | None = None
    ill_conditioned: bool = False

    @property
    def capacity(self):
        return math.exp(-self.robin_constant)

    def green(self, z):
        return green_eval(self, z)


def capacity_closed_form(s):
    """Exact capacity: r for disks/circles, (b-a)/4 for intervals,
    |lead|^(-1/(deg-1)) for Julia sets."""
    if isinstance(s, (Disk, Circle)):
        return float(s.radius)
    if isinstance(s, Interval):
        return (s.b - s.a) / 4.0
    if isinstance(s, JuliaSet):
        d = s.poly.degree
        return abs(s.poly.lead) ** (-1.0 / (d - 1))
    raise UnsupportedModeError(f"no closed-form capacity for {type(s).__name__}")


def green_closed_form(s, z):
    """Closed-form g_S(z, infinity); scalar in, scalar out."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if isinstance(s, (Disk, Circle)):
        out = np.maximum(0.0, np.log(np.abs(z_arr - s.center) / s.radius))
    elif isinstance(s, Interval):
        f = (2.0 * z_arr - (s.a + s.b)) / (s.b - s.a)
        root = np.sqrt(f * f - 1.0 + 0j)
        u = f + root
        u = np.where(np.abs(u) >= 1.0, u, f - root)
        out = np.maximum(0.0, np.log(np.abs(u)))
    elif isinstance(s, JuliaSet):
        poly = s.poly
        crev = np.array([float(c) for c in poly.coeffs])[::-1]
        corr = math.log(abs(poly.lead)) / (poly.degree - 1)
        g, _ = kernels.julia_green(crev, z_arr, _JULIA_GREEN_RADIUS,
                                   _JULIA_GREEN_ITERS, corr, poly.degree)
        out = np.maximum(0.0, g)
    else:
        raise UnsupportedModeError(f"no closed-form Green's function for {type(s).__name__}")
    return float(out[0]) if np.ndim(z) == 0 else out


def closed_form_model(s):
    return GreenModel(source=s, mode=CLOSED_FORM,
                      robin_constant=-math.log(capacity_closed_form(s)))


def equilibrium_discrete(sample, source=None):
    """Discrete Frostman solve on a boundary sample.

    Assembles the symmetric collocation system [K, 1; 1^T, 0][w; lam] = [0; 1]
    with K_ij = -log|z_i - z_j| off and K_ii = -log(spacing_i / 4); the Robin
    constant is the negated multiplier (so that exp(-robin) is the capacity).
    """
    m = len(sample)
    if m < 16:
        raise DegenerateSampleError(f"equilibrium solve needs >= 16 points, got {m}")
    diag = -np.log(sample.spacing / 4.0)
    K = kernels.neglog_matrix(sample.points, diag)
    if not np.isfinite(K).all():
        raise DegenerateSampleError("duplicate sample points (singular kernel)")
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = K
    A[:m, m] = 1.0
    A[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSampleError(f"singular collocation system: {exc}") from exc
    w = sol[:m]
    robin = -float(sol[m])
    return GreenModel(source=source, mode=DISCRETE, robin_constant=robin,
                      equilibrium=DiscreteMeasure(sample.points, w),
                      sample=sample,
                      ill_conditioned=bool(w.min() < -1e-6))


def discrete_model(s, m=400):
    return equilibrium_discrete(sample_boundary(s, m), source=s)


def green_model(s, m=400):
    """Closed form when available, discrete solve otherwise."""
    try:
        return closed_form_model(s)
    except UnsupportedModeError:
        return discrete_model(s, m)


def green_eval(model, z):
    """g(z) >= 0 by construction (discrete potentials are clamped at zero)."""
    if model.mode == CLOSED_FORM:
        return green_closed_form(model.source, z)
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    mu = model.equilibrium
    u = kernels.potential_sums(mu.points, mu.weights, z_arr)
    out = np.maximum(0.0, -u + model.robin_constant)
    return float(out[0]) if np.ndim(z) == 0 else out


# ---------------------------------------------------------------------------
# Fekete / Leja machinery

def _candidates(s, n, candidate_factor=8):
    cands = sample_boundary(s, max(candidate_factor * n, 16)).points
    if n > len(cands):
        raise InsufficientCandidatesError(f"need {n} points, only {len(cands)} candidates")
    return cands


def leja_points(s, n, candidate_factor=8):
    """Greedy Vandermonde maximizer: start at max modulus, then extend.

    Ties break to the lowest candidate index, so results are run-to-run
    identical.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    cands = _candidates(s, n, candidate_factor)
    start = int(np.argmax(np.abs(cands)))
    idx = kernels.greedy_leja(cands, n, start)
    return cands[idx]


def fekete_points(s, n, refine=True, candidate_factor=8, max_passes=50):
    """Leja start plus single-point exchange passes until no improvement."""
    if n < 2:
        raise ValueError("need n >= 2")
    cands = _candidates(s, n, candidate_factor)
    start = int(np.argmax(np.abs(cands)))
    idx = kernels.greedy_leja(cands, n, start)
    if refine:
        for _ in range(max_passes):
            if not kernels.exchange_pass(cands, idx):
                break
    return cands[idx]


def vandermonde_diameter(points):
    """d_n = (prod_{i<j} |x_i - x_j|)^(2/(n(n-1)))."""
    n = len(points)
    if n < 2:
        raise ValueError("need >= 2 points")
    return float(np.exp(kernels.vandermonde_logsum(np.asarray(points, np.complex128))
                        * 2.0 / (n * (n - 1))))


def transfinite_diameter_estimate(s, n, refine=True, candidate_factor=8):
    """d_n from the (optionally exchange-refined) point configuration."""
    if n < 3:
        raise ValueError("need n >= 3")
    return vandermonde_diameter(fekete_points(s, n, refine=refine,
                                              candidate_factor=candidate_factor))


# ---------------------------------------------------------------------------
# level sets

def trace_level_set(model, level, rays=256):
    """Polyline of the outermost crossings of g = level along rays from the
    sample centroid, ordered by angle, returned as a closed Arc."""
    if level <= 0:
        raise ValueError("level must be positive")
    s = model.source
    if model.sample is not None:
        anchor = complex(np.mean(model.sample.points))
    else:
        anchor = complex(np.mean(sample_boundary(s, 256).points))
    base = max(1.0, setgeom.enclosing_radius(s)) if s is not None else 1.0
    r_cap = 8.0 * (base + 1.0) * math.exp(level)
    r_min = 1e-9 * base
    angles = 2 * np.pi * np.arange(rays) / rays
    dirs = np.exp(1j * angles)
    # geometric scan, keep the outermost upward crossing per ray
    grid = np.geomspace(r_min, r_cap, 160)
    gvals = np.empty((rays, len(grid)))
    for j, r in enumerate(grid):
        gvals[:, j] = np.asarray(model.green(anchor + r * dirs), dtype=float)
    below = gvals < level
    crossing = below[:, :-1] & ~below[:, 1:]
    if not crossing.any(axis=1).all():
        bad = int(np.argmin(crossing.any(axis=1)))
        raise LevelUnreachableError(
            f"level {level} not reached along ray {bad} within radius {r_cap:.3g}")
    last = crossing.shape[1] - 1 - np.argmax(crossing[:, ::-1], axis=1)
    lo = grid[last]
    hi = grid[last + 1]
    for _ in range(80):
        mid = np.sqrt(lo * hi)
        gm = np.asarray(model.green(anchor + mid * dirs), dtype=float)
        lo = np.where(gm < level, mid, lo)
        hi = np.where(gm < level, hi, mid)
    pts = anchor + 0.5 * (lo + hi) * dirs
    return Arc(tuple(pts), closed=True)
