"""Discrete measures, logarithmic potentials/energies, and the convergence
diagnostics built on them (escape rates, energy convexity, Pritsker's three
conditions, the limiting-measure inequality, tightness).

Energy conventions: `energy` is the off-diagonal pair form
I = (1 - sum w_i^2)^(-1) * sum_{i != j} w_i w_j * min(cap, -log|x_i - x_j|),
which for uniform weights is the pair average, so that on an n-point Fekete
configuration I = -log d_n exactly. `energy_truncated_full` keeps the diagonal
(each self-pair contributes the kernel cap M), mirroring the truncated-kernel
double integral used by the finite-energy bound.

Weights are allowed to be slightly negative (discrete equilibrium solves on
rough samples can produce them, flagged upstream); operations whose contracts
need probability measures validate explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import intpoly, kernels
from .errors import CoprimalityError, HypothesisViolationError, MeasureOverlapError


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point masses in the plane."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=np.complex128))
        w = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        if len(pts) != len(w):
            raise ValueError("points and weights differ in length")
        if len(pts) == 0:
            raise ValueError("measure needs at least one atom")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.points)

    @property
    def mass(self):
        return float(self.weights.sum())

    def is_probability(self, tol=1e-12):
        return bool(self.weights.min() >= -tol and abs(self.mass - 1.0) <= max(tol, 1e-10))

    def restricted(self, mask):
        return DiscreteMeasure(self.points[mask], self.weights[mask])

    def renormalized(self):
        m = self.mass
        if m <= 0:
            raise ValueError("cannot renormalize a non-positive-mass measure")
        return DiscreteMeasure(self.points, self.weights / m)


def empirical_measure(roots):
    """Uniform weight 1/deg on every root (with multiplicity)."""
    pts = np.asarray(roots.roots if hasattr(roots, "roots") else roots,
                     dtype=np.complex128)
    if len(pts) == 0:
        raise ValueError("no roots")
    return DiscreteMeasure(pts, np.full(len(pts), 1.0 / len(pts)))


def potential_eval(mu, z):
    """U_mu(z) = sum_i w_i * log 1/|z - x_i|; -inf on atoms with positive weight."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    out = kernels.potential_sums(mu.points, mu.weights, z_arr)
    return float(out[0]) if np.isscalar(z) or np.ndim(z) == 0 else out


def energy(mu, kernel_cap=None):
    """Off-diagonal pair energy (optionally with the kernel capped at kernel_cap).

    Returns +inf when two distinct atoms coincide with positive weight product
    and no cap is given.
    """
    if len(mu) < 2:
        raise ValueError("energy needs at least 2 atoms")
    cap = np.inf if kernel_cap is None else float(kernel_cap)
    d = np.abs(mu.points[:, None] - mu.points[None, :])
    np.fill_diagonal(d, np.inf)
    if kernel_cap is None and (d == 0).any():
        i, j = np.argwhere(d == 0)[0]
        if mu.weights[i] * mu.weights[j] > 0:
            return math.inf
    raw = kernels.energy_double_sum(mu.points, mu.weights, cap, False)
    denom = 1.0 - float(np.sum(mu.weights ** 2))
    if denom <= 0:
        raise ValueError("off-diagonal normalization degenerate (single atom mass)")
    return raw / denom


def energy_truncated_full(mu, cap=30.0):
    """Truncated-kernel double sum including the diagonal (min{cap, -log 0} = cap)."""
    return kernels.energy_double_sum(mu.points, mu.weights, float(cap), True)


def log_plus_mass(mu, radius=None):
    """sum w_i log+ |x_i|, optionally restricted to |x_i| <= radius."""
    a = np.abs(mu.points)
    w = mu.weights
    if radius is not None:
        keep = a <= radius
        a, w = a[keep], w[keep]
    return float(np.sum(w * np.maximum(0.0, np.log(np.maximum(a, 1e-300)))))


# ---------------------------------------------------------------------------
# escape rate

@dataclass(frozen=True)
class EscapeRateTable:
    radii: tuple
    per_member: np.ndarray     # shape (len(radii), len(family))
    tail_min: np.ndarray       # per radius, min over the tail half
    extrapolated: float        # tail_min at the largest radius


def escape_rate_estimate(family, model, r_grid):
    """Per-degree Green mass beyond each radius; liminf collapsed to tail-half min.

    family: list of (RootSet, degree) or RootSet (degree taken from the roots).
    """
    if not family:
        raise ValueError("family is empty")
    radii = tuple(float(r) for r in r_grid)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("r_grid must be increasing")
    rows = np.zeros((len(radii), len(family)))
    for k, item in enumerate(family):
        roots, deg = item if isinstance(item, tuple) else (item, item.degree)
        pts = np.asarray(roots.roots if hasattr(roots, "roots") else roots,
                         dtype=np.complex128)
        g = np.asarray(model.green(pts), dtype=float)
        mods = np.abs(pts)
        for i, r in enumerate(radii):
            rows[i, k] = float(np.sum(g[mods >= r])) / deg
    start = 0 if len(family) == 1 else len(family) // 2
    tail_min = rows[:, start:].min(axis=1)
    return EscapeRateTable(radii, rows, tail_min, float(tail_min[-1]))


# ---------------------------------------------------------------------------
# energy convexity

@dataclass(frozen=True)
class ConvexityReport:
    residual: float
    eps_disc: float


def _min_spacing(points):
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def energy_convexity_check(tau1, tau2):
    """I(tau1) + I(tau2) - 2 * int U_{tau1} d(tau2); must be >= -O(spacing)."""
    for t in (tau1, tau2):
        if not t.is_probability(tol=1e-9):
            raise ValueError("energy convexity check needs probability measures")
    cross = np.abs(tau1.points[:, None] - tau2.points[None, :])
    if (cross == 0).any():
        raise MeasureOverlapError("tau1 and tau2 share an atom")
    i1 = energy(tau1)
    i2 = energy(tau2)
    with np.errstate(divide="ignore"):
        mutual = float(tau1.weights @ (-np.log(cross)) @ tau2.weights)
    eps = float(max(np.max(_min_spacing(tau1.points)), np.max(_min_spacing(tau2.points))))
    return ConvexityReport(residual=i1 + i2 - 2.0 * mutual, eps_disc=eps)


# ---------------------------------------------------------------------------
# Pritsker's three conditions

@dataclass(frozen=True)
class PritskerReport:
    degrees: tuple
    c1: np.ndarray     # |a_n|^(1/n)
    c2: np.ndarray     # (prod_{|root| >= R} |root|)^(1/n)
    c3: np.ndarray     # probe-ring potential discrepancy
    radius: float
    probe_ring: np.ndarray


def _probe_ring(model, count=64, dist=1.0):
    from . import setgeom
    lo, hi = setgeom.bounding_box(model.source)
    center = complex((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2)
    radius = 0.5 * float(np.hypot(hi[0] - lo[0], hi[1] - lo[1])) + dist
    ang = 2 * np.pi * np.arange(count) / count
    return center + radius * np.exp(1j * ang)


def pritsker_conditions(family, model, R):
    """Per-member values of Pritsker's three convergence conditions.

    Requires the model capacity within 2% of 1; c3 is the sup over a fixed
    64-point probe ring of |U_{mu_n} - U_{mu_Sigma}|, with U_{mu_Sigma}
    evaluated as -g - log c from the model.
    """
    cap = model.capacity
    if abs(cap - 1.0) > 0.02:
        raise HypothesisViolationError(
            f"Pritsker's result needs capacity 1, measured {cap:.6f}", measured=cap)
    probes = _probe_ring(model)
    u_sigma = -np.asarray(model.green(probes), dtype=float) - math.log(cap)
    degrees, c1, c2, c3 = [], [], [], []
    for poly, roots in family:
        n = poly.degree
        mu = empirical_measure(roots)
        degrees.append(n)
        c1.append(abs(poly.lead) ** (1.0 / n))
        mods = np.abs(mu.points)
        outer = mods[mods >= R]
        c2.append(float(np.exp(np.sum(np.log(outer)) / n)) if len(outer) else 1.0)
        u_n = potential_eval(mu, probes)
        c3.append(float(np.max(np.abs(u_n - u_sigma))))
    return PritskerReport(tuple(degrees), np.array(c1), np.array(c2), np.array(c3),
                          float(R), probes)


# ---------------------------------------------------------------------------
# the limiting-measure inequality (dual computation paths)

@dataclass(frozen=True)
class LimitingRow:
    degree: int
    lhs_roots: float
    lhs_resultant: float
    agreement: float
    energy_offdiag: float


@dataclass(frozen=True)
class LimitingReport:
    rows: tuple
    rhs: float
    lead_tail: float
    lead_tail_spread: float
    escape_rate: float
    verdict_margin: float      # min over tail half of (LHS - RHS)
    energy_bound: float        # 2 * (lead_tail + escape_rate)

    @property
    def passed(self):
        return self.verdict_margin >= -1e-9


def theorem_limiting_check(family, q, model, r_grid=None, agreement_tol=1e-6):
    """(1/deg Q) int log|Q| d(mu_n) two ways: root sums vs exact resultants.

    family: list of (IntPolynomial, RootSet). RHS is minus the tail value of
    log|lead|/deg minus the escape-rate estimate.
    """
    if not family:
        raise ValueError("family is empty")
    dq = q.degree
    if dq < 1:
        raise ValueError("Q must have degree >= 1")
    if r_grid is None:
        from . import setgeom
        base = max(1.0, setgeom.enclosing_radius(model.source))
        r_grid = [2 * base, 4 * base, 8 * base]
    qc_hi, qc_lo = _dd_coeff_arrays(q)
    rows = []
    lead_ratios = []
    for poly, roots in family:
        res = intpoly.resultant(q, poly)
        if res == 0:
            raise CoprimalityError(f"Q shares a factor with a degree-{poly.degree} member")
        n = poly.degree
        lead_ratios.append(math.log(abs(poly.lead)) / n)
        qvals = kernels.dd_polyval(qc_hi, qc_lo, np.asarray(roots.roots))
        lhs_roots = float(np.sum(np.log(np.abs(qvals)))) / (dq * n)
        lhs_res = (_log_abs_int(res) - dq * math.log(abs(poly.lead))) / (dq * n)
        agree = abs(lhs_roots - lhs_res) / max(1.0, abs(lhs_roots), abs(lhs_res))
        if agree > agreement_tol:
            raise ArithmeticError(
                f"dual LHS paths disagree ({agree:.3e}) on degree-{n} member")
        e = energy(empirical_measure(roots), kernel_cap=30.0)
        rows.append(LimitingRow(n, lhs_roots, lhs_res, agree, e))
    tail_start = len(family) // 2
    esc = escape_rate_estimate([r for _, r in family], model, r_grid)
    lead_tail_vals = lead_ratios[tail_start:]
    lead_tail = lead_tail_vals[-1]
    rhs = -lead_tail - esc.extrapolated
    margin = min(r.lhs_resultant - rhs for r in rows[tail_start:])
    return LimitingReport(
        rows=tuple(rows), rhs=rhs, lead_tail=lead_tail,
        lead_tail_spread=float(max(lead_tail_vals) - min(lead_tail_vals)),
        escape_rate=esc.extrapolated, verdict_margin=margin,
        energy_bound=2.0 * (lead_tail + esc.extrapolated))


def _dd_coeff_arrays(poly):
    from . import ddarith
    hi, lo = ddarith.int_coeffs_to_dd(poly.coeffs)
    return np.array(hi[::-1]), np.array(lo[::-1])


def _log_abs_int(n):
    """log|n| for arbitrary-size nonzero integers."""
    n = abs(n)
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 60
    return math.log(n >> shift) + shift * math.log(2.0)


# ---------------------------------------------------------------------------
# tightness

@dataclass(frozen=True)
class TightnessRow:
    radius: float
    max_outside_mass: float
    mass_bound: float | None  # h_Sigma / min_{|z|=r} g, when a model is given


def tightness_diagnostic(family, radii, model=None):
    """Per radius: max over the family of mu_n(|z| > r).

    family: list of (RootSet, h_sigma). When a Green model is supplied, each
    row surfaces the height-implied bound mass_outside <= h_Sigma / min g on
    the circle |z| = r (no verdict, a diagnostic only).
    """
    if not family:
        raise ValueError("family is empty")
    rows = []
    for r in radii:
        worst = 0.0
        maxh = None
        for item in family:
            roots, h = item if isinstance(item, tuple) else (item, None)
            pts = np.asarray(roots.roots if hasattr(roots, "roots") else roots)
            worst = max(worst, float(np.mean(np.abs(pts) > r)))
            if h is not None:
                maxh = h if maxh is None else max(maxh, h)
        bound = None
        if model is not None and maxh is not None:
            ring = r * np.exp(2j * np.pi * np.arange(64) / 64)
            gmin = float(np.min(model.green(ring)))
            if gmin > 0:
                bound = maxh / gmin
        rows.append(TightnessRow(float(r), worst, bound))
    return rows
