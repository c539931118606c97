"""Weil and set-relative heights, Mahler measures, the Northcott-floor scan
and leading-coefficient growth scans.

The scan enumerates integer polynomials inside a provably sufficient
coefficient box: h(P) <= t forces |lead| <= e^(d t) and every root into the
region {g <= d t - log|lead|}, whose max modulus R bounds |a_{d-k}| by
|lead| C(d,k) R^k. Pruning only discards certified non-hits, so hit lists are
independent of any larger user-supplied coefficient bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import intpoly, setgeom
from .errors import AmbiguousPointError
from .intpoly import IntPolynomial, find_roots, require_roots, squarefree_decomposition


@dataclass(frozen=True)
class HeightReport:
    polynomial: IntPolynomial
    set_descriptor: object
    weil_height: float
    h_sigma: float
    h_hat_sigma: float
    log_mahler: float
    log_mahler_sigma: float
    per_root_green: tuple
    leading_log: float
    degree: int
    roots: tuple
    root_residual: float

    def as_dict(self):
        return {
            "coeffs": list(self.polynomial.coeffs),
            "degree": self.degree,
            "weil_height": self.weil_height,
            "h_sigma": self.h_sigma,
            "h_hat_sigma": self.h_hat_sigma,
            "log_mahler": self.log_mahler,
            "log_mahler_sigma": self.log_mahler_sigma,
            "leading_log": self.leading_log,
            "per_root_green": list(self.per_root_green),
            "roots": [[z.real, z.imag] for z in self.roots],
            "root_residual": self.root_residual,
        }


def _squarefree_part(p):
    """Product of the distinct irreducible factors (primitive part)."""
    if intpoly.is_squarefree(p):
        return p
    out = IntPolynomial((1,))
    for f, _ in squarefree_decomposition(p):
        out = out * f
    if p.lead < 0 < out.lead:
        out = -out
    return out


def weil_height(p):
    """(log|lead| + sum log+ |root|) / deg, on the squarefree part."""
    if p.degree < 1:
        raise ValueError("height needs degree >= 1")
    f = _squarefree_part(p)
    rs = require_roots(f)
    return (math.log(abs(f.lead))
            + float(np.sum(np.maximum(0.0, np.log(np.abs(rs.roots)))))) / f.degree


def _in_omega(source, z):
    """Root filter for the hatted height; boundary-ambiguous counts as excluded."""
    try:
        return setgeom.in_unbounded_component(source, z)
    except AmbiguousPointError:
        return False


def height_sigma(p, model):
    """Full height report against a Green model; hatted sum keeps only roots in
    the unbounded complement component."""
    if p.degree < 1:
        raise ValueError("height needs degree >= 1")
    f = _squarefree_part(p)
    rs = require_roots(f)
    deg = f.degree
    lead_log = math.log(abs(f.lead))
    g = np.asarray(model.green(rs.roots), dtype=float)
    logplus = np.maximum(0.0, np.log(np.abs(rs.roots)))
    h = (lead_log + float(g.sum())) / deg
    weil = (lead_log + float(logplus.sum())) / deg
    hat_sum = sum(gv for z, gv in zip(rs.roots, g) if _in_omega(model.source, z))
    return HeightReport(
        polynomial=f,
        set_descriptor=model.source,
        weil_height=weil,
        h_sigma=h,
        h_hat_sigma=(lead_log + hat_sum) / deg,
        log_mahler=deg * weil,
        log_mahler_sigma=deg * h,
        per_root_green=tuple(float(v) for v in g),
        leading_log=lead_log,
        degree=deg,
        roots=tuple(complex(z) for z in rs.roots),
        root_residual=rs.residual_bound,
    )


def log_mahler(p):
    """log M(P) = log|lead| + sum log+ |root|, roots with multiplicity."""
    if p.degree < 1:
        raise ValueError("needs degree >= 1")
    rs = require_roots(p)
    return math.log(abs(p.lead)) + float(np.sum(np.maximum(0.0, np.log(np.abs(rs.roots)))))


def jensen_log_mahler(p, points=4096):
    """Jensen quadrature oracle: mean of log|P| over the unit circle."""
    t = 2 * np.pi * (np.arange(points) + 0.5) / points
    z = np.exp(1j * t)
    vals = np.polyval(np.array([float(c) for c in p.coeffs])[::-1], z)
    return float(np.mean(np.log(np.abs(vals))))


def mahler_sigma(p, model):
    """log M_Sigma(P) = log|lead| + sum g(root), roots with multiplicity."""
    if p.degree < 1:
        raise ValueError("needs degree >= 1")
    rs = require_roots(p)
    g = np.asarray(model.green(rs.roots), dtype=float)
    return math.log(abs(p.lead)) + float(g.sum())


def mahler_multiplicativity_check(factors, model):
    """|log M_Sigma(prod) - sum log M_Sigma(factor)|, exact big-int product."""
    if len(factors) < 2:
        raise ValueError("need at least 2 factors")
    if any(f.degree < 1 for f in factors):
        raise ValueError("factors must have degree >= 1")
    prod_poly = factors[0]
    for f in factors[1:]:
        prod_poly = prod_poly * f
    lhs = mahler_sigma(prod_poly, model)
    rhs = sum(mahler_sigma(f, model) for f in factors)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# the Northcott scan

def sublevel_max_modulus(s, g_bound):
    """Upper bound of |z| over {g_S <= g_bound} (exact for disks/intervals)."""
    if g_bound < 0:
        g_bound = 0.0
    if isinstance(s, (setgeom.Disk, setgeom.Circle)):
        return abs(s.center) + s.radius * math.exp(g_bound)
    if isinstance(s, setgeom.Interval):
        mid = (s.a + s.b) / 2
        half = (s.b - s.a) / 2
        return abs(mid) + half * math.cosh(g_bound)
    return setgeom.enclosing_radius(s) * math.exp(g_bound)


@dataclass(frozen=True)
class ScanResult:
    hits: tuple
    examined: int
    skipped_unknown: int
    pruned_lead_max: tuple
    threshold: float
    coeff_bound: int
    degree_max: int


def _scan_candidates(model, degree_max, coeff_bound, threshold):
    slack = 1e-9
    for d in range(1, degree_max + 1):
        lead_max = min(coeff_bound, int(math.floor(math.exp(d * threshold) + slack)))
        for lead in range(1, lead_max + 1):
            g_budget = d * threshold - math.log(lead)
            if g_budget < -slack:
                continue
            R = sublevel_max_modulus(model.source, max(0.0, g_budget))
            ranges = []
            for k in range(1, d + 1):  # coefficient a_{d-k}
                bound = lead * math.comb(d, k) * R ** k
                b = min(coeff_bound, int(math.floor(bound + slack)))
                ranges.append(range(-b, b + 1))
            for tail in product(*ranges[:-1]) if d > 1 else [()]:
                for a0 in ranges[-1]:
                    if a0 == 0:
                        continue
                    yield IntPolynomial((a0,) + tuple(reversed(tail)) + (lead,))
        if d == 1:
            yield IntPolynomial((0, 1))  # x itself, the one allowed zero constant


def northcott_scan(model, degree_max, coeff_bound, threshold):
    """All certified-irreducible primitive polynomials with h_Sigma <= threshold.

    Certificates: mod-p proof, else the complete small-degree test for degree
    <= 4; higher-degree Unknowns are skipped and counted.
    """
    hits = []
    seen = set()
    examined = 0
    skipped = 0
    lead_caps = tuple(min(coeff_bound, int(math.floor(math.exp(d * threshold) + 1e-9)))
                      for d in range(1, degree_max + 1))
    for cand in _scan_candidates(model, degree_max, coeff_bound, threshold):
        if cand.coeffs in seen:
            continue
        seen.add(cand.coeffs)
        examined += 1
        if cand.degree >= 1 and cand.coeffs != (0, 1) and cand.content() != 1:
            continue
        if not intpoly.is_squarefree(cand):
            continue
        cert = intpoly.irreducibility_certificate(cand)
        if not cert.proven:
            if cand.degree <= 4:
                if not intpoly.is_irreducible_smalldeg(cand):
                    continue
            else:
                skipped += 1
                continue
        report = height_sigma(cand, model)
        if report.h_sigma <= threshold + 1e-9:
            hits.append(report)
    hits.sort(key=lambda r: (r.h_sigma, r.polynomial.coeffs))
    return ScanResult(tuple(hits), examined, skipped, lead_caps,
                      threshold, coeff_bound, degree_max)


# ---------------------------------------------------------------------------
# growth scans

@dataclass(frozen=True)
class GrowthRow:
    degree: int
    lead_root: float           # |lead|^(1/deg)
    log_mahler_rate: float     # (1/deg) log M_Sigma
    green_rate: float          # (1/deg) sum g(root): the "roots near Sigma" gauge
    max_multiplicity: int
    converged: bool


@dataclass(frozen=True)
class GrowthReport:
    rows: tuple
    tail_min_rate: float       # min of log_mahler_rate over the tail half


def leading_growth_scan(family, model):
    rows = []
    for p in family:
        rs = find_roots(p)
        maxmult = max(m for _, m in squarefree_decomposition(p))
        g = np.asarray(model.green(rs.roots), dtype=float)
        n = p.degree
        rows.append(GrowthRow(
            degree=n,
            lead_root=abs(p.lead) ** (1.0 / n),
            log_mahler_rate=(math.log(abs(p.lead)) + float(g.sum())) / n,
            green_rate=float(g.sum()) / n,
            max_multiplicity=maxmult,
            converged=rs.converged,
        ))
    tail = rows[len(rows) // 2:]
    return GrowthReport(tuple(rows), min(r.log_mahler_rate for r in tail))


def empirical_green_offset_bound(model, grid=41):
    """sup over a probe grid of |g(z) - log+|z||: the C(Sigma) gauge for
    |h - h_Sigma| (empirical, not a proof)."""
    lo, hi = setgeom.bounding_box(model.source)
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1.0)
    xs = np.linspace(lo[0] - span, hi[0] + span, grid)
    ys = np.linspace(lo[1] - span, hi[1] + span, grid)
    X, Y = np.meshgrid(xs, ys)
    z = (X + 1j * Y).ravel()
    g = np.asarray(model.green(z), dtype=float)
    return float(np.max(np.abs(g - np.maximum(0.0, np.log(np.maximum(np.abs(z), 1e-300))))))
