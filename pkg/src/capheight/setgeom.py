"""Compact plane sets: symbolic descriptors, boundary sampling, geometry queries.

Descriptors are immutable. The text format (one primitive per line):

    disk cx cy r
    circle cx cy r
    interval a b
    julia c0 c1 ... cn        # ascending integer coefficients, degree >= 2
    arc x1 y1 x2 y2 ...       # optional trailing token "closed"
    union { ... }             # members on following lines, nestable

Blank lines and '#' comments are skipped.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AmbiguousPointError, InvalidSetError
from .intpoly import IntPolynomial

DEFAULT_SYM_TOL = 1e-9
_JULIA_ESCAPE_ITERS = 200


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidSetError(f"disk radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidSetError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise InvalidSetError(f"interval needs a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True)
class JuliaSet:
    poly: IntPolynomial

    def __post_init__(self):
        if self.poly.degree < 2:
            raise InvalidSetError("Julia set needs polynomial degree >= 2")


@dataclass(frozen=True)
class Arc:
    points: tuple
    closed: bool = False

    def __post_init__(self):
        if len(self.points) < 2:
            raise InvalidSetError("arc needs at least 2 points")
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))


@dataclass(frozen=True)
class UnionSet:
    members: tuple

    def __post_init__(self):
        if not self.members:
            raise InvalidSetError("union must be non-empty")
        object.__setattr__(self, "members", tuple(self.members))


PRIMITIVES = (Disk, Circle, Interval, JuliaSet, Arc)


@dataclass(frozen=True)
class BoundarySample:
    """Boundary points with arc-length weights (one panel per point)."""

    points: np.ndarray
    spacing: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        sp = np.asarray(self.spacing, dtype=np.float64)
        if len(pts) != len(sp):
            raise InvalidSetError("point and spacing counts differ")
        if not (sp > 0).all():
            raise InvalidSetError("spacing values must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "spacing", sp)

    def __len__(self):
        return len(self.points)

    @staticmethod
    def concat(samples):
        return BoundarySample(
            np.concatenate([s.points for s in samples]),
            np.concatenate([s.spacing for s in samples]))


def _flatten(s):
    if isinstance(s, UnionSet):
        out = []
        for m in s.members:
            out.extend(_flatten(m))
        return out
    return [s]


def _arc_segments(points, closed):
    pts = np.asarray(points, dtype=np.complex128)
    if closed:
        return pts, np.roll(pts, -1)
    return pts[:-1], pts[1:]


def _chebyshev_panels(m):
    """Panel midpoints/widths of the cosine-stretched parameter on [0, 1]."""
    k = np.arange(1, m + 1)
    theta = (2 * k - 1) * np.pi / (2 * m)
    mids = 0.5 * (1 + np.cos(theta))
    hi = 0.5 * (1 + np.cos(theta - np.pi / (2 * m)))
    lo = 0.5 * (1 + np.cos(theta + np.pi / (2 * m)))
    return mids, hi - lo


def sample_boundary(s, m):
    """m boundary points per primitive with arc-length weights.

    Circles get equispaced angles, intervals Chebyshev nodes (weights telescope
    to the exact length), Julia sets seeded inverse iteration, arcs arc-length
    resampling (endpoint-clustered when open). Unions concatenate member samples.
    """
    if m < 2:
        raise InvalidSetError(f"need at least 2 sample points, got {m}")
    if isinstance(s, (Disk, Circle)):
        ang = 2 * np.pi * np.arange(m) / m
        pts = s.center + s.radius * np.exp(1j * ang)
        return BoundarySample(pts, np.full(m, 2 * np.pi * s.radius / m))
    if isinstance(s, Interval):
        mid, half = (s.a + s.b) / 2, (s.b - s.a) / 2
        k = np.arange(1, m + 1)
        theta = (2 * k - 1) * np.pi / (2 * m)
        pts = mid + half * np.cos(theta) + 0j
        widths = half * (np.cos(theta - np.pi / (2 * m)) - np.cos(theta + np.pi / (2 * m)))
        return BoundarySample(pts, widths)
    if isinstance(s, JuliaSet):
        return _julia_sample(s, m)
    if isinstance(s, Arc):
        return _arc_resample(s, m)
    if isinstance(s, UnionSet):
        return BoundarySample.concat([sample_boundary(p, m) for p in s.members])
    raise InvalidSetError(f"unknown set descriptor {type(s).__name__}")


def chebyshev_nodes(a, b, m):
    k = np.arange(1, m + 1)
    return (a + b) / 2 + (b - a) / 2 * np.cos((2 * k - 1) * np.pi / (2 * m))


def _julia_escape_radius(poly):
    lead = abs(poly.lead)
    return max(2.0, 2.0 * lead ** (1.0 / (poly.degree - 1)))


def _julia_sample(s, m, iterations=48):
    poly = s.poly
    deg = poly.degree
    seed = zlib.adler32(f"julia:{m}:{poly.coeffs}".encode())
    rng = np.random.default_rng(seed)
    R = _julia_escape_radius(poly)
    z = R * np.exp(2j * np.pi * np.arange(m) / m)
    a = np.array([float(c) for c in poly.coeffs])
    for _ in range(iterations):
        branch = rng.integers(0, deg, size=m)
        if deg == 2:
            # aw^2 + bw + (c - z) = 0
            disc = np.sqrt(a[1] ** 2 - 4 * a[2] * (a[0] - z) + 0j)
            z = (-a[1] + np.where(branch == 0, disc, -disc)) / (2 * a[2])
        else:
            comp = np.zeros((m, deg, deg), dtype=np.complex128)
            comp[:, 1:, :-1] = np.eye(deg - 1)
            monic = a[:-1] / a[-1]
            comp[:, 0, :] = -monic[::-1]
            comp[:, 0, -1] += z / a[-1]
            roots = np.linalg.eigvals(comp)
            z = roots[np.arange(m), branch]
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    d.sort(axis=1)
    spacing = 0.5 * (d[:, 0] + d[:, 1])
    return BoundarySample(z, spacing)


def _arc_resample(s, m):
    va, vb = _arc_segments(s.points, s.closed)
    seglen = np.abs(vb - va)
    total = float(seglen.sum())
    if total == 0:
        raise InvalidSetError("arc has zero length")
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    if s.closed:
        positions = (np.arange(m) + 0.5) * total / m
        widths = np.full(m, total / m)
    else:
        mids, w = _chebyshev_panels(m)
        positions = mids * total
        widths = w * total
    idx = np.clip(np.searchsorted(cum, positions, side="right") - 1, 0, len(seglen) - 1)
    t = (positions - cum[idx]) / np.where(seglen[idx] == 0, 1.0, seglen[idx])
    pts = va[idx] + t * (vb[idx] - va[idx])
    return BoundarySample(pts, widths)


# ---------------------------------------------------------------------------
# symmetry and membership

def conjugate_set(s):
    """Mirror the descriptor across the real axis."""
    if isinstance(s, Disk):
        return Disk(np.conj(s.center), s.radius)
    if isinstance(s, Circle):
        return Circle(np.conj(s.center), s.radius)
    if isinstance(s, Interval):
        return s
    if isinstance(s, JuliaSet):
        return s  # integer coefficients are real
    if isinstance(s, Arc):
        return Arc(tuple(np.conj(p) for p in s.points), s.closed)
    if isinstance(s, UnionSet):
        return UnionSet(tuple(conjugate_set(p) for p in s.members))
    raise InvalidSetError(f"unknown set descriptor {type(s).__name__}")


def boundary_distance(s, points):
    """Distance of each point to the (sampled) boundary; closed forms exact."""
    points = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    parts = _flatten(s)
    best = np.full(len(points), np.inf)
    for p in parts:
        if isinstance(p, (Disk, Circle)):
            d = np.abs(np.abs(points - p.center) - p.radius)
        elif isinstance(p, Interval):
            va = np.array([p.a + 0j])
            vb = np.array([p.b + 0j])
            d = kernels.polyline_dist(points, va, vb)
        elif isinstance(p, Arc):
            va, vb = _arc_segments(p.points, p.closed)
            d = kernels.polyline_dist(points, va, vb)
        elif isinstance(p, JuliaSet):
            samp = sample_boundary(p, 256)
            d = np.min(np.abs(points[:, None] - samp.points[None, :]), axis=1)
        else:
            raise InvalidSetError(f"unknown primitive {type(p).__name__}")
        best = np.minimum(best, d)
    return best


def _max_spacing(s):
    out = 0.0
    for p in _flatten(s):
        if isinstance(p, Arc):
            va, vb = _arc_segments(p.points, p.closed)
            out = max(out, float(np.max(np.abs(vb - va))))
        elif isinstance(p, JuliaSet):
            out = max(out, float(np.max(sample_boundary(p, 256).spacing)))
    return out


def check_conjugation_symmetry(s, tol=None):
    """True iff the sampled boundary is its own mirror image within tolerance.

    Closed-form primitives are decided exactly (real center / real coefficients);
    arcs and unions fall back to the sampled check with tolerance widened to
    twice the local sample spacing.
    """
    tau = DEFAULT_SYM_TOL if tol is None else tol
    if isinstance(s, (Disk, Circle)):
        return abs(s.center.imag) <= tau
    if isinstance(s, (Interval, JuliaSet)):
        return True
    tau_eff = max(tau, 2.0 * _max_spacing(s))
    sample = sample_boundary(s, 128)
    tau_eff = max(tau_eff, 2.0 * float(np.max(sample.spacing)))
    d = boundary_distance(s, np.conj(sample.points))
    return bool(np.max(d) <= tau_eff)


def enclosing_radius(s):
    """Upper bound for max |z| over the set (padded estimate for Julia sets)."""
    out = 0.0
    for p in _flatten(s):
        if isinstance(p, (Disk, Circle)):
            out = max(out, abs(p.center) + p.radius)
        elif isinstance(p, Interval):
            out = max(out, abs(p.a), abs(p.b))
        elif isinstance(p, Arc):
            out = max(out, float(np.max(np.abs(np.asarray(p.points)))))
        elif isinstance(p, JuliaSet):
            samp = sample_boundary(p, 256)
            out = max(out, 1.02 * float(np.max(np.abs(samp.points))) + 0.05)
    return out


def bounding_box(s):
    lo = np.array([np.inf, np.inf])
    hi = np.array([-np.inf, -np.inf])
    for p in _flatten(s):
        if isinstance(p, (Disk, Circle)):
            c, r = p.center, p.radius
            lo = np.minimum(lo, [c.real - r, c.imag - r])
            hi = np.maximum(hi, [c.real + r, c.imag + r])
        elif isinstance(p, Interval):
            lo = np.minimum(lo, [p.a, 0.0])
            hi = np.maximum(hi, [p.b, 0.0])
        elif isinstance(p, Arc):
            pts = np.asarray(p.points)
            lo = np.minimum(lo, [pts.real.min(), pts.imag.min()])
            hi = np.maximum(hi, [pts.real.max(), pts.imag.max()])
        elif isinstance(p, JuliaSet):
            R = 1.02 * float(np.max(np.abs(sample_boundary(p, 256).points))) + 0.05
            lo = np.minimum(lo, [-R, -R])
            hi = np.maximum(hi, [R, R])
    return lo, hi


def _julia_escapes(poly, z):
    crev = np.array([float(c) for c in poly.coeffs])[::-1]
    R = max(_julia_escape_radius(poly), 1e3)
    _, escaped = kernels.julia_green(crev, np.atleast_1d(np.asarray(z, np.complex128)),
                                     R, _JULIA_ESCAPE_ITERS, 0.0, poly.degree)
    return escaped


def _point_in_closed_polyline(points, z):
    """Even-odd rule for a closed polyline."""
    pts = np.asarray(points)
    x, y = z.real, z.imag
    inside = False
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i].real, pts[i].imag
        x2, y2 = pts[(i + 1) % n].real, pts[(i + 1) % n].imag
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def in_unbounded_component(s, z, grid_resolution=256):
    """True iff z connects to infinity in the complement of the set."""
    z = complex(z)
    if isinstance(s, Disk):
        d = abs(z - s.center) - s.radius
        if abs(d) <= 1e-9 * (1 + s.radius):
            raise AmbiguousPointError(f"{z} lies on the disk boundary")
        return d > 0
    if isinstance(s, Circle):
        d = abs(z - s.center) - s.radius
        if abs(d) <= 1e-9 * (1 + s.radius):
            raise AmbiguousPointError(f"{z} lies on the circle")
        return d > 0  # inside the ring is a bounded complement component
    if isinstance(s, Interval):
        d = float(boundary_distance(s, z)[0])
        if d <= 1e-9 * (1 + abs(s.b - s.a)):
            raise AmbiguousPointError(f"{z} lies on the interval")
        return True
    if isinstance(s, JuliaSet):
        return bool(_julia_escapes(s.poly, z)[0])
    if isinstance(s, Arc):
        scale = 1 + float(np.max(np.abs(np.asarray(s.points))))
        if float(boundary_distance(s, z)[0]) <= 1e-9 * scale:
            raise AmbiguousPointError(f"{z} lies on the arc")
        if s.closed:
            return not _point_in_closed_polyline(s.points, z)
        return True
    if isinstance(s, UnionSet):
        return _flood_fill_membership(s, z, grid_resolution)
    raise InvalidSetError(f"unknown set descriptor {type(s).__name__}")


def _mark_blocked(p, X, Y, celldiag):
    Z = X + 1j * Y
    if isinstance(p, Disk):
        return np.abs(Z - p.center) <= p.radius + 0.6 * celldiag
    if isinstance(p, Circle):
        return np.abs(np.abs(Z - p.center) - p.radius) <= 0.6 * celldiag
    if isinstance(p, Interval):
        va = np.array([p.a + 0j])
        vb = np.array([p.b + 0j])
        return kernels.polyline_dist(Z.ravel(), va, vb).reshape(Z.shape) <= 0.6 * celldiag
    if isinstance(p, Arc):
        va, vb = _arc_segments(p.points, p.closed)
        d = kernels.polyline_dist(Z.ravel(), va, vb).reshape(Z.shape)
        blocked = d <= 0.6 * celldiag
        if p.closed:
            flat = Z.ravel()
            inside = np.array([_point_in_closed_polyline(p.points, w) for w in flat])
            blocked |= inside.reshape(Z.shape)
        return blocked
    if isinstance(p, JuliaSet):
        flat = Z.ravel()
        esc = _julia_escapes(p.poly, flat).reshape(Z.shape)
        samp = sample_boundary(p, 256)
        near = np.empty(flat.shape)
        for lo_i in range(0, len(flat), 4096):
            chunk = flat[lo_i:lo_i + 4096]
            near[lo_i:lo_i + 4096] = np.min(
                np.abs(chunk[:, None] - samp.points[None, :]), axis=1)
        return (~esc) | (near.reshape(Z.shape) <= 0.6 * celldiag)
    raise InvalidSetError(f"unknown primitive {type(p).__name__}")


def _flood_fill_membership(s, z, resolution):
    lo, hi = bounding_box(s)
    lo = np.minimum(lo, [z.real, z.imag])
    hi = np.maximum(hi, [z.real, z.imag])
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-6)
    margin = 0.05 * span + 2.0 * span / resolution
    lo -= margin
    hi += margin
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    celldiag = float(np.hypot(xs[1] - xs[0], ys[1] - ys[0]))
    blocked = np.zeros(X.shape, dtype=bool)
    for p in _flatten(s):
        blocked |= _mark_blocked(p, X, Y, celldiag)
    zi = int(np.argmin(np.abs(xs - z.real)))
    zj = int(np.argmin(np.abs(ys - z.imag)))
    if blocked[zi, zj]:
        raise AmbiguousPointError(f"{z} falls in a blocked grid cell")
    reach = np.zeros_like(blocked)
    reach[0, :] = ~blocked[0, :]
    reach[-1, :] = ~blocked[-1, :]
    reach[:, 0] = ~blocked[:, 0]
    reach[:, -1] = ~blocked[:, -1]
    while True:
        grown = reach.copy()
        grown[1:, :] |= reach[:-1, :]
        grown[:-1, :] |= reach[1:, :]
        grown[:, 1:] |= reach[:, :-1]
        grown[:, :-1] |= reach[:, 1:]
        grown &= ~blocked
        if (grown == reach).all():
            break
        reach = grown
    return bool(reach[zi, zj])


# ---------------------------------------------------------------------------
# text format

def format_set(s):
    lines = []

    def emit(p, indent=""):
        if isinstance(p, Disk):
            lines.append(f"{indent}disk {p.center.real:.17g} {p.center.imag:.17g} {p.radius:.17g}")
        elif isinstance(p, Circle):
            lines.append(f"{indent}circle {p.center.real:.17g} {p.center.imag:.17g} {p.radius:.17g}")
        elif isinstance(p, Interval):
            lines.append(f"{indent}interval {p.a:.17g} {p.b:.17g}")
        elif isinstance(p, JuliaSet):
            lines.append(f"{indent}julia " + " ".join(str(c) for c in p.poly.coeffs))
        elif isinstance(p, Arc):
            coords = " ".join(f"{q.real:.17g} {q.imag:.17g}" for q in p.points)
            lines.append(f"{indent}arc {coords}" + (" closed" if p.closed else ""))
        elif isinstance(p, UnionSet):
            lines.append(f"{indent}union {{")
            for m in p.members:
                emit(m, indent + "  ")
            lines.append(f"{indent}}}")
        else:
            raise InvalidSetError(f"unknown set descriptor {type(p).__name__}")

    emit(s)
    return "\n".join(lines) + "\n"


def parse_set(text):
    tokens = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens.append(line)
    items, rest = _parse_lines(tokens)
    if rest:
        raise InvalidSetError(f"trailing content after set description: {rest[0]!r}")
    if not items:
        raise InvalidSetError("empty set description")
    return items[0] if len(items) == 1 else UnionSet(tuple(items))


def _parse_lines(lines):
    items = []
    while lines:
        line = lines[0]
        if line == "}":
            return items, lines
        lines = lines[1:]
        parts = line.split()
        kind = parts[0].lower()
        try:
            if kind == "disk":
                items.append(Disk(complex(float(parts[1]), float(parts[2])), float(parts[3])))
            elif kind == "circle":
                items.append(Circle(complex(float(parts[1]), float(parts[2])), float(parts[3])))
            elif kind == "interval":
                items.append(Interval(float(parts[1]), float(parts[2])))
            elif kind == "julia":
                items.append(JuliaSet(IntPolynomial(int(v) for v in parts[1:])))
            elif kind == "arc":
                coords = parts[1:]
                closed = False
                if coords and coords[-1].lower() == "closed":
                    closed = True
                    coords = coords[:-1]
                if len(coords) % 2:
                    raise InvalidSetError("arc needs an even number of coordinates")
                pts = [complex(float(coords[i]), float(coords[i + 1]))
                       for i in range(0, len(coords), 2)]
                items.append(Arc(tuple(pts), closed))
            elif kind == "union":
                if len(parts) < 2 or parts[1] != "{":
                    raise InvalidSetError("union must open a '{' block")
                inner, lines = _parse_lines(lines)
                if not lines or lines[0] != "}":
                    raise InvalidSetError("unterminated union block")
                lines = lines[1:]
                items.append(UnionSet(tuple(inner)))
            else:
                raise InvalidSetError(f"unknown primitive {kind!r}")
        except (IndexError, ValueError) as exc:
            raise InvalidSetError(f"could not parse line {line!r}: {exc}") from exc
    return items, lines


def load_set(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_set(fh.read())
