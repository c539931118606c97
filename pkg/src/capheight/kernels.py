"""Hot numeric kernels, each with a numba @njit path and a pure-numpy path.

Backend selection: the CAPHEIGHT_BACKEND environment variable may be set to
"numba", "numpy" or "auto" (default). Under "auto" the numba path is used
when numba imports, otherwise the numpy fallback. The numba implementations
are written as plain loops; the numpy ones are vectorized. Both are kept
importable side by side (see IMPLEMENTATIONS) so the benchmark and the
parity tests can compare them directly.

The Gauss-Seidel Aberth sweep (loops path) and the Jacobi sweep (numpy path)
share fixed points; they may take different iteration counts to converge.
"""

from __future__ import annotations

import os

import numpy as np

from . import ddarith

_ENV_CHOICE = os.environ.get("CAPHEIGHT_BACKEND", "auto").strip().lower() or "auto"
if _ENV_CHOICE not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"CAPHEIGHT_BACKEND must be auto|numba|numpy, got {_ENV_CHOICE!r}")

try:
    import numba
    _HAVE_NUMBA = True
except ImportError:
    numba = None
    _HAVE_NUMBA = False

if _ENV_CHOICE == "numba" and not _HAVE_NUMBA:
    raise ImportError("CAPHEIGHT_BACKEND=numba but numba is not installed")

USE_NUMBA = _HAVE_NUMBA and _ENV_CHOICE != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:
    _njit = numba.njit(cache=True)
    # jit the double-double helpers in place so the kernels below can call
    # them from nopython code; they stay usable on arrays from Python too.
    for _name in ("two_sum", "two_prod", "dd_add", "dd_mul", "cdd_mul", "cdd_add"):
        setattr(ddarith, _name, _njit(getattr(ddarith, _name)))


# ---------------------------------------------------------------------------
# pairwise log-kernel sums

def _neglog_matrix_numpy(points, diag):
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, 1.0)
    K = -np.log(d)
    np.fill_diagonal(K, 0.0)
    K[np.arange(len(points)), np.arange(len(points))] = diag
    return K


def _neglog_matrix_loops(points, diag):
    m = points.shape[0]
    K = np.empty((m, m))
    for i in range(m):
        K[i, i] = diag[i]
        for j in range(i + 1, m):
            v = -np.log(np.abs(points[i] - points[j]))
            K[i, j] = v
            K[j, i] = v
    return K


def _potential_sums_numpy(atoms, weights, targets):
    d = np.abs(targets[:, None] - atoms[None, :])
    with np.errstate(divide="ignore"):
        return -(np.log(d) @ weights)


def _potential_sums_loops(atoms, weights, targets):
    out = np.empty(targets.shape[0])
    for t in range(targets.shape[0]):
        s = 0.0
        for a in range(atoms.shape[0]):
            s += weights[a] * np.log(np.abs(targets[t] - atoms[a]))
        out[t] = -s
    return out


def _energy_double_sum_numpy(points, weights, cap, include_diag):
    d = np.abs(points[:, None] - points[None, :])
    with np.errstate(divide="ignore"):
        K = np.minimum(cap, -np.log(d))
    if not include_diag:
        np.fill_diagonal(K, 0.0)
    return float(weights @ K @ weights)


def _energy_double_sum_loops(points, weights, cap, include_diag):
    n = points.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                if include_diag:
                    total += weights[i] * weights[j] * cap
                continue
            v = -np.log(np.abs(points[i] - points[j]))
            if v > cap:
                v = cap
            total += weights[i] * weights[j] * v
    return total


def _vandermonde_logsum_numpy(points):
    n = len(points)
    d = np.abs(points[:, None] - points[None, :])
    iu = np.triu_indices(n, 1)
    return float(np.sum(np.log(d[iu])))


def _vandermonde_logsum_loops(points):
    n = points.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            s += np.log(np.abs(points[i] - points[j]))
    return s


# ---------------------------------------------------------------------------
# Leja selection and Fekete exchange

def _greedy_leja_numpy(cands, count, start):
    idx = np.empty(count, dtype=np.int64)
    idx[0] = start
    taken = np.zeros(len(cands), dtype=bool)
    taken[start] = True
    with np.errstate(divide="ignore"):
        logprod = np.log(np.abs(cands - cands[start]))
    for k in range(1, count):
        scores = np.where(taken, -np.inf, logprod)
        best = int(np.argmax(scores))
        idx[k] = best
        taken[best] = True
        with np.errstate(divide="ignore"):
            logprod = logprod + np.log(np.abs(cands - cands[best]))
    return idx


def _greedy_leja_loops(cands, count, start):
    m = cands.shape[0]
    idx = np.empty(count, dtype=np.int64)
    idx[0] = start
    taken = np.zeros(m, dtype=np.bool_)
    taken[start] = True
    logprod = np.empty(m)
    for c in range(m):
        logprod[c] = np.log(np.abs(cands[c] - cands[start]))
    for k in range(1, count):
        best = -1
        bestv = -np.inf
        for c in range(m):
            if not taken[c] and logprod[c] > bestv:
                bestv = logprod[c]
                best = c
        idx[k] = best
        taken[best] = True
        for c in range(m):
            logprod[c] += np.log(np.abs(cands[c] - cands[best]))
    return idx


def _exchange_pass_numpy(cands, idx):
    n = len(idx)
    improved = False
    for i in range(n):
        pts = cands[idx]
        zi = pts[i]
        others = np.concatenate([pts[:i], pts[i + 1:]])
        cur = float(np.sum(np.log(np.abs(zi - others))))
        with np.errstate(divide="ignore"):
            scores = np.sum(np.log(np.abs(cands[:, None] - others[None, :])), axis=1)
        scores[idx] = -np.inf
        best = int(np.argmax(scores))
        if scores[best] > cur + 1e-12:
            idx[i] = best
            improved = True
    return improved


def _exchange_pass_loops(cands, idx):
    n = idx.shape[0]
    m = cands.shape[0]
    improved = False
    for i in range(n):
        zi = cands[idx[i]]
        cur = 0.0
        for j in range(n):
            if j != i:
                cur += np.log(np.abs(zi - cands[idx[j]]))
        best = idx[i]
        bestv = cur + 1e-12
        for c in range(m):
            used = False
            for j in range(n):
                if idx[j] == c:
                    used = True
                    break
            if used:
                continue
            s = 0.0
            for j in range(n):
                if j != i:
                    s += np.log(np.abs(cands[c] - cands[idx[j]]))
            if s > bestv:
                bestv = s
                best = c
        if best != idx[i]:
            idx[i] = best
            improved = True
    return improved


# ---------------------------------------------------------------------------
# Aberth-Ehrlich sweeps (float64 stage, then double-double stage)

def _aberth_f64_numpy(crev, cdrev, z, maxiter, tol):
    z = z.copy()
    best = np.inf
    stall = 0
    for it in range(maxiter):
        p = np.polyval(crev, z)
        dp = np.polyval(cdrev, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
        w = np.where(np.isfinite(w), w, 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        S = np.sum(1.0 / diff, axis=1)
        den = 1.0 - w * S
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(np.abs(den) > 1e-13, w / np.where(den == 0, 1.0, den), w)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        mag = np.abs(corr)
        lim = 0.25 * (1.0 + np.abs(z))
        corr = np.where(mag > lim, corr * (lim / np.where(mag == 0, 1.0, mag)), corr)
        z = z - corr
        maxcorr = np.max(np.abs(corr) / (1.0 + np.abs(z)))
        if maxcorr < tol:
            return z, it + 1, True
        if maxcorr < 0.95 * best:
            best = maxcorr
            stall = 0
        else:
            stall += 1
            if stall >= 60:
                # stopped improving; hand over to the double-double stage
                return z, it + 1, best < 1e-10
    return z, maxiter, False


def _aberth_f64_loops(crev, cdrev, z, maxiter, tol):
    z = z.copy()
    n = z.shape[0]
    nc = crev.shape[0]
    nd = cdrev.shape[0]
    best = np.inf
    stall = 0
    for it in range(maxiter):
        maxcorr = 0.0
        for i in range(n):
            zi = z[i]
            p = crev[0] + 0j
            for k in range(1, nc):
                p = p * zi + crev[k]
            dp = cdrev[0] + 0j
            for k in range(1, nd):
                dp = dp * zi + cdrev[k]
            if p == 0:
                continue
            if dp == 0:
                z[i] = zi * (1.0 + 1e-9) + 1e-9
                continue
            w = p / dp
            S = 0j
            for j in range(n):
                if j != i:
                    S += 1.0 / (zi - z[j])
            den = 1.0 - w * S
            if abs(den) > 1e-13:
                corr = w / den
            else:
                corr = w
            mag = abs(corr)
            lim = 0.25 * (1.0 + abs(zi))
            if mag > lim:
                corr = corr * (lim / mag)
            z[i] = zi - corr
            rel = abs(corr) / (1.0 + abs(z[i]))
            if rel > maxcorr:
                maxcorr = rel
        if maxcorr < tol:
            return z, it + 1, True
        if maxcorr < 0.95 * best:
            best = maxcorr
            stall = 0
        else:
            stall += 1
            if stall >= 60:
                return z, it + 1, best < 1e-10
    return z, maxiter, False


def _aberth_dd_numpy(chi, clo, dchi, dclo, z, maxiter, tol):
    z = z.copy()
    best = np.inf
    stall = 0
    for it in range(maxiter):
        p = _dd_polyval_numpy(chi, clo, z)
        dp = _dd_polyval_numpy(dchi, dclo, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
        w = np.where(np.isfinite(w), w, 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        S = np.sum(1.0 / diff, axis=1)
        den = 1.0 - w * S
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(np.abs(den) > 1e-30, w / np.where(den == 0, 1.0, den), w)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        mag = np.abs(corr)
        lim = 0.2 * (1.0 + np.abs(z))
        corr = np.where(mag > lim, corr * (lim / np.where(mag == 0, 1.0, mag)), corr)
        z = z - corr
        maxcorr = np.max(np.abs(corr) / (1.0 + np.abs(z)))
        if maxcorr < tol:
            return z, it + 1, True
        if maxcorr < 1e-19:
            stall += 1
            if stall >= 8:
                return z, it + 1, True
        else:
            stall = 0
    return z, maxiter, False


def _aberth_dd_loops(chi, clo, dchi, dclo, z, maxiter, tol):
    z = z.copy()
    n = z.shape[0]
    nc = chi.shape[0]
    nd = dchi.shape[0]
    best = np.inf
    stall = 0
    for it in range(maxiter):
        maxcorr = 0.0
        for i in range(n):
            zi = z[i]
            zr = zi.real
            zm = zi.imag
            ar = chi[0]
            al = clo[0]
            ai = 0.0
            ail = 0.0
            for k in range(1, nc):
                ar, al, ai, ail = ddarith.cdd_mul(ar, al, ai, ail, zr, 0.0, zm, 0.0)
                ar, al = ddarith.dd_add(ar, al, chi[k], clo[k])
            p = complex(ar + al, ai + ail)
            br = dchi[0]
            bl = dclo[0]
            bi = 0.0
            bil = 0.0
            for k in range(1, nd):
                br, bl, bi, bil = ddarith.cdd_mul(br, bl, bi, bil, zr, 0.0, zm, 0.0)
                br, bl = ddarith.dd_add(br, bl, dchi[k], dclo[k])
            dp = complex(br + bl, bi + bil)
            if p == 0:
                continue
            if dp == 0:
                z[i] = zi * (1.0 + 1e-12) + 1e-12
                continue
            w = p / dp
            S = 0j
            for j in range(n):
                if j != i:
                    S += 1.0 / (zi - z[j])
            den = 1.0 - w * S
            if abs(den) > 1e-30:
                corr = w / den
            else:
                corr = w
            mag = abs(corr)
            lim = 0.2 * (1.0 + abs(zi))
            if mag > lim:
                corr = corr * (lim / mag)
            z[i] = zi - corr
            rel = abs(corr) / (1.0 + abs(z[i]))
            if rel > maxcorr:
                maxcorr = rel
        if maxcorr < tol:
            return z, it + 1, True
        if maxcorr < 1e-19:
            stall += 1
            if stall >= 8:
                return z, it + 1, True
        else:
            stall = 0
    return z, maxiter, False


def _dd_polyval_numpy(chi, clo, z):
    """Horner in double-double; coefficients descending, z complex array."""
    zr = np.real(z)
    zm = np.imag(z)
    zeros = np.zeros_like(zr)
    ar = np.full_like(zr, chi[0])
    al = np.full_like(zr, clo[0])
    ai = zeros.copy()
    ail = zeros.copy()
    for k in range(1, len(chi)):
        ar, al, ai, ail = ddarith.cdd_mul(ar, al, ai, ail, zr, zeros, zm, zeros)
        ar, al = ddarith.dd_add(ar, al, np.full_like(zr, chi[k]), np.full_like(zr, clo[k]))
    return (ar + al) + 1j * (ai + ail)


def _dd_polyval_loops(chi, clo, z):
    n = z.shape[0]
    nc = chi.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for t in range(n):
        zr = z[t].real
        zm = z[t].imag
        ar = chi[0]
        al = clo[0]
        ai = 0.0
        ail = 0.0
        for k in range(1, nc):
            ar, al, ai, ail = ddarith.cdd_mul(ar, al, ai, ail, zr, 0.0, zm, 0.0)
            ar, al = ddarith.dd_add(ar, al, chi[k], clo[k])
        out[t] = complex(ar + al, ai + ail)
    return out


# ---------------------------------------------------------------------------
# Julia set escape iteration

def _julia_green_numpy(crev, z, radius, maxiter, lead_corr, deg):
    z = np.asarray(z, dtype=np.complex128)
    w = z.copy()
    g = np.zeros(z.shape, dtype=np.float64)
    escaped = np.zeros(z.shape, dtype=bool)
    scale = 1.0
    active = np.ones(z.shape, dtype=bool)
    for _ in range(maxiter):
        if not active.any():
            break
        w_act = np.polyval(crev, w[active])
        w[active] = w_act
        scale /= deg
        now = np.abs(w) > radius
        fresh = now & active
        if fresh.any():
            g[fresh] = (np.log(np.abs(w[fresh])) + lead_corr) * scale
            escaped[fresh] = True
            active &= ~fresh
    return g, escaped


def _julia_green_loops(crev, z, radius, maxiter, lead_corr, deg):
    n = z.shape[0]
    nc = crev.shape[0]
    g = np.zeros(n)
    escaped = np.zeros(n, dtype=np.bool_)
    for t in range(n):
        w = z[t]
        scale = 1.0
        for _ in range(maxiter):
            p = crev[0] + 0j
            for k in range(1, nc):
                p = p * w + crev[k]
            w = p
            scale /= deg
            if abs(w) > radius:
                g[t] = (np.log(abs(w)) + lead_corr) * scale
                escaped[t] = True
                break
    return g, escaped


# ---------------------------------------------------------------------------
# distance of points to a polyline

def _polyline_dist_numpy(points, va, vb):
    a = va[None, :]
    b = vb[None, :]
    ab = b - a
    denom = np.abs(ab) ** 2
    denom = np.where(denom == 0, 1.0, denom)
    out = np.empty(len(points))
    step = max(1, 2_000_000 // max(1, len(va)))
    for lo in range(0, len(points), step):
        p = points[lo:lo + step, None]
        t = np.clip(((p - a) * np.conj(ab)).real / denom, 0.0, 1.0)
        proj = a + t * ab
        out[lo:lo + step] = np.min(np.abs(p - proj), axis=1)
    return out


def _polyline_dist_loops(points, va, vb):
    n = points.shape[0]
    m = va.shape[0]
    out = np.empty(n)
    for i in range(n):
        best = np.inf
        p = points[i]
        for s in range(m):
            a = va[s]
            ab = vb[s] - a
            denom = ab.real * ab.real + ab.imag * ab.imag
            if denom == 0.0:
                d = abs(p - a)
            else:
                t = ((p - a) * np.conj(ab)).real / denom
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                d = abs(p - (a + t * ab))
            if d < best:
                best = d
        out[i] = best
    return out


# ---------------------------------------------------------------------------
# backend wiring

_NUMPY_IMPLS = {
    "neglog_matrix": _neglog_matrix_numpy,
    "potential_sums": _potential_sums_numpy,
    "energy_double_sum": _energy_double_sum_numpy,
    "vandermonde_logsum": _vandermonde_logsum_numpy,
    "greedy_leja": _greedy_leja_numpy,
    "exchange_pass": _exchange_pass_numpy,
    "aberth_f64": _aberth_f64_numpy,
    "aberth_dd": _aberth_dd_numpy,
    "dd_polyval": _dd_polyval_numpy,
    "julia_green": _julia_green_numpy,
    "polyline_dist": _polyline_dist_numpy,
}

_LOOP_IMPLS = {
    "neglog_matrix": _neglog_matrix_loops,
    "potential_sums": _potential_sums_loops,
    "energy_double_sum": _energy_double_sum_loops,
    "vandermonde_logsum": _vandermonde_logsum_loops,
    "greedy_leja": _greedy_leja_loops,
    "exchange_pass": _exchange_pass_loops,
    "aberth_f64": _aberth_f64_loops,
    "aberth_dd": _aberth_dd_loops,
    "dd_polyval": _dd_polyval_loops,
    "julia_green": _julia_green_loops,
    "polyline_dist": _polyline_dist_loops,
}

if USE_NUMBA:
    _NUMBA_IMPLS = {name: _njit(fn) for name, fn in _LOOP_IMPLS.items()}
else:
    _NUMBA_IMPLS = None

IMPLEMENTATIONS = {"numpy": _NUMPY_IMPLS, "numba": _NUMBA_IMPLS}

_ACTIVE = _NUMBA_IMPLS if USE_NUMBA else _NUMPY_IMPLS

neglog_matrix = _ACTIVE["neglog_matrix"]
potential_sums = _ACTIVE["potential_sums"]
energy_double_sum = _ACTIVE["energy_double_sum"]
vandermonde_logsum = _ACTIVE["vandermonde_logsum"]
greedy_leja = _ACTIVE["greedy_leja"]
exchange_pass = _ACTIVE["exchange_pass"]
aberth_f64 = _ACTIVE["aberth_f64"]
aberth_dd = _ACTIVE["aberth_dd"]
dd_polyval = _ACTIVE["dd_polyval"]
julia_green = _ACTIVE["julia_green"]
polyline_dist = _ACTIVE["polyline_dist"]


def warmup():
    """Trigger JIT compilation of every kernel on tiny inputs."""
    pts = np.array([0.0 + 0j, 1.0 + 0j, 0.5 + 0.5j])
    w = np.array([0.4, 0.3, 0.3])
    neglog_matrix(pts, np.zeros(3))
    potential_sums(pts, w, pts + 2.0)
    energy_double_sum(pts, w, 30.0, True)
    vandermonde_logsum(pts)
    idx = greedy_leja(pts, 2, 0)
    exchange_pass(pts, idx)
    crev = np.array([1.0, 0.0, -1.0])
    z0 = np.array([0.9 + 0.1j, -1.1 + 0.05j])
    aberth_f64(crev, np.array([2.0, 0.0]), z0, 10, 1e-14)
    hi = np.array([1.0, 0.0, -1.0])
    lo = np.zeros(3)
    aberth_dd(hi, lo, np.array([2.0, 0.0]), np.zeros(2), z0, 5, 1e-25)
    dd_polyval(hi, lo, z0)
    julia_green(np.array([1.0, 0.0, -1.0]), pts, 4.0, 30, 0.0, 2)
    polyline_dist(pts, np.array([0j, 1j]), np.array([1j, 1 + 1j]))
