"""Exact integer-polynomial arithmetic and certified floating root extraction.

Resultants run through the subresultant PRS; a fraction-free Sylvester
determinant (Bareiss) is kept alongside as an independent oracle. Root
extraction is a two-stage Aberth-Ehrlich iteration: float64 sweeps from
Newton-polygon initial circles, then sweeps with double-double Horner
evaluation, which is what rescues ill-conditioned inputs like Chebyshev
polynomials in the monomial basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import ddarith, kernels
from .errors import RootConvergenceError, UndefinedResultantError


class IntPolynomial:
    """Univariate polynomial over the integers, coefficients ascending.

    The zero polynomial has empty coefficients and degree -1 (sentinel).
    Instances are immutable and hashable.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "_coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("IntPolynomial is immutable")

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def degree(self):
        return len(self._coeffs) - 1

    @property
    def lead(self):
        if not self._coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self._coeffs[-1]

    @property
    def is_zero(self):
        return not self._coeffs

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self._coeffs)})"

    def __str__(self):
        return " ".join(str(c) for c in self._coeffs) if self._coeffs else "0"

    @classmethod
    def from_string(cls, text):
        """Parse whitespace-separated ascending integer coefficients."""
        return cls(int(tok) for tok in text.split())

    @classmethod
    def x(cls):
        return cls((0, 1))

    def __add__(self, other):
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(out)

    def __neg__(self):
        return IntPolynomial(-c for c in self._coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(other * c for c in self._coeffs)
        if self.is_zero or other.is_zero:
            return IntPolynomial(())
        out = [0] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a:
                for j, b in enumerate(other._coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by x**k."""
        if self.is_zero:
            return self
        return IntPolynomial((0,) * k + self._coeffs)

    def derivative(self):
        return IntPolynomial(i * c for i, c in enumerate(self._coeffs) if i > 0)

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction arguments."""
        if self.is_zero:
            return 0 * x
        acc = self._coeffs[-1] + 0 * x
        for c in reversed(self._coeffs[:-1]):
            acc = acc * x + c
        return acc

    def content(self):
        if self.is_zero:
            raise ValueError("content of the zero polynomial")
        return math.gcd(*(abs(c) for c in self._coeffs)) if len(self._coeffs) > 1 \
            else abs(self._coeffs[0])

    def primitive_part(self):
        c = self.content()
        return IntPolynomial(v // c for v in self._coeffs)

    def exact_div(self, divisor):
        """Exact division in Z[x]; raises if the division leaves a remainder."""
        q, r = _divmod_q(self, divisor)
        if not r.is_zero or any(c.denominator != 1 for c in q):
            raise ValueError("division is not exact over the integers")
        return IntPolynomial(int(c) for c in q)


def _divmod_q(a, b):
    """Division over Q; returns (quotient Fraction list ascending, remainder poly over Q)."""
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in a.coeffs]
    db = b.degree
    lead = Fraction(b.lead)
    q = [Fraction(0)] * max(0, len(rem) - db)
    while len(rem) - 1 >= db and any(rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) - 1 < db:
            break
        k = len(rem) - 1 - db
        f = rem[-1] / lead
        q[k] = f
        for j, c in enumerate(b.coeffs):
            rem[k + j] -= f * c
        rem.pop()
    rem_poly = _QPoly(rem)
    return q, rem_poly


class _QPoly:
    """Minimal rational-coefficient carrier for division remainders."""

    def __init__(self, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @property
    def is_zero(self):
        return not self.coeffs


def pseudo_rem(a, b):
    """prem(a, b): lc(b)**(deg a - deg b + 1) * a mod b, exact over Z."""
    d = b.lead
    r = a
    e = a.degree - b.degree + 1
    while not r.is_zero and r.degree >= b.degree:
        k = r.degree - b.degree
        r = r * d - (b * r.lead).shift(k)
        e -= 1
    if e > 0:
        r = r * (d ** e)
    return r


def poly_gcd(a, b):
    """Primitive gcd in Z[x], positive leading coefficient (integer gcd for constants)."""
    if a.is_zero and b.is_zero:
        return IntPolynomial(())
    if a.is_zero:
        return _pos_lead(b.primitive_part())
    if b.is_zero:
        return _pos_lead(a.primitive_part())
    ca, cb = a.content(), b.content()
    g = math.gcd(ca, cb)
    a = a.primitive_part()
    b = b.primitive_part()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero:
        r = pseudo_rem(a, b)
        a, b = b, (r.primitive_part() if not r.is_zero else r)
    if a.degree == 0:
        return IntPolynomial((g,))
    return _pos_lead(a) if g == 1 else _pos_lead(a)


def _pos_lead(p):
    return -p if (not p.is_zero and p.lead < 0) else p


def resultant(p, q):
    """Exact resultant via the subresultant PRS."""
    if p.is_zero or q.is_zero:
        raise UndefinedResultantError("resultant of the zero polynomial is undefined")
    if p.degree == 0:
        return p.lead ** q.degree
    if q.degree == 0:
        return q.lead ** p.degree
    a, b = p, q
    s = 1
    if a.degree < b.degree:
        if a.degree % 2 == 1 and b.degree % 2 == 1:
            s = -1
        a, b = b, a
    ca, cb = a.content(), b.content()
    a = a.primitive_part()
    b = b.primitive_part()
    t = (ca ** b.degree) * (cb ** a.degree)
    g = 1
    h = 1
    while True:
        delta = a.degree - b.degree
        if a.degree % 2 == 1 and b.degree % 2 == 1:
            s = -s
        r = pseudo_rem(a, b)
        a = b
        div = g * h ** delta
        b = IntPolynomial(c // div for c in r.coeffs)
        if b.is_zero:
            return 0
        g = a.lead
        if delta > 0:
            h = g ** delta // h ** (delta - 1)
        if b.degree == 0:
            break
    h = b.lead ** a.degree // h ** (a.degree - 1)
    return s * t * h


def sylvester_resultant(p, q):
    """Resultant as the Sylvester determinant, Bareiss fraction-free elimination."""
    if p.is_zero or q.is_zero:
        raise UndefinedResultantError("resultant of the zero polynomial is undefined")
    n, m = p.degree, q.degree
    if n == 0:
        return p.lead ** m
    if m == 0:
        return q.lead ** n
    size = n + m
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(m):
        rows.append([0] * i + pc + [0] * (m - 1 - i))
    for i in range(n):
        rows.append([0] * i + qc + [0] * (n - 1 - i))
    sign = 1
    prev = 1
    for k in range(size - 1):
        if rows[k][k] == 0:
            for r in range(k + 1, size):
                if rows[r][k] != 0:
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
    return sign * rows[size - 1][size - 1]


def discriminant(p):
    """Disc(p) = (-1)^(n(n-1)/2) Res(p, p') / lead(p), exact integer."""
    n = p.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    r = resultant(p, p.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, rem = divmod(sign * r, p.lead)
    if rem != 0:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return q


def is_squarefree(p):
    if p.degree < 1:
        raise ValueError("squarefree test needs degree >= 1")
    return poly_gcd(p, p.derivative()).degree == 0


def squarefree_decomposition(p):
    """Yun's algorithm on the primitive part: list of (factor, multiplicity)."""
    if p.degree < 1:
        raise ValueError("needs degree >= 1")
    f = p.primitive_part()
    out = []
    a = poly_gcd(f, f.derivative())
    if a.degree == 0:
        return [(f, 1)]
    b = f.exact_div(a)
    c = f.derivative().exact_div(a)
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        g = poly_gcd(b, d)
        if g.degree > 0:
            out.append((g, k))
        b = b.exact_div(g)
        c = d.exact_div(g)
        d = c - b.derivative()
        k += 1
    return out


# ---------------------------------------------------------------------------
# irreducibility machinery

def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = b"\x00" * len(flags[i * i::i])
    return [i for i, f in enumerate(flags) if f]


def _gf_norm(c, p):
    c = [v % p for v in c]
    while c and c[-1] == 0:
        c.pop()
    return c


def _gf_mulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    # reduce mod monic f
    df = len(f) - 1
    while len(out) - 1 >= df:
        top = out[-1]
        if top:
            k = len(out) - 1 - df
            for j, c in enumerate(f):
                out[k + j] = (out[k + j] - top * c) % p
        out.pop()
    while out and out[-1] == 0:
        out.pop()
    return out


def _gf_powmod(base, e, f, p):
    result = [1]
    while e:
        if e & 1:
            result = _gf_mulmod(result, base, f, p)
        base = _gf_mulmod(base, base, f, p)
        e >>= 1
    return result


def _gf_gcd(a, b, p):
    a, b = _gf_norm(a, p), _gf_norm(b, p)
    while b:
        inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b):
            top = (r[-1] * inv) % p
            if top:
                k = len(r) - len(b)
                for j, c in enumerate(b):
                    r[k + j] = (r[k + j] - top * c) % p
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
    return a


def _rabin_irreducible_mod_p(coeffs, p):
    """Rabin's test: is the (degree-preserving) reduction mod p irreducible?"""
    c = [v % p for v in coeffs]
    if c[-1] == 0:
        return False  # degree dropped
    n = len(c) - 1
    if n == 0:
        return False
    if n == 1:
        return True
    inv = pow(c[-1], p - 2, p)
    f = [(v * inv) % p for v in c]
    x = [0, 1]
    frob = []
    cur = x
    for _ in range(n):
        cur = _gf_powmod(cur, p, f, p)
        frob.append(cur)
    if _gf_norm([a - b for a, b in zip(cur + [0, 0], x + [0] * len(cur))], p):
        return False
    factors = {r for r in range(2, n + 1) if n % r == 0 and all(r % q for q in range(2, r))}
    for r in factors:
        h = frob[n // r - 1]
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _gf_gcd(f, diff, p)
        if len(g) - 1 > 0:
            return False
    return True


@dataclass(frozen=True)
class IrreducibilityCertificate:
    """Mod-p sufficiency certificate; proven=True is never wrong, unknown says nothing."""

    proven: bool
    prime: int | None = None

    def __bool__(self):
        return self.proven


def irreducibility_certificate(p, prime_budget=100):
    """Proven iff primitive and irreducible mod some prime <= budget not dividing lead."""
    if p.degree < 1:
        raise ValueError("needs degree >= 1")
    if p.content() != 1:
        return IrreducibilityCertificate(False)
    for q in _sieve(prime_budget):
        if p.lead % q == 0:
            continue
        if _rabin_irreducible_mod_p(list(p.coeffs), q):
            return IrreducibilityCertificate(True, q)
    return IrreducibilityCertificate(False)


def _divisors(n):
    n = abs(n)
    out = set()
    for d in range(1, int(n ** 0.5) + 1):
        if n % d == 0:
            out.update((d, n // d))
    return sorted(out)


def is_irreducible_smalldeg(p):
    """Complete irreducibility test over Z for primitive polynomials of degree <= 4."""
    n = p.degree
    if n < 1 or n > 4:
        raise ValueError("complete test only for degrees 1..4")
    if p.content() != 1:
        return False
    if p.coeffs[0] == 0:
        return n == 1  # divisible by x
    if n == 1:
        return True
    # rational roots r/s with r | a0, s | lead would give a linear factor
    for s in _divisors(p.lead):
        for r in _divisors(p.coeffs[0]):
            for num in (r, -r):
                # s^n * p(num/s), exact
                val = sum(c * num ** i * s ** (n - i) for i, c in enumerate(p.coeffs))
                if val == 0:
                    return False
    if n <= 3:
        return True
    # quartic: search integer quadratic factors b2 x^2 + b1 x + b0
    a4, a0 = p.lead, p.coeffs[0]
    norm = math.isqrt(sum(c * c for c in p.coeffs)) + 1
    mig = 4 * norm  # generous Mignotte-type bound on factor coefficients
    for b2 in _divisors(a4):
        for b0d in _divisors(a0):
            for b0 in (b0d, -b0d):
                for b1 in range(-mig, mig + 1):
                    q = IntPolynomial((b0, b1, b2))
                    try:
                        p.exact_div(q)
                        return False
                    except ValueError:
                        continue
    return True


# ---------------------------------------------------------------------------
# root extraction

@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicity, conjugation-paired, with a scaled residual bound.

    residual_bound = max_k |P(root_k)| / (max_i |a_i| * max(1, |root_k|)**deg),
    evaluated with double-double Horner.
    """

    roots: np.ndarray
    residual_bound: float
    converged: bool

    @property
    def degree(self):
        return len(self.roots)


def _newton_polygon_initials(coeffs_float):
    c = np.asarray(coeffs_float, dtype=float)
    n = len(c) - 1
    with np.errstate(divide="ignore"):
        logs = np.where(c != 0, np.log(np.abs(c)), -np.inf)
    hull = [0]
    for i in range(1, n + 1):
        if logs[i] == -np.inf:
            continue
        while len(hull) >= 2:
            i1, i2 = hull[-2], hull[-1]
            if (logs[i2] - logs[i1]) * (i - i2) <= (logs[i] - logs[i2]) * (i2 - i1):
                hull.pop()
            else:
                break
        hull.append(i)
    if hull[-1] != n:
        hull.append(n)
    radii = np.empty(n)
    pos = 0
    for a, b in zip(hull[:-1], hull[1:]):
        radii[pos:pos + (b - a)] = np.exp((logs[a] - logs[b]) / (b - a))
        pos += b - a
    k = np.arange(n)
    ang = 2 * np.pi * k / n + 0.4 / n + 0.61
    return radii * np.exp(1j * ang) * (1 + 1e-3 * np.cos(7.0 * k))


def _solve_squarefree(poly, maxiter_f64=400, maxiter_dd=240):
    n = poly.degree
    if n == 1:
        a0, a1 = poly.coeffs
        root = np.array([complex(Fraction(-a0, a1))])
        return root, 0.0, True
    scale_pow = max(int(c).bit_length() for c in poly.coeffs) - 1
    chi_l, clo_l = ddarith.int_coeffs_to_dd(poly.coeffs, scale_pow)
    dcoeffs = [i * c for i, c in enumerate(poly.coeffs)][1:]
    dhi_l, dlo_l = ddarith.int_coeffs_to_dd(dcoeffs, scale_pow)
    chi = np.array(chi_l[::-1])
    clo = np.array(clo_l[::-1])
    dhi = np.array(dhi_l[::-1])
    dlo = np.array(dlo_l[::-1])
    z0 = _newton_polygon_initials(chi_l)
    z1, _, _ = kernels.aberth_f64(chi, dhi, z0, maxiter_f64, 5e-15)
    z2, _, _ = kernels.aberth_dd(chi, clo, dhi, dlo, z1, maxiter_dd, 1e-25)
    z2 = _pair_conjugates(z2, chi, clo)
    resid = _residual_bound(chi, clo, z2, n)
    # convergence is certified by the residual, not by the sweep counters
    return z2, resid, bool(resid <= 1e-8)


def _residual_bound(chi, clo, z, deg):
    p = kernels.dd_polyval(chi, clo, z)
    scale = np.max(np.abs(chi)) * np.maximum(1.0, np.abs(z)) ** deg
    return float(np.max(np.abs(p) / scale))


def _pair_conjugates(z, chi, clo):
    z = np.array(z, dtype=np.complex128)
    # snap near-real roots when that does not hurt the residual
    near = np.abs(z.imag) < 1e-8 * (1 + np.abs(z))
    if near.any():
        snapped = z.copy()
        snapped[near] = snapped[near].real
        r_old = np.abs(kernels.dd_polyval(chi, clo, z[near]))
        r_new = np.abs(kernels.dd_polyval(chi, clo, snapped[near]))
        keep = r_new <= 2 * r_old + 1e-300
        idx = np.flatnonzero(near)[keep]
        z[idx] = z[idx].real
    pos = sorted(np.flatnonzero(z.imag > 0), key=lambda i: (z[i].real, z[i].imag))
    neg = sorted(np.flatnonzero(z.imag < 0), key=lambda i: (z[i].real, -z[i].imag))
    for i, j in zip(pos, neg):
        w = 0.5 * (z[i] + np.conj(z[j]))
        z[i] = w
        z[j] = np.conj(w)
    return z


def find_roots(poly):
    """All complex roots with multiplicity (repeated factors deflated exactly first)."""
    if poly.degree < 1:
        raise ValueError("find_roots needs degree >= 1")
    parts = []
    worst = 0.0
    all_ok = True
    for factor, mult in squarefree_decomposition(poly):
        if factor.degree < 1:
            continue
        roots, resid, ok = _solve_squarefree(factor)
        worst = max(worst, resid)
        all_ok = all_ok and ok
        parts.extend([roots] * mult)
    roots = np.concatenate(parts)
    order = np.lexsort((roots.imag, roots.real))
    return RootSet(roots=roots[order], residual_bound=worst, converged=all_ok)


def require_roots(poly):
    """find_roots, raising RootConvergenceError when the solver did not converge."""
    rs = find_roots(poly)
    if not rs.converged:
        raise RootConvergenceError(
            f"root finding failed (residual bound {rs.residual_bound:.3e})",
            residual_bound=rs.residual_bound)
    return rs


# ---------------------------------------------------------------------------
# classical families

def chebyshev_T(n):
    """Chebyshev polynomial of the first kind, exact integer coefficients."""
    if n < 0:
        raise ValueError("n >= 0")
    a, b = IntPolynomial((1,)), IntPolynomial((0, 1))
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, IntPolynomial((0,) + tuple(2 * c for c in b.coeffs)) - a
    return b


def chebyshev_monic(n):
    """Monic integer Chebyshev for [-2, 2]: 2*T_n(x/2), recurrence C_{k+1} = x C_k - C_{k-1}."""
    if n < 0:
        raise ValueError("n >= 0")
    a, b = IntPolynomial((2,)), IntPolynomial((0, 1))
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, b.shift(1) - a
    return b


@lru_cache(maxsize=None)
def cyclotomic(m):
    """m-th cyclotomic polynomial by exact division of x^m - 1."""
    if m < 1:
        raise ValueError("m >= 1")
    p = IntPolynomial((-1,) + (0,) * (m - 1) + (1,))
    for d in range(1, m):
        if m % d == 0:
            p = p.exact_div(cyclotomic(d))
    return p
