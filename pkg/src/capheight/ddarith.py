"""Double-double (~106-bit) arithmetic from error-free transforms.

Every function here is pure arithmetic on floats (+, -, *), no branches,
so the same source works elementwise on numpy arrays and compiles under
numba for scalars. A double-double value is an unevaluated pair (hi, lo)
with |lo| <= ulp(hi)/2; complex values are two such pairs.
"""

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def two_prod(a, b):
    p = a * b
    aa = _SPLIT * a
    ahi = aa - (aa - a)
    alo = a - ahi
    bb = _SPLIT * b
    bhi = bb - (bb - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def dd_add(xh, xl, yh, yl):
    sh, sl = two_sum(xh, yh)
    sl = sl + (xl + yl)
    h = sh + sl
    return h, sl - (h - sh)


def dd_mul(xh, xl, yh, yl):
    ph, pl = two_prod(xh, yh)
    pl = pl + (xh * yl + xl * yh)
    h = ph + pl
    return h, pl - (h - ph)


def cdd_mul(ar, arl, ai, ail, br, brl, bi, bil):
    """Complex dd product (a_re, a_im) * (b_re, b_im), four-pair layout."""
    rr_h, rr_l = dd_mul(ar, arl, br, brl)
    ii_h, ii_l = dd_mul(ai, ail, bi, bil)
    ri_h, ri_l = dd_mul(ar, arl, bi, bil)
    ir_h, ir_l = dd_mul(ai, ail, br, brl)
    re_h, re_l = dd_add(rr_h, rr_l, -ii_h, -ii_l)
    im_h, im_l = dd_add(ri_h, ri_l, ir_h, ir_l)
    return re_h, re_l, im_h, im_l


def cdd_add(ar, arl, ai, ail, br, brl, bi, bil):
    re_h, re_l = dd_add(ar, arl, br, brl)
    im_h, im_l = dd_add(ai, ail, bi, bil)
    return re_h, re_l, im_h, im_l


def int_to_dd(c):
    """Exact dd image of a Python int with |c| < 2**106 (best effort beyond)."""
    hi = float(c)
    return hi, float(c - int(hi))


def int_coeffs_to_dd(coeffs, scale_pow2=0):
    """Integer coefficients -> two float lists (hi, lo), optionally scaled by 2**-k.

    Power-of-two scaling is exact on both components. Very large coefficients
    are pre-shifted in integer arithmetic so float() cannot overflow.
    """
    import math

    his, los = [], []
    for c in coeffs:
        shift = max(0, int(c).bit_length() - 960)
        hi, lo = int_to_dd(c >> shift if shift else c)
        k = scale_pow2 - shift
        his.append(math.ldexp(hi, -k) if k else hi)
        los.append(math.ldexp(lo, -k) if k else lo)
    return his, los
