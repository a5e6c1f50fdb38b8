"""Robust orientation and in-circle predicates.

Each predicate first evaluates in double precision with Shewchuk's
a-priori error bound and only falls back to exact rational arithmetic
when the floating-point sign cannot be certified.  The in-circle test
additionally supports simulation of simplicity (symbolic perturbation of
the lifted coordinates, ordered by point index) so that cocircular
inputs resolve deterministically.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_EPS = np.finfo(float).eps / 2.0  # 2**-53
CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def orient_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient(a, b, c) -> int:
    """Sign of twice the signed area of triangle abc (+1 counterclockwise)."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > CCW_ERRBOUND * (abs(detleft) + abs(detright)):
        return 1 if det > 0 else -1
    return orient_exact(a, b, c)


def incircle_exact(a, b, c, d) -> int:
    dx, dy = Fraction(d[0]), Fraction(d[1])
    rows = []
    for p in (a, b, c):
        px, py = Fraction(p[0]) - dx, Fraction(p[1]) - dy
        rows.append((px, py, px * px + py * py))
    (adx, ady, al), (bdx, bdy, bl), (cdx, cdy, cl) = rows
    det = (
        al * (bdx * cdy - cdx * bdy)
        + bl * (cdx * ady - adx * cdy)
        + cl * (adx * bdy - bdx * ady)
    )
    return _sign(det)


def incircle(a, b, c, d) -> int:
    """+1 if d is strictly inside the circle through counterclockwise a, b, c."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    if abs(det) > ICC_ERRBOUND * permanent:
        return 1 if det > 0 else -1
    return incircle_exact(a, b, c, d)


def _det3(m) -> Fraction:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _lifted_cofactor(pts, p: int) -> Fraction:
    # det of rows (x, y, z, 1) with the z column replaced by the unit vector e_p
    minor = [[Fraction(q[0]), Fraction(q[1]), Fraction(1)] for i, q in enumerate(pts) if i != p]
    sign = 1 if (p + 2) % 2 == 0 else -1  # z is column index 2
    return sign * _det3(minor)


def incircle_sos(pa, pb, pc, pd, ia: int, ib: int, ic: int, id_: int) -> int:
    """In-circle sign that never returns 0.

    Ties are broken as if the lift of point ``i`` were raised by ``eps_i``
    with ``eps_0 >> eps_1 >> ...``; the sign then follows the first
    nonvanishing cofactor in index order.
    """
    s = incircle(pa, pb, pc, pd)
    if s != 0:
        return s
    pts = (pa, pb, pc, pd)
    for slot in sorted(range(4), key=lambda k: (ia, ib, ic, id_)[k]):
        cof = _lifted_cofactor(pts, slot)
        if cof != 0:
            return _sign(cof)
    raise ValueError("all four points are collinear")


def orient_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized exact orientation signs for rows of (m, 2) arrays."""
    detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
    detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
    det = detleft - detright
    out = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    for i in np.flatnonzero(unsure):
        out[i] = orient_exact(a[i], b[i], c[i])
    return out


def incircle_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Float in-circle values with a mask of rows whose sign is not certified."""
    adx, ady = a[..., 0] - d[..., 0], a[..., 1] - d[..., 1]
    bdx, bdy = b[..., 0] - d[..., 0], b[..., 1] - d[..., 1]
    cdx, cdy = c[..., 0] - d[..., 0], c[..., 1] - d[..., 1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (np.abs(bdxcdy) + np.abs(cdxbdy)) * alift
        + (np.abs(cdxady) + np.abs(adxcdy)) * blift
        + (np.abs(adxbdy) + np.abs(bdxady)) * clift
    )
    return det, np.abs(det) <= ICC_ERRBOUND * permanent
