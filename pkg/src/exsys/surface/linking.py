"""Linking numbers of closed polygons in space by exact signed crossings."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# projection directions tried in order until one is generic
_DIRECTIONS = [
    (Fraction(1), Fraction(3, 7), Fraction(5, 11)),
    (Fraction(2, 3), Fraction(1), Fraction(-7, 13)),
    (Fraction(-5, 17), Fraction(4, 9), Fraction(1)),
    (Fraction(1), Fraction(-11, 19), Fraction(13, 23)),
    (Fraction(7, 29), Fraction(1), Fraction(17, 31)),
]


class DegenerateProjection(ValueError):
    pass


def _frame(d):
    """Linear map R^3 -> R^2 x depth for parallel projection along d."""
    i = max(range(3), key=lambda k: abs(d[k]))
    j, k = [a for a in range(3) if a != i]

    def proj(p):
        t = p[i] / d[i]
        return (p[j] - t * d[j], p[k] - t * d[k], t)

    return proj


def _closed(poly):
    pts = [tuple(Fraction(c) for c in p) for p in poly]
    if pts[0] == pts[-1]:
        pts = pts[:-1]
    return pts


def _linking_dir(A, B, d) -> int:
    proj = _frame(d)
    pa = [proj(p) for p in A]
    pb = [proj(p) for p in B]
    na, nb = len(pa), len(pb)
    fa = np.array([[float(x) for x in p[:2]] for p in pa])
    fb = np.array([[float(x) for x in p[:2]] for p in pb])
    a0, a1 = fa, np.roll(fa, -1, axis=0)
    b0, b1 = fb, np.roll(fb, -1, axis=0)
    alo, ahi = np.minimum(a0, a1), np.maximum(a0, a1)
    blo, bhi = np.minimum(b0, b1), np.maximum(b0, b1)
    eps = 1e-9 * (1 + np.abs(np.concatenate([fa, fb])).max())
    total = 0
    for i in range(na):
        cand = np.nonzero(
            (blo[:, 0] <= ahi[i, 0] + eps)
            & (bhi[:, 0] >= alo[i, 0] - eps)
            & (blo[:, 1] <= ahi[i, 1] + eps)
            & (bhi[:, 1] >= alo[i, 1] - eps)
        )[0]
        if not len(cand):
            continue
        p, q = pa[i], pa[(i + 1) % na]
        r = (q[0] - p[0], q[1] - p[1])
        for j in cand:
            s0, s1 = pb[j], pb[(j + 1) % nb]
            s = (s1[0] - s0[0], s1[1] - s0[1])
            den = r[0] * s[1] - r[1] * s[0]
            w = (s0[0] - p[0], s0[1] - p[1])
            if den == 0:
                if w[0] * r[1] - w[1] * r[0] == 0:
                    # collinear projected segments; overlap would be degenerate
                    ta = [(x[0] - p[0]) * r[0] + (x[1] - p[1]) * r[1] for x in (s0, s1)]
                    rr = r[0] * r[0] + r[1] * r[1]
                    if max(ta) >= 0 and min(ta) <= rr:
                        raise DegenerateProjection("collinear overlap")
                continue
            t = (w[0] * s[1] - w[1] * s[0]) / den
            u = (w[0] * r[1] - w[1] * r[0]) / den
            if t < 0 or t > 1 or u < 0 or u > 1:
                continue
            if t in (0, 1) or u in (0, 1):
                raise DegenerateProjection("crossing at a vertex")
            za = p[2] + t * (q[2] - p[2])
            zb = s0[2] + u * (s1[2] - s0[2])
            if za == zb:
                raise DegenerateProjection("curves meet")
            if za > zb:
                total += 1 if den > 0 else -1
    return total


def linking_number(A, B) -> int:
    """Linking number of two disjoint closed polygons (vertex lists).

    Counts, in a parallel projection, the crossings where A passes over B,
    each with the sign of the oriented crossing.
    """
    A, B = _closed(A), _closed(B)
    for d in _DIRECTIONS:
        try:
            return _linking_dir(A, B, d)
        except DegenerateProjection:
            continue
    raise DegenerateProjection("no generic projection found")


def gauss_linking(A, B, sub: int = 1) -> float:
    """Gauss double integral for the linking number, by midpoint quadrature."""
    A = np.array([[float(c) for c in p] for p in _closed(A)])
    B = np.array([[float(c) for c in p] for p in _closed(B)])

    def refine(P):
        Q = np.roll(P, -1, axis=0)
        ts = (np.arange(sub) + 0.5) / sub
        mids = P[:, None, :] + ts[None, :, None] * (Q - P)[:, None, :]
        ds = np.repeat(((Q - P) / sub)[:, None, :], sub, axis=1)
        return mids.reshape(-1, 3), ds.reshape(-1, 3)

    ma, da = refine(A)
    mb, db = refine(B)
    r = ma[:, None, :] - mb[None, :, :]
    cr = np.cross(da[:, None, :], db[None, :, :])
    num = np.einsum("ijk,ijk->ij", r, cr)
    den = np.linalg.norm(r, axis=2) ** 3
    return float((num / den).sum() / (4 * np.pi))
