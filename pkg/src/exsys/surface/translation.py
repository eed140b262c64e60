"""Random lattice offsets with few surface crossings.

Coordinates are normalized so the surface has area 1 and the lattice has
spacing 1/m; offsets are drawn uniformly from one lattice cell. For each
offset the section length and the number of lattice-line crossings are
computed in floating point (only the chosen offset is later handled exactly).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .mesh import TorusMesh, rational


@dataclass
class TranslationStats:
    m: float
    samples: int
    mean_length: float  # E[length(X^2 ∩ (T+s))]; the integral over the cell is this times m^-3
    se_length: float
    mean_count: float
    se_count: float
    qualifying: int
    first_index: int | None

    @property
    def integral_length(self) -> float:
        return self.mean_length * self.m ** -3

    @property
    def integral_count(self) -> float:
        return self.mean_count * self.m ** -3

    @property
    def qualifying_fraction(self) -> float:
        return self.qualifying / self.samples if self.samples else 0.0


class TranslationSearchError(RuntimeError):
    def __init__(self, msg, best=None, stats=None):
        super().__init__(msg)
        self.best = best
        self.stats = stats


def _arith(lo, hi):
    """Sum over integers k with lo < k <= hi of (k - lo), and their count."""
    a = np.floor(lo)
    n = np.floor(hi) - a
    return n * (a + 1 - lo) + n * (n - 1) / 2, n


def section_stats(P: np.ndarray, tris: np.ndarray, offset) -> tuple[float, int]:
    """Length of the plane sections and number of line crossings for lattice spacing 1.

    P holds vertices already divided by the spacing; offset is in the same units.
    """
    T = P[tris] - np.asarray(offset)
    total = 0.0
    count = 0
    for a in range(3):
        la = T[:, :, a]
        order = np.argsort(la, axis=1)
        S = np.take_along_axis(T, order[:, :, None], axis=1)
        p0, p1, p2 = S[:, 0], S[:, 1], S[:, 2]
        l0, l1, l2 = p0[:, a], p1[:, a], p2[:, a]
        span = l2 - l0
        ok = span > 0
        f = np.where(ok, (l1 - l0) / np.where(ok, span, 1), 0)
        q = p0 + (p2 - p0) * f[:, None]
        w = np.linalg.norm(p1 - q, axis=1)
        up, _ = _arith(l0, l1)
        # planes in (l1, l2]: sum of (l2 - k) = n*l2 - sum k
        a1 = np.floor(l1)
        n2 = np.floor(l2) - a1
        down = n2 * l2 - (n2 * a1 + n2 * (n2 + 1) / 2)
        d1 = l1 - l0
        d2 = l2 - l1
        part = np.where(d1 > 0, w * up / np.where(d1 > 0, d1, 1), 0) + np.where(d2 > 0, w * down / np.where(d2 > 0, d2, 1), 0)
        total += float(part.sum())
        count += _line_hits(T, a)
    return total, count


def _line_hits(T, a) -> int:
    b, c = [i for i in range(3) if i != a]
    xs, ys = T[:, :, b], T[:, :, c]
    x0 = np.floor(xs.min(axis=1)) + 1
    x1 = np.floor(xs.max(axis=1))
    y0 = np.floor(ys.min(axis=1)) + 1
    y1 = np.floor(ys.max(axis=1))
    nx = np.maximum(x1 - x0 + 1, 0).astype(np.int64)
    ny = np.maximum(y1 - y0 + 1, 0).astype(np.int64)
    tot = nx * ny
    idx = np.nonzero(tot)[0]
    if not len(idx):
        return 0
    rep = np.repeat(idx, tot[idx])
    start = np.repeat(np.cumsum(tot[idx]) - tot[idx], tot[idx])
    j = np.arange(len(rep)) - start
    gx = x0[rep] + j // ny[rep]
    gy = y0[rep] + j % ny[rep]
    X, Y = xs[rep], ys[rep]
    d = []
    for i in range(3):
        k = (i + 1) % 3
        d.append((X[:, k] - X[:, i]) * (gy - Y[:, i]) - (Y[:, k] - Y[:, i]) * (gx - X[:, i]))
    d = np.stack(d, axis=1)
    inside = np.all(d > 0, axis=1) | np.all(d < 0, axis=1)
    return int(inside.sum())


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("EXSYS_THREADS", "1")))
    except ValueError:
        return 1


def translation_search(mesh: TorusMesh, m: float, samples: int = 1000, rng_seed: int = 0, area: float | None = None):
    """Sample offsets uniformly in a lattice cell; return the first one with
    section length <= 9m and crossing count <= 9m^2 (area-normalized units).

    Returns (offset in mesh coordinates as exact rationals, stats, candidates),
    where candidates lists every qualifying offset in sample order, so a caller
    can move on when an offset turns out to be non-generic.
    """
    if m <= 0:
        raise ValueError("m must be positive")
    area = area or mesh.area()
    root = math.sqrt(area)
    P = mesh.float_vertices() / root * m
    tris = np.array(mesh.triangles, dtype=np.int64)
    rng = np.random.default_rng(rng_seed)
    offs = rng.random((samples, 3))  # in lattice units: s * m

    def work(i):
        L, N = section_stats(P, tris, offs[i])
        return L / m, N

    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        res = list(ex.map(work, range(samples)))
    L = np.array([r[0] for r in res])
    N = np.array([r[1] for r in res], dtype=float)
    good = (L <= 9 * m) & (N <= 9 * m * m)
    cand = np.nonzero(good)[0]
    se = lambda x: float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0  # noqa: E731
    stats = TranslationStats(
        m, samples, float(L.mean()), se(L), float(N.mean()), se(N), int(good.sum()), int(cand[0]) if len(cand) else None
    )

    def to_mesh(i):
        return tuple(rational(offs[i][k] / m * root) for k in range(3))

    if not len(cand):
        best = int(np.argmin(L / (9 * m) + N / (9 * m * m)))
        raise TranslationSearchError("no sampled offset meets both thresholds", to_mesh(best), stats)
    return to_mesh(int(cand[0])), stats, [to_mesh(int(i)) for i in cand]


def spacing_for(mesh_area: float, m: float, bits: int = 30) -> Fraction:
    """Lattice spacing in mesh units for density m on the area-normalized surface."""
    return rational(math.sqrt(mesh_area) / m, bits)
