"""Parametric marked tori: twisted cylinder, standard torus, picture frame, knot tube."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .surface.linking import linking_number
from .surface.mesh import MeshError, TorusMesh, rational


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0


def _grid_mesh(points, ns: int, nt: int):
    """Triangulate an ns x nt periodic grid; points[i][j] are float triples."""
    verts = [tuple(rational(c) for c in points[i][j]) for i in range(ns) for j in range(nt)]
    idx = lambda i, j: (i % ns) * nt + (j % nt)  # noqa: E731
    tris = []
    for i in range(ns):
        for j in range(nt):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    e1 = [idx(i, 0) for i in range(ns)]
    e2 = [idx(0, j) for j in range(nt)]
    return verts, tris, e1, e2


def _circle(R, n=64, z=0):
    return [(rational(R * math.cos(2 * math.pi * k / n)), rational(R * math.sin(2 * math.pi * k / n)), rational(z)) for k in range(n)]


def _axis_loop(height, reach, center=(0, 0)):
    """A vertical line through ``center`` closed far away by a rectangle."""
    cx, cy = (rational(c) for c in center)
    h, r = rational(height), rational(reach)
    # tilt the far side slightly off the xz plane so projections stay generic
    return [(cx, cy, -h), (cx, cy, h), (cx + r, cy + r / 7, h), (cx + r, cy + r / 7, -h)]


def gen_twisted_cylinder(n: int, res: int | None = None, res_t: int = 8) -> TorusMesh:
    """Thin torus of revolution (R = 1, r = 1/(n+2)) marked as an n-times twisted cylinder.

    Twisting one end of the cylinder n times before gluing gives the same
    surface of revolution; only the identification of the cylinder's row
    loop changes. e1 is a staircase loop winding once around the axis and n
    times around the tube, so e1 = u + n v with v the meridian e2 and u the
    longitude, which bounds outside.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    res = res if res is not None else max(64, 8 * n)
    if res < 8 * n or res < 8:
        raise ValueError(f"resolution {res} too small for {n} twists (need >= {max(8, 8 * n)})")
    R, r = 1.0, 1.0 / (n + 2)
    pts = [[None] * res_t for _ in range(res)]
    for i in range(res):
        th = 2 * math.pi * i / res
        for j in range(res_t):
            ph = 2 * math.pi * j / res_t
            rho = R + r * math.cos(ph)
            pts[i][j] = (rho * math.cos(th), rho * math.sin(th), r * math.sin(ph))
    verts, tris, _, e2 = _grid_mesh(pts, res, res_t)
    e1 = []
    j = 0
    for i in range(res):
        e1.append(i * res_t + j % res_t)
        target = (n * res_t * (i + 1)) // res
        while j < target:
            j += 1
            e1.append(i * res_t + j % res_t)
    return TorusMesh(
        verts,
        tris,
        (e1, e2),
        class_u=(1, -n),
        class_v=(0, 1),
        side_u="exterior",
        cores={"interior": _circle(R), "exterior": _axis_loop(1, 3)},
        meta={"family": "twisted-cylinder", "n": n, "res": res, "res_t": res_t, "R": R, "r": r},
    )


def gen_standard_torus(R=2, r=1, res: int = 48, res_t: int | None = None) -> TorusMesh:
    """Torus of revolution; u is the meridian (bounds inside), v the longitude."""
    R, r = float(R), float(r)
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    res_t = res_t or max(8, res // 2)
    pts = [[None] * res_t for _ in range(res)]
    for i in range(res):
        th = 2 * math.pi * i / res
        for j in range(res_t):
            ph = 2 * math.pi * j / res_t
            rho = R + r * math.cos(ph)
            pts[i][j] = (rho * math.cos(th), rho * math.sin(th), r * math.sin(ph))
    verts, tris, e1, e2 = _grid_mesh(pts, res, res_t)
    return TorusMesh(
        verts,
        tris,
        (e1, e2),
        class_u=(0, 1),
        class_v=(1, 0),
        side_u="interior",
        cores={"interior": _circle(R), "exterior": _axis_loop(R, 2 * (R + r) + 1)},
        meta={"family": "standard-torus", "R": R, "r": r, "res": res, "res_t": res_t},
    )


def _square_point(s: Fraction) -> tuple[Fraction, Fraction]:
    """Point on the boundary of [-1,1]^2 at perimeter parameter s in [0, 8), counterclockwise."""
    s = s % 8
    if s < 2:
        return (Fraction(1), -1 + s)
    if s < 4:
        return (1 - (s - 2), Fraction(1))
    if s < 6:
        return (Fraction(-1), 1 - (s - 4))
    return (-1 + (s - 6), Fraction(-1))


def _section_point(t: Fraction) -> tuple[Fraction, Fraction]:
    """(radius, height) on the boundary of [1/2, 3/2] x [0, 1] at parameter t in [0, 4)."""
    t = t % 4
    if t < 1:
        return (Fraction(1, 2) + t, Fraction(0))
    if t < 2:
        return (Fraction(3, 2), t - 1)
    if t < 3:
        return (Fraction(3, 2) - (t - 2), Fraction(1))
    return (Fraction(1, 2), 1 - (t - 3))


def gen_flat_rectangular(k: int = 2, width=1) -> TorusMesh:
    """Picture-frame torus: boundary of ([0,3]^2 minus (1,2)^2) x [0,1], scaled by ``width``.

    Intrinsically flat away from the frame's corners; ``k`` grid steps per unit.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    w = Fraction(width)
    ns, nt = 8 * k, 4 * k
    verts = []
    for i in range(ns):
        sx, sy = _square_point(Fraction(i, k))
        for j in range(nt):
            rad, z = _section_point(Fraction(j, k))
            verts.append((w * (Fraction(3, 2) + rad * sx), w * (Fraction(3, 2) + rad * sy), w * z))
    idx = lambda i, j: (i % ns) * nt + (j % nt)  # noqa: E731
    tris = []
    for i in range(ns):
        for j in range(nt):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    e1 = [idx(i, 0) for i in range(ns)]
    e2 = [idx(0, j) for j in range(nt)]
    core_in = []
    for i in range(8):
        sx, sy = _square_point(Fraction(i))
        core_in.append((w * (Fraction(3, 2) + sx), w * (Fraction(3, 2) + sy), w / 2))
    c = w * Fraction(3, 2)
    ext = [(c, c, -w), (c, c, 2 * w), (c + 4 * w, c + w / 7, 2 * w), (c + 4 * w, c + w / 7, -w)]
    return TorusMesh(
        verts,
        tris,
        (e1, e2),
        class_u=(0, 1),
        class_v=(1, 0),
        side_u="interior",
        cores={"interior": core_in, "exterior": ext},
        meta={"family": "flat-rectangular", "k": k, "width": str(w)},
    )


# knot tube


def torus_knot(p: int, q: int, R=2.0, r=1.0, samples: int = 1000):
    """Points, unit torus normals and tangents of the (p, q) torus knot.

    A negative q mirrors the knot; gen_knot_tube uses (n, -(n-1)) so that the
    ribbon's boundary curves link positively.
    """
    s = np.arange(samples) / samples
    th, ph = 2 * np.pi * p * s, 2 * np.pi * q * s
    rho = R + r * np.cos(ph)
    P = np.stack([rho * np.cos(th), rho * np.sin(th), r * np.sin(ph)], axis=1)
    N = np.stack([np.cos(ph) * np.cos(th), np.cos(ph) * np.sin(th), np.sin(ph)], axis=1)
    dP = np.stack(
        [
            -rho * np.sin(th) * 2 * np.pi * p - r * np.sin(ph) * np.cos(th) * 2 * np.pi * q,
            rho * np.cos(th) * 2 * np.pi * p - r * np.sin(ph) * np.sin(th) * 2 * np.pi * q,
            r * np.cos(ph) * 2 * np.pi * q,
        ],
        axis=1,
    )
    return P, N, dP


def torus_knot_length(p: int, q: int, R=2.0, r=1.0, samples: int = 20000) -> float:
    """Arc length by the trapezoid rule on the smooth parametrization."""
    _, _, dP = torus_knot(p, q, R, r, samples)
    return float(np.linalg.norm(dP, axis=1).mean())


def gen_knot_tube(n: int, radius=0.5, res: int | None = None, section: int = 4) -> TorusMesh:
    """Thin lens-section torus around the ribbon of the (n, n-1) torus knot.

    The flat side is the ribbon {beta + t N : |t| <= radius} along the normal N of
    the standard torus (R=2, r=1); the other side bulges by eps = radius/8 in the
    binormal direction. e1 is the boundary curve at t = -radius, e2 a cross
    section, u = e1 - n(n-1) e2 bounds outside and v = e2 bounds inside.
    """
    if n < 2:
        raise ValueError("knot tube needs n >= 2")
    rho = float(radius)
    if not 0 < rho < 1:
        raise MeshError(f"radius {rho} must be below the embeddedness bound 1 (reach of the standard torus)")
    K = res if res is not None else 48 * n
    M = section
    eps = rho / 8
    P, N, dP = torus_knot(n, -(n - 1), samples=K)
    T = dP / np.linalg.norm(dP, axis=1)[:, None]
    B = np.cross(N, T)
    ts = [-rho + 2 * rho * k / M for k in range(M + 1)]
    ring = [(t, 0.0) for t in ts] + [(ts[k], eps * (1 - (ts[k] / rho) ** 2)) for k in range(M - 1, 0, -1)]
    pts = [[tuple(P[i] + t * N[i] + b * B[i]) for (t, b) in ring] for i in range(K)]
    verts, tris, e1, e2 = _grid_mesh(pts, K, len(ring))
    _check_embedded(np.array([[float(c) for c in v] for v in verts]), tris, rho)

    core_in = [tuple(rational(c) for c in P[i] + (eps / 2) * B[i]) for i in range(K)]
    # small loop around the section halfway between samples 0 and 1
    c0 = (P[0] + P[1]) / 2
    T0 = T[0] + T[1]
    T0 /= np.linalg.norm(T0)
    N0 = N[0] + N[1]
    N0 -= T0 * (N0 @ T0)
    N0 /= np.linalg.norm(N0)
    B0 = np.cross(N0, T0)
    d = eps
    rect = [c0 + a * N0 + b * B0 for a, b in ((-rho - d, -d), (rho + d, -d), (rho + d, eps + d), (-rho - d, eps + d))]
    core_out = [tuple(rational(c) for c in p) for p in rect]

    link = n * (n - 1)
    l1 = linking_number([verts[i] for i in e1], core_in)
    l2 = linking_number([verts[i] for i in e2], core_in)
    if abs(l2) != 1 or abs(l1) != link:
        raise MeshError(f"unexpected linking data lk(e1)={l1}, lk(e2)={l2}")
    if l1 * l2 < 0:
        e2 = e2[:1] + e2[1:][::-1]
    return TorusMesh(
        verts,
        tris,
        (e1, e2),
        class_u=(1, -link),
        class_v=(0, 1),
        side_u="exterior",
        cores={"interior": core_in, "exterior": core_out},
        meta={"family": "knot-tube", "n": n, "radius": rho, "eps": eps, "res": K, "section": M},
    )


def zeta_curves(mesh: TorusMesh) -> tuple[list, list]:
    """The two ribbon boundary curves of a knot-tube mesh, as point lists."""
    nt = 2 * int(mesh.meta["section"])
    K = len(mesh.vertices) // nt
    M = nt // 2
    z1 = [mesh.vertices[i * nt] for i in range(K)]
    z2 = [mesh.vertices[i * nt + M] for i in range(K)]
    return z1, z2


def _check_embedded(V: np.ndarray, tris, radius: float) -> None:
    """Reject meshes with intersecting non-adjacent triangles (float test)."""
    from scipy.spatial import cKDTree

    T = np.array(tris)
    A, Bv, C = V[T[:, 0]], V[T[:, 1]], V[T[:, 2]]
    cen = (A + Bv + C) / 3
    rad = np.max(np.stack([np.linalg.norm(X - cen, axis=1) for X in (A, Bv, C)]), axis=0)
    tree = cKDTree(cen)
    pairs = tree.query_pairs(2 * rad.max(), output_type="ndarray")
    if not len(pairs):
        return
    i, j = pairs[:, 0], pairs[:, 1]
    close = np.linalg.norm(cen[i] - cen[j], axis=1) <= rad[i] + rad[j]
    i, j = i[close], j[close]
    share = (T[i][:, :, None] == T[j][:, None, :]).any(axis=(1, 2))
    i, j = i[~share], j[~share]
    if not len(i):
        return
    hit = _tri_tri(A[i], Bv[i], C[i], A[j], Bv[j], C[j]) | _tri_tri(A[j], Bv[j], C[j], A[i], Bv[i], C[i])
    if hit.any():
        k = int(np.argmax(hit))
        raise MeshError(f"self-intersecting tube near triangles {int(i[k])}, {int(j[k])}; use a smaller radius")


def _tri_tri(A, B, C, P, Q, R):
    """Does some edge of triangle PQR cross triangle ABC? (vectorized)"""
    out = np.zeros(len(A), dtype=bool)
    for X, Y in ((P, Q), (Q, R), (R, P)):
        out |= _seg_tri(X, Y, A, B, C)
    return out


def _seg_tri(X, Y, A, B, C):
    e1, e2 = B - A, C - A
    d = Y - X
    h = np.cross(d, e2)
    a = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(a) > 1e-14
    f = np.where(ok, 1 / np.where(ok, a, 1), 0)
    s = X - A
    u = f * np.einsum("ij,ij->i", s, h)
    q = np.cross(s, e1)
    v = f * np.einsum("ij,ij->i", d, q)
    t = f * np.einsum("ij,ij->i", e2, q)
    return ok & (u > 0) & (v > 0) & (u + v < 1) & (t > 0) & (t < 1)


GENERATORS = {
    "twisted-cylinder": lambda p: gen_twisted_cylinder(int(p.get("n", 1)), p.get("res")),
    "standard-torus": lambda p: gen_standard_torus(p.get("R", 2), p.get("r", 1), int(p.get("res", 48))),
    "flat-rectangular": lambda p: gen_flat_rectangular(int(p.get("k", 2)), p.get("width", 1)),
    "knot-tube": lambda p: gen_knot_tube(int(p.get("n", 3)), p.get("radius", 0.5), p.get("res")),
}


def generate(spec: GeneratorSpec) -> TorusMesh:
    if spec.family not in GENERATORS:
        raise ValueError(f"unknown family {spec.family!r}")
    mesh = GENERATORS[spec.family](spec.params)
    mesh.meta["seed"] = spec.seed
    return mesh
