"""Exact intersection of a torus mesh with an offset cubical lattice.

All points are exact rationals. The surface meets each lattice plane in
closed polygons (the 1-complex J); those polygons cross lattice lines at the
points of X^1 on the surface and are cut there into arcs, one per lattice
square, which refine the 2-skeleton.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from ..cubical import Cell, RefinedComplex, RefinedFace, edge, square
from .homology import HomologyLabeling
from .mesh import TorusMesh


class GeneralPositionError(ValueError):
    def __init__(self, feature: str):
        super().__init__(f"not in general position: {feature}")
        self.feature = feature


def _lam(p, offset, h):
    return tuple((p[i] - offset[i]) / h for i in range(3))


def _lerp(p, q, t):
    return tuple(p[i] + t * (q[i] - p[i]) for i in range(3))


def seg_length(p, q) -> float:
    s = sum((p[i] - q[i]) ** 2 for i in range(3))
    return math.sqrt(s.numerator / s.denominator)


@dataclass
class JCurve:
    plane: tuple  # (axis, k)
    points: list  # closed, first point not repeated
    length: float

    def closed_points(self) -> list:
        return self.points + self.points[:1]


@dataclass
class IntersectionData:
    mesh: TorusMesh
    spacing: Fraction
    offset: tuple
    hits: list  # (lattice edge, point)
    curves: list  # JCurve
    carrier: dict  # point -> ("v", i) | ("e", (i, j)) | ("f", triangle index)
    j_edges: list  # (p, q) pairs, each inside one lattice square
    mesh_sub_edges: list  # (p, q) pieces of mesh edges between plane crossings
    refined: RefinedComplex
    vertex_side: dict = field(default_factory=dict)

    @property
    def total_length(self) -> float:
        return math.fsum(c.length for c in self.curves)

    @property
    def n_hits(self) -> int:
        return len(self.hits)

    def snap(self, p, alt: bool = False) -> int:
        """A mesh vertex in the closed carrier of p (smallest index, or largest if alt)."""
        kind, x = self.carrier[p]
        if kind == "v":
            return x
        if kind == "e":
            return x[1] if alt else x[0]
        t = self.mesh.triangles[x]
        return max(t) if alt else min(t)

    def segment_class(self, p, q, lab: HomologyLabeling, alt: bool = False) -> tuple[int, int]:
        """e-coordinate class of the straight segment p -> q on the surface."""
        a, b = self.snap(p, alt), self.snap(q, alt)
        if a == b:
            return (0, 0)
        return lab.edge_class(a, b)

    def path_class(self, points, lab: HomologyLabeling, alt: bool = False) -> tuple[int, int]:
        """(u, v) class of a closed polygon on the surface through carrier points."""
        pts = list(points)
        if pts[0] == pts[-1]:
            pts = pts[:-1]
        x = [0, 0]
        for p, q in zip(pts, pts[1:] + pts[:1]):
            s = self.segment_class(p, q, lab, alt)
            x[0] += s[0]
            x[1] += s[1]
        return lab.e_to_uv(tuple(x))

    def chain_class(self, chain, lab: HomologyLabeling, alt: bool = False) -> tuple[int, int]:
        """(u, v) class of a 1-cycle of refined edges lying on the surface."""
        x = [0, 0]
        for e, k in chain.items():
            s = self.segment_class(e.tail, e.head, lab, alt)
            x[0] += k * s[0]
            x[1] += k * s[1]
        return lab.e_to_uv(tuple(x))

    def face_side(self, f: RefinedFace) -> str:
        """'interior' or 'exterior' for a refined face of the 2-skeleton."""
        if f in self.refined.side_of_face:
            return self.refined.side_of_face[f]
        q = f.parent
        return self.lattice_vertex_side(q.anchor)

    def lattice_vertex_side(self, idx) -> str:
        idx = tuple(idx)
        if idx not in self.vertex_side:
            self.vertex_side[idx] = _ray_side(self, idx)
        return self.vertex_side[idx]

    def side_label(self, f: RefinedFace) -> str:
        """'u' or 'v': which of T_u, T_v contains the face."""
        s = self.face_side(f)
        return "u" if s == self.mesh.side_u else "v"

    def cube_of_point_set(self, pts):
        """Anchor of a closed lattice cube containing all points, or None."""
        h, o = self.spacing, self.offset
        lo = [min((p[i] - o[i]) / h for p in pts) for i in range(3)]
        hi = [max((p[i] - o[i]) / h for p in pts) for i in range(3)]
        anchor = []
        for i in range(3):
            a = floor(lo[i])
            if hi[i] > a + 1:
                return None
            anchor.append(a)
        return tuple(anchor)


def _x_line_hits(data: IntersectionData):
    if not hasattr(data, "_xlines"):
        lines = defaultdict(list)
        for le, p in data.hits:
            if le.axes == (0,):
                lines[(le.anchor[1], le.anchor[2])].append((p[0] - data.offset[0]) / data.spacing)
        for v in lines.values():
            v.sort()
        data._xlines = lines
    return data._xlines


def _ray_side(data: IntersectionData, idx) -> str:
    xs = _x_line_hits(data).get((idx[1], idx[2]), [])
    n = len(xs) - bisect_right(xs, Fraction(idx[0]))
    return "interior" if n % 2 else "exterior"


def point_side(mesh: TorusMesh, p, direction=(1, 0, 0)) -> str:
    """Exact ray-casting parity of a point against the mesh along a ray direction."""
    d = tuple(Fraction(x) for x in direction)
    p = tuple(Fraction(x) for x in p)
    count = 0
    for t in mesh.triangles:
        a, b, c = (mesh.vertices[i] for i in t)
        e1 = [b[i] - a[i] for i in range(3)]
        e2 = [c[i] - a[i] for i in range(3)]
        hvec = (d[1] * e2[2] - d[2] * e2[1], d[2] * e2[0] - d[0] * e2[2], d[0] * e2[1] - d[1] * e2[0])
        det = sum(e1[i] * hvec[i] for i in range(3))
        if det == 0:
            continue
        s = [p[i] - a[i] for i in range(3)]
        u = sum(s[i] * hvec[i] for i in range(3)) / det
        if u < 0 or u > 1:
            continue
        qv = (s[1] * e1[2] - s[2] * e1[1], s[2] * e1[0] - s[0] * e1[2], s[0] * e1[1] - s[1] * e1[0])
        v = sum(d[i] * qv[i] for i in range(3)) / det
        if v < 0 or u + v > 1:
            continue
        tt = sum(e2[i] * qv[i] for i in range(3)) / det
        if tt < 0:
            continue
        if u == 0 or v == 0 or u + v == 1 or tt == 0:
            raise GeneralPositionError("ray meets a mesh edge")
        count += 1
    return "interior" if count % 2 else "exterior"


def intersect_lattice(mesh: TorusMesh, spacing, offset) -> IntersectionData:
    h = Fraction(spacing)
    if h <= 0:
        raise ValueError("spacing must be positive")
    o = tuple(Fraction(x) for x in offset)
    V = mesh.vertices
    lam = [_lam(p, o, h) for p in V]
    for i, l in enumerate(lam):
        for a in range(3):
            if l[a].denominator == 1:
                raise GeneralPositionError(f"mesh vertex {i} on lattice plane {'xyz'[a]}={int(l[a])}")

    carrier: dict = {V[i]: ("v", i) for i in range(len(V))}
    # plane crossings along mesh edges: (edge, axis) -> {k: point}
    cross: dict = {}
    sub_pts: dict = {}
    for e in mesh.edges():
        i, j = e
        pts = []
        for a in range(3):
            li, lj = lam[i][a], lam[j][a]
            lo, hi = (li, lj) if li < lj else (lj, li)
            ks = range(floor(lo) + 1, floor(hi) + 1)
            if not len(ks):
                continue
            d = {}
            for k in ks:
                t = (k - li) / (lj - li)
                p = _lerp(V[i], V[j], t)
                if p in carrier:
                    raise GeneralPositionError(f"mesh edge {e} meets two lattice planes at one point")
                carrier[p] = ("e", e)
                d[k] = p
                pts.append((t, p))
            cross[(e, a)] = d
        pts.sort()
        sub_pts[e] = [V[i]] + [p for _, p in pts] + [V[j]]

    # plane segments inside triangles
    segs = defaultdict(list)  # (axis, k) -> list of [p, q, triangle, hits]
    tri_segs = defaultdict(list)  # triangle -> list of segment records
    for fi, t in enumerate(mesh.triangles):
        tedges = [(min(t[0], t[1]), max(t[0], t[1])), (min(t[1], t[2]), max(t[1], t[2])), (min(t[2], t[0]), max(t[2], t[0]))]
        for a in range(3):
            byk = defaultdict(list)
            for e in tedges:
                for k, p in cross.get((e, a), {}).items():
                    byk[k].append(p)
            for k, ps in byk.items():
                if len(ps) != 2:
                    raise GeneralPositionError(f"triangle {fi} meets plane {'xyz'[a]}={k} degenerately")
                rec = [ps[0], ps[1], fi, a, k, []]
                segs[(a, k)].append(rec)
                tri_segs[fi].append(rec)

    # X^1 points: a segment in plane a crossing plane b
    hits = []
    hits_on_edge = defaultdict(list)
    for fi, recs in tri_segs.items():
        for r1 in recs:
            for r2 in recs:
                if r1[3] >= r2[3]:
                    continue
                a, k, b, l = r1[3], r1[4], r2[3], r2[4]
                A, B = r1[0], r1[1]
                la, lb = (A[b] - o[b]) / h, (B[b] - o[b]) / h
                if la == l or lb == l:
                    raise GeneralPositionError(f"lattice line meets a mesh edge in triangle {fi}")
                if (la < l) == (lb < l):
                    continue
                t1 = (l - la) / (lb - la)
                H = _lerp(A, B, t1)
                c = 3 - a - b
                lc = (H[c] - o[c]) / h
                if lc.denominator == 1:
                    raise GeneralPositionError(f"lattice vertex on the surface in triangle {fi}")
                C, D = r2[0], r2[1]
                # parameter of H along the second segment
                ax = max(range(3), key=lambda i: abs(D[i] - C[i]))
                t2 = (H[ax] - C[ax]) / (D[ax] - C[ax])
                r1[5].append((t1, H))
                r2[5].append((t2, H))
                if H in carrier:
                    raise GeneralPositionError("two lattice lines meet the surface at one point")
                carrier[H] = ("f", fi)
                anchor = [0, 0, 0]
                anchor[a], anchor[b], anchor[c] = k, l, floor(lc)
                le = edge(tuple(anchor), c, h)
                hits.append((le, H))
                hits_on_edge[le].append(H)

    # J edges, arcs per square, and stitched curves
    arcs = defaultdict(list)
    j_edges = []
    curves = []
    for (a, k), recs in sorted(segs.items()):
        adj = defaultdict(list)
        for r in recs:
            r[5].sort()
            chain = [r[0]] + [p for _, p in r[5]] + [r[1]]
            r.append(chain)
            adj[r[0]].append(r)
            adj[r[1]].append(r)
            for p, q in zip(chain, chain[1:]):
                j_edges.append((p, q))
                arcs[_square_of(p, q, a, k, o, h)].append((p, q))
        for p, rs in adj.items():
            if len(rs) != 2:
                raise GeneralPositionError(f"plane {'xyz'[a]}={k} curve has a vertex of degree {len(rs)}")
        used = set()
        for r0 in recs:
            if id(r0) in used:
                continue
            pts = []
            cur, start = r0, r0[0]
            p = start
            while True:
                used.add(id(cur))
                ch = cur[6] if cur[0] == p else cur[6][::-1]
                pts.extend(ch[:-1])
                p = ch[-1]
                if p == start:
                    break
                nxt = [r for r in adj[p] if r is not cur]
                cur = nxt[0]
            length = math.fsum(seg_length(x, y) for x, y in zip(pts, pts[1:] + pts[:1]))
            curves.append(JCurve((a, k), pts, length))

    mesh_sub_edges = []
    for e, pts in sub_pts.items():
        for p, q in zip(pts, pts[1:]):
            mesh_sub_edges.append((p, q))

    cx = RefinedComplex(h, o, hits_on_edge, arcs)
    data = IntersectionData(mesh, h, o, hits, curves, carrier, j_edges, mesh_sub_edges, cx)
    _label_faces(data)
    return data


def _square_of(p, q, a, k, o, h) -> Cell:
    m = tuple((p[i] + q[i]) / 2 for i in range(3))
    anchor = [0, 0, 0]
    anchor[a] = k
    others = tuple(i for i in range(3) if i != a)
    for i in others:
        anchor[i] = floor((m[i] - o[i]) / h)
    return square(tuple(anchor), others, h)


def _label_faces(data: IntersectionData) -> None:
    cx = data.refined
    for q, sub in cx.squares.items():
        corner_idx = {}
        a, b = q.axes
        p = q.anchor
        for dx in (0, 1):
            for dy in (0, 1):
                idx = list(p)
                idx[a] += dx
                idx[b] += dy
                corner_idx[cx.point(idx)] = tuple(idx)
        label = {}
        for fi, walks in enumerate(sub.faces):
            for v in walks[0]:
                if v in corner_idx:
                    s = data.lattice_vertex_side(corner_idx[v])
                    if label.setdefault(fi, s) != s:
                        raise AssertionError(f"inconsistent corner sides in {q!r}")
        stack = list(label)
        while stack:
            fi = stack.pop()
            for e in sub.face_boundary(fi):
                if e not in sub.arc_edges:
                    continue
                for fj, _ in sub.edge_faces[e]:
                    if fj == fi:
                        continue
                    want = "exterior" if label[fi] == "interior" else "interior"
                    if fj in label:
                        if label[fj] != want:
                            raise AssertionError(f"side labels disagree across the surface in {q!r}")
                    else:
                        label[fj] = want
                        stack.append(fj)
        if len(label) != len(sub.faces):
            raise AssertionError(f"unlabeled faces in {q!r}")
        for fi, s in label.items():
            cx.side_of_face[RefinedFace(q, fi)] = s


def surface_edges(data: IntersectionData) -> list[tuple]:
    """All edges of the refined surface 1-skeleton: mesh sub-edges and J edges."""
    return list(data.mesh_sub_edges) + list(data.j_edges)


def brute_force_totals(mesh: TorusMesh, spacing, offset) -> tuple[float, int]:
    """Independent float intersector: total plane-section length and X^1 count.

    Works triangle by triangle and plane by plane without stitching: each
    section length comes from the piecewise-linear width profile of the
    triangle along the plane normal, each X^1 point from a 2D point-in-triangle
    test of the lattice lines projected along their axis.
    """
    h = float(spacing)
    o = [float(x) for x in offset]
    P = mesh.float_vertices()
    total = 0.0
    count = 0
    for t in mesh.triangles:
        T = (P[list(t)] - o) / h
        for a in range(3):
            order = sorted(range(3), key=lambda i: T[i][a])
            p0, p1, p2 = (T[i] for i in order)
            l0, l1, l2 = p0[a], p1[a], p2[a]
            q = p0 + (p2 - p0) * ((l1 - l0) / (l2 - l0))
            wmid = math.dist(p1, q) * h
            for k in range(math.floor(l0) + 1, math.floor(l2) + 1):
                if k <= l1:
                    total += wmid * (k - l0) / (l1 - l0)
                else:
                    total += wmid * (l2 - k) / (l2 - l1)
            b, c = [i for i in range(3) if i != a]
            xs, ys = T[:, b], T[:, c]
            for ib in range(math.floor(xs.min()) + 1, math.floor(xs.max()) + 1):
                for ic in range(math.floor(ys.min()) + 1, math.floor(ys.max()) + 1):
                    d = [(xs[(i + 1) % 3] - xs[i]) * (ic - ys[i]) - (ys[(i + 1) % 3] - ys[i]) * (ib - xs[i]) for i in range(3)]
                    if all(x > 0 for x in d) or all(x < 0 for x in d):
                        count += 1
    return total, count


def intersection_report(data: IntersectionData, lab: HomologyLabeling | None = None) -> str:
    """Sectioned text dump of an intersection (floats to 15 significant digits)."""
    from ..cubical import cell_line

    out = ["intersection v1", "[lattice]", f"spacing = {data.spacing}", "offset = " + " ".join(str(x) for x in data.offset)]
    out += ["[summary]", f"x1_hits = {len(data.hits)}", f"curves = {len(data.curves)}", f"total_length = {data.total_length:.15g}"]
    out.append(f"refined_squares = {len(data.refined.squares)}")
    out.append("[curves]")
    for i, c in enumerate(data.curves):
        cls = data.path_class(c.points, lab) if lab is not None else None
        tag = f" class {cls[0]} {cls[1]}" if cls else ""
        nx = sum(1 for p in c.points if p in data.refined.hit_points)
        out.append(f"curve {i} plane {'xyz'[c.plane[0]]}={c.plane[1]} points {len(c.points)} x1 {nx} length {c.length:.15g}{tag}")
    out.append("[x1_hits]")
    for le, p in sorted(data.hits, key=lambda t: (t[0].anchor, t[0].axes, t[1])):
        out.append(f"{cell_line(le)} : " + " ".join(str(x) for x in p))
    return "\n".join(out) + "\n"
