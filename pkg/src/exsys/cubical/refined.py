"""Refinement of the lattice 2-skeleton by the curves where a surface meets it.

Refined vertices are exact rational points in space. A refined edge is the
straight segment between two of them, oriented from the lexicographically
smaller endpoint to the larger (for lattice sub-edges this is the direction
of increasing coordinate). A refined face is a region of one lattice square
cut out by the surface arcs lying in that square.
"""

from __future__ import annotations

from collections import defaultdict, deque
from fractions import Fraction
from functools import cmp_to_key
from typing import NamedTuple

from .cells import Cell, Chain, plane_orientation, shift

Point = tuple  # (Fraction, Fraction, Fraction)


class RefinedEdge(NamedTuple):
    tail: Point
    head: Point

    @property
    def dim(self) -> int:
        return 1

    def __repr__(self) -> str:
        t = ",".join(str(x) for x in self.tail)
        h = ",".join(str(x) for x in self.head)
        return f"E({t} -> {h})"


class RefinedFace(NamedTuple):
    parent: Cell
    index: int

    @property
    def dim(self) -> int:
        return 2

    def __repr__(self) -> str:
        return f"F({self.parent!r}#{self.index})"


def oriented(a: Point, b: Point) -> tuple[RefinedEdge, int]:
    """Canonical edge for the segment a->b and the sign of traversal."""
    if a == b:
        raise ValueError("degenerate edge")
    return (RefinedEdge(a, b), 1) if a < b else (RefinedEdge(b, a), -1)


def _half_plane(d):
    x, y = d
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _angle_cmp(d1, d2) -> int:
    h1, h2 = _half_plane(d1), _half_plane(d2)
    if h1 != h2:
        return -1 if h1 < h2 else 1
    cr = d1[0] * d2[1] - d1[1] * d2[0]
    if cr > 0:
        return -1
    if cr < 0:
        return 1
    raise ValueError("overlapping edges in planar subdivision")


def _signed_area2(pts) -> Fraction:
    s = Fraction(0)
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def _point_in_polygon(p, poly) -> bool:
    """Strict interior test by crossing parity; p must not lie on the polygon."""
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xi > x:
                inside = not inside
    return inside


class SquareSubdivision:
    """Planar subdivision of one lattice square by disjoint surface arcs.

    ``faces[i]`` is a list of boundary walks (outer walk first, then holes),
    each a list of refined vertices in traversal order with the face on the left.
    """

    def __init__(self, cell: Cell, corners_ccw, boundary_points, arcs, to2d):
        self.cell = cell
        self.to2d = to2d
        self.boundary_cycle = list(boundary_points)  # ccw, includes corners
        self.arc_edges: set[RefinedEdge] = set()
        adj: dict = defaultdict(list)
        verts = set(self.boundary_cycle)
        n = len(self.boundary_cycle)
        self.boundary_edges: set[RefinedEdge] = set()
        for i in range(n):
            a, b = self.boundary_cycle[i], self.boundary_cycle[(i + 1) % n]
            adj[a].append(b)
            adj[b].append(a)
            self.boundary_edges.add(oriented(a, b)[0])
        for a, b in arcs:
            verts.add(a)
            verts.add(b)
            adj[a].append(b)
            adj[b].append(a)
            self.arc_edges.add(oriented(a, b)[0])
        self.vertices = verts
        p2 = {v: to2d(v) for v in verts}
        rot = {}
        for v, nbrs in adj.items():
            pv = p2[v]
            dirs = {w: (p2[w][0] - pv[0], p2[w][1] - pv[1]) for w in nbrs}
            rot[v] = sorted(nbrs, key=cmp_to_key(lambda a, b: _angle_cmp(dirs[a], dirs[b])))
        pos = {v: {w: i for i, w in enumerate(r)} for v, r in rot.items()}

        # trace walks keeping the face on the left
        seen = set()
        walks = []
        for u in sorted(adj):
            for w in rot[u]:
                if (u, w) in seen:
                    continue
                walk = []
                a, b = u, w
                while (a, b) not in seen:
                    seen.add((a, b))
                    walk.append(a)
                    r = rot[b]
                    i = pos[b][a]
                    a, b = b, r[(i - 1) % len(r)]
                walks.append(walk)

        comp = {}
        cid = 0
        for v in sorted(adj):
            if v in comp:
                continue
            q = deque([v])
            comp[v] = cid
            while q:
                x = q.popleft()
                for y in adj[x]:
                    if y not in comp:
                        comp[y] = cid
                        q.append(y)
            cid += 1
        outer_comp = comp[self.boundary_cycle[0]]

        positive, holes = [], []
        for w in walks:
            area = _signed_area2([p2[v] for v in w])
            if area > 0:
                positive.append((area, w))
            elif area < 0:
                if comp[w[0]] == outer_comp:
                    continue  # outside of the square
                holes.append(w)
            else:
                raise ValueError("degenerate walk in planar subdivision")
        positive.sort(key=lambda t: (t[0], min(t[1])))
        faces = [[w] for _, w in positive]
        for h in holes:
            probe = p2[h[0]]
            owner = None
            for i, (_, w) in enumerate(positive):
                if comp[w[0]] == comp[h[0]]:
                    continue
                if _point_in_polygon(probe, [p2[v] for v in w]):
                    owner = i
                    break  # smallest-area container
            if owner is None:
                raise ValueError("hole without containing face")
            faces[owner].append(h)
        order = sorted(range(len(faces)), key=lambda i: min(min(w) for w in faces[i]))
        self.faces = [faces[i] for i in order]
        self.n_components = cid

        self.edge_faces: dict[RefinedEdge, list[tuple[int, int]]] = defaultdict(list)
        for fi, ws in enumerate(self.faces):
            for w in ws:
                for i in range(len(w)):
                    e, s = oriented(w[i], w[(i + 1) % len(w)])
                    self.edge_faces[e].append((fi, s))

    def face_boundary(self, fi: int) -> dict[RefinedEdge, int]:
        out: dict = {}
        for w in self.faces[fi]:
            for i in range(len(w)):
                e, s = oriented(w[i], w[(i + 1) % len(w)])
                out[e] = out.get(e, 0) + s
        return {e: s for e, s in out.items() if s}

    def euler_ok(self) -> bool:
        """V - E + sum over faces of (1 - holes) equals 1 for a disk."""
        v = len(self.vertices)
        e = len(self.boundary_edges) + len(self.arc_edges)
        f = sum(1 - (len(ws) - 1) for ws in self.faces)
        return v - e + f == 1

    def face_left_of(self, a: Point, b: Point) -> int:
        e, s = oriented(a, b)
        for fi, sign in self.edge_faces[e]:
            if sign == s:
                return fi
        raise KeyError("no face on that side")

    def faces_on_side(self, path: list[Point], left: bool) -> set[int]:
        """Faces reachable from one side of an embedded arc without crossing it."""
        cut = set()
        start = set()
        for a, b in zip(path, path[1:]):
            cut.add(oriented(a, b)[0])
            start.add(self.face_left_of(a, b) if left else self.face_left_of(b, a))
        region = set(start)
        q = deque(start)
        while q:
            fi = q.popleft()
            for e in self.face_boundary(fi):
                if e in cut:
                    continue
                for fj, _ in self.edge_faces[e]:
                    if fj not in region:
                        region.add(fj)
                        q.append(fj)
        return region

    def boundary_path(self, p: Point, q: Point, ccw: bool) -> list[Point]:
        cyc = self.boundary_cycle
        i, j = cyc.index(p), cyc.index(q)
        n = len(cyc)
        step = 1 if ccw else -1
        out = [cyc[i]]
        k = i
        while k != j:
            k = (k + step) % n
            out.append(cyc[k])
        return out


class RefinedComplex:
    """The lattice 2-skeleton refined by a set of arcs.

    Squares without arcs are implicit single faces ``RefinedFace(square, 0)``,
    and lattice edges without hit points are single refined edges, so the
    lattice can stay conceptually infinite.
    """

    def __init__(self, spacing: Fraction, offset, hits_on_edge=None, arcs_by_square=None):
        self.spacing = Fraction(spacing)
        self.offset = tuple(Fraction(o) for o in offset)
        self.hits_on_edge: dict[Cell, list[Point]] = {
            k: sorted(v) for k, v in (hits_on_edge or {}).items()
        }
        self.hit_points = {p for ps in self.hits_on_edge.values() for p in ps}
        self.squares: dict[Cell, SquareSubdivision] = {}
        self.arc_square: dict[RefinedEdge, Cell] = {}
        for q, arcs in sorted((arcs_by_square or {}).items()):
            self.squares[q] = self._subdivide(q, arcs)
            for e in self.squares[q].arc_edges:
                self.arc_square[e] = q
        self._lattice_edge_of: dict[RefinedEdge, Cell] = {}
        for le in self.hits_on_edge:
            for e in self.sub_edges(le):
                self._lattice_edge_of[e] = le
        self.side_of_face: dict[RefinedFace, str] = {}

    # coordinates
    def point(self, idx) -> Point:
        h, o = self.spacing, self.offset
        return tuple(o[i] + h * idx[i] for i in range(3))

    def lattice_coord(self, p, axis: int) -> Fraction:
        return (p[axis] - self.offset[axis]) / self.spacing

    def _cell(self, anchor, axes) -> Cell:
        return Cell(len(axes), tuple(anchor), tuple(axes), self.spacing)

    def sub_edges(self, le: Cell) -> list[RefinedEdge]:
        a = le.axes[0]
        p0 = self.point(le.anchor)
        p1 = self.point(shift(le.anchor, a))
        pts = [p0] + self.hits_on_edge.get(le, []) + [p1]
        return [RefinedEdge(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]

    def square_corners(self, q: Cell) -> list[Point]:
        a, b = plane_orientation(q.axes)
        p = q.anchor
        return [
            self.point(p),
            self.point(shift(p, a)),
            self.point(shift(shift(p, a), b)),
            self.point(shift(p, b)),
        ]

    def square_boundary_cycle(self, q: Cell) -> list[Point]:
        a, b = plane_orientation(q.axes)
        p = q.anchor
        sides = [
            (self._cell(p, (a,)), 1),
            (self._cell(shift(p, a), (b,)), 1),
            (self._cell(shift(p, b), (a,)), -1),
            (self._cell(p, (b,)), -1),
        ]
        cyc = []
        for le, s in sides:
            pts = [e.tail for e in self.sub_edges(le)] + [self.sub_edges(le)[-1].head]
            if s < 0:
                pts = pts[::-1]
            cyc.extend(pts[:-1])
        return cyc

    def _to2d(self, q: Cell):
        a, b = plane_orientation(q.axes)
        return lambda v: (v[a], v[b])

    def _subdivide(self, q: Cell, arcs) -> SquareSubdivision:
        return SquareSubdivision(q, self.square_corners(q), self.square_boundary_cycle(q), arcs, self._to2d(q))

    # cells
    def faces_of(self, q: Cell) -> list[RefinedFace]:
        sub = self.squares.get(q)
        n = len(sub.faces) if sub else 1
        return [RefinedFace(q, i) for i in range(n)]

    def face_boundary(self, f: RefinedFace) -> dict[RefinedEdge, int]:
        sub = self.squares.get(f.parent)
        if sub is not None:
            return sub.face_boundary(f.index)
        if f.index != 0:
            raise KeyError(f"unknown face {f!r}")
        out = {}
        corners = self.square_corners(f.parent)
        for i in range(4):
            e, s = oriented(corners[i], corners[(i + 1) % 4])
            out[e] = s
        return out

    def boundary(self, c: Chain) -> Chain:
        if c.dim != 2:
            raise ValueError("refined boundary implemented for 2-chains")
        acc: dict = {}
        for f, k in c.items():
            for e, s in self.face_boundary(f).items():
                acc[e] = acc.get(e, 0) + s * k
        return Chain(1, acc)

    def lattice_edge_of(self, e: RefinedEdge) -> Cell | None:
        """Lattice edge containing a refined edge, or None for arc edges."""
        if e in self._lattice_edge_of:
            return self._lattice_edge_of[e]
        if e in self.arc_square:
            return None
        d = [i for i in range(3) if e.tail[i] != e.head[i]]
        if len(d) != 1:
            return None
        a = d[0]
        idx = [self.lattice_coord(e.tail, i) for i in range(3)]
        if any(idx[i].denominator != 1 for i in range(3) if i != a):
            return None
        lo = idx[a]
        if lo.denominator != 1 or self.lattice_coord(e.head, a) != lo + 1:
            return None
        return self._cell(tuple(int(x) for x in idx), (a,))

    def is_x1_vertex(self, p: Point) -> bool:
        if p in self.hit_points:
            return True
        return all(self.lattice_coord(p, i).denominator == 1 for i in range(3))

    def squares_of_lattice_edge(self, le: Cell) -> list[Cell]:
        a = le.axes[0]
        out = []
        for b in range(3):
            if b == a:
                continue
            out.append(self._cell(le.anchor, tuple(sorted((a, b)))))
            out.append(self._cell(shift(le.anchor, b, -1), tuple(sorted((a, b)))))
        return out

    def incidence_count(self, e: RefinedEdge, mesh_faces: int = 0) -> int:
        """Number of refined 2-cells whose boundary contains ``e`` with nonzero coefficient.

        ``mesh_faces`` adds the count of incident surface cells for edges lying on
        the surface (callers pass 2 for arc edges when counting the surface too).
        """
        if e in self.arc_square:
            sub = self.squares[self.arc_square[e]]
            return len({fi for fi, _ in sub.edge_faces[e]}) + mesh_faces
        le = self.lattice_edge_of(e)
        if le is None:
            raise KeyError(f"unknown edge {e!r}")
        if e not in self.sub_edges(le):
            raise KeyError(f"unknown edge {e!r}")
        n = 0
        for q in self.squares_of_lattice_edge(le):
            for f in self.faces_of(q):
                if self.face_boundary(f).get(e, 0):
                    n += 1
        return n

    def max_incidence(self) -> int:
        """Largest number of refined 2-cells on any edge of a subdivided square."""
        squares = set(self.squares)
        for q in self.squares:
            a, b = q.axes
            p = q.anchor
            for le in (self._cell(p, (a,)), self._cell(p, (b,)), self._cell(shift(p, b), (a,)), self._cell(shift(p, a), (b,))):
                squares.update(self.squares_of_lattice_edge(le))
        count: dict = defaultdict(int)
        for q in squares:
            for f in self.faces_of(q):
                for e in self.face_boundary(f):
                    count[e] += 1
        best = 0
        for sub in self.squares.values():
            for e in sub.arc_edges | sub.boundary_edges:
                best = max(best, count[e])
        return best

    def pushforward(self, c: Chain) -> Chain:
        """Inclusion of lattice chains (dim 1 or 2) into the refinement."""
        acc: dict = {}
        for cell, k in c.items():
            if c.dim == 2:
                for f in self.faces_of(cell):
                    acc[f] = acc.get(f, 0) + k
            elif c.dim == 1:
                for e in self.sub_edges(cell):
                    acc[e] = acc.get(e, 0) + k
            else:
                raise ValueError("pushforward defined for dimensions 1 and 2")
        return Chain(c.dim, acc)

    def collapse_to_lattice(self, c: Chain) -> Chain:
        """Inverse of the 1-dimensional pushforward on chains supported on X^1."""
        per: dict[Cell, dict] = defaultdict(dict)
        for e, k in c.items():
            le = self.lattice_edge_of(e)
            if le is None:
                raise ValueError(f"edge {e!r} is not on the lattice 1-skeleton")
            per[le][e] = k
        out = {}
        for le, d in per.items():
            subs = self.sub_edges(le)
            vals = {d.get(e, 0) for e in subs}
            if len(vals) != 1:
                raise ValueError(f"chain is not a pushforward on {le!r}")
            out[le] = vals.pop()
        return Chain(1, out)

    def cell_label(self, e) -> str:
        """Serialization label ``parent_line #id`` for refined cells."""
        from .io import cell_line

        if isinstance(e, RefinedFace):
            return f"{cell_line(e.parent)} #{e.index}"
        le = self.lattice_edge_of(e)
        if le is not None:
            return f"{cell_line(le)} #{self.sub_edges(le).index(e)}"
        q = self.arc_square[e]
        return f"{cell_line(q)} #a{sorted(self.squares[q].arc_edges).index(e)}"
