"""Integer first homology of a marked torus mesh via a tree-cotree decomposition.

Each undirected mesh edge (a, b) with a < b gets a signature in Z^2 such that
the class of any closed edge loop is the sum of the signatures of its edges
(negated when traversed from b to a). Signatures are expressed in the basis
of the two marked loops e1, e2 and converted to (u, v) coordinates on request.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass


from .mesh import MeshError, TorusMesh


def _inv2(m) -> tuple:
    (a, b), (c, d) = m
    det = a * d - b * c
    if abs(det) != 1:
        raise MeshError(f"matrix {m} is not unimodular (det {det})")
    return ((d * det, -b * det), (-c * det, a * det))


def _apply(m, x) -> tuple[int, int]:
    return (m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1])


@dataclass
class HomologyLabeling:
    mesh: TorusMesh
    tree: set  # primal spanning tree edges
    cotree: set  # edges dual to the face spanning tree
    generators: list  # the two leftover edges
    sig: dict  # edge (a<b) -> class in e-basis
    to_uv: tuple  # 2x2 integer matrix, e-coords -> (u, v) coords

    @classmethod
    def build(cls, mesh: TorusMesh) -> "HomologyLabeling":
        edges = mesh.edges()
        adj = mesh.adjacency()
        tree = set()
        seen = {0}
        q = deque([0])
        while q:
            x = q.popleft()
            for y in sorted(adj[x]):
                if y not in seen:
                    seen.add(y)
                    tree.add((min(x, y), max(x, y)))
                    q.append(y)

        faces_of = {}
        for fi, t in enumerate(mesh.triangles):
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                faces_of.setdefault((min(a, b), max(a, b)), []).append(fi)
        parent_edge = {0: None}
        order = [0]
        q = deque([0])
        cotree = set()
        while q:
            f = q.popleft()
            t = mesh.triangles[f]
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                e = (min(a, b), max(a, b))
                if e in tree:
                    continue
                for g in faces_of[e]:
                    if g not in parent_edge:
                        parent_edge[g] = e
                        cotree.add(e)
                        order.append(g)
                        q.append(g)
        gens = [e for e in edges if e not in tree and e not in cotree]
        if len(gens) != 2:
            raise MeshError(f"expected 2 generator edges, found {len(gens)}")

        # two cocycles: zero on the tree, dual to the generators, closed on faces
        psi = {e: (0, 0) for e in tree}
        psi[gens[0]] = (1, 0)
        psi[gens[1]] = (0, 1)
        for f in reversed(order[1:]):
            t = mesh.triangles[f]
            pe = parent_edge[f]
            acc = [0, 0]
            sign_pe = 0
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                e = (min(a, b), max(a, b))
                s = 1 if a < b else -1
                if e == pe:
                    sign_pe = s
                    continue
                val = psi[e]
                acc[0] += s * val[0]
                acc[1] += s * val[1]
            psi[pe] = (-sign_pe * acc[0], -sign_pe * acc[1])
        t0 = mesh.triangles[0]
        closure = [0, 0]
        for a, b in ((t0[0], t0[1]), (t0[1], t0[2]), (t0[2], t0[0])):
            s = 1 if a < b else -1
            val = psi[(min(a, b), max(a, b))]
            closure[0] += s * val[0]
            closure[1] += s * val[1]
        if closure != [0, 0]:
            raise MeshError("cocycle fails to close; mesh is not a torus")

        def raw(loop):
            x = [0, 0]
            for a, b in zip(loop, loop[1:] + loop[:1]):
                s = 1 if a < b else -1
                val = psi[(min(a, b), max(a, b))]
                x[0] += s * val[0]
                x[1] += s * val[1]
            return x

        c1, c2 = raw(list(mesh.basis[0])), raw(list(mesh.basis[1]))
        M = ((c1[0], c2[0]), (c1[1], c2[1]))
        try:
            Minv = _inv2(M)
        except MeshError:
            raise MeshError("basis loops e1, e2 do not generate first homology") from None
        sig = {e: _apply(Minv, psi[e]) for e in edges}
        P = ((mesh.class_u[0], mesh.class_v[0]), (mesh.class_u[1], mesh.class_v[1]))
        return cls(mesh, tree, cotree, gens, sig, _inv2(P))

    def edge_class(self, a: int, b: int) -> tuple[int, int]:
        """Signature of the directed edge a -> b in e-coordinates."""
        if a < b:
            return self.sig[(a, b)]
        x = self.sig[(b, a)]
        return (-x[0], -x[1])

    def loop_class_e(self, loop) -> tuple[int, int]:
        loop = list(loop)
        if len(loop) > 1 and loop[0] == loop[-1]:
            loop = loop[:-1]
        x, y = 0, 0
        for a, b in zip(loop, loop[1:] + loop[:1]):
            if a == b:
                continue
            if (min(a, b), max(a, b)) not in self.sig:
                raise MeshError(f"({a},{b}) is not a mesh edge")
            s = self.edge_class(a, b)
            x += s[0]
            y += s[1]
        return (x, y)

    def e_to_uv(self, x) -> tuple[int, int]:
        return _apply(self.to_uv, x)

    def uv_to_e(self, x) -> tuple[int, int]:
        return _apply(_inv2(self.to_uv), x)


def loop_class(loop, lab: HomologyLabeling) -> tuple[int, int]:
    """Class in (u, v) coordinates of a closed loop given as a vertex cycle."""
    return lab.e_to_uv(lab.loop_class_e(loop))


def edge_signatures_uv(lab: HomologyLabeling) -> dict:
    return {e: lab.e_to_uv(s) for e, s in lab.sig.items()}


class SystoleSearchError(RuntimeError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


def systole_in_class(mesh: TorusMesh, cls, lab: HomologyLabeling | None = None, max_nodes: int = 4_000_000):
    """Shortest closed edge path of the given (u, v) class.

    A loop of class c through vertex s lifts to a path from (s, 0) to (s, c)
    in the Z^2 cover. With D the distance from (s, 0), translation invariance
    gives the distance from (s, c) to (v, l) as D(v, l - c), so a loop is
    D(x) + w + D(y - c) over cover edges x -> y, and the shortest one is found
    once every node within half the best length is settled. Every loop of
    class c meets a marked basis loop whose class pairs nontrivially with c,
    so one search per vertex of that loop is exact for the edge graph.
    Returns (length, vertex cycle).
    """
    lab = lab or HomologyLabeling.build(mesh)
    c = lab.uv_to_e(tuple(cls))
    if c == (0, 0):
        raise ValueError("class must be nonzero")
    cands = []
    if c[1] != 0:
        cands.append(list(mesh.basis[0]))
    if c[0] != 0:
        cands.append(list(mesh.basis[1]))
    starts = sorted(set(min(cands, key=len)))

    adj: dict = {v: [] for v in range(len(mesh.vertices))}
    for a, b in mesh.edges():
        w = mesh.edge_length(a, b)
        sx, sy = lab.sig[(a, b)]
        adj[a].append((b, w, sx, sy))
        adj[b].append((a, w, -sx, -sy))

    best = None  # (length, start, pred map, x, y', sign)
    seen = 0
    for s in starts:
        src = (s, 0, 0)
        dist = {src: 0.0}
        pred: dict = {}
        heap = [(0.0, src)]
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist[node]:
                continue
            half = math.inf if best is None else best[0] / 2
            if d > half:
                break
            v, x, y = node
            for u, w, dx, dy in adj[v]:
                nd = d + w
                nx, ny = x + dx, y + dy
                # close up through the translate of an already reached node
                for sign in (1, -1):
                    far = (u, nx - sign * c[0], ny - sign * c[1])
                    other = dist.get(far)
                    if other is not None and (best is None or nd + other < best[0] - 1e-12):
                        best = (nd + other, s, pred, node, far, sign)
                nxt = (u, nx, ny)
                if nd <= half and nd < dist.get(nxt, math.inf):
                    dist[nxt] = nd
                    pred[nxt] = node
                    heapq.heappush(heap, (nd, nxt))
        seen += len(dist)
        if seen > max_nodes:
            raise SystoleSearchError("search budget exhausted", best[0] if best else None)
    if best is None:
        raise SystoleSearchError("no loop of the requested class")
    length, s, pred, a, b, sign = best

    def back(t):
        out = [t[0]]
        while t != (s, 0, 0):
            t = pred[t]
            out.append(t[0])
        return out

    loop = back(a)[::-1] + back(b)[:-1]  # s ... x, y ... (not repeating s)
    if sign < 0:
        loop = loop[:1] + loop[:0:-1]
    return length, loop
