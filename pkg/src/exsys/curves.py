"""Curves on 1-skeleta and their associated cellular 1-chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

from .cubical import Cell, Chain, RefinedEdge, edge, edge_endpoints, oriented

LETTERS = {"X": (0, 1), "x": (0, -1), "Y": (1, 1), "y": (1, -1), "Z": (2, 1), "z": (2, -1)}
_LETTER_OF = {v: k for k, v in LETTERS.items()}

Letter = tuple  # (axis, +1 | -1)


def endpoints(cell) -> tuple:
    """(tail, head) of an oriented 1-cell, lattice or refined."""
    if isinstance(cell, Cell):
        return edge_endpoints(cell)
    if isinstance(cell, RefinedEdge):
        return cell.tail, cell.head
    return cell.tail, cell.head


@dataclass(frozen=True)
class SkeletonPath:
    """Edge path on a 1-skeleton; ``edges[i]`` joins ``vertices[i]`` to ``vertices[i+1]``."""

    vertices: tuple
    edges: tuple  # of (cell, sign)
    closed: bool = False

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) + 1:
            raise ValueError("need one more vertex than edges")
        for i, (cell, s) in enumerate(self.edges):
            t, h = endpoints(cell)
            a, b = (t, h) if s > 0 else (h, t)
            if a != self.vertices[i] or b != self.vertices[i + 1]:
                raise ValueError(f"edge {i} does not join consecutive vertices")
        if self.closed and self.vertices[0] != self.vertices[-1]:
            raise ValueError("closed path must end where it starts")

    @classmethod
    def through(cls, points: Sequence, closed: bool = True) -> "SkeletonPath":
        """Path of refined edges through a list of points (closing it if asked)."""
        pts = list(points)
        if closed and pts[0] != pts[-1]:
            pts.append(pts[0])
        return cls(tuple(pts), tuple(oriented(a, b) for a, b in zip(pts, pts[1:])), closed)

    def __len__(self) -> int:
        return len(self.edges)

    def reversed(self) -> "SkeletonPath":
        return SkeletonPath(
            tuple(reversed(self.vertices)),
            tuple((c, -s) for c, s in reversed(self.edges)),
            self.closed,
        )

    def concat(self, other: "SkeletonPath") -> "SkeletonPath":
        if self.vertices[-1] != other.vertices[0]:
            raise ValueError("paths do not meet")
        v = self.vertices + other.vertices[1:]
        return SkeletonPath(v, self.edges + other.edges, len(v) > 1 and v[0] == v[-1])

    def split(self, k: int) -> tuple["SkeletonPath", "SkeletonPath"]:
        return (
            SkeletonPath(self.vertices[: k + 1], self.edges[:k]),
            SkeletonPath(self.vertices[k:], self.edges[k:]),
        )

    def is_embedded(self) -> bool:
        vs = self.vertices[:-1] if self.closed else self.vertices
        return len(set(vs)) == len(vs)


@dataclass(frozen=True)
class LatticeLoop:
    """Closed lattice edge path given by a base vertex and a word in six letters."""

    base: tuple[int, int, int]
    word: tuple  # of (axis, sign)
    spacing: Fraction = field(default=Fraction(1))

    def __post_init__(self):
        d = displacement(self.word)
        if d != (0, 0, 0):
            raise ValueError(f"open path: displacement {d}")

    @classmethod
    def parse(cls, text: str, spacing=Fraction(1)) -> "LatticeLoop":
        head, _, w = text.partition(":")
        base = tuple(int(x) for x in head.split())
        return cls(base, tuple(LETTERS[ch] for ch in w.strip()), Fraction(spacing))

    def dump(self) -> str:
        return f"{self.base[0]} {self.base[1]} {self.base[2]} : {word_string(self.word)}"

    def points(self) -> list[tuple[int, int, int]]:
        return walk_points(self.base, self.word)

    def path(self) -> SkeletonPath:
        pts = self.points()
        edges = []
        for (a, s), p in zip(self.word, pts):
            q = pts[len(edges) + 1]
            e = edge(p if s > 0 else q, a, self.spacing)
            edges.append((e, s))
        return SkeletonPath(tuple(pts), tuple(edges), True)

    def __len__(self) -> int:
        return len(self.word)


def word_string(word) -> str:
    return "".join(_LETTER_OF[tuple(l)] for l in word)


def displacement(word) -> tuple[int, int, int]:
    d = [0, 0, 0]
    for a, s in word:
        d[a] += s
    return tuple(d)


def walk_points(base, word) -> list:
    pts = [tuple(base)]
    for a, s in word:
        p = list(pts[-1])
        p[a] += s
        pts.append(tuple(p))
    return pts


def winding_coefficient(path: SkeletonPath, cell, known: Callable[[object], bool] | None = None) -> int:
    """Net signed number of traversals of ``cell`` by ``path``.

    For a closed path this is the degree of the path composed with the map
    collapsing everything but ``cell`` to a point.
    """
    if known is not None and not known(cell):
        raise KeyError(f"edge {cell!r} not in the complex")
    return sum(s for c, s in path.edges if c == cell)


def ch(path: SkeletonPath) -> Chain:
    acc: dict = {}
    for c, s in path.edges:
        acc[c] = acc.get(c, 0) + s
    return Chain(1, acc)


def chain_boundary_1(c: Chain) -> dict:
    """Boundary of a 1-chain as a vertex -> coefficient map (works for any edge keys)."""
    acc: dict = {}
    for cell, k in c.items():
        t, h = endpoints(cell)
        acc[h] = acc.get(h, 0) + k
        acc[t] = acc.get(t, 0) - k
    return {v: k for v, k in acc.items() if k}


def _normalize_loop(vs: list, es: list) -> tuple[list, list]:
    # rotate so the smallest vertex comes first
    i = min(range(len(vs)), key=lambda j: vs[j])
    return vs[i:] + vs[:i], es[i:] + es[:i]


def decompose_cycle(a: Chain, key: Callable[[Hashable], object] | None = None) -> list[SkeletonPath]:
    """Split a 1-cycle into embedded closed paths with no cancellation between pieces.

    Repeatedly walks along edges whose traversal direction agrees with the sign
    of their coefficient until a vertex repeats, peels off the loop so formed
    and continues on the remainder.
    """
    if a.dim != 1:
        raise ValueError("decompose_cycle needs a 1-chain")
    if chain_boundary_1(a):
        raise ValueError("not a cycle")
    key = key or (lambda c: c)
    rem = dict(a.items())
    out_at: dict = {}
    for cell, k in rem.items():
        t, h = endpoints(cell)
        src = t if k > 0 else h
        out_at.setdefault(src, set()).add(cell)

    def step(cell):
        t, h = endpoints(cell)
        return (t, h, 1) if rem[cell] > 0 else (h, t, -1)

    pieces = []
    while rem:
        first = min(rem, key=key)
        a0, b0, s0 = step(first)
        verts, edges = [a0, b0], [(first, s0)]
        seen = {a0: 0, b0: 1}
        while True:
            cur = verts[-1]
            cand = out_at.get(cur)
            if not cand:
                raise ValueError("not a cycle")
            nxt = min(cand, key=key)
            _, v, s = step(nxt)
            edges.append((nxt, s))
            verts.append(v)
            if v in seen:
                j = seen[v]
                loop_v, loop_e = verts[j:-1], edges[j:]
                break
            seen[v] = len(verts) - 1
        for cell, s in loop_e:
            t, h = endpoints(cell)
            src = t if rem[cell] > 0 else h
            rem[cell] -= s
            if rem[cell] == 0:
                del rem[cell]
                out_at[src].discard(cell)
                if not out_at[src]:
                    del out_at[src]
        lv, le = _normalize_loop(list(loop_v), list(loop_e))
        pieces.append(SkeletonPath(tuple(lv + [lv[0]]), tuple(le), True))
    return pieces


def pushforward_check(path: SkeletonPath, subdivide: Callable[[object], list] | None = None) -> bool:
    """Naturality of ch under a cellular map given as an edge -> refined-edge-path map.

    ``subdivide(cell)`` returns the list of (refined edge, sign) traversed when
    the map is applied to ``cell`` in its positive direction. The identity map
    is used when ``subdivide`` is None.
    """
    if subdivide is None:
        return True
    mapped_edges = []
    for cell, s in path.edges:
        seq = list(subdivide(cell))
        if s < 0:
            seq = [(e, -t) for e, t in reversed(seq)]
        mapped_edges.extend(seq)
    lhs: dict = {}
    for cell, k in ch(path).items():
        for e, t in subdivide(cell):
            lhs[e] = lhs.get(e, 0) + k * t
    rhs: dict = {}
    for e, t in mapped_edges:
        rhs[e] = rhs.get(e, 0) + t
    return Chain(1, lhs) == Chain(1, rhs)
