"""Triangulated tori in space with exact rational vertices and homology markings."""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

Point = tuple


class MeshError(ValueError):
    pass


def rational(x, bits: int = 30) -> Fraction:
    """Dyadic rational nearest to a float (exact for Fractions and ints)."""
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return Fraction(round(float(x) * (1 << bits)), 1 << bits)


def parse_number(s: str) -> Fraction:
    return Fraction(s)


@dataclass
class TorusMesh:
    vertices: list  # of Fraction triples
    triangles: list  # of (i, j, k), consistently oriented
    basis: tuple  # (e1, e2) as closed vertex cycles (first vertex not repeated)
    class_u: tuple = (1, 0)
    class_v: tuple = (0, 1)
    side_u: str | None = None  # "interior" | "exterior" once known
    cores: dict = field(default_factory=dict)  # side -> closed polyline
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = [tuple(Fraction(c) for c in v) for v in self.vertices]
        self.triangles = [tuple(int(i) for i in t) for t in self.triangles]
        self.basis = tuple(tuple(int(i) for i in b) for b in self.basis)
        self.class_u = tuple(int(x) for x in self.class_u)
        self.class_v = tuple(int(x) for x in self.class_v)
        self._edges = None
        self._fv = None

    # combinatorics
    def edges(self) -> list[tuple[int, int]]:
        if self._edges is None:
            s = set()
            for t in self.triangles:
                for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                    s.add((min(a, b), max(a, b)))
            self._edges = sorted(s)
        return self._edges

    def float_vertices(self) -> np.ndarray:
        if self._fv is None:
            self._fv = np.array([[float(c) for c in v] for v in self.vertices])
        return self._fv

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges()) + len(self.triangles)

    def validate(self) -> None:
        """Closed, oriented, connected, genus one, markings well formed."""
        nv = len(self.vertices)
        directed = defaultdict(int)
        for t in self.triangles:
            if len(set(t)) != 3 or min(t) < 0 or max(t) >= nv:
                raise MeshError(f"bad triangle {t}")
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                directed[(a, b)] += 1
        for (a, b), k in directed.items():
            if k != 1 or directed.get((b, a), 0) != 1:
                raise MeshError(f"edge ({a},{b}) is not shared by exactly two consistently oriented triangles")
        # each vertex link must be a single cycle
        link = defaultdict(dict)
        for t in self.triangles:
            for a, b, c in ((t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[2], t[0], t[1])):
                link[a][b] = c
        for v in range(nv):
            nxt = link.get(v)
            if not nxt:
                raise MeshError(f"isolated vertex {v}")
            start = next(iter(nxt))
            cur, n = start, 0
            while True:
                cur = nxt[cur]
                n += 1
                if cur == start or n > len(nxt):
                    break
            if cur != start or n != len(nxt):
                raise MeshError(f"vertex {v} is not a manifold point")
        adj = self.adjacency()
        seen = {0}
        q = deque([0])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        if len(seen) != nv:
            raise MeshError("mesh is not connected")
        if self.euler_characteristic() != 0:
            raise MeshError(f"Euler characteristic {self.euler_characteristic()} is not 0")
        es = set(self.edges())
        for name, loop in zip(("e1", "e2"), self.basis):
            if len(loop) < 3:
                raise MeshError(f"basis loop {name} too short")
            for a, b in zip(loop, loop[1:] + loop[:1]):
                if (min(a, b), max(a, b)) not in es:
                    raise MeshError(f"basis loop {name} uses non-edge ({a},{b})")
        det = self.class_u[0] * self.class_v[1] - self.class_u[1] * self.class_v[0]
        if abs(det) != 1:
            raise MeshError(f"classes u, v do not form a basis (det {det})")
        for t in self.triangles:
            if self._area2_exact(t) == 0:
                raise MeshError(f"degenerate triangle {t}")

    def adjacency(self) -> dict[int, list[int]]:
        adj = defaultdict(list)
        for a, b in self.edges():
            adj[a].append(b)
            adj[b].append(a)
        return adj

    # geometry
    def _area2_exact(self, t) -> Fraction:
        p, q, r = (self.vertices[i] for i in t)
        u = [q[i] - p[i] for i in range(3)]
        w = [r[i] - p[i] for i in range(3)]
        c = (u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0])
        return c[0] ** 2 + c[1] ** 2 + c[2] ** 2

    def area(self) -> float:
        """Sum of triangle areas (each a square root of an exact rational)."""
        total = math.fsum(math.sqrt(_frac_to_float(self._area2_exact(t))) / 2 for t in self.triangles)
        if total <= 0:
            raise MeshError("zero area")
        return total

    def edge_length(self, a: int, b: int) -> float:
        p, q = self.vertices[a], self.vertices[b]
        return math.sqrt(_frac_to_float(sum((p[i] - q[i]) ** 2 for i in range(3))))

    def granularity(self) -> float:
        """Longest edge divided by the square root of the area."""
        return max(self.edge_length(a, b) for a, b in self.edges()) / math.sqrt(self.area())

    def loop_length(self, loop) -> float:
        loop = list(loop)
        return math.fsum(self.edge_length(a, b) for a, b in zip(loop, loop[1:] + loop[:1]))

    def scaled(self, k) -> "TorusMesh":
        k = Fraction(k)
        return TorusMesh(
            [tuple(c * k for c in v) for v in self.vertices],
            list(self.triangles),
            self.basis,
            self.class_u,
            self.class_v,
            self.side_u,
            {s: [tuple(c * k for c in p) for p in pl] for s, pl in self.cores.items()},
            dict(self.meta, scale=str(k * Fraction(self.meta.get("scale", 1)))),
        )

    def translated(self, d) -> "TorusMesh":
        d = tuple(Fraction(x) for x in d)
        move = lambda p: tuple(p[i] + d[i] for i in range(3))  # noqa: E731
        return TorusMesh(
            [move(v) for v in self.vertices],
            list(self.triangles),
            self.basis,
            self.class_u,
            self.class_v,
            self.side_u,
            {s: [move(p) for p in pl] for s, pl in self.cores.items()},
            dict(self.meta),
        )

    # text format
    def dumps(self) -> str:
        out = ["torus-mesh v1"]
        for k in sorted(self.meta):
            out.append(f"# {k} = {self.meta[k]}")
        for v in self.vertices:
            out.append("v " + " ".join(str(c) for c in v))
        for t in self.triangles:
            out.append(f"f {t[0]} {t[1]} {t[2]}")
        for name, loop in zip(("e1", "e2"), self.basis):
            out.append(f"basis {name}: " + " ".join(str(i) for i in loop))
        out.append(f"class u: {self.class_u[0]} {self.class_u[1]}")
        out.append(f"class v: {self.class_v[0]} {self.class_v[1]}")
        if self.side_u:
            out.append(f"side u: {self.side_u}")
        for side in sorted(self.cores):
            pts = " ; ".join(" ".join(str(c) for c in p) for p in self.cores[side])
            out.append(f"core {side}: {pts}")
        return "\n".join(out) + "\n"

    @classmethod
    def loads(cls, text: str) -> "TorusMesh":
        lines = text.splitlines()
        if not lines or lines[0].strip() != "torus-mesh v1":
            raise MeshError("missing 'torus-mesh v1' header")
        verts, tris, basis, meta, cores = [], [], {}, {}, {}
        cu = cv = None
        side_u = None
        for no, raw in enumerate(lines[1:], start=2):
            line = raw.strip()
            if not line:
                continue
            try:
                if line.startswith("#"):
                    k, _, v = line[1:].partition("=")
                    meta[k.strip()] = v.strip()
                elif line.startswith("v "):
                    f = line.split()[1:]
                    if len(f) != 3:
                        raise ValueError("vertex needs three coordinates")
                    verts.append(tuple(parse_number(x) for x in f))
                elif line.startswith("f "):
                    f = line.split()[1:]
                    if len(f) != 3:
                        raise ValueError("face needs three indices")
                    tris.append(tuple(int(x) for x in f))
                elif line.startswith("basis "):
                    head, _, rest = line[6:].partition(":")
                    basis[head.strip()] = [int(x) for x in rest.split()]
                elif line.startswith("class "):
                    head, _, rest = line[6:].partition(":")
                    a, b = (int(x) for x in rest.split())
                    if head.strip() == "u":
                        cu = (a, b)
                    elif head.strip() == "v":
                        cv = (a, b)
                    else:
                        raise ValueError(f"unknown class {head!r}")
                elif line.startswith("side u:"):
                    side_u = line.split(":", 1)[1].strip()
                    if side_u not in ("interior", "exterior"):
                        raise ValueError("side must be interior or exterior")
                elif line.startswith("core "):
                    head, _, rest = line[5:].partition(":")
                    pts = [tuple(parse_number(x) for x in p.split()) for p in rest.split(";")]
                    cores[head.strip()] = pts
                else:
                    raise ValueError(f"unrecognized line {line!r}")
            except ValueError as e:
                raise MeshError(f"line {no}: {e}") from None
        if "e1" not in basis or "e2" not in basis:
            raise MeshError("basis loops e1 and e2 are required")
        if cu is None or cv is None:
            raise MeshError("class u and class v are required")
        return cls(verts, tris, (basis["e1"], basis["e2"]), cu, cv, side_u, cores, meta)


def _frac_to_float(x: Fraction) -> float:
    return x.numerator / x.denominator


def read_mesh(path) -> TorusMesh:
    with open(path) as fh:
        return TorusMesh.loads(fh.read())


def write_mesh(mesh: TorusMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write(mesh.dumps())
