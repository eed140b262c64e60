"""Certificates for the cube-or-short-curve dichotomy, and their standalone check.

Verification deliberately avoids the construction code: it re-intersects the
mesh, rebuilds boundaries face by face, relabels classes with the other choice
of carrier vertices, and re-measures lengths with interval arithmetic.
"""

from __future__ import annotations

import decimal
import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from ..cubical import Chain, dump_chain, load_chain, oriented
from ..surface import HomologyLabeling, TorusMesh
from ..surface.intersect import intersect_lattice, surface_edges

KINDS = ("v-in-cube", "short-u")


class VerificationError(AssertionError):
    pass


def mesh_digest(mesh: TorusMesh) -> str:
    return hashlib.sha256(mesh.dumps().encode()).hexdigest()


def _sq(p, q) -> Fraction:
    return sum((p[i] - q[i]) ** 2 for i in range(3))


def length_interval(segments, prec: int = 50) -> tuple[decimal.Decimal, decimal.Decimal]:
    """Enclosure [lo, hi] of the total Euclidean length of exact segments."""
    lo = hi = decimal.Decimal(0)
    down = decimal.Context(prec=prec, rounding=decimal.ROUND_FLOOR)
    up = decimal.Context(prec=prec, rounding=decimal.ROUND_CEILING)
    for p, q in segments:
        s = _sq(p, q)
        n, d = decimal.Decimal(s.numerator), decimal.Decimal(s.denominator)
        # Decimal sqrt always rounds half-even, so widen by one ulp each way
        lo = down.add(lo, down.next_minus(down.sqrt(down.divide(n, d))))
        hi = up.add(hi, up.next_plus(up.sqrt(up.divide(n, d))))
    return lo, hi


def closed_segments(points):
    pts = list(points)
    if pts[0] == pts[-1]:
        pts = pts[:-1]
    return list(zip(pts, pts[1:] + pts[:1]))


@dataclass
class Certificate:
    kind: str
    mesh_sha256: str
    spacing: Fraction
    offset: tuple
    seed: int | None = None
    m: float | None = None
    # v-in-cube
    cube: tuple | None = None
    loop: list = field(default_factory=list)
    loop_class: tuple | None = None
    diameter: float | None = None
    # short-u
    omega: list = field(default_factory=list)
    omega_class: tuple | None = None
    fill: Chain | None = None
    fill_u: Chain | None = None
    pieces: list = field(default_factory=list)  # closed point lists
    piece_classes: list = field(default_factory=list)
    sub: list = field(default_factory=list)  # piece indices forming a (+-1, 0) loop
    gamma_class: tuple | None = None
    gamma_length: float | None = None
    n_hits: int | None = None
    j_length: float | None = None
    threshold: float | None = None
    fill_multiplicity: int | None = None
    fill_bound: int | None = None
    config: str | None = None

    # text format
    def dumps(self, cx=None) -> str:
        out = ["certificate v1", f"kind = {self.kind}", f"mesh_sha256 = {self.mesh_sha256}"]
        out.append(f"spacing = {self.spacing}")
        out.append("offset = " + " ".join(str(x) for x in self.offset))
        if self.seed is not None:
            out.append(f"seed = {self.seed}")
        if self.m is not None:
            out.append(f"m = {self.m:.15g}")
        if self.config:
            out.append(f"config = {self.config}")
        if self.kind == "v-in-cube":
            out.append("cube = " + " ".join(str(x) for x in self.cube))
            out.append(f"loop_class = {self.loop_class[0]} {self.loop_class[1]}")
            out.append(f"diameter = {self.diameter:.15g}")
            out.append("[loop]")
            out.extend(_pt(p) for p in self.loop)
        else:
            out.append(f"omega_class = {self.omega_class[0]} {self.omega_class[1]}")
            out.append(f"gamma_class = {self.gamma_class[0]} {self.gamma_class[1]}")
            out.append(f"gamma_length = {self.gamma_length:.15g}")
            out.append(f"n_hits = {self.n_hits}")
            out.append(f"j_length = {self.j_length:.15g}")
            out.append(f"threshold = {self.threshold:.15g}")
            out.append(f"fill_multiplicity = {self.fill_multiplicity}")
            out.append(f"fill_bound = {self.fill_bound}")
            out.append("sub = " + " ".join(str(i) for i in self.sub))
            out.append("[omega]")
            out.extend(_pt(p) for p in self.omega)
            out.append("[fill]")
            out.append(dump_chain(self.fill, cx).rstrip("\n"))
            out.append("[fill_u]")
            out.append(dump_chain(self.fill_u, cx).rstrip("\n"))
            for i, (pc, c) in enumerate(zip(self.pieces, self.piece_classes)):
                out.append(f"[piece {i} : {c[0]} {c[1]}]")
                out.extend(_pt(p) for p in pc)
        return "\n".join(x for x in out if x != "") + "\n"

    @classmethod
    def loads(cls, text: str, mesh: TorusMesh | None = None) -> "Certificate":
        """Parse; the refined chains are resolved against the mesh's intersection."""
        lines = text.splitlines()
        if not lines or lines[0].strip() != "certificate v1":
            raise ValueError("missing 'certificate v1' header")
        head: dict = {}
        sections: dict = {}
        order = []
        cur = None
        for raw in lines[1:]:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("["):
                cur = line[1:-1]
                sections[cur] = []
                order.append(cur)
            elif cur is None:
                k, _, v = line.partition("=")
                head[k.strip()] = v.strip()
            else:
                sections[cur].append(line)
        kind = head.get("kind")
        if kind not in KINDS:
            raise ValueError(f"unknown certificate kind {kind!r}")
        c = cls(kind, head["mesh_sha256"], Fraction(head["spacing"]), tuple(Fraction(x) for x in head["offset"].split()))
        if "seed" in head:
            c.seed = int(head["seed"])
        if "m" in head:
            c.m = float(head["m"])
        c.config = head.get("config")
        pair = lambda s: tuple(int(x) for x in s.split())  # noqa: E731
        if kind == "v-in-cube":
            c.cube = pair(head["cube"])
            c.loop_class = pair(head["loop_class"])
            c.diameter = float(head["diameter"])
            c.loop = [_parse_pt(x) for x in sections.get("loop", [])]
            return c
        c.omega_class = pair(head["omega_class"])
        c.gamma_class = pair(head["gamma_class"])
        c.gamma_length = float(head["gamma_length"])
        c.n_hits = int(head["n_hits"])
        c.j_length = float(head["j_length"])
        c.threshold = float(head["threshold"])
        c.fill_multiplicity = int(head["fill_multiplicity"])
        c.fill_bound = int(head["fill_bound"])
        c.sub = [int(x) for x in head.get("sub", "").split()]
        c.omega = [_parse_pt(x) for x in sections.get("omega", [])]
        for name in order:
            if name.startswith("piece "):
                _, _, cl = name.partition(":")
                c.pieces.append([_parse_pt(x) for x in sections[name]])
                c.piece_classes.append(pair(cl))
        c._raw_fill = "\n".join(sections.get("fill", []))
        c._raw_fill_u = "\n".join(sections.get("fill_u", []))
        if mesh is not None:
            c.resolve(intersect_lattice(mesh, c.spacing, c.offset).refined)
        return c

    def resolve(self, cx) -> None:
        if self.kind == "short-u" and self.fill is None:
            self.fill = load_chain(self._raw_fill, cx.spacing, cx) if self._raw_fill else Chain.zero(2)
            self.fill_u = load_chain(self._raw_fill_u, cx.spacing, cx) if self._raw_fill_u else Chain.zero(2)


def _pt(p) -> str:
    return " ".join(str(x) for x in p)


def _parse_pt(s: str) -> tuple:
    f = s.split()
    if len(f) != 3:
        raise ValueError(f"bad point line {s!r}")
    return tuple(Fraction(x) for x in f)


def _check(cond, what):
    if not cond:
        raise VerificationError(what)


def verify_certificate(cert: Certificate, mesh: TorusMesh, data=None, lab=None) -> dict:
    """Re-check every identity of a certificate from the mesh alone.

    Returns a summary dict; raises VerificationError naming the failing identity.
    """
    _check(cert.mesh_sha256 == mesh_digest(mesh), "certificate belongs to a different mesh")
    data = data or intersect_lattice(mesh, cert.spacing, cert.offset)
    lab = lab or HomologyLabeling.build(mesh)
    h, o = cert.spacing, cert.offset
    if cert.kind == "v-in-cube":
        edges = {frozenset(e) for e in surface_edges(data)}
        loop = list(cert.loop)
        _check(len(loop) >= 2, "loop too short")
        for p, q in closed_segments(loop):
            _check(frozenset((p, q)) in edges, "loop leaves the refined surface 1-skeleton")
        for p in loop:
            for i in range(3):
                t = (p[i] - o[i]) / h
                _check(cert.cube[i] <= t <= cert.cube[i] + 1, "loop leaves its closed 3-cell")
        cls = data.path_class(loop, lab, alt=True)
        _check(cls == tuple(cert.loop_class), f"loop class {cls} differs from recorded {cert.loop_class}")
        _check(cls[0] == 0 and abs(cls[1]) == 1, f"loop class {cls} is not +-v")
        from .bounds import diameter

        d = diameter(loop)
        _check(abs(d - cert.diameter) <= 1e-12 * max(1.0, d), "diameter mismatch")
        _check(d <= 3 ** 0.5 * float(h) * (1 + 1e-12), "diameter exceeds the cube diagonal")
        return {"kind": cert.kind, "class": cls, "diameter": d}

    cert.resolve(data.refined)
    cx = data.refined
    arc = cx.arc_square
    omega = list(cert.omega)
    _check(len(set(omega)) == len(omega), "omega is not embedded")
    ch_omega: dict = {}
    for p, q in closed_segments(omega):
        e, s = oriented(p, q)
        _check(e in arc, "omega leaves the intersection 1-complex")
        ch_omega[e] = ch_omega.get(e, 0) + s
    ocls = data.path_class(omega, lab, alt=True)
    _check(ocls == tuple(cert.omega_class), "omega class mismatch")
    _check(ocls[0] != 0, "omega has zero u-coefficient")

    def bd(chain):
        acc: dict = {}
        for f, k in chain.items():
            sub = cx.squares.get(f.parent)
            if sub is None:
                walks = [cx.square_corners(f.parent)]
            else:
                walks = sub.faces[f.index]
            for w in walks:
                for i in range(len(w)):
                    e, s = oriented(w[i], w[(i + 1) % len(w)])
                    acc[e] = acc.get(e, 0) + s * k
        return {e: k for e, k in acc.items() if k}

    _check(bd(cert.fill) == {e: k for e, k in ch_omega.items() if k}, "boundary of C differs from ch(omega)")
    want_u = {f: k for f, k in cert.fill.items() if data.side_label(f) == "u"}
    _check(want_u == dict(cert.fill_u.items()), "C_u is not the T_u part of C")
    bu = bd(cert.fill_u)
    _check(all(e in arc for e in bu), "boundary of C_u leaves the surface")
    pieces_chain: dict = {}
    for pc in cert.pieces:
        for p, q in closed_segments(pc):
            e, s = oriented(p, q)
            pieces_chain[e] = pieces_chain.get(e, 0) + s
    _check({e: k for e, k in pieces_chain.items() if k} == bu, "pieces do not sum to the boundary of C_u")
    tot = [0, 0]
    for pc, c in zip(cert.pieces, cert.piece_classes):
        pcls = data.path_class(pc, lab, alt=True)
        _check(pcls == tuple(c), "piece class mismatch")
        tot[0] += pcls[0]
        tot[1] += pcls[1]
    _check(tuple(tot) == tuple(cert.gamma_class), "gamma class mismatch")
    _check(tot[1] == 0 and tot[0] == ocls[0], f"gamma class {tuple(tot)} is not ({ocls[0]}, 0)")
    sc = [0, 0]
    for i in cert.sub:
        sc[0] += cert.piece_classes[i][0]
        sc[1] += cert.piece_classes[i][1]
    _check(sc[1] == 0 and abs(sc[0]) == 1, "sub-loop does not represent +-u")
    _check(len(data.hits) == cert.n_hits, "X^1 count mismatch")
    segs = [s for pc in cert.pieces for s in closed_segments(pc)]
    g_lo, g_hi = length_interval(segs)
    j_lo, j_hi = length_interval([s for c in data.curves for s in closed_segments(c.points)])
    _check(abs(float(g_lo) - cert.gamma_length) <= 1e-9 * max(1.0, cert.gamma_length), "gamma length mismatch")
    _check(abs(float(j_lo) - cert.j_length) <= 1e-9 * max(1.0, cert.j_length), "J length mismatch")
    _check(g_hi <= 20 * (cert.n_hits + 1) * j_lo, "gamma longer than 20(|X^1|+1) length(J)")
    linf = max((abs(k) for _, k in cert.fill.items()), default=0)
    _check(linf == cert.fill_multiplicity, "fill multiplicity mismatch")
    nx = sum(1 for p in omega if cx.is_x1_vertex(p))
    _check(cert.fill_bound == 5 * (nx + 1) and linf <= cert.fill_bound, "fill multiplicity above 5(h+1)")
    return {"kind": cert.kind, "class": tuple(tot), "length": float(g_hi), "threshold": 20 * (cert.n_hits + 1) * float(j_lo)}
