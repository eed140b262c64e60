"""Isoperimetric fillings on the lattice 2-skeleton and on its refinement."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cubical import Cell, Chain, RefinedComplex, RefinedFace, cell_boundary, edge, oriented, square
from .cubical.io import cell_line, parse_cell
from .curves import LatticeLoop, SkeletonPath, ch, decompose_cycle, walk_points


@dataclass(frozen=True)
class Move:
    kind: str  # cancel | transpose | eliminate | disk | lattice
    cell: object = None
    sign: int = 0
    faces: tuple = ()


@dataclass
class FillingResult:
    chain: Chain
    multiplicity: int
    transcript: list = field(default_factory=list)
    bound: int | None = None

    def replay(self, cx: RefinedComplex | None = None) -> Chain:
        return replay(self.transcript, cx)


def replay(transcript, cx: RefinedComplex | None = None) -> Chain:
    """Rebuild the filling chain from its move list alone."""
    lattice: dict = {}
    refined: dict = {}
    for m in transcript:
        if m.kind == "transpose":
            lattice[m.cell] = lattice.get(m.cell, 0) + m.sign
        elif m.kind == "disk":
            for f in m.faces:
                refined[f] = refined.get(f, 0) + m.sign
    lat = Chain(2, lattice)
    if cx is None:
        if refined:
            raise ValueError("transcript has refined moves; pass the complex")
        return lat
    out = Chain(2, refined) + cx.pushforward(lat)
    return out


def _square_for(p, a: int, b: int, spacing) -> tuple[Cell, int]:
    """Square swept when the step ``a`` then ``b`` at ``p`` becomes ``b`` then ``a``.

    Returns the cell and the sign s with ch(a b) - ch(b a) = boundary(s * cell).
    """
    (ax, sa), (bx, sb) = a, b
    corner = list(p)
    if sa < 0:
        corner[ax] -= 1
    if sb < 0:
        corner[bx] -= 1
    q = square(tuple(corner), (ax, bx), spacing)
    first = edge(p if sa > 0 else _step(p, a), ax, spacing)
    s = cell_boundary(q)[first] * sa
    return q, s


def _step(p, letter):
    a, s = letter
    q = list(p)
    q[a] += s
    return tuple(q)


def _inverse(l1, l2) -> bool:
    return l1[0] == l2[0] and l1[1] == -l2[1]


def _cancel_adjacent(base, word, moves):
    """Free and cyclic reduction; returns (base, word)."""
    w = list(word)
    out: list = []
    for l in w:
        if out and _inverse(out[-1], l):
            out.pop()
            moves.append(Move("cancel"))
        else:
            out.append(l)
    while len(out) >= 2 and _inverse(out[0], out[-1]):
        base = _step(base, out[0])
        out = out[1:-1]
        moves.append(Move("cancel"))
    return base, out


def _innermost_pair(word) -> tuple[int, int]:
    best = None
    last: dict = {}
    for j, l in enumerate(word):
        inv = (l[0], -l[1])
        if inv in last:
            i = last[inv]
            if best is None or j - i < best[1] - best[0]:
                best = (i, j)
        last[l] = j
    if best is None:
        raise ValueError("closed nonempty word without an inverse pair")
    return best


def fill_x1(loop: LatticeLoop) -> FillingResult:
    """Fill a closed lattice loop by transposing letters across squares.

    Each round picks the inverse pair with the shortest enclosed substring
    (leftmost on ties), moves the left letter rightwards until it meets its
    inverse, recording the square swept by every transposition, and then
    deletes the pair.
    """
    h = loop.spacing
    moves: list[Move] = []
    base, word = _cancel_adjacent(tuple(loop.base), loop.word, moves)
    acc: dict = {}
    while word:
        i, j = _innermost_pair(word)
        pts = walk_points(base, word)
        letter = word[i]
        k = i
        while k + 1 < j:
            other = word[k + 1]
            q, s = _square_for(pts[k], letter, other, h)
            acc[q] = acc.get(q, 0) + s
            moves.append(Move("transpose", q, s))
            word[k], word[k + 1] = other, letter
            pts[k + 1] = _step(pts[k], other)
            k += 1
        del word[k : k + 2]
        moves.append(Move("eliminate"))
        base, word = _cancel_adjacent(base, word, moves)
    c = Chain(2, acc)
    return FillingResult(c, c.linf(), moves, bound=len(loop.word))


def fill_cycle_x1(alpha: Chain) -> FillingResult:
    """Fill a lattice 1-cycle through its decomposition into embedded loops."""
    total = Chain.zero(2)
    moves: list[Move] = []
    for piece in decompose_cycle(alpha):
        loop = path_to_loop(piece)
        r = fill_x1(loop)
        total = total + r.chain
        moves.extend(r.transcript)
    return FillingResult(total, total.linf(), moves, bound=alpha.l1())


def path_to_loop(path: SkeletonPath) -> LatticeLoop:
    word = []
    spacing = Fraction(1)
    for cell, s in path.edges:
        word.append((cell.axes[0], s))
        spacing = cell.spacing
    return LatticeLoop(tuple(path.vertices[0]), tuple(word), spacing)


def count_x1_vertices(curve: SkeletonPath, cx: RefinedComplex) -> int:
    vs = curve.vertices[:-1] if curve.closed else curve.vertices
    return sum(1 for v in vs if cx.is_x1_vertex(v))


def _pieces(curve: SkeletonPath, cx: RefinedComplex):
    """Split a closed curve at its X^1 vertices; yields (points, edges) per arc."""
    n = len(curve.edges)
    cuts = [i for i in range(n) if cx.is_x1_vertex(curve.vertices[i])]
    if not cuts:
        return None
    out = []
    for t, c in enumerate(cuts):
        d = cuts[t + 1] if t + 1 < len(cuts) else cuts[0] + n
        pts = [curve.vertices[k % n] for k in range(c, d + 1)]
        es = [curve.edges[k % n] for k in range(c, d)]
        out.append((pts, es))
    return out


def fill_refined(curve: SkeletonPath, cx: RefinedComplex) -> FillingResult:
    """Fill an embedded closed curve on the refined 1-skeleton.

    The curve is cut at its lattice-edge vertices into arcs lying in single
    squares. Each arc is swept to one of the two boundary arcs of its square
    (the one enclosing fewer refined faces); the resulting lattice loop is
    filled on the lattice and pushed forward.
    """
    if not curve.closed:
        raise ValueError("curve must be closed")
    if not curve.is_embedded():
        raise ValueError("curve is not embedded")
    for e, _ in curve.edges:
        if e not in cx.arc_square and cx.lattice_edge_of(e) is None:
            raise ValueError(f"edge {e!r} is not on the refined 1-skeleton")

    moves: list[Move] = []
    disks: dict = {}
    delta: dict = {}
    verts = curve.vertices
    pieces = _pieces(curve, cx)
    if pieces is None:
        sq = {cx.arc_square.get(e) for e, _ in curve.edges}
        if len(sq) != 1 or None in sq:
            raise ValueError("closed curve off X^1 must lie in one square")
        q = sq.pop()
        pts = list(verts)
        _disk(cx, q, pts, pts[0], pts[0], disks, delta, moves)
    else:
        for pts, es in pieces:
            if len(es) == 1 and cx.lattice_edge_of(es[0][0]) is not None:
                e, s = es[0]
                delta[e] = delta.get(e, 0) + s
                continue
            sq = {cx.arc_square.get(e) for e, _ in es}
            if len(sq) != 1 or None in sq:
                raise ValueError("arc between lattice points leaves its square")
            _disk(cx, sq.pop(), pts, pts[0], pts[-1], disks, delta, moves)

    alpha = cx.collapse_to_lattice(Chain(1, delta))
    inner = fill_cycle_x1(alpha)
    moves.append(Move("lattice"))
    moves.extend(inner.transcript)
    total = Chain(2, disks) + cx.pushforward(inner.chain)
    h = count_x1_vertices(curve, cx)
    res = FillingResult(total, total.linf(), moves, bound=5 * (h + 1))
    if cx.boundary(total) != ch(curve):
        raise AssertionError("filling boundary does not match the curve")
    return res


def _disk(cx, q, pts, p, r, disks, delta, moves):
    sub = cx.squares[q]
    left = sub.faces_on_side(pts, left=True)
    right = sub.faces_on_side(pts, left=False)
    if p == r:
        # closed arc: fill whichever side stays off the square boundary
        def touches(region):
            return any(e in sub.boundary_edges for f in region for e in sub.face_boundary(f))

        if not touches(left):
            sign, region = 1, left
        elif not touches(right):
            sign, region = -1, right
        else:
            raise ValueError("closed arc separates nothing")
        bpath = [p]
    else:
        cand = [
            (len(left), sorted(left), 1, left, sub.boundary_path(p, r, ccw=False)),
            (len(right), sorted(right), -1, right, sub.boundary_path(p, r, ccw=True)),
        ]
        cand.sort(key=lambda t: (t[0], t[1]))
        _, _, sign, region, bpath = cand[0]
    faces = tuple(sorted(RefinedFace(q, f) for f in region))
    for f in faces:
        disks[f] = disks.get(f, 0) + sign
    moves.append(Move("disk", q, sign, faces))
    for a, b in zip(bpath, bpath[1:]):
        e, s = oriented(a, b)
        delta[e] = delta.get(e, 0) + s


def dump_transcript(moves, cx: RefinedComplex | None = None) -> str:
    lines = []
    for m in moves:
        if m.kind == "transpose":
            lines.append(f"transpose {cell_line(m.cell)} {m.sign:+d}")
        elif m.kind == "disk":
            ids = " ".join(str(f.index) for f in m.faces)
            lines.append(f"disk {cell_line(m.cell)} {m.sign:+d} : {ids}")
        else:
            lines.append(m.kind)
    return "\n".join(lines) + ("\n" if lines else "")


def load_transcript(text: str, spacing=Fraction(1)) -> list[Move]:
    out = []
    for raw in text.splitlines():
        f = raw.split()
        if not f:
            continue
        if f[0] == "transpose":
            out.append(Move("transpose", parse_cell(f[1:6], spacing), int(f[6])))
        elif f[0] == "disk":
            q = parse_cell(f[1:6], spacing)
            faces = tuple(RefinedFace(q, int(x)) for x in f[8:])
            out.append(Move("disk", q, int(f[6]), faces))
        else:
            out.append(Move(f[0]))
    return out
