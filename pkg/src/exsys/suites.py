"""Property suites run by ``verify-lemmas`` and by the acceptance tests.

Each suite returns a SuiteResult; a failing suite carries a text repro of the
first failing instance.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cubical import Chain, boundary, cells_in_box, make_cell, oriented
from .curves import LatticeLoop, SkeletonPath, ch, decompose_cycle
from .filling import count_x1_vertices, fill_refined, fill_x1
from .surface import HomologyLabeling, loop_class
from .surface.intersect import GeneralPositionError, intersect_lattice
from .surface.mesh import rational

DIRS = [(0, 1), (0, -1), (1, 1), (1, -1), (2, 1), (2, -1)]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)
    repro: str = ""

    def line(self) -> str:
        extra = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(self.detail.items()))
        return f"{self.name}\t{'PASS' if self.passed else 'FAIL'}\tcases={self.cases}\t{extra}".rstrip()


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


class _Fail(Exception):
    def __init__(self, repro):
        super().__init__(repro)
        self.repro = repro


def _run(name, fn, *args, **kw) -> SuiteResult:
    t = time.perf_counter()
    try:
        cases, detail = fn(*args, **kw)
        return SuiteResult(name, True, cases, time.perf_counter() - t, detail)
    except _Fail as e:
        return SuiteResult(name, False, 0, time.perf_counter() - t, {}, e.repro)


# lattice chains


def _random_chain(rng, dim, lo=-3, hi=3, n=12, coef=5):
    cells = []
    for _ in range(n):
        p = tuple(int(x) for x in rng.integers(lo, hi, 3))
        axes = tuple(sorted(rng.choice(3, dim, replace=False).tolist()))
        cells.append((Chain.of(_cell(p, axes)), int(rng.integers(-coef, coef + 1))))
    acc = Chain.zero(dim)
    for c, k in cells:
        acc = acc + c * k
    return acc


def _cell(p, axes):
    return make_cell(p, axes)


def boundary_squared(seed=0, grid=4, random_cases=1000):
    n = 0
    for dim in (2, 3):
        for c in cells_in_box((0, 0, 0), (grid - 1,) * 3, dim):
            if boundary(boundary(Chain.of(c))):
                raise _Fail(f"boundary of boundary nonzero on {c!r}")
            n += 1
    rng = np.random.default_rng(seed)
    for _ in range(random_cases):
        dim = int(rng.integers(2, 4))
        c = _random_chain(rng, dim)
        if boundary(boundary(c)):
            raise _Fail(f"boundary of boundary nonzero on random chain {c!r}")
        n += 1
    return n, {}


def random_walk_word(rng, length):
    return tuple(DIRS[i] for i in rng.integers(0, 6, length))


def random_embedded_loop(rng, max_len=40, box=4, tries=200):
    """Self-avoiding walk closed up by a shortest path that avoids it."""
    from collections import deque

    for _ in range(tries):
        start = (0, 0, 0)
        pts = [start]
        used = {start}
        k = int(rng.integers(2, max_len // 2 + 1))
        for _ in range(k):
            opts = []
            for a, s in DIRS:
                q = list(pts[-1])
                q[a] += s
                q = tuple(q)
                if q not in used and all(-box <= c <= box for c in q):
                    opts.append(q)
            if not opts:
                break
            q = opts[int(rng.integers(len(opts)))]
            pts.append(q)
            used.add(q)
        if len(pts) < 3:
            continue
        end = pts[-1]
        blocked = used - {start, end}
        prev = {end: None}
        dq = deque([end])
        while dq:
            x = dq.popleft()
            if x == start:
                break
            for a, s in DIRS:
                q = list(x)
                q[a] += s
                q = tuple(q)
                if q in prev or q in blocked or not all(-box - 1 <= c <= box + 1 for c in q):
                    continue
                if x == end and q == start and len(pts) == 2:
                    continue
                prev[q] = x
                dq.append(q)
        if start not in prev:
            continue
        back = []
        x = prev[start]
        while x is not None and x != end:
            back.append(x)
            x = prev[x]
        cycle = pts + back[::-1]
        if len(cycle) > max_len or len(cycle) < 4:
            continue
        word = []
        for p, q in zip(cycle, cycle[1:] + cycle[:1]):
            a = next(i for i in range(3) if p[i] != q[i])
            word.append((a, q[a] - p[a]))
        return LatticeLoop(start, tuple(word))
    raise RuntimeError("could not generate an embedded loop")


def ch_additivity(seed=0, cases=1000):
    rng = np.random.default_rng(seed)
    for i in range(cases):
        n = int(rng.integers(2, 30))
        word = random_walk_word(rng, n)
        pts = [(0, 0, 0)]
        for a, s in word:
            q = list(pts[-1])
            q[a] += s
            pts.append(tuple(q))
        path = SkeletonPath.through(pts, closed=False)
        k = int(rng.integers(0, n + 1))
        p1, p2 = path.split(k)
        if ch(path) != ch(p1) + ch(p2):
            raise _Fail(f"ch not additive on walk {pts} split at {k}")
    return cases, {}


def decomposition(seed=0, cases=1000):
    rng = np.random.default_rng(seed)
    for _ in range(cases):
        alpha = Chain.zero(1)
        for _ in range(int(rng.integers(1, 4))):
            loop = random_embedded_loop(rng, 24, box=2)
            shift = tuple(int(x) for x in rng.integers(-1, 2, 3))
            lp = LatticeLoop(shift, loop.word)
            alpha = alpha + ch(lp.path()) * int(rng.choice([-2, -1, 1, 2]))
        if not alpha:
            continue
        pieces = decompose_cycle(alpha)
        total = Chain.zero(1)
        l1 = 0
        for pc in pieces:
            if not pc.is_embedded():
                raise _Fail(f"non-embedded piece in decomposition of {alpha!r}")
            c = ch(pc)
            total = total + c
            l1 += c.l1()
        if total != alpha or l1 != alpha.l1():
            raise _Fail(f"decomposition not additive for {alpha!r}")
    return cases, {}


def enumerate_loops(n=3, max_len=12):
    """All embedded lattice loops in the n^3 vertex grid, one per unoriented loop."""
    V = [(x, y, z) for x in range(n) for y in range(n) for z in range(n)]
    out = []
    for s in V:
        path, word, used = [s], [], {s}

        def dfs():
            p = path[-1]
            for a, sg in DIRS:
                q = list(p)
                q[a] += sg
                q = tuple(q)
                if not all(0 <= c < n for c in q):
                    continue
                if q == s and len(word) >= 3:
                    if path[1] < path[-1]:
                        out.append(LatticeLoop(s, tuple(word + [(a, sg)])))
                    continue
                if q in used or q < s or len(word) + 1 >= max_len:
                    continue
                if sum(abs(q[i] - s[i]) for i in range(3)) > max_len - len(word) - 1:
                    continue
                used.add(q)
                path.append(q)
                word.append((a, sg))
                dfs()
                used.discard(q)
                path.pop()
                word.pop()

        dfs()
    return out


def lattice_filling(seed=0, box=3, max_len=12, random_cases=1000, random_len=40, oracle=True):
    from .oracle import min_linf_filling

    loops = enumerate_loops(box, max_len)
    gap = 0
    for loop in loops:
        for lp in (loop, LatticeLoop(loop.base, tuple((a, -s) for a, s in reversed(loop.word)))):
            r = fill_x1(lp)
            c = ch(lp.path())
            if boundary(r.chain) != c:
                raise _Fail(f"boundary mismatch: {lp.dump()}")
            if r.multiplicity > c.l1():
                raise _Fail(f"multiplicity {r.multiplicity} > length {c.l1()}: {lp.dump()}")
        if oracle:
            opt, _ = min_linf_filling(ch(loop.path()))
            r = fill_x1(loop)
            if not opt <= r.multiplicity <= len(loop):
                raise _Fail(f"sandwich fails (opt {opt}, got {r.multiplicity}): {loop.dump()}")
            gap = max(gap, r.multiplicity - opt)
    rng = np.random.default_rng(seed)
    for _ in range(random_cases):
        lp = random_embedded_loop(rng, random_len)
        r = fill_x1(lp)
        c = ch(lp.path())
        if boundary(r.chain) != c or r.multiplicity > c.l1():
            raise _Fail(f"random loop fails: {lp.dump()}")
    return len(loops) + random_cases, {"exhaustive": len(loops), "max_gap_to_optimum": gap}


# surfaces


@functools.lru_cache(maxsize=None)
def default_meshes():
    from .generators import gen_flat_rectangular, gen_knot_tube, gen_standard_torus, gen_twisted_cylinder

    return {
        "twisted-2": (gen_twisted_cylinder(2), Fraction(1, 3)),
        "twisted-5": (gen_twisted_cylinder(5), Fraction(1, 6)),
        "standard": (gen_standard_torus(res=24), Fraction(3, 4)),
        "frame": (gen_flat_rectangular(), Fraction(3, 5)),
        "knot-3": (gen_knot_tube(3), Fraction(1, 2)),
    }


_CACHE: dict = {}


def intersect_retry(mesh, spacing, seed, tries=20):
    key = (id(mesh), Fraction(spacing), seed)
    if key not in _CACHE:
        _CACHE[key] = (mesh, _intersect_retry(mesh, spacing, seed, tries))
    return _CACHE[key][1]


def _intersect_retry(mesh, spacing, seed, tries):
    rng = np.random.default_rng(seed)
    h = Fraction(spacing)
    for _ in range(tries):
        off = tuple(rational(x * float(h)) for x in rng.random(3))
        try:
            return intersect_lattice(mesh, h, off)
        except GeneralPositionError:
            continue
    raise GeneralPositionError("no generic offset found")


def incidence(seed=0, meshes=None, cases=1000):
    meshes = meshes or default_meshes()
    rng = np.random.default_rng(seed)
    worst = 0.0
    n = 0
    per = max(1, cases // len(meshes))
    for name, (mesh, h) in sorted(meshes.items()):
        cx = intersect_retry(mesh, h, seed).refined
        faces = [f for q in sorted(cx.squares) for f in cx.faces_of(q)]
        if not faces:
            continue
        done = 0
        while done < per:
            k = int(rng.integers(1, 40))
            idx = rng.integers(0, len(faces), k)
            coef = rng.integers(-6, 7, k)
            acc: dict = {}
            for i, c in zip(idx, coef):
                acc[faces[i]] = acc.get(faces[i], 0) + int(c)
            a = Chain(2, acc)
            if not a:
                continue
            b = cx.boundary(a)
            if b.linf() > 4 * a.linf():
                raise _Fail(f"{name}: boundary multiplicity {b.linf()} > 4 * {a.linf()}")
            worst = max(worst, b.linf() / a.linf())
            n += 1
            done += 1
        m = cx.max_incidence()
        if m > 4:
            raise _Fail(f"{name}: an edge lies on {m} refined faces")
    return n, {"max_ratio": worst}


def homology_consistency(seed=0, meshes=None, cases=20):
    """Classes of curves pushed onto the refined surface 1-skeleton agree with direct labels."""
    meshes = meshes or default_meshes()
    rng = np.random.default_rng(seed)
    n = 0
    for name, (mesh, h) in sorted(meshes.items()):
        lab = HomologyLabeling.build(mesh)
        data = intersect_retry(mesh, h, seed)
        e1, e2 = (list(b) for b in mesh.basis)
        loops = [e1, e2]
        for _ in range(cases):
            a, b = int(rng.integers(-2, 3)), int(rng.integers(-2, 3))
            loops.append(_product(mesh, e1, e2, a, b))
        for loop in loops:
            if len(loop) < 2:
                continue
            direct = loop_class(loop, lab)
            pts = _refine_loop(mesh, data, loop)
            acc: dict = {}
            for p, q in zip(pts, pts[1:] + pts[:1]):
                e, s = oriented(p, q)
                acc[e] = acc.get(e, 0) + s
            via = data.chain_class(Chain(1, acc), lab, alt=True)
            if via != direct:
                raise _Fail(f"{name}: class {via} on refined skeleton vs {direct} directly")
            n += 1
    return n, {}


def _mesh_edge(data, p, q):
    kp, kq = data.carrier[p], data.carrier[q]
    for k in (kp, kq):
        if k[0] == "e":
            return k[1]
    a, b = kp[1], kq[1]
    return (min(a, b), max(a, b))


def _refine_loop(mesh, data, loop):
    """Points of a mesh vertex loop after inserting the lattice-plane crossings on each edge."""
    by_edge = {}
    for p, q in data.mesh_sub_edges:
        by_edge.setdefault(_mesh_edge(data, p, q), []).append((p, q))
    pts = []
    for a, b in zip(loop, loop[1:] + loop[:1]):
        if a == b:
            continue
        segs = by_edge[(min(a, b), max(a, b))]
        chainpts = [segs[0][0]] + [q for _, q in segs]
        if a > b:
            chainpts = chainpts[::-1]
        pts.extend(chainpts[:-1])
    return pts


def _product(mesh, e1, e2, a, b):
    """A closed vertex loop representing a*e1 + b*e2, both based at a common vertex."""
    from collections import deque

    adj = mesh.adjacency()
    s, t = e1[0], e2[0]
    prev = {s: None}
    dq = deque([s])
    while dq:
        x = dq.popleft()
        if x == t:
            break
        for y in sorted(adj[x]):
            if y not in prev:
                prev[y] = x
                dq.append(y)
    path = []
    x = t
    while x is not None:
        path.append(x)
        x = prev[x]
    path.reverse()  # s ... t
    e2s = path[:-1] + e2 + [t] + path[::-1][1:]  # based at s
    e2s = e2s[:-1]

    def power(loop, k):
        if k < 0:
            loop = [loop[0]] + loop[1:][::-1]
        return loop * abs(k)

    out = power(list(e1), a) + power(e2s, b)
    return out or [s]


def refined_filling(cases=None, seed=0):
    """Every intersection curve of the given (mesh, spacing) cases fills within 5(h+1)."""
    n = 0
    worst = 0.0
    for name, (mesh, h) in sorted((cases or default_meshes()).items()):
        data = intersect_retry(mesh, h, seed)
        cx = data.refined
        for c in data.curves:
            omega = SkeletonPath.through(c.points)
            try:
                r = fill_refined(omega, cx)
            except AssertionError as e:
                raise _Fail(f"{name}: {e}; curve {c.points}") from None
            if cx.boundary(r.chain) != ch(omega):
                raise _Fail(f"{name}: boundary mismatch on curve {c.points}")
            hx = count_x1_vertices(omega, cx)
            if r.multiplicity > 5 * (hx + 1):
                raise _Fail(f"{name}: multiplicity {r.multiplicity} > 5({hx}+1)")
            worst = max(worst, r.multiplicity / (5 * (hx + 1)))
            n += 1
    return n, {"max_ratio_to_bound": worst}


def averaging(seed=0, meshes=None, m=3.0, samples=10000):
    from .surface.translation import translation_search

    meshes = meshes or default_meshes()
    detail = {}
    for name, (mesh, _) in sorted(meshes.items()):
        _, st, _ = translation_search(mesh, m, samples, seed)
        L, N = st.integral_length, st.integral_count
        seL, seN = st.se_length * m ** -3, st.se_count * m ** -3
        p = st.qualifying_fraction
        sep = math.sqrt(max(p * (1 - p), 1e-12) / samples)
        if L > 3 * m ** -2 + 3 * seL:
            raise _Fail(f"{name}: length integral {L} > 3 m^-2")
        if N > 3 / m + 3 * seN:
            raise _Fail(f"{name}: count integral {N} > 3 m^-1")
        if p < 1 / 3 - 3 * sep:
            raise _Fail(f"{name}: qualifying fraction {p} < 1/3")
        detail[name] = f"{L * m * m / 3:.3f},{N * m / 3:.3f},{p:.3f}"
    return len(meshes) * samples, detail


SUITES = {
    "boundary": boundary_squared,
    "additivity": ch_additivity,
    "decomposition": decomposition,
    "homology": homology_consistency,
    "incidence": incidence,
    "lattice-filling": lattice_filling,
    "refined-filling": refined_filling,
    "averaging": averaging,
}


def run_suite(name, **kw) -> SuiteResult:
    return _run(name, SUITES[name], **kw)
