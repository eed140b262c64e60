"""Cells and sparse integer chains of the cubical lattice.

A cell is addressed by the integer lattice coordinates of its minimal corner
and the set of axes it spans. Squares are oriented by the cyclic order of
their two axes ((x, y), (y, z), (z, x)); edges point along the increasing
coordinate. With these conventions the boundary of a cube is its six faces
with outward-normal signs and ``boundary(boundary(c)) == 0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

AXIS_NAMES = "xyz"

# cyclic orientation of each coordinate plane, keyed by its sorted axis pair
_CYCLIC = {(0, 1): (0, 1), (1, 2): (1, 2), (0, 2): (2, 0)}


class Cell(NamedTuple):
    dim: int
    anchor: tuple[int, int, int]
    axes: tuple[int, ...]
    spacing: Fraction = Fraction(1)

    def __repr__(self) -> str:
        ax = "".join(AXIS_NAMES[a] for a in self.axes) or "-"
        return f"Cell({self.dim}, {self.anchor}, {ax})"


def make_cell(anchor: Iterable[int], axes: Iterable[int], spacing=Fraction(1)) -> Cell:
    axes = tuple(sorted(set(axes)))
    anchor = tuple(int(a) for a in anchor)
    if len(anchor) != 3:
        raise ValueError("anchor must be a triple")
    if any(a not in (0, 1, 2) for a in axes):
        raise ValueError(f"bad axes {axes}")
    return Cell(len(axes), anchor, axes, Fraction(spacing))


def vertex(p, spacing=Fraction(1)) -> Cell:
    return make_cell(p, (), spacing)


def edge(p, axis: int, spacing=Fraction(1)) -> Cell:
    return make_cell(p, (axis,), spacing)


def square(p, axes, spacing=Fraction(1)) -> Cell:
    return make_cell(p, axes, spacing)


def cube(p, spacing=Fraction(1)) -> Cell:
    return make_cell(p, (0, 1, 2), spacing)


def shift(p, axis: int, step: int = 1) -> tuple[int, int, int]:
    q = list(p)
    q[axis] += step
    return tuple(q)


def plane_orientation(axes: tuple[int, int]) -> tuple[int, int]:
    """Ordered axis pair giving the positive orientation of a square."""
    return _CYCLIC[tuple(sorted(axes))]


def edge_endpoints(cell: Cell) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    if cell.dim != 1:
        raise ValueError("not an edge")
    return cell.anchor, shift(cell.anchor, cell.axes[0])


class Chain:
    """Finite formal sum of cells of one dimension with nonzero integer coefficients.

    Chains are treated as immutable values. Keys may be lattice ``Cell`` objects
    or any hashable refined-cell key; only the lattice boundary below needs them
    to be ``Cell``.
    """

    __slots__ = ("dim", "_c")

    def __init__(self, dim: int, coeffs: Mapping | Iterable = ()):
        self.dim = dim
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict = {}
        for k, v in items:
            v = int(v)
            if v:
                c[k] = c.get(k, 0) + v
        self._c = {k: v for k, v in c.items() if v}
        for k in self._c:
            kd = getattr(k, "dim", dim)
            if kd != dim:
                raise ValueError(f"cell {k!r} has dimension {kd}, chain has {dim}")

    @classmethod
    def zero(cls, dim: int) -> "Chain":
        return cls(dim)

    @classmethod
    def of(cls, cell, coeff: int = 1) -> "Chain":
        return cls(cell.dim, {cell: coeff})

    def __getitem__(self, cell) -> int:
        return self._c.get(cell, 0)

    def __iter__(self) -> Iterator:
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def items(self):
        return self._c.items()

    def support(self) -> set:
        return set(self._c)

    def _check(self, other: "Chain"):
        if not isinstance(other, Chain):
            return NotImplemented
        if other.dim != self.dim and other._c and self._c:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
        return None

    def __add__(self, other: "Chain") -> "Chain":
        if self._check(other) is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return Chain(self.dim if self._c else other.dim, c)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, {k: -v for k, v in self._c.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, k: int) -> "Chain":
        return Chain(self.dim, {c: k * v for c, v in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        if not self._c and not other._c:
            return True
        return self.dim == other.dim and self._c == other._c

    def __hash__(self):
        return hash((self.dim, frozenset(self._c.items())))

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*{k!r}" for k, v in sorted(self._c.items(), key=lambda kv: kv[0]))
        return f"Chain[{self.dim}]({body or '0'})"

    def l1(self) -> int:
        return sum(abs(v) for v in self._c.values())

    def linf(self) -> int:
        return max((abs(v) for v in self._c.values()), default=0)


def norms(c: Chain) -> tuple[int, int]:
    """(L1, L-infinity) norms; both are 0 for the zero chain."""
    return c.l1(), c.linf()


def cell_boundary(cell: Cell) -> dict[Cell, int]:
    d, p, h = cell.dim, cell.anchor, cell.spacing
    if d == 0:
        raise ValueError("no boundary below dimension 0")
    if d == 1:
        a = cell.axes[0]
        return {vertex(shift(p, a), h): 1, vertex(p, h): -1}
    if d == 2:
        a, b = plane_orientation(cell.axes)
        # counterclockwise in the (a, b) plane
        return {
            edge(p, a, h): 1,
            edge(shift(p, a), b, h): 1,
            edge(shift(p, b), a, h): -1,
            edge(p, b, h): -1,
        }
    out: dict[Cell, int] = {}
    for c in range(3):
        pair = tuple(x for x in range(3) if x != c)
        # cyclic orientation of the plane perpendicular to c has normal +e_c
        out[square(shift(p, c), pair, h)] = 1
        out[square(p, pair, h)] = -1
    return out


def boundary(c: Chain) -> Chain:
    if c.dim < 1:
        raise ValueError("no boundary below dimension 0")
    acc: dict = {}
    for cell, k in c.items():
        for f, s in cell_boundary(cell).items():
            acc[f] = acc.get(f, 0) + s * k
    return Chain(c.dim - 1, acc)


def cells_in_box(lo, hi, dim: int, spacing=Fraction(1)) -> list[Cell]:
    """All cells of dimension ``dim`` inside the vertex box [lo, hi] (inclusive corners)."""
    from itertools import combinations, product

    out = []
    for axes in combinations(range(3), dim):
        ranges = [range(lo[i], hi[i] - (1 if i in axes else 0) + 1) for i in range(3)]
        for p in product(*ranges):
            out.append(make_cell(p, axes, spacing))
    return out
