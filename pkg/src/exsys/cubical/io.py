"""Line-oriented text format for chains.

Lattice cells: ``dim ax ay az axes coeff`` (axes like ``xy``, ``-`` for vertices).
Refined cells: ``dim ax ay az axes #id coeff`` where the first five fields name
the parent lattice cell. Lines are sorted so dumps diff cleanly.
"""

from __future__ import annotations

from fractions import Fraction

from .cells import AXIS_NAMES, Cell, Chain, make_cell


def cell_line(c: Cell) -> str:
    ax = "".join(AXIS_NAMES[a] for a in c.axes) or "-"
    return f"{c.dim} {c.anchor[0]} {c.anchor[1]} {c.anchor[2]} {ax}"


def parse_cell(fields: list[str], spacing=Fraction(1)) -> Cell:
    dim = int(fields[0])
    anchor = tuple(int(x) for x in fields[1:4])
    axes = () if fields[4] == "-" else tuple(AXIS_NAMES.index(ch) for ch in fields[4])
    c = make_cell(anchor, axes, spacing)
    if c.dim != dim:
        raise ValueError(f"dimension {dim} does not match axes {fields[4]!r}")
    return c


def dump_chain(c: Chain, cx=None) -> str:
    lines = []
    for cell, k in c.items():
        if isinstance(cell, Cell):
            lines.append(f"{cell_line(cell)} {k}")
        else:
            if cx is None:
                raise ValueError("refined chains need their complex to serialize")
            lines.append(f"{cx.cell_label(cell)} {k}")
    return "\n".join(sorted(lines)) + ("\n" if lines else "")


def load_chain(text: str, spacing=Fraction(1), cx=None) -> Chain:
    """Parse a chain dump; refined lines are resolved against ``cx``."""
    items = []
    dim = None
    for raw in text.splitlines():
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        if len(f) == 6:
            cell = parse_cell(f[:5], spacing)
            k = int(f[5])
        elif len(f) == 7 and f[5].startswith("#"):
            if cx is None:
                raise ValueError("refined chain needs a complex")
            parent = parse_cell(f[:5], cx.spacing)
            cell = resolve_refined(cx, parent, f[5][1:])
            k = int(f[6])
        else:
            raise ValueError(f"bad chain line: {raw!r}")
        if dim is None:
            dim = cell.dim
        items.append((cell, k))
    return Chain(dim if dim is not None else 0, items)


def resolve_refined(cx, parent: Cell, ident: str):
    from .refined import RefinedFace

    if parent.dim == 2 and not ident.startswith("a"):
        f = RefinedFace(parent, int(ident))
        if f not in cx.faces_of(parent):
            raise ValueError(f"unknown face {f!r}")
        return f
    if parent.dim == 1:
        return cx.sub_edges(parent)[int(ident)]
    if parent.dim == 2 and ident.startswith("a"):
        return sorted(cx.squares[parent].arc_edges)[int(ident[1:])]
    raise ValueError(f"cannot resolve {parent!r} #{ident}")
