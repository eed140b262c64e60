from .cells import (
    AXIS_NAMES,
    Cell,
    Chain,
    boundary,
    cell_boundary,
    cells_in_box,
    cube,
    edge,
    edge_endpoints,
    make_cell,
    norms,
    plane_orientation,
    shift,
    square,
    vertex,
)
from .io import cell_line, dump_chain, load_chain
from .refined import RefinedComplex, RefinedEdge, RefinedFace, SquareSubdivision, oriented

__all__ = [
    "AXIS_NAMES",
    "Cell",
    "Chain",
    "RefinedComplex",
    "RefinedEdge",
    "RefinedFace",
    "SquareSubdivision",
    "boundary",
    "cell_boundary",
    "cell_line",
    "cells_in_box",
    "cube",
    "dump_chain",
    "edge",
    "edge_endpoints",
    "load_chain",
    "make_cell",
    "norms",
    "oriented",
    "plane_orientation",
    "shift",
    "square",
    "vertex",
]
