"""Reference optimum for the smallest-multiplicity lattice filling of a 1-cycle.

Solves min t subject to boundary(C) = alpha, |C_q| <= t over integer 2-chains
supported on the squares of a box, as a mixed-integer program. Only meant for
toy sizes; it shares no code with the transposition algorithm.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

from .cubical import Chain, cell_boundary, cells_in_box, edge_endpoints


def bounding_box(alpha: Chain, pad: int = 0):
    pts = []
    for e in alpha:
        pts.extend(edge_endpoints(e))
    lo = tuple(min(p[i] for p in pts) - pad for i in range(3))
    hi = tuple(max(p[i] for p in pts) + pad for i in range(3))
    return lo, hi


def min_linf_filling(alpha: Chain, pad: int = 0) -> tuple[int, Chain]:
    """Optimal L-infinity filling of a lattice 1-cycle among chains in its bounding box."""
    if not alpha:
        return 0, Chain.zero(2)
    spacing = next(iter(alpha)).spacing
    lo, hi = bounding_box(alpha, pad)
    squares = cells_in_box(lo, hi, 2, spacing)
    edges = cells_in_box(lo, hi, 1, spacing)
    eidx = {e: i for i, e in enumerate(edges)}
    for e in alpha:
        if e not in eidx:
            raise ValueError("cycle leaves its bounding box")
    nq = len(squares)
    A = lil_matrix((len(edges), nq + 1))
    for j, q in enumerate(squares):
        for e, s in cell_boundary(q).items():
            A[eidx[e], j] = s
    b = np.zeros(len(edges))
    for e, k in alpha.items():
        b[eidx[e]] = k
    B = lil_matrix((2 * nq, nq + 1))
    for j in range(nq):
        B[2 * j, j] = 1
        B[2 * j, nq] = -1
        B[2 * j + 1, j] = -1
        B[2 * j + 1, nq] = -1
    cons = [
        LinearConstraint(A.tocsr(), b, b),
        LinearConstraint(B.tocsr(), -np.inf, 0),
    ]
    cost = np.zeros(nq + 1)
    cost[nq] = 1
    big = float(alpha.l1())
    bounds = Bounds(np.r_[np.full(nq, -big), 0.0], np.r_[np.full(nq, big), big])
    res = milp(cost, constraints=cons, integrality=np.ones(nq + 1), bounds=bounds)
    if not res.success:
        raise RuntimeError(f"oracle failed: {res.message}")
    x = np.rint(res.x).astype(int)
    chain = Chain(2, {squares[j]: int(x[j]) for j in range(nq) if x[j]})
    return int(x[nq]), chain
