"""Systole-type bounds evaluated on a marked mesh, and the f_* calculator."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from ..surface import HomologyLabeling, TorusMesh, systole_in_class

LOEWNER = math.sqrt(2) * 3 ** -0.25


def diameter(points) -> float:
    """Largest distance between two points of a polygon (its vertex set suffices)."""
    P = np.array([[float(c) for c in p] for p in points])
    if len(P) < 2:
        return 0.0
    best = 0.0
    for i in range(len(P) - 1):
        d = np.max(np.sum((P[i + 1 :] - P[i]) ** 2, axis=1))
        best = max(best, float(d))
    return math.sqrt(best)


@dataclass
class A3Report:
    fstar: tuple  # ((a, b), (c, d))
    sys_u_sq: int  # b^2 + d^2
    sys_v_sq: int  # a^2 + c^2
    pred_main: float  # min{(b^2+d^2)^(-1/6), (a^2+c^2)^(-1/6)}
    pred_area: float  # max{(b^2+d^2)^(-1/2), (a^2+c^2)^(-1/2)}
    nash: float  # min{(a^2+b^2)^(-1/2), (c^2+d^2)^(-1/2)}
    winner: str  # "main" | "area" | "tie"

    @property
    def sys_u(self) -> float:
        return math.sqrt(self.sys_u_sq)

    @property
    def sys_v(self) -> float:
        return math.sqrt(self.sys_v_sq)


def a3_report(fstar) -> A3Report:
    (a, b), (c, d) = ((int(fstar[0][0]), int(fstar[0][1])), (int(fstar[1][0]), int(fstar[1][1])))
    if a * d - b * c != 1:
        raise ValueError(f"f_* must have determinant 1, got {a * d - b * c}")
    X, Y = b * b + d * d, a * a + c * c
    lo, hi = min(X, Y), max(X, Y)
    # max^(-1/6) < min^(-1/2)  <=>  min^3 < max
    if lo ** 3 < hi:
        winner = "main"
    elif lo ** 3 > hi:
        winner = "area"
    else:
        winner = "tie"
    return A3Report(
        ((a, b), (c, d)),
        X,
        Y,
        min(X ** (-1 / 6), Y ** (-1 / 6)),
        max(X ** -0.5, Y ** -0.5),
        min((a * a + b * b) ** -0.5, (c * c + d * d) ** -0.5),
        winner,
    )


def parse_fstar(text: str):
    vals = [int(x) for x in text.split(",")]
    if len(vals) != 4:
        raise ValueError("--fstar needs four integers a,b,c,d")
    return ((vals[0], vals[1]), (vals[2], vals[3]))


@dataclass
class BoundReport:
    sys_u_est: float
    sys_v_est: float
    area: float
    extrinsic_upper: float
    thm13_bound: float
    thmA2_bound: float
    loewner_bound: float
    granularity: float
    a3: A3Report | None = None

    def ratios(self) -> dict:
        """Dimensionless quantities; invariant under scaling the mesh."""
        return {
            "thm13_over_extrinsic": self.thm13_bound / self.extrinsic_upper,
            "thmA2_over_extrinsic": self.thmA2_bound / self.extrinsic_upper,
            "sys_u_over_sqrt_area": self.sys_u_est / math.sqrt(self.area),
            "sys_v_over_sqrt_area": self.sys_v_est / math.sqrt(self.area),
        }

    def dumps(self) -> str:
        out = ["[bounds]"]
        for f in fields(self):
            if f.name == "a3":
                continue
            out.append(f"{f.name} = {getattr(self, f.name):.15g}")
        if self.a3 is not None:
            r = self.a3
            out.append(f"fstar = {r.fstar[0][0]},{r.fstar[0][1]},{r.fstar[1][0]},{r.fstar[1][1]}")
            out.append(f"a3_sys_u = {r.sys_u:.15g}")
            out.append(f"a3_sys_v = {r.sys_v:.15g}")
            out.append(f"a3_pred_main = {r.pred_main:.15g}")
            out.append(f"a3_pred_area = {r.pred_area:.15g}")
            out.append(f"a3_nash = {r.nash:.15g}")
            out.append(f"a3_winner = {r.winner}")
        return "\n".join(out) + "\n"


def thm13_value(sys_u: float, area: float) -> float:
    return sys_u ** (-1 / 3) * area ** (2 / 3) + area / sys_u


def evaluate_bounds(
    mesh: TorusMesh,
    fstar=None,
    lab: HomologyLabeling | None = None,
    witness_diameter: float | None = None,
    sys_u: float | None = None,
):
    """Fill a BoundReport; extrinsic_upper is the diameter of the shortest v loop
    found (or of a supplied witness, whichever is smaller)."""
    lab = lab or HomologyLabeling.build(mesh)
    su = sys_u if sys_u is not None else systole_in_class(mesh, (1, 0), lab)[0]
    sv, vloop = systole_in_class(mesh, (0, 1), lab)
    area = mesh.area()
    ext = diameter([mesh.vertices[i] for i in vloop])
    if witness_diameter is not None:
        ext = min(ext, witness_diameter)
    return BoundReport(
        su,
        sv,
        area,
        ext,
        thm13_value(su, area),
        area / min(su, sv),
        LOEWNER * math.sqrt(area),
        mesh.granularity(),
        a3_report(fstar) if fstar is not None else None,
    ), vloop


