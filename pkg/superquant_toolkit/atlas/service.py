import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from superquant_toolkit.cones.service import Cell, ConeRegion
from superquant_toolkit.kahler import service as kahler_service
from superquant_toolkit.kahler.service import Potential
from superquant_utils import linalg
from superquant_utils.linalg import RationalVector

PLOT_PARAMS = {
    "svg.hashsalt": "superquant-atlas",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def tool_name():
    return "Atlas"


@dataclass(frozen=True)
class SliceSpec:
    v1: RationalVector
    v2: RationalVector
    origin: RationalVector

    def point(self, i, j) -> RationalVector:
        return linalg.add(self.origin, linalg.add(linalg.scale(i, self.v1), linalg.scale(j, self.v2)))


def parse_slice(text: str, ambient_dim: int) -> SliceSpec:
    parts = [p.strip() for p in text.split(";")]
    if len(parts) != 3:
        raise ValueError(f"Slice '{text}' must have the form 'v1;v2;origin'.")
    vectors = []
    for part in parts:
        vector = linalg.as_vector(x for x in part.split(",") if x.strip())
        if len(vector) != ambient_dim:
            raise ValueError(f"Slice vector '{part}' has {len(vector)} entries, expected {ambient_dim}.")
        vectors.append(vector)
    if linalg.rank(vectors[:2], ambient_dim) != 2:
        raise ValueError(f"Slice directions in '{text}' are linearly dependent.")
    return SliceSpec(*vectors)


def default_slice(ambient_dim: int, rank: int) -> Optional[SliceSpec]:
    if rank != 2:
        return None
    unit = [tuple(Fraction(int(i == k)) for i in range(ambient_dim)) for k in range(2)]
    return SliceSpec(unit[0], unit[1], tuple(Fraction(0) for _ in range(ambient_dim)))


def slice_points(region: ConeRegion, plane: SliceSpec, box: int) -> List[Tuple[int, int, bool]]:
    return [(i, j, region.contains(plane.point(i, j)))
            for i in range(-box, box + 1) for j in range(-box, box + 1)]


def _image_samples(cell: Cell, p: Potential, plane: SliceSpec, width: float, count: int) -> np.ndarray:
    frame = np.array([[float(a) for a in e] for e in cell.subspace], dtype=float).reshape(-1, len(plane.origin))
    basis = np.array([[float(a) for a in plane.v1], [float(a) for a in plane.v2]]).T
    origin = np.array([float(a) for a in plane.origin])
    axis = np.linspace(-width, width, count)
    grid = np.stack(np.meshgrid(*([axis] * cell.dim), indexing="ij"), axis=-1).reshape(-1, cell.dim)
    projected = []
    for x in grid:
        try:
            weight = kahler_service.moment(p, x) @ frame
        except kahler_service.PotentialOverflow:
            continue
        st, *_ = np.linalg.lstsq(basis, weight - origin, rcond=None)
        projected.append(st)
    return np.array(projected).reshape(-1, 2)


def render_slice(region: ConeRegion, plane: SliceSpec, box: int, out_path: str,
                 cell: Optional[Cell] = None, potential: Optional[Potential] = None,
                 title: str = "", highlight: Sequence[Sequence] = ()) -> str:
    points = slice_points(region, plane, box)
    inside = np.array([(i, j) for i, j, ok in points if ok], dtype=float).reshape(-1, 2)
    outside = np.array([(i, j) for i, j, ok in points if not ok], dtype=float).reshape(-1, 2)
    with matplotlib.rc_context(PLOT_PARAMS):
        fig = Figure(figsize=(5, 5))
        ax = fig.add_subplot()
        if cell is not None and potential is not None:
            samples = _image_samples(cell, potential, plane, 3.0, 41 if cell.dim <= 2 else 9)
            if samples.size:
                ax.scatter(samples[:, 0], samples[:, 1], s=4, c="tab:blue", alpha=0.15, linewidths=0,
                           label="moment image (sampled)")
        ax.scatter(outside[:, 0], outside[:, 1], s=6, c="lightgray", label="outside")
        ax.scatter(inside[:, 0], inside[:, 1], s=14, c="tab:red", label=region.name)
        marked = [linalg.solve_combination([plane.v1, plane.v2],
                                           linalg.add(linalg.as_vector(lam), linalg.negate(plane.origin)))
                  for lam in highlight]
        marked = [m for m in marked if m is not None]
        if marked:
            ax.scatter([float(m[0]) for m in marked], [float(m[1]) for m in marked], s=40, marker="x",
                       c="black", label="selected")
        ax.set_xlim(-box - 0.5, box + 0.5)
        ax.set_ylim(-box - 0.5, box + 0.5)
        ax.set_xlabel(f"v1 = ({linalg.format_vector(plane.v1)})")
        ax.set_ylabel(f"v2 = ({linalg.format_vector(plane.v2)})")
        ax.set_aspect("equal")
        ax.set_title(title or region.name)
        ax.legend(loc="upper right", fontsize=7)
        fig.savefig(out_path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    logging.info(f"{tool_name()}: wrote {len(inside)} region points of {len(points)} to '{out_path}'.")
    return out_path
