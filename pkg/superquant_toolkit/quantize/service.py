import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from superquant_toolkit.cones import service as cones_service
from superquant_toolkit.cones.service import Cell, NotSimplicial
from superquant_toolkit.kahler import service as kahler_service
from superquant_toolkit.kahler.service import MaxIterations, NewtonParams, Potential, Term
from superquant_toolkit.possys.service import Context
from superquant_toolkit.rootdata.service import DimensionMismatch
from superquant_utils import linalg
from superquant_utils.errors import ToolkitError
from superquant_utils.linalg import RationalVector

IMAGE_SAMPLE_WIDTH = 1.0
IMAGE_SAMPLE_POINTS = 3


def tool_name():
    return "Quantization"


class NotInImage(ToolkitError):
    pass


@dataclass(frozen=True)
class SpectrumEntry:
    lam: RationalVector
    highest_weight_label: RationalVector
    multiplicity: int = 1


@dataclass
class SpectrumReport:
    cell: Cell
    potential: Potential
    box: int
    entries: List[SpectrumEntry] = field(default_factory=list)
    undecided: List[RationalVector] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def multiplicity(self, lam: Sequence) -> int:
        lam = linalg.as_vector(lam)
        return sum(e.multiplicity for e in self.entries if e.lam == lam)

    def weights(self) -> List[RationalVector]:
        return [e.lam for e in self.entries]


@dataclass
class GelfandModel:
    reports: List[SpectrumReport]
    skipped: List[Cell] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class ExactlyOnceReport:
    ok: bool
    misses: Tuple[RationalVector, ...]
    doubles: Tuple[RationalVector, ...]
    checked: int
    excluded: int = 0


@dataclass(frozen=True)
class ReductionReport:
    lam_hat: RationalVector
    gamma: Tuple[np.ndarray, ...]
    residuals: Tuple[float, ...]
    reduced_form_label: RationalVector
    reduced_quantization_label: RationalVector
    in_C: bool


@dataclass(frozen=True)
class QRCheck:
    lam_hat: RationalVector
    lhs: Optional[int]
    rhs: Optional[int]
    equal: Optional[bool]

    @property
    def decided(self) -> bool:
        return self.equal is not None


def is_integral(lam: Sequence, lattice_scale: int = 1) -> bool:
    return all((linalg.to_fraction(a) * lattice_scale).denominator == 1 for a in lam)


def in_box(lam: Sequence, box: int, lattice_scale: int = 1) -> bool:
    return all(abs(linalg.to_fraction(a) * lattice_scale) <= box for a in lam)


def model_potential(cell: Cell, coefficients: Optional[Sequence[float]] = None) -> Potential:
    """Sum of exponentials of the extreme rays of the cell, in frame coordinates."""
    rays = cones_service.extreme_rays(cell)
    if coefficients is None:
        coefficients = [1.0] * len(rays)
    if len(coefficients) != len(rays):
        raise kahler_service.InvalidPotential(
            f"Cell {cell.label} has {len(rays)} rays but {len(coefficients)} coefficients were given.")
    terms = tuple(Term(float(c), cones_service.coordinates(cell, ray)) for c, ray in zip(coefficients, rays))
    return Potential(terms, cell.dim, None, f"model {cell.label}")


def _image_leaves_hc_cone(ctx: Context, cell: Cell, p: Potential) -> Optional[np.ndarray]:
    rs, ps = ctx.rs, ctx.ps
    frame = np.array([[float(a) for a in e] for e in cell.subspace], dtype=float).reshape(-1, rs.ambient_dim)
    compact = np.array([[float(a) for a in rs.coroot_row(r)] for r in ps.compact_positive]).reshape(-1, rs.ambient_dim)
    q_rows = np.array([[float(a) for a in rs.coroot_row(r)] for r in ps.q_plus]).reshape(-1, rs.ambient_dim)
    axis = np.linspace(-IMAGE_SAMPLE_WIDTH, IMAGE_SAMPLE_WIDTH, IMAGE_SAMPLE_POINTS)
    for x in itertools.product(axis, repeat=cell.dim):
        try:
            weight = kahler_service.moment(p, x) @ frame
        except kahler_service.PotentialOverflow:
            continue
        scale = max(1.0, float(np.abs(weight).max(initial=0.0)))
        if np.any(compact @ weight < -1e-9 * scale) or np.any(q_rows @ weight >= -1e-9 * scale):
            return weight
    return None


def spectrum(ctx: Context, cell: Cell, p: Potential, box: int, lattice_scale: int = 1,
             solver: NewtonParams = NewtonParams()) -> SpectrumReport:
    report = SpectrumReport(cell=cell, potential=p, box=box)
    outside = _image_leaves_hc_cone(ctx, cell, p)
    if outside is not None:
        message = (f"moment image of {p.name or 'potential'} leaves the Harish-Chandra cone near "
                   f"({', '.join(f'{v:.6g}' for v in outside)}); weights are intersected with C")
        logging.warning(f"{tool_name()}: {message}")
        report.warnings.append(message)
    for lam in cones_service.enumerate_integral(cell.region, box, lattice_scale):
        y = cones_service.coordinates(cell, lam)
        try:
            result = kahler_service.in_moment_image(p, y, solver)
        except MaxIterations as e:
            logging.warning(f"{tool_name()}: undecided weight ({linalg.format_vector(lam)}): {e}")
            report.undecided.append(lam)
            continue
        if result.member:
            report.entries.append(SpectrumEntry(lam, linalg.add(lam, ctx.ps.rho)))
    if report.undecided:
        report.warnings.append(f"{len(report.undecided)} weights undecided by the solver")
    logging.info(f"{tool_name()}: cell {cell.label} spectrum has {len(report.entries)} weights in box {box} "
                 f"({len(report.undecided)} undecided).")
    return report


def gelfand_model(ctx: Context, box: int, lattice_scale: int = 1,
                  solver: NewtonParams = NewtonParams()) -> GelfandModel:
    model = GelfandModel(reports=[])
    for cell in cones_service.cells(ctx.ps, ctx.rs, ctx.rf):
        try:
            p = model_potential(cell)
        except NotSimplicial as e:
            message = f"cell {cell.label} skipped: {e}"
            logging.warning(f"{tool_name()}: {message}")
            model.skipped.append(cell)
            model.warnings.append(message)
            continue
        model.reports.append(spectrum(ctx, cell, p, box, lattice_scale, solver))
    return model


def verify_exactly_once(ctx: Context, reports: Sequence[SpectrumReport], box: int, lattice_scale: int = 1,
                        skipped: Sequence[Cell] = ()) -> ExactlyOnceReport:
    counts: Dict[RationalVector, int] = {}
    for report in reports:
        for entry in report.entries:
            counts[entry.lam] = counts.get(entry.lam, 0) + entry.multiplicity
    misses, doubles = [], []
    checked = excluded = 0
    region = cones_service.parameter_set_C(ctx.ps, ctx.rs, ctx.rf)
    for lam in cones_service.enumerate_integral(region, box, lattice_scale):
        if skipped and any(cell.region.contains(lam) for cell in skipped):
            excluded += 1
            continue
        checked += 1
        seen = counts.get(lam, 0)
        if seen == 0:
            misses.append(lam)
        elif seen > 1:
            doubles.append(lam)
    ok = not misses and not doubles
    logging.info(f"{tool_name()}: exactly-once check over {checked} weights: {len(misses)} misses, "
                 f"{len(doubles)} doubles, {excluded} excluded.")
    return ExactlyOnceReport(ok, tuple(misses), tuple(doubles), checked, excluded)


def reduce(ctx: Context, cell: Cell, p: Potential, lam_hat: Sequence,
           solver: NewtonParams = NewtonParams(), starts: Sequence[Sequence[float]] = ()) -> ReductionReport:
    lam_hat = cones_service.canonical(ctx.rs, lam_hat)
    try:
        y = cones_service.coordinates(cell, lam_hat)
    except DimensionMismatch as e:
        raise NotInImage(str(e)) from e
    gamma: List[np.ndarray] = []
    residuals: List[float] = []
    for start in [solver.start] + [tuple(s) for s in starts]:
        params = NewtonParams(solver.tol, solver.max_iter, solver.divergence_radius, solver.armijo,
                              solver.max_halvings, start)
        result = kahler_service.in_moment_image(p, y, params)
        if not result.member:
            raise NotInImage(f"({linalg.format_vector(lam_hat)}) is not in the moment image of {p.name or 'potential'}.")
        if not any(np.abs(result.point - a).max() <= 1e-6 for a in gamma):
            gamma.append(result.point)
            residuals.append(result.residual)
    in_C = cones_service.parameter_set_C(ctx.ps, ctx.rs, ctx.rf).contains(lam_hat)
    logging.debug(f"{tool_name()}: fiber over ({linalg.format_vector(lam_hat)}) has {len(gamma)} point(s).")
    return ReductionReport(lam_hat=lam_hat, gamma=tuple(gamma), residuals=tuple(residuals),
                           reduced_form_label=lam_hat, reduced_quantization_label=linalg.add(lam_hat, ctx.ps.rho),
                           in_C=in_C)


def check_qr(ctx: Context, cell: Cell, p: Potential, lam_hat: Sequence, box: int, lattice_scale: int = 1,
             solver: NewtonParams = NewtonParams(), spectrum_report: Optional[SpectrumReport] = None) -> QRCheck:
    """Compares the quantization of the reduced space with the lam_hat multiplicity of the spectrum."""
    lam_hat = cones_service.canonical(ctx.rs, lam_hat)
    if not is_integral(lam_hat, lattice_scale):
        raise ValueError(f"({linalg.format_vector(lam_hat)}) is not in the integral lattice.")
    if not in_box(lam_hat, box, lattice_scale):
        raise ValueError(f"({linalg.format_vector(lam_hat)}) lies outside the box {box}.")
    try:
        lhs = 1 if reduce(ctx, cell, p, lam_hat, solver).in_C else 0
    except NotInImage:
        lhs = 0
    except MaxIterations as e:
        logging.warning(f"{tool_name()}: reduction at ({linalg.format_vector(lam_hat)}) undecided: {e}")
        return QRCheck(lam_hat, None, None, None)
    if spectrum_report is None:
        spectrum_report = spectrum(ctx, cell, p, box, lattice_scale, solver)
    if lam_hat in spectrum_report.undecided:
        return QRCheck(lam_hat, lhs, None, None)
    rhs = spectrum_report.multiplicity(lam_hat)
    return QRCheck(lam_hat, lhs, rhs, lhs == rhs)


def boundary_defect(ctx: Context, box: int, lattice_scale: int = 1) -> List[RationalVector]:
    """Integral weights of C outside its interior: those cannot occur for X = GA."""
    interior = cones_service.interior_C(ctx.ps, ctx.rs, ctx.rf)
    region = cones_service.parameter_set_C(ctx.ps, ctx.rs, ctx.rf)
    return [lam for lam in cones_service.enumerate_integral(region, box, lattice_scale) if not interior.contains(lam)]
