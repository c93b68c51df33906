import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from superquant_toolkit.possys.service import PositiveSystem, simple_coefficients
from superquant_toolkit.realform.service import RealForm
from superquant_toolkit.rootdata.service import DimensionMismatch, Root, RootSystem
from superquant_utils import linalg, polyhedra
from superquant_utils.errors import ToolkitError
from superquant_utils.linalg import RationalVector

ENUMERATION_CHUNK = 200_000


def tool_name():
    return "Cones and Cells"


class NotSimplicial(ToolkitError):
    pass


class Relation(str, Enum):
    GE = ">= 0"
    GT = "> 0"
    LT = "< 0"
    EQ = "= 0"
    NE = "!= 0"


class Shift(str, Enum):
    NONE = "none"
    RHO = "rho"


@dataclass(frozen=True)
class Constraint:
    """coroot . lam + offset compared with zero; offset is rho(h_alpha) for shifted rows."""
    label: str
    coroot: RationalVector
    relation: Relation
    shift: Shift = Shift.NONE
    offset: Fraction = Fraction(0)
    root: Optional[Root] = field(default=None, compare=False)

    def value(self, lam: Sequence) -> Fraction:
        return linalg.dot(self.coroot, linalg.as_vector(lam)) + self.offset

    def holds(self, lam: Sequence) -> bool:
        return _compare(self.relation, self.value(lam))

    def inequalities(self) -> List[polyhedra.Inequality]:
        if self.relation is Relation.GE:
            return [polyhedra.weak(self.coroot, self.offset)]
        if self.relation is Relation.GT:
            return [polyhedra.strict(self.coroot, self.offset)]
        if self.relation is Relation.LT:
            return [polyhedra.strict(linalg.negate(self.coroot), -self.offset)]
        if self.relation is Relation.EQ:
            return polyhedra.equality(self.coroot, self.offset)
        raise ValueError(f"Constraint '{self.label} {self.relation.value}' is not convex.")


def _compare(relation: Relation, value) -> bool:
    if relation is Relation.GE:
        return value >= 0
    if relation is Relation.GT:
        return value > 0
    if relation is Relation.LT:
        return value < 0
    if relation is Relation.EQ:
        return value == 0
    return value != 0


@dataclass(frozen=True)
class ConeRegion:
    name: str
    constraints: Tuple[Constraint, ...]
    ambient_dim: int
    quotient_kernel: Optional[RationalVector] = None

    def contains(self, lam: Sequence) -> bool:
        lam = linalg.as_vector(lam)
        if len(lam) != self.ambient_dim:
            raise DimensionMismatch(f"Region '{self.name}' lives in {self.ambient_dim} coordinates, got {len(lam)}.")
        return all(c.holds(lam) for c in self.constraints)

    def inequalities(self) -> List[polyhedra.Inequality]:
        rows = []
        for c in self.constraints:
            rows.extend(c.inequalities())
        if self.quotient_kernel is not None:
            last = tuple(Fraction(int(i == self.ambient_dim - 1)) for i in range(self.ambient_dim))
            rows.extend(polyhedra.equality(last))
        return rows

    def is_empty(self) -> bool:
        return not polyhedra.is_feasible(self.inequalities(), self.ambient_dim)

    def homogeneous(self) -> "ConeRegion":
        return ConeRegion(f"{self.name} (homogeneous)", tuple(c for c in self.constraints if c.shift is Shift.NONE),
                          self.ambient_dim, self.quotient_kernel)

    def closure_rows(self) -> List[RationalVector]:
        """Rows h with h . lam >= 0 describing the closure of the homogeneous part."""
        rows = []
        for c in self.constraints:
            if c.shift is not Shift.NONE:
                continue
            if c.relation in (Relation.GE, Relation.GT):
                rows.append(c.coroot)
            elif c.relation is Relation.LT:
                rows.append(linalg.negate(c.coroot))
            elif c.relation is Relation.EQ:
                rows.extend([c.coroot, linalg.negate(c.coroot)])
        return rows

    def rows(self) -> List[Dict[str, str]]:
        return [{"constraint": c.label, "relation": c.relation.value, "shift": c.shift.value,
                 "coroot": linalg.format_vector(c.coroot), "offset": str(c.offset)} for c in self.constraints]


@dataclass(frozen=True)
class Cell:
    R: Tuple[Root, ...]
    indices: Tuple[int, ...]
    closure_R: Tuple[Root, ...]
    region: ConeRegion
    subspace: Tuple[RationalVector, ...]
    ps: PositiveSystem = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.subspace)

    @property
    def label(self) -> str:
        return cell_label(self.ps, self.R)


def cell_label(ps: PositiveSystem, R: Sequence[Root]) -> str:
    return "R={" + ",".join(ps.root_system.label(r.coords) for r in R) + "}"


def _constraint(ps: PositiveSystem, root: Root, relation: Relation, shift: Shift = Shift.NONE) -> Constraint:
    rs = ps.root_system
    coroot = rs.coroot_row(root)
    offset = linalg.dot(coroot, ps.rho) if shift is Shift.RHO else Fraction(0)
    return Constraint(rs.label(root.coords), coroot, relation, shift, offset, root)


def _region(ps: PositiveSystem, name: str, constraints: List[Constraint]) -> ConeRegion:
    rs = ps.root_system
    return ConeRegion(name, tuple(constraints), rs.ambient_dim, rs.quotient_kernel)


def _hc_constraints(ps: PositiveSystem, compact_relation: Relation) -> List[Constraint]:
    constraints = [_constraint(ps, alpha, compact_relation) for alpha in ps.compact_positive]
    constraints += [_constraint(ps, beta, Relation.LT) for beta in ps.q_plus]
    return constraints


def _shifted_constraints(ps: PositiveSystem) -> List[Constraint]:
    return [_constraint(ps, beta, Relation.LT, Shift.RHO) for beta in ps.q_plus]


def hc_cone(ps: PositiveSystem, rs: RootSystem, rf: RealForm) -> ConeRegion:
    return _region(ps, f"C~ {rf.tag}", _hc_constraints(ps, Relation.GE))


def parameter_set_C(ps: PositiveSystem, rs: RootSystem, rf: RealForm) -> ConeRegion:
    return _region(ps, f"C {rf.tag}", _hc_constraints(ps, Relation.GE) + _shifted_constraints(ps))


def interior_C(ps: PositiveSystem, rs: RootSystem, rf: RealForm) -> ConeRegion:
    return _region(ps, f"C interior {rf.tag}", _hc_constraints(ps, Relation.GT) + _shifted_constraints(ps))


def closure_of_R(ps: PositiveSystem, R: Sequence[Root]) -> Tuple[Root, ...]:
    chosen = [ps.simples.index(r) for r in R]
    closure = []
    for alpha in ps.positives:
        coefficients = simple_coefficients(ps, alpha)
        if all(c == 0 for i, c in enumerate(coefficients) if i not in chosen):
            closure.append(alpha)
    return tuple(closure)


def _frame(ps: PositiveSystem, R: Sequence[Root]) -> Tuple[RationalVector, ...]:
    rs = ps.root_system
    rows = [rs.coroot_row(r) for r in R]
    if rs.quotient_kernel is not None:
        rows.append(tuple(Fraction(int(i == rs.ambient_dim - 1)) for i in range(rs.ambient_dim)))
    basis = linalg.nullspace(rows, rs.ambient_dim)
    return tuple(tuple(Fraction(a) for a in linalg.primitive(v)) for v in basis)


def make_cell(ps: PositiveSystem, R: Sequence[Root]) -> Cell:
    for r in R:
        if r not in ps.pi_c:
            raise ValueError(f"{ps.root_system.label(r.coords)} is not a compact simple root.")
    R = tuple(r for r in ps.pi_c if r in R)
    indices = tuple(ps.simple_index(r) for r in R)
    constraints = [_constraint(ps, alpha, Relation.GE) for alpha in ps.compact_positive]
    constraints += [_constraint(ps, beta, Relation.LT) for beta in ps.q_plus]
    constraints += _shifted_constraints(ps)
    constraints += [_constraint(ps, r, Relation.EQ) for r in R]
    constraints += [_constraint(ps, r, Relation.GT) for r in ps.pi_c if r not in R]
    return Cell(R=R, indices=indices, closure_R=closure_of_R(ps, R),
                region=_region(ps, f"cell {cell_label(ps, R)}", constraints), subspace=_frame(ps, R), ps=ps)


def cells(ps: PositiveSystem, rs: RootSystem, rf: RealForm) -> List[Cell]:
    result = []
    for size in range(len(ps.pi_c) + 1):
        for R in itertools.combinations(ps.pi_c, size):
            result.append(make_cell(ps, R))
    logging.debug(f"{tool_name()}: {rf.tag} has {len(result)} cells.")
    return result


def cell_of(cell_list: Sequence[Cell], lam: Sequence) -> Optional[Cell]:
    matches = [cell for cell in cell_list if cell.region.contains(lam)]
    if len(matches) > 1:
        raise ArithmeticError(f"Weight ({linalg.format_vector(linalg.as_vector(lam))}) lies in "
                              f"{len(matches)} cells; cells must be disjoint.")
    return matches[0] if matches else None


def regular_set(ps: PositiveSystem, cell: Cell) -> ConeRegion:
    closure = set(cell.closure_R)
    constraints = [_constraint(ps, r, Relation.EQ) for r in cell.R]
    constraints += [_constraint(ps, alpha, Relation.NE) for alpha in ps.positives if alpha not in closure]
    return _region(ps, f"regular set of {cell.label}", constraints)


def chamber_signature(ps: PositiveSystem, lam: Sequence) -> Tuple[int, ...]:
    signature = []
    for alpha in ps.positives:
        value = ps.pairing(lam, alpha)
        signature.append((value > 0) - (value < 0))
    return tuple(signature)


def canonical(rs: RootSystem, lam: Sequence) -> RationalVector:
    """Representative on the zero slice of the last coordinate (type A), otherwise lam itself."""
    lam = linalg.as_vector(lam)
    if rs.quotient_kernel is None:
        return lam
    shift = lam[-1] / -rs.quotient_kernel[-1]
    return linalg.add(lam, linalg.scale(shift, rs.quotient_kernel))


def coordinates(cell: Cell, lam: Sequence) -> RationalVector:
    rs = cell.ps.root_system
    y = linalg.solve_combination(cell.subspace, canonical(rs, lam))
    if y is None:
        raise DimensionMismatch(f"({linalg.format_vector(linalg.as_vector(lam))}) is outside the subspace "
                                f"of cell {cell.label}.")
    return y


def from_coordinates(cell: Cell, y: Sequence) -> RationalVector:
    y = linalg.as_vector(y)
    if len(y) != cell.dim:
        raise DimensionMismatch(f"Cell {cell.label} has dimension {cell.dim}, got {len(y)} coordinates.")
    lam = tuple(Fraction(0) for _ in range(cell.ps.root_system.ambient_dim))
    for coefficient, vector in zip(y, cell.subspace):
        lam = linalg.add(lam, linalg.scale(coefficient, vector))
    return lam


def extreme_rays(cell: Cell) -> List[RationalVector]:
    """Primitive ambient generators of the closed homogeneous cone of a cell."""
    frame = cell.subspace
    rows = [tuple(linalg.dot(h, e) for e in frame) for h in cell.region.closure_rows()]
    lineality, rays = polyhedra.cone_generators(rows, cell.dim)
    if lineality or len(rays) != cell.dim:
        raise NotSimplicial(f"Cell {cell.label} has {len(rays)} extreme rays and {len(lineality)} lineality "
                            f"directions in dimension {cell.dim}.")
    ambient = [tuple(Fraction(a) for a in linalg.primitive(from_coordinates(cell, r))) for r in rays]
    logging.debug(f"{tool_name()}: cell {cell.label} rays " + "; ".join(linalg.format_vector(r) for r in ambient))
    return ambient


def _integer_rows(region: ConeRegion, lattice_scale: int):
    forms = []
    for c in region.constraints:
        denominator = linalg.common_denominator(list(c.coroot) + [c.offset])
        coefficients = np.array([int(a * denominator) for a in c.coroot], dtype=np.int64)
        constant = int(c.offset * denominator * lattice_scale)
        forms.append((coefficients, constant, c.relation))
    return forms


def _mask(points: np.ndarray, forms) -> np.ndarray:
    keep = np.ones(points.shape[0], dtype=bool)
    for coefficients, constant, relation in forms:
        keep &= _compare(relation, points @ coefficients + constant)
    return keep


def enumerate_integral(region: ConeRegion, box: int, lattice_scale: int = 1) -> List[RationalVector]:
    """Lattice weights v / lattice_scale with integer |v_i| <= box lying in the region, in lexicographic order."""
    if box < 0:
        raise ValueError(f"Box bound must be nonnegative, got {box}.")
    if lattice_scale < 1:
        raise ValueError(f"Lattice scale must be a positive integer, got {lattice_scale}.")
    dim = region.ambient_dim
    free = dim - 1 if region.quotient_kernel is not None else dim
    forms = _integer_rows(region, lattice_scale)
    side = 2 * box + 1
    lead = 0
    while lead < free and side ** (free - lead) > ENUMERATION_CHUNK:
        lead += 1
    tail = free - lead
    tail_grid = np.indices((side,) * tail, dtype=np.int64).reshape(tail, -1).T - box
    found = []
    for prefix in itertools.product(range(-box, box + 1), repeat=lead):
        head = np.tile(np.array(prefix, dtype=np.int64), (tail_grid.shape[0], 1))
        points = np.hstack([head, tail_grid])
        if free < dim:
            points = np.hstack([points, np.zeros((points.shape[0], 1), dtype=np.int64)])
        for row in points[_mask(points, forms)]:
            found.append(tuple(Fraction(int(v), lattice_scale) for v in row))
    logging.debug(f"{tool_name()}: {len(found)} lattice weights of '{region.name}' in box {box}.")
    return found


def wall_rows(cell: Cell) -> List[RationalVector]:
    """Rows w with lam(h_alpha) = w . y in frame coordinates, for alpha in Delta^+ outside the closure of R."""
    closure = set(cell.closure_R)
    rs = cell.ps.root_system
    return [tuple(linalg.dot(rs.coroot_row(alpha), e) for e in cell.subspace)
            for alpha in cell.ps.positives if alpha not in closure]
