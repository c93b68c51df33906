"""Exponential-affine potentials on a cell frame; the moment map is half the gradient."""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from superquant_toolkit.cones.service import Cell, wall_rows
from superquant_utils import linalg, polyhedra
from superquant_utils.errors import ToolkitError
from superquant_utils.linalg import RationalVector

EXPONENT_LIMIT = 700.0


def tool_name():
    return "Kahler Potentials"


class InvalidPotential(ToolkitError):
    pass


class PotentialOverflow(ToolkitError):
    pass


class MaxIterations(ToolkitError):
    pass


@dataclass(frozen=True)
class NewtonParams:
    tol: float = 1e-8
    max_iter: int = 200
    divergence_radius: float = 1e3
    armijo: float = 1e-4
    max_halvings: int = 60
    start: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class Term:
    coefficient: float
    weight: RationalVector


@dataclass(frozen=True)
class Potential:
    terms: Tuple[Term, ...]
    domain_dim: int
    quad: Optional[Tuple[RationalVector, ...]] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for term in self.terms:
            if not term.coefficient > 0:
                raise InvalidPotential(f"Coefficient {term.coefficient} must be positive.")
            if len(term.weight) != self.domain_dim:
                raise InvalidPotential(
                    f"Weight ({linalg.format_vector(term.weight)}) does not live in dimension {self.domain_dim}.")
        if self.quad is not None:
            q = np.array([[float(a) for a in row] for row in self.quad], dtype=float)
            if q.shape != (self.domain_dim, self.domain_dim):
                raise InvalidPotential(f"Quadratic part must be {self.domain_dim}x{self.domain_dim}, got {q.shape}.")
            if any(self.quad[i][j] != self.quad[j][i] for i in range(self.domain_dim) for j in range(i)):
                raise InvalidPotential("Quadratic part is not symmetric.")
            if np.linalg.eigvalsh(q).min() < -1e-12:
                raise InvalidPotential("Quadratic part is not positive semidefinite.")

    @property
    def weights(self) -> np.ndarray:
        return np.array([[float(a) for a in t.weight] for t in self.terms], dtype=float).reshape(-1, self.domain_dim)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms], dtype=float)

    @property
    def quad_matrix(self) -> np.ndarray:
        if self.quad is None:
            return np.zeros((self.domain_dim, self.domain_dim))
        return np.array([[float(a) for a in row] for row in self.quad], dtype=float)

    @property
    def is_model(self) -> bool:
        """Pure exponential sum whose weights form a basis."""
        return (self.quad is None and len(self.terms) == self.domain_dim
                and linalg.rank([t.weight for t in self.terms], self.domain_dim) == self.domain_dim)

    def scaled(self, factor: float) -> "Potential":
        quad = None if self.quad is None else linalg.as_matrix(
            [[a * linalg.to_fraction(factor) for a in row] for row in self.quad])
        return Potential(tuple(Term(t.coefficient * factor, t.weight) for t in self.terms),
                         self.domain_dim, quad, f"{factor}*{self.name}")


@dataclass(frozen=True)
class FormClassification:
    nondegenerate: bool
    strictly_convex: bool
    image_in_regular: bool
    pseudo_kahler: bool
    analytic: bool
    certificates: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Membership:
    member: bool
    point: Optional[np.ndarray]
    residual: float
    iterations: int
    certificate: Optional[RationalVector] = None


def _exponentials(p: Potential, x: np.ndarray) -> np.ndarray:
    z = p.weights @ np.asarray(x, dtype=float)
    if z.size and np.abs(z).max() > EXPONENT_LIMIT:
        raise PotentialOverflow(f"Exponent {np.abs(z).max():.6g} exceeds {EXPONENT_LIMIT:g} at x = {x}.")
    return p.coefficients * np.exp(z)


def value(p: Potential, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    return float(_exponentials(p, x).sum() + 0.5 * x @ p.quad_matrix @ x)


def grad(p: Potential, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return p.weights.T @ _exponentials(p, x) + p.quad_matrix @ x


def hess(p: Potential, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    w = p.weights
    return w.T @ (_exponentials(p, x)[:, None] * w) + p.quad_matrix


def moment(p: Potential, x: Sequence[float]) -> np.ndarray:
    return 0.5 * grad(p, x)


def _objective(p: Potential, x: np.ndarray, target: np.ndarray) -> float:
    try:
        return value(p, x) - 2.0 * target @ x
    except PotentialOverflow:
        return np.inf


def _residual(p: Potential, x: np.ndarray, target: np.ndarray) -> float:
    return float(np.abs(moment(p, x) - target).max()) if target.size else 0.0


def _newton_step(p: Potential, x: np.ndarray, target: np.ndarray) -> np.ndarray:
    g = grad(p, x) - 2.0 * target
    h = hess(p, x)
    try:
        return np.linalg.solve(h, -g)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(h, -g, rcond=None)[0]


def recession_certificate(p: Potential, lam: Sequence) -> Optional[RationalVector]:
    """A direction d along which F(x) - 2 lam . x keeps decreasing without attaining its infimum.

    d satisfies lam_j . d <= 0 for every term, Q d = 0 and lam . d >= 0, with
    the normalisation sum_j lam_j . d - lam . d <= -1 ruling out the trivial
    direction. None means the minimum is attained.
    """
    lam = linalg.as_vector(lam)
    dim = p.domain_dim
    rows = [polyhedra.weak(linalg.negate(t.weight)) for t in p.terms]
    if p.quad is not None:
        for row in p.quad:
            rows.extend(polyhedra.equality(row))
    rows.append(polyhedra.weak(lam))
    total = tuple(Fraction(0) for _ in range(dim))
    for t in p.terms:
        total = linalg.add(total, t.weight)
    rows.append(polyhedra.weak(linalg.negate(linalg.add(total, linalg.negate(lam))), -1))
    return polyhedra.find_point(rows, dim)


def in_moment_image(p: Potential, lam: Sequence, solver: NewtonParams = NewtonParams()) -> Membership:
    target_exact = linalg.as_vector(lam)
    if len(target_exact) != p.domain_dim:
        raise InvalidPotential(f"Weight has {len(target_exact)} coordinates, potential lives in {p.domain_dim}.")
    target = np.array([float(a) for a in target_exact], dtype=float)
    x = np.zeros(p.domain_dim) if solver.start is None else np.array(solver.start, dtype=float)
    residual = np.inf
    iterations = 0
    converged = False
    try:
        residual = _residual(p, x, target)
        for iterations in range(1, solver.max_iter + 1):
            if residual <= solver.tol:
                converged = True
                break
            step = _newton_step(p, x, target)
            g = grad(p, x) - 2.0 * target
            current = _objective(p, x, target)
            t = 1.0
            for _ in range(solver.max_halvings):
                if _objective(p, x + t * step, target) <= current + solver.armijo * t * (g @ step):
                    break
                t *= 0.5
            x = x + t * step
            if np.linalg.norm(x) > solver.divergence_radius:
                logging.debug(f"{tool_name()}: Newton iterate left radius {solver.divergence_radius:g} "
                              f"after {iterations} steps.")
                break
            residual = _residual(p, x, target)
        else:
            converged = residual <= solver.tol
    except PotentialOverflow as e:
        logging.debug(f"{tool_name()}: Newton stopped on overflow: {e}")
    if converged:
        # a few full steps past tolerance; quadratic convergence makes them cheap
        for _ in range(3):
            try:
                candidate = x + _newton_step(p, x, target)
                candidate_residual = _residual(p, candidate, target)
            except PotentialOverflow:
                break
            if not candidate_residual < residual:
                break
            x, residual = candidate, candidate_residual
        # a term below tolerance cannot be told apart from a missing one: boundary weights land here
        decayed = bool(p.terms) and _exponentials(p, x).min() <= solver.tol
        certificate = recession_certificate(p, target_exact) if decayed else None
        if certificate is not None:
            logging.debug(f"{tool_name()}: ({linalg.format_vector(target_exact)}) approached only asymptotically, "
                          f"recession direction ({linalg.format_vector(certificate)}).")
            return Membership(False, None, residual, iterations, certificate)
        return Membership(True, x, residual, iterations)
    certificate = recession_certificate(p, target_exact)
    if certificate is not None:
        logging.debug(f"{tool_name()}: ({linalg.format_vector(target_exact)}) not attained, "
                      f"recession direction ({linalg.format_vector(certificate)}).")
        return Membership(False, None, float(residual), iterations, certificate)
    raise MaxIterations(f"Newton did not reach tolerance {solver.tol:g} for ({linalg.format_vector(target_exact)}) "
                        f"within {solver.max_iter} iterations (residual {residual:.3g}) and no recession "
                        "direction exists.")


def _wall_values(weights: Sequence[RationalVector], walls: Sequence[RationalVector]) -> List[List[Fraction]]:
    return [[linalg.dot(wall, w) for w in weights] for wall in walls]


def _sample_grid(dim: int, half_width: float, points: int) -> List[np.ndarray]:
    if dim == 0:
        return [np.zeros(0)]
    axis = np.linspace(-half_width, half_width, max(points, 1))
    return [np.array(x) for x in itertools.product(axis, repeat=dim)]


def classify_form(p: Potential, cell: Cell, sample_box: float = 2.0,
                  grid: int = 5, tol: float = 1e-12) -> FormClassification:
    """Pseudo-Kahler test: nondegenerate Hessian and moment image inside the regular set.

    The regular set of the cell is read through its wall rows, one per
    positive root outside the closure of R. Model potentials get an exact
    verdict; anything else is sampled on a grid of grid**d points in
    [-sample_box, sample_box]^d.
    """
    if p.domain_dim != cell.dim:
        raise InvalidPotential(f"Potential lives in dimension {p.domain_dim}, cell {cell.label} in {cell.dim}.")
    walls = wall_rows(cell)
    if p.is_model:
        table = _wall_values([t.weight for t in p.terms], walls)
        regular = all((all(v >= 0 for v in row) or all(v <= 0 for v in row)) and any(v != 0 for v in row)
                      for row in table)
        notes = ("analytic: weights form a basis, Hessian is positive definite everywhere",
                 "analytic: image is the open cone spanned by the weights")
        return FormClassification(True, True, regular, regular, True, notes)

    nondegenerate = strictly_convex = True
    signs = [set() for _ in walls]
    touched_zero = False
    wall_matrix = np.array([[float(a) for a in w] for w in walls], dtype=float).reshape(-1, p.domain_dim)
    samples = 0
    for x in _sample_grid(p.domain_dim, sample_box, grid):
        try:
            eigenvalues = np.linalg.eigvalsh(hess(p, x))
            image = moment(p, x)
        except PotentialOverflow:
            continue
        samples += 1
        scale = max(1.0, float(np.abs(eigenvalues).max(initial=0.0)))
        if np.any(np.abs(eigenvalues) <= tol * scale):
            nondegenerate = False
        if np.any(eigenvalues <= tol * scale):
            strictly_convex = False
        for k, v in enumerate(wall_matrix @ image):
            if abs(v) <= tol:
                touched_zero = True
            signs[k].add(v > 0)
    regular = not touched_zero and all(len(s) <= 1 for s in signs)
    notes = (f"sampled, not proven: {samples} grid points in [-{sample_box:g}, {sample_box:g}]^{p.domain_dim}",)
    logging.debug(f"{tool_name()}: sampled classification nondegenerate={nondegenerate}, "
                  f"strictly_convex={strictly_convex}, image_in_regular={regular}.")
    return FormClassification(nondegenerate, strictly_convex, regular, nondegenerate and regular, False, notes)
