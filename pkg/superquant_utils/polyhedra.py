"""Exact polyhedral primitives on top of the Parma Polyhedra Library."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import ppl

from superquant_utils import linalg
from superquant_utils.linalg import RationalVector


@dataclass(frozen=True)
class Inequality:
    """coeffs . x + constant > 0 when strict, >= 0 otherwise."""
    coeffs: RationalVector
    constant: Fraction = Fraction(0)
    strict: bool = False

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return linalg.dot(self.coeffs, x) + self.constant

    def holds(self, x: Sequence[Fraction]) -> bool:
        v = self.value(x)
        return v > 0 if self.strict else v >= 0


def weak(coeffs, constant=0) -> Inequality:
    return Inequality(linalg.as_vector(coeffs), linalg.to_fraction(constant), False)


def strict(coeffs, constant=0) -> Inequality:
    return Inequality(linalg.as_vector(coeffs), linalg.to_fraction(constant), True)


def equality(coeffs, constant=0) -> List[Inequality]:
    coeffs = linalg.as_vector(coeffs)
    constant = linalg.to_fraction(constant)
    return [Inequality(coeffs, constant, False), Inequality(linalg.negate(coeffs), -constant, False)]


def _expression(coeffs: Sequence[Fraction], constant: Fraction) -> "ppl.Linear_Expression":
    # ppl only takes integer coefficients
    denominator = linalg.common_denominator(list(coeffs) + [constant])
    expr = ppl.Linear_Expression(int(constant * denominator))
    for i, c in enumerate(coeffs):
        if c != 0:
            expr += int(c * denominator) * ppl.Variable(i)
    return expr


def _checked(system: Sequence[Inequality], dim: int) -> List[Inequality]:
    rows = []
    for ineq in system:
        coeffs = linalg.as_vector(ineq.coeffs)
        if len(coeffs) != dim:
            raise ValueError(f"Inequality of length {len(coeffs)} in a system of dimension {dim}.")
        rows.append(Inequality(coeffs, linalg.to_fraction(ineq.constant), ineq.strict))
    return rows


def nnc_polyhedron(system: Sequence[Inequality], dim: int) -> "ppl.NNC_Polyhedron":
    poly = ppl.NNC_Polyhedron(dim, "universe")
    for ineq in _checked(system, dim):
        expr = _expression(ineq.coeffs, ineq.constant)
        poly.add_constraint(expr > 0 if ineq.strict else expr >= 0)
    return poly


def _coordinates(generator) -> RationalVector:
    divisor = int(generator.divisor()) if generator.is_point() else 1
    return tuple(Fraction(int(c), divisor) for c in generator.coefficients())


def find_point(system: Sequence[Inequality], dim: int) -> Optional[RationalVector]:
    """A rational point satisfying every inequality, or None when the system is infeasible.

    Point generators of a not-necessarily-closed polyhedron belong to it, so
    any of them is a witness for the strict rows too.
    """
    system = _checked(system, dim)
    poly = nnc_polyhedron(system, dim)
    if poly.is_empty():
        return None
    points = sorted(_coordinates(g) for g in poly.minimized_generators() if g.is_point())
    witness = points[0]
    if not all(ineq.holds(witness) for ineq in system):
        raise ArithmeticError(f"Generator ({linalg.format_vector(witness)}) violates its own system.")
    logging.debug(f"Polyhedra: {len(system)} rows in dimension {dim}, witness ({linalg.format_vector(witness)}).")
    return witness


def is_feasible(system: Sequence[Inequality], dim: int) -> bool:
    return not nnc_polyhedron(_checked(system, dim), dim).is_empty()


def cone_generators(rows: Sequence[Sequence[Fraction]], dim: int) -> Tuple[List[RationalVector], List[RationalVector]]:
    """Minimized generators of {y : h . y >= 0 for every row h}.

    Returns (lineality basis, extreme rays) as primitive integer vectors
    (stored as Fractions), each list sorted lexicographically.
    """
    cone = ppl.C_Polyhedron(dim, "universe")
    for raw in rows:
        h = linalg.as_vector(raw)
        if len(h) != dim:
            raise ValueError(f"Row of length {len(h)} for a cone in dimension {dim}.")
        if not linalg.is_zero(h):
            cone.add_constraint(_expression(h, Fraction(0)) >= 0)
    lines, rays = [], []
    for g in cone.minimized_generators():
        if g.is_line():
            lines.append(tuple(Fraction(a) for a in linalg.primitive(_coordinates(g))))
        elif g.is_ray():
            rays.append(tuple(Fraction(a) for a in linalg.primitive(_coordinates(g))))
    return sorted(lines), sorted(rays)
