"""Exact rational linear algebra on numpy object arrays of Fraction."""
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

RationalVector = Tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError(f"Boolean {value!r} is not a rational number.")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # repr round-trips, so 0.1 becomes 1/10 rather than its binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, np.integer):
        return Fraction(int(value))
    raise TypeError(f"Cannot read {value!r} as a rational number.")


def as_vector(values: Iterable) -> RationalVector:
    return tuple(to_fraction(v) for v in values)


def as_matrix(rows: Iterable[Iterable]) -> Tuple[RationalVector, ...]:
    return tuple(as_vector(row) for row in rows)


def to_object_array(rows: Sequence[Sequence], ncols: int) -> np.ndarray:
    if len(rows) == 0:
        return np.zeros((0, ncols), dtype=object)
    array = np.array([[to_fraction(x) for x in row] for row in rows], dtype=object)
    if array.shape[1] != ncols:
        raise ValueError(f"Expected {ncols} columns, got {array.shape[1]}.")
    return array


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"Length mismatch in dot product: {len(u)} != {len(v)}.")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(matrix: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> RationalVector:
    return tuple(dot(row, v) for row in matrix)


def bilinear(u: Sequence[Fraction], matrix: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Fraction:
    return dot(u, mat_vec(matrix, v))


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> RationalVector:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v: Sequence[Fraction]) -> RationalVector:
    c = to_fraction(c)
    return tuple(c * a for a in v)


def negate(v: Sequence[Fraction]) -> RationalVector:
    return tuple(-a for a in v)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


def rref(rows: Sequence[Sequence], ncols: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form and pivot columns."""
    work = to_object_array(rows, ncols)
    nrows = work.shape[0]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pivot_row = next((i for i in range(r, nrows) if work[i, c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            work[[r, pivot_row]] = work[[pivot_row, r]]
        work[r, :] = work[r, :] / work[r, c]
        for i in range(nrows):
            if i != r and work[i, c] != 0:
                work[i, :] = work[i, :] - work[i, c] * work[r, :]
        pivots.append(c)
        r += 1
    return work, pivots


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if len(rows) == 0:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[RationalVector]:
    """Basis of {x : row . x = 0 for every row}, one vector per free column."""
    if len(rows) == 0:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i, f]
        basis.append(tuple(v))
    return basis


def solve_combination(basis: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> Optional[RationalVector]:
    """Coefficients c with sum_i c_i basis_i == target, or None if target is outside the span.

    The basis vectors must be linearly independent.
    """
    ncols = len(basis)
    if ncols == 0:
        return () if is_zero(target) else None
    # columns are the basis vectors, augmented with the target
    augmented = [[basis[j][i] for j in range(ncols)] + [target[i]] for i in range(len(target))]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    if len(pivots) != ncols:
        raise ValueError("Basis vectors are linearly dependent.")
    return tuple(reduced[i, ncols] for i in range(ncols))


def primitive(v: Sequence[Fraction]) -> Tuple[int, ...]:
    """Positive multiple of v with coprime integer entries."""
    if is_zero(v):
        raise ValueError("The zero vector has no primitive representative.")
    denominator = 1
    for a in v:
        denominator = math.lcm(denominator, to_fraction(a).denominator)
    ints = [int(to_fraction(a) * denominator) for a in v]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    return tuple(a // g for a in ints)


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for a in values:
        d = math.lcm(d, to_fraction(a).denominator)
    return d


def format_vector(v: Sequence[Fraction]) -> str:
    return ",".join(str(to_fraction(a)) for a in v)
