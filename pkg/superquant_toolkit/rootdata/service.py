"""Root systems of the contragredient Lie superalgebras in epsilon/delta coordinates."""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from superquant_utils import linalg
from superquant_utils.errors import ToolkitError
from superquant_utils.linalg import RationalVector

FAMILIES = ("A", "B", "C", "D", "D21alpha", "F4", "G3")


def tool_name():
    return "Root Data"


class UnsupportedRank(ToolkitError):
    pass


class InvalidAlpha(ToolkitError):
    pass


class DimensionMismatch(ToolkitError):
    pass


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class AlgebraSpec:
    family: str
    m: int = 0
    n: int = 0
    alpha: Optional[Fraction] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedRank(f"Unknown family '{self.family}'. Expected one of {', '.join(FAMILIES)}.")
        if self.m < 0 or self.n < 0:
            raise UnsupportedRank(f"Negative rank in {self.label}.")
        if self.family == "D21alpha":
            if self.alpha is None:
                raise InvalidAlpha("D(2,1;alpha) needs a rational alpha.")
            if self.alpha in (0, -1):
                raise InvalidAlpha(f"alpha = {self.alpha} makes the invariant form degenerate.")
        elif self.alpha is not None:
            raise InvalidAlpha(f"alpha is only meaningful for D(2,1;alpha), not for {self.family}.")
        if self.family == "A":
            if self.m == self.n:
                raise UnsupportedRank(
                    f"A({self.m},{self.n}) is the psl case: the supertrace direction is isotropic "
                    "and the quotient slice is not B-orthogonal.")
        elif self.family == "B" and self.n < 1:
            raise UnsupportedRank(f"B(m,n) needs n >= 1, got {self.label}.")
        elif self.family == "C" and self.n < 2:
            raise UnsupportedRank(f"C(n) needs n >= 2, got {self.label}.")
        elif self.family == "D" and (self.m < 2 or self.n < 1):
            raise UnsupportedRank(f"D(m,n) needs m >= 2 and n >= 1, got {self.label}.")

    @property
    def label(self) -> str:
        if self.family == "D21alpha":
            return f"D(2,1;{self.alpha})"
        if self.family in ("F4", "G3"):
            return f"{self.family[0]}({self.family[1]})"
        if self.family == "C":
            return f"C({self.n})"
        return f"{self.family}({self.m},{self.n})"


@dataclass(frozen=True)
class Root:
    coords: RationalVector
    parity: Parity

    @property
    def is_even(self) -> bool:
        return self.parity is Parity.EVEN

    @property
    def is_odd(self) -> bool:
        return self.parity is Parity.ODD

    def __neg__(self) -> "Root":
        return Root(linalg.negate(self.coords), self.parity)


@dataclass(frozen=True)
class RootSystem:
    spec: AlgebraSpec
    roots: Tuple[Root, ...]
    gram: Tuple[RationalVector, ...]
    ambient_dim: int
    coordinate_names: Tuple[str, ...]
    quotient_kernel: Optional[RationalVector] = None

    @property
    def rank(self) -> int:
        return self.ambient_dim - (1 if self.quotient_kernel is not None else 0)

    @property
    def even_roots(self) -> Tuple[Root, ...]:
        return tuple(r for r in self.roots if r.is_even)

    @property
    def odd_roots(self) -> Tuple[Root, ...]:
        return tuple(r for r in self.roots if r.is_odd)

    def find(self, coords: Sequence) -> Optional[Root]:
        return self._index().get(linalg.as_vector(coords))

    def _index(self) -> Dict[RationalVector, Root]:
        cached = self.__dict__.get("_root_index")
        if cached is None:
            cached = {r.coords: r for r in self.roots}
            object.__setattr__(self, "_root_index", cached)
        return cached

    def coroot_row(self, alpha: Root) -> RationalVector:
        """Row g with lam(h_alpha) == g . lam."""
        return linalg.mat_vec(self.gram, alpha.coords)

    def label(self, coords: Sequence) -> str:
        return format_combination(linalg.as_vector(coords), self.coordinate_names)


def format_combination(coords: RationalVector, names: Sequence[str]) -> str:
    parts = []
    for c, name in zip(coords, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        coefficient = "" if magnitude == 1 else f"{magnitude}"
        parts.append(f"{sign}{coefficient}{name}")
    if not parts:
        return "0"
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def _combine(dim: int, *terms: Tuple[int, int]) -> RationalVector:
    v = [Fraction(0)] * dim
    for index, coefficient in terms:
        v[index] += Fraction(coefficient)
    return tuple(v)


def _diagonal(values: Sequence) -> Tuple[RationalVector, ...]:
    d = len(values)
    return tuple(tuple(linalg.to_fraction(values[i]) if i == j else Fraction(0) for j in range(d)) for i in range(d))


def _sign_pairs(indices: Sequence[int]):
    for i, j in itertools.combinations(indices, 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            yield (i, si), (j, sj)


def _type_a(spec: AlgebraSpec):
    p, q = spec.m + 1, spec.n + 1
    dim = p + q
    eps, dlt = list(range(p)), list(range(p, dim))
    even, odd = [], []
    for block in (eps, dlt):
        for i, j in itertools.permutations(block, 2):
            even.append(_combine(dim, (i, 1), (j, -1)))
    for i in eps:
        for j in dlt:
            odd.append(_combine(dim, (i, 1), (j, -1)))
            odd.append(_combine(dim, (i, -1), (j, 1)))
    names = [f"e{i + 1}" for i in range(p)] + [f"d{j + 1}" for j in range(q)]
    gram = _diagonal([1] * p + [-1] * q)
    kernel = tuple(Fraction(1) for _ in eps) + tuple(Fraction(-1) for _ in dlt)
    return even, odd, gram, names, kernel


def _orthosymplectic(spec: AlgebraSpec):
    """B(m,n) = osp(2m+1|2n), C(n) = osp(2|2n-2), D(m,n) = osp(2m|2n)."""
    if spec.family == "C":
        m, n = 1, spec.n - 1
    else:
        m, n = spec.m, spec.n
    dim = m + n
    eps, dlt = list(range(m)), list(range(m, dim))
    even, odd = [], []
    if spec.family != "C":
        for (i, si), (j, sj) in _sign_pairs(eps):
            even.append(_combine(dim, (i, si), (j, sj)))
        if spec.family == "B":
            for i in eps:
                even.extend([_combine(dim, (i, 1)), _combine(dim, (i, -1))])
    for (i, si), (j, sj) in _sign_pairs(dlt):
        even.append(_combine(dim, (i, si), (j, sj)))
    for j in dlt:
        even.extend([_combine(dim, (j, 2)), _combine(dim, (j, -2))])
    for i in eps:
        for j in dlt:
            for si, sj in itertools.product((1, -1), repeat=2):
                odd.append(_combine(dim, (i, si), (j, sj)))
    if spec.family == "B":
        for j in dlt:
            odd.extend([_combine(dim, (j, 1)), _combine(dim, (j, -1))])
    names = [f"e{i + 1}" for i in range(m)] + [f"d{j + 1}" for j in range(n)]
    gram = _diagonal([1] * m + [-1] * n)
    return even, odd, gram, names, None


def _d21alpha(spec: AlgebraSpec):
    alpha = spec.alpha
    even, odd = [], []
    for i in range(3):
        even.extend([_combine(3, (i, 2)), _combine(3, (i, -2))])
    for signs in itertools.product((1, -1), repeat=3):
        odd.append(tuple(Fraction(s) for s in signs))
    gram = _diagonal([-(1 + alpha) / 2, Fraction(1, 2), alpha / 2])
    return even, odd, gram, ["e1", "e2", "e3"], None


def _f4(spec: AlgebraSpec):
    # so(7) on e1..e3 with long roots of square length 2, sl(2) on d with (d,d) = -3
    even, odd = [], []
    for (i, si), (j, sj) in _sign_pairs(range(3)):
        even.append(_combine(4, (i, si), (j, sj)))
    for i in range(3):
        even.extend([_combine(4, (i, 1)), _combine(4, (i, -1))])
    even.extend([_combine(4, (3, 1)), _combine(4, (3, -1))])
    half = Fraction(1, 2)
    for signs in itertools.product((1, -1), repeat=4):
        odd.append(tuple(half * s for s in signs))
    gram = _diagonal([1, 1, 1, -3])
    return even, odd, gram, ["e1", "e2", "e3", "d"], None


def _g3(spec: AlgebraSpec):
    # coordinates (e1, e2, d) with e3 = -e1 - e2; G2 long roots of square length 2
    e = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(-1), Fraction(-1))]
    short = [e[0], e[1], e[2]]
    even, odd = [], []
    for a in short:
        even.append((a[0], a[1], Fraction(0)))
        even.append((-a[0], -a[1], Fraction(0)))
    for a, b in itertools.permutations(short, 2):
        even.append((a[0] - b[0], a[1] - b[1], Fraction(0)))
    even.extend([(Fraction(0), Fraction(0), Fraction(2)), (Fraction(0), Fraction(0), Fraction(-2))])
    for a in short:
        for sa, sd in itertools.product((1, -1), repeat=2):
            odd.append((sa * a[0], sa * a[1], Fraction(sd)))
    odd.extend([(Fraction(0), Fraction(0), Fraction(1)), (Fraction(0), Fraction(0), Fraction(-1))])
    third = Fraction(1, 3)
    gram = ((2 * third, -third, Fraction(0)), (-third, 2 * third, Fraction(0)), (Fraction(0), Fraction(0), -2 * third))
    return even, odd, gram, ["e1", "e2", "d"], None


_BUILDERS = {
    "A": _type_a,
    "B": _orthosymplectic,
    "C": _orthosymplectic,
    "D": _orthosymplectic,
    "D21alpha": _d21alpha,
    "F4": _f4,
    "G3": _g3,
}


def _sort_key(root: Root):
    return (root.is_odd, tuple(-c for c in root.coords))


def build_root_system(spec: AlgebraSpec) -> RootSystem:
    even, odd, gram, names, kernel = _BUILDERS[spec.family](spec)
    roots = {}
    for coords in even:
        roots[tuple(coords)] = Root(tuple(coords), Parity.EVEN)
    for coords in odd:
        coords = tuple(coords)
        if coords in roots:
            raise ArithmeticError(f"{spec.label}: {coords} listed as both even and odd.")
        roots[coords] = Root(coords, Parity.ODD)
    ordered = tuple(sorted(roots.values(), key=_sort_key))
    rs = RootSystem(spec=spec, roots=ordered, gram=tuple(tuple(row) for row in gram),
                    ambient_dim=len(names), coordinate_names=tuple(names), quotient_kernel=kernel)
    logging.debug(f"{tool_name()}: built {spec.label} with {len(rs.even_roots)} even "
                  f"and {len(rs.odd_roots)} odd roots in {rs.ambient_dim} coordinates.")
    return rs


def pairing(rs: RootSystem, lam: Sequence, alpha) -> Fraction:
    """lam(h_alpha) = B(lam, alpha) through the Gram matrix."""
    coords = alpha.coords if isinstance(alpha, Root) else linalg.as_vector(alpha)
    lam = linalg.as_vector(lam)
    if len(lam) != rs.ambient_dim or len(coords) != rs.ambient_dim:
        raise DimensionMismatch(
            f"{rs.spec.label} works in {rs.ambient_dim} coordinates; got weight of length {len(lam)} "
            f"and root of length {len(coords)}.")
    return linalg.bilinear(lam, rs.gram, coords)


def square_length(rs: RootSystem, alpha: Root) -> Fraction:
    return pairing(rs, alpha.coords, alpha)


def run_roots(rs: RootSystem) -> List[Dict[str, str]]:
    rows = []
    for index, root in enumerate(rs.roots, start=1):
        rows.append({
            "index": str(index),
            "root": rs.label(root.coords),
            "coords": linalg.format_vector(root.coords),
            "parity": root.parity.value,
            "square": str(square_length(rs, root)),
        })
    logging.info(f"{tool_name()}: {rs.spec.label} has {len(rs.roots)} roots "
                 f"({len(rs.even_roots)} even, {len(rs.odd_roots)} odd).")
    return rows
