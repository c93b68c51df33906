import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from superquant_toolkit.realform import service as realform_service
from superquant_toolkit.realform.service import RealForm, RootPartition
from superquant_toolkit.rootdata import service as rootdata_service
from superquant_toolkit.rootdata.service import AlgebraSpec, DimensionMismatch, Root, RootSystem
from superquant_utils import linalg, polyhedra
from superquant_utils.errors import ToolkitError
from superquant_utils.linalg import RationalVector


def tool_name():
    return "Positive Systems"


class DegenerateFunctional(ToolkitError):
    pass


@dataclass(frozen=True)
class PositiveSystem:
    functional: RationalVector
    positives: Tuple[Root, ...]
    simples: Tuple[Root, ...]
    pi_c: Tuple[Root, ...]
    rho: RationalVector
    compact_positive: Tuple[Root, ...]
    noncompact_positive: Tuple[Root, ...]
    root_system: RootSystem = field(repr=False, compare=False)
    partition: RootPartition = field(repr=False, compare=False)

    @property
    def odd_positive(self) -> Tuple[Root, ...]:
        return tuple(r for r in self.positives if r.is_odd)

    @property
    def q_plus(self) -> Tuple[Root, ...]:
        """Delta_n^+ together with Delta_1^+, in root order."""
        noncompact = set(self.noncompact_positive)
        return tuple(r for r in self.positives if r.is_odd or r in noncompact)

    def pairing(self, lam: Sequence, alpha: Root) -> Fraction:
        return rootdata_service.pairing(self.root_system, lam, alpha)

    def simple_index(self, root: Root) -> int:
        """1-based position of a simple root."""
        return self.simples.index(root) + 1


@dataclass(frozen=True)
class AdmissibilityReport:
    k_stable: bool
    q_abelian: bool
    witnesses: Tuple[Tuple[str, Root, Root], ...]


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    witness: Optional[RationalVector]


@dataclass(frozen=True)
class Context:
    rs: RootSystem
    rf: RealForm
    ps: PositiveSystem

    @property
    def label(self) -> str:
        return f"{self.rs.spec.label} / {self.rf.tag}"


def default_functional(rs: RootSystem, rf: RealForm) -> RationalVector:
    """A regular functional for the admissible convention of each real form.

    Type A is ordered by descending coordinates. The orthosymplectic families
    put the symplectic block far above the orthogonal one, except that the
    centre direction of so(2m-2,2) and so*(2m) is pushed first. D(2,1;alpha),
    F(4) and G(3) use fixed generic vectors.
    """
    family, m, n = rs.spec.family, rs.spec.m, rs.spec.n
    dim = rs.ambient_dim
    if family == "A":
        values = list(range(dim, 0, -1))
    elif family == "C":
        k = n - 1
        values = [1] + [4 * (k - j + 1) for j in range(1, k + 1)]
    elif family in ("B", "D"):
        big = 2 * m + 2
        eps = [m - i + 1 for i in range(1, m + 1)]
        dlt = [big * (n - j + 1) for j in range(1, n + 1)]
        if family == "D" and rf.variant == "so_2m-2_2":
            eps[0] = big * (n + 1) + m
        elif family == "D" and rf.variant == "so_star":
            base = 2 * (m + n) + 2
            eps = [base + (m - i + 1) for i in range(1, m + 1)]
            dlt = [3 * base + (n - j + 1) for j in range(1, n + 1)]
        values = eps + dlt
    elif family == "D21alpha":
        values = [7, 4, 2]
    elif family == "F4":
        values = [20, 3, 2, 7]
    else:
        values = [2, 1, 10]
    return linalg.as_vector(values)


def _indecomposable(positives: Sequence[Root]) -> List[Root]:
    coords = {r.coords for r in positives}
    sums = set()
    for beta, gamma in itertools.combinations_with_replacement(positives, 2):
        total = linalg.add(beta.coords, gamma.coords)
        if total in coords:
            sums.add(total)
    return [r for r in positives if r.coords not in sums]


def positive_system(rs: RootSystem, rf: RealForm, functional: Sequence) -> PositiveSystem:
    functional = linalg.as_vector(functional)
    if len(functional) != rs.ambient_dim:
        raise DimensionMismatch(
            f"Functional has {len(functional)} entries; {rs.spec.label} uses {rs.ambient_dim} coordinates.")
    positives = []
    for root in rs.roots:
        value = linalg.dot(functional, root.coords)
        if value == 0:
            raise DegenerateFunctional(
                f"Functional {linalg.format_vector(functional)} vanishes on root {rs.label(root.coords)}.")
        if value > 0:
            positives.append(root)
    partition = realform_service.classify_even_roots(rf, rs)
    simples = _indecomposable(positives)
    basis = [r.coords for r in simples]
    if linalg.rank(basis, rs.ambient_dim) != len(simples):
        raise DegenerateFunctional(f"Indecomposable positive roots of {rs.spec.label} are linearly dependent.")
    even_sum = [Fraction(0)] * rs.ambient_dim
    odd_sum = [Fraction(0)] * rs.ambient_dim
    for root in positives:
        target = even_sum if root.is_even else odd_sum
        for i, c in enumerate(root.coords):
            target[i] += c
    rho = tuple((e - o) / 2 for e, o in zip(even_sum, odd_sum))
    compact_positive = tuple(r for r in positives if r.is_even and partition.is_compact(r))
    noncompact_positive = tuple(r for r in positives if r.is_even and not partition.is_compact(r))
    ps = PositiveSystem(
        functional=functional,
        positives=tuple(positives),
        simples=tuple(simples),
        pi_c=tuple(r for r in simples if r in set(compact_positive)),
        rho=rho,
        compact_positive=compact_positive,
        noncompact_positive=noncompact_positive,
        root_system=rs,
        partition=partition,
    )
    logging.debug(f"{tool_name()}: {len(positives)} positive roots, {len(simples)} simple, "
                  f"{len(ps.pi_c)} compact simple; rho = ({linalg.format_vector(rho)}).")
    return ps


def simple_coefficients(ps: PositiveSystem, root: Root) -> Tuple[Fraction, ...]:
    coefficients = linalg.solve_combination([s.coords for s in ps.simples], root.coords)
    if coefficients is None:
        raise ArithmeticError(f"{ps.root_system.label(root.coords)} is outside the span of the simple roots.")
    return coefficients


def admissible_literal(ps: PositiveSystem, rs: RootSystem, rf: RealForm) -> AdmissibilityReport:
    """Literal bracket conditions [k, q+] in q+ and [q+, q+] = 0 on root spaces."""
    q_plus = ps.q_plus
    q_coords = {r.coords for r in q_plus}
    witnesses = []
    k_stable = True
    for alpha in ps.partition.compact:
        for beta in q_plus:
            total = linalg.add(alpha.coords, beta.coords)
            if rs.find(total) is not None and total not in q_coords:
                k_stable = False
                witnesses.append(("k_stable", alpha, beta))
    q_abelian = True
    for beta, gamma in itertools.combinations_with_replacement(q_plus, 2):
        if beta == gamma and beta.is_even:
            continue
        if rs.find(linalg.add(beta.coords, gamma.coords)) is not None:
            q_abelian = False
            witnesses.append(("q_abelian", beta, gamma))
    logging.debug(f"{tool_name()}: literal admissibility of {rf.tag}: k_stable={k_stable}, "
                  f"q_abelian={q_abelian}, {len(witnesses)} witnesses.")
    return AdmissibilityReport(k_stable, q_abelian, tuple(witnesses))


def slice_rows(rs: RootSystem) -> List[polyhedra.Inequality]:
    """Pins the last coordinate to zero for systems with a supertrace kernel."""
    if rs.quotient_kernel is None:
        return []
    last = tuple(Fraction(int(i == rs.ambient_dim - 1)) for i in range(rs.ambient_dim))
    return polyhedra.equality(last)


def harish_chandra_rows(ps: PositiveSystem) -> List[polyhedra.Inequality]:
    rs = ps.root_system
    rows = [polyhedra.weak(rs.coroot_row(alpha)) for alpha in ps.compact_positive]
    rows += [polyhedra.strict(linalg.negate(rs.coroot_row(beta))) for beta in ps.q_plus]
    return rows


def admissible_feasible(ps: PositiveSystem, rs: RootSystem, rf: RealForm) -> FeasibilityReport:
    witness = polyhedra.find_point(harish_chandra_rows(ps) + slice_rows(rs), rs.ambient_dim)
    if witness is None:
        logging.info(f"{tool_name()}: Harish-Chandra cone of {rf.tag} is empty.")
        return FeasibilityReport(False, None)
    logging.info(f"{tool_name()}: Harish-Chandra cone of {rf.tag} is nonempty, "
                 f"witness ({linalg.format_vector(witness)}).")
    return FeasibilityReport(True, witness)


def build_context(spec: AlgebraSpec, tag: str, functional: Optional[Sequence] = None) -> Context:
    rs = rootdata_service.build_root_system(spec)
    rf = realform_service.parse_real_form(spec, tag)
    if functional is None:
        functional = default_functional(rs, rf)
    ps = positive_system(rs, rf, functional)
    return Context(rs=rs, rf=rf, ps=ps)
