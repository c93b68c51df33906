"""Unitarizability inequalities.

The orthosymplectic check works in the coordinates where the highest weight
is written (mu_1, ..., mu_m, lam, lam - a_2, ..., lam - a_n). Those
coordinates see the positive system with the delta block negated, so every
positive root beta of the delta-dominant system is read as tau(beta), where
tau flips the sign of the delta coordinates.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from superquant_toolkit.possys import service as possys_service
from superquant_toolkit.possys.service import Context, PositiveSystem
from superquant_toolkit.rootdata.service import AlgebraSpec, Root, RootSystem
from superquant_utils import linalg
from superquant_utils.errors import ToolkitError
from superquant_utils.linalg import RationalVector

# G(3), admissible positive system: C membership and unitarizability as affine
# thresholds on mu in terms of (a, b)
G3_C_THRESHOLD = (1, 1, -10)
G3_UNITARY_THRESHOLD = (-3, -3, -9)
F4_GAP = "F(4) thresholds are not available; only G(3) exceptions are stored."


def tool_name():
    return "Unitarity"


class RhoMismatch(ToolkitError):
    pass


class InvalidParameters(ToolkitError):
    pass


@dataclass(frozen=True)
class JakobsenParamsOsp:
    m: int
    n: int
    mu: Tuple[Fraction, ...]
    lam: Fraction
    a: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.m < 0 or self.n < 1:
            raise InvalidParameters(f"osp(2m+1|2n) needs m >= 0 and n >= 1, got m={self.m}, n={self.n}.")
        if len(self.mu) != self.m:
            raise InvalidParameters(f"Expected {self.m} values of mu, got {len(self.mu)}.")
        if len(self.a) != self.n - 1:
            raise InvalidParameters(f"Expected {self.n - 1} values of a (a_2..a_n), got {len(self.a)}.")
        if any(x < y for x, y in zip(self.mu, self.mu[1:])) or (self.mu and self.mu[-1] < 0):
            raise InvalidParameters(f"mu must satisfy mu_1 >= ... >= mu_m >= 0, got {self.mu}.")
        if any(x > y for x, y in zip(self.a, self.a[1:])) or (self.a and self.a[0] < 0):
            raise InvalidParameters(f"a must satisfy a_n >= ... >= a_2 >= 0, got {self.a}.")

    @classmethod
    def build(cls, m: int, n: int, mu: Sequence, lam, a: Sequence = ()) -> "JakobsenParamsOsp":
        return cls(m, n, linalg.as_vector(mu), linalg.to_fraction(lam), linalg.as_vector(a))

    @property
    def highest_weight(self) -> RationalVector:
        return tuple(self.mu) + (self.lam,) + tuple(self.lam - a for a in self.a)

    def scaled(self, factor) -> "JakobsenParamsOsp":
        factor = linalg.to_fraction(factor)
        return JakobsenParamsOsp(self.m, self.n, linalg.scale(factor, self.mu), factor * self.lam,
                                 linalg.scale(factor, self.a))


@dataclass(frozen=True)
class InequalityRow:
    root: str
    kind: str
    relation: str
    value: Fraction
    satisfied: bool


@dataclass(frozen=True)
class OspVerdict:
    in_C: bool
    binding_root: str
    binding_value: Fraction
    rows: Tuple[InequalityRow, ...]


@dataclass(frozen=True)
class ExceptionVerdict:
    c_condition: str
    unitarizable_condition: str
    c_holds: bool
    unitarizable_holds: bool

    @property
    def agree(self) -> bool:
        return self.c_holds == self.unitarizable_holds


def expected_rho_osp(m: int, n: int) -> RationalVector:
    half = Fraction(1, 2)
    eps = [m - i + half for i in range(1, m + 1)]
    dlt = [n - j + half - m for j in range(1, n + 1)]
    return tuple(eps + dlt)


def _osp_context(m: int, n: int) -> Context:
    spec = AlgebraSpec("B", m, n)
    return possys_service.build_context(spec, f"so({2 * m + 1})+sp({n},R)")


def lambda_plus_rho_osp(p: JakobsenParamsOsp, ps: PositiveSystem) -> RationalVector:
    spec = ps.root_system.spec
    if spec.family != "B" or (spec.m, spec.n) != (p.m, p.n):
        raise InvalidParameters(f"Parameters for B({p.m},{p.n}) do not match the positive system of {spec.label}.")
    expected = expected_rho_osp(p.m, p.n)
    if tuple(ps.rho) != expected:
        raise RhoMismatch(f"rho = ({linalg.format_vector(ps.rho)}) differs from the expected shifts "
                          f"({linalg.format_vector(expected)}).")
    return linalg.add(p.highest_weight, ps.rho)


def delta_flipped(rs: RootSystem, root: Root) -> RationalVector:
    """tau(beta): the delta coordinates of beta with their sign flipped."""
    return tuple(-c if name.startswith("d") else c for c, name in zip(root.coords, rs.coordinate_names))


def osp_unitarizable(p: JakobsenParamsOsp, ps: Optional[PositiveSystem] = None) -> OspVerdict:
    if ps is None:
        ps = _osp_context(p.m, p.n).ps
    rs = ps.root_system
    shifted = lambda_plus_rho_osp(p, ps)
    rows = []
    for beta in ps.q_plus:
        image = delta_flipped(rs, beta)
        value = linalg.bilinear(shifted, rs.gram, image)
        rows.append(InequalityRow(rs.label(image), "shifted", "< 0", value, value < 0))
    binding = max(rows, key=lambda r: r.value)
    verdict = OspVerdict(all(r.satisfied for r in rows), binding.root, binding.value, tuple(rows))
    logging.debug(f"{tool_name()}: B({p.m},{p.n}) Lambda = ({linalg.format_vector(p.highest_weight)}) "
                  f"in C: {verdict.in_C}, binding {binding.root} = {binding.value}.")
    return verdict


def inequality_table(ctx: Context, lam: Sequence) -> List[InequalityRow]:
    rs, ps = ctx.rs, ctx.ps
    lam = linalg.as_vector(lam)
    shifted = linalg.add(lam, ps.rho)
    rows = []
    for alpha in ps.compact_positive:
        value = ps.pairing(lam, alpha)
        rows.append(InequalityRow(rs.label(alpha.coords), "hc_cone", ">= 0", value, value >= 0))
    for beta in ps.q_plus:
        value = ps.pairing(lam, beta)
        rows.append(InequalityRow(rs.label(beta.coords), "hc_cone", "< 0", value, value < 0))
    for beta in ps.q_plus:
        value = ps.pairing(shifted, beta)
        rows.append(InequalityRow(rs.label(beta.coords), "shifted", "< 0", value, value < 0))
    return rows


def _affine(coefficients: Tuple[int, int, int], a: Fraction, b: Fraction) -> Fraction:
    return coefficients[0] * a + coefficients[1] * b + coefficients[2]


def _describe(coefficients: Tuple[int, int, int]) -> str:
    ca, cb, c0 = coefficients
    terms = []
    for coefficient, name in ((ca, "a"), (cb, "b")):
        sign = "-" if coefficient < 0 else "+"
        magnitude = abs(coefficient)
        terms.append(f"{sign}{'' if magnitude == 1 else magnitude}{name}")
    text = "".join(terms).lstrip("+")
    return f"mu < {text}{'-' if c0 < 0 else '+'}{abs(c0)}"


def exception_flags(family: str, params: Dict) -> Optional[ExceptionVerdict]:
    if family == "F4":
        logging.warning(f"{tool_name()}: {F4_GAP}")
        return None
    if family != "G3":
        raise InvalidParameters(f"Exception thresholds exist only for F4 and G3, not {family}.")
    try:
        a, b, mu = (linalg.to_fraction(params[k]) for k in ("a", "b", "mu"))
    except KeyError as e:
        raise InvalidParameters(f"G(3) exception check needs a, b and mu; missing {e}.") from e
    if not (a > 0 and b - a > 0):
        raise InvalidParameters(f"G(3) parameters need a > 0 and b - a > 0, got a={a}, b={b}.")
    c_threshold = _affine(G3_C_THRESHOLD, a, b)
    u_threshold = _affine(G3_UNITARY_THRESHOLD, a, b)
    return ExceptionVerdict(_describe(G3_C_THRESHOLD), _describe(G3_UNITARY_THRESHOLD),
                            mu < c_threshold, mu < u_threshold)
