import logging
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from superquant_toolkit.rootdata.service import AlgebraSpec, Root, RootSystem
from superquant_utils.errors import ToolkitError


def tool_name():
    return "Real Form Catalogue"


class InconsistentRealForm(ToolkitError):
    pass


@dataclass(frozen=True)
class RealForm:
    algebra: AlgebraSpec
    tag: str
    variant: str
    compact_block_data: Tuple[Tuple[str, int], ...] = ()

    @property
    def p(self) -> Optional[int]:
        return dict(self.compact_block_data).get("p")

    @property
    def provisional(self) -> bool:
        return self.algebra.family in ("F4", "G3")


@dataclass(frozen=True)
class RootPartition:
    compact: Tuple[Root, ...]
    noncompact: Tuple[Root, ...]

    def is_compact(self, root: Root) -> bool:
        return root in self._compact_set()

    def _compact_set(self):
        cached = self.__dict__.get("_compact")
        if cached is None:
            cached = frozenset(self.compact)
            object.__setattr__(self, "_compact", cached)
        return cached


def normalize_tag(tag: str) -> str:
    text = tag.strip()
    for old, new in (("⊕", "+"), ("ℝ", "R"), ("²", "^2"), ("³", "^3"), ("∗", "*"), (" ", "")):
        text = text.replace(old, new)
    text = re.sub(r"so\((\d+)\)\^?\*", r"so*(\1)", text)
    text = text.replace("g2,c", "g2c").replace("g_{2,c}", "g2c").replace("g_2c", "g2c")
    return text


def _sp(n: int) -> str:
    return f"sp({n},R)"


# real forms with a compact Cartan whose highest weight supermodules can be unitarizable
def list_supported(spec: AlgebraSpec) -> List[str]:
    family, m, n = spec.family, spec.m, spec.n
    if family == "A":
        return [f"su({p},{m + 1 - p}|{n + 1})" for p in range(m + 2)]
    if family == "B":
        return [f"so({2 * m + 1})+{_sp(n)}"]
    if family == "C":
        return [f"{_sp(n - 1)}+so(2)"]
    if family == "D":
        return [f"so({2 * m})+{_sp(n)}", f"so({2 * m - 2},2)+{_sp(n)}", f"so*({2 * m})+{_sp(n)}"]
    if family == "D21alpha":
        return ["su(2)^2+sl(2,R)", "sl(2,R)^3"]
    if family == "F4":
        return ["so(2,5)+su(2)"]
    return ["g2c+sl(2,R)"]


def _variant(spec: AlgebraSpec, tag: str) -> Tuple[str, Tuple[Tuple[str, int], ...]]:
    if spec.family == "A":
        p = int(re.match(r"su\((\d+),", tag).group(1))
        return "su", (("p", p),)
    if spec.family == "D":
        if tag.startswith("so*("):
            return "so_star", ()
        if "," in tag.split("+")[0]:
            return "so_2m-2_2", ()
        return "so_compact", ()
    if spec.family == "D21alpha":
        return ("su2_su2_sl2" if tag.startswith("su(2)") else "sl2_cubed"), ()
    return spec.family.lower(), ()


def parse_real_form(spec: AlgebraSpec, tag: str) -> RealForm:
    normalized = normalize_tag(tag)
    supported = list_supported(spec)
    if normalized not in supported:
        raise InconsistentRealForm(
            f"'{tag}' is not a supported real form of {spec.label}. Supported: {', '.join(supported)}.")
    variant, block = _variant(spec, normalized)
    rf = RealForm(algebra=spec, tag=normalized, variant=variant, compact_block_data=block)
    logging.debug(f"{tool_name()}: parsed '{tag}' as {rf.tag} ({rf.variant}) for {spec.label}.")
    return rf


def _split(rs: RootSystem, root: Root) -> Tuple[Tuple, Tuple]:
    """Coordinates of a root on the epsilon block and on the delta block."""
    names = rs.coordinate_names
    eps = tuple(c for c, name in zip(root.coords, names) if name.startswith("e"))
    dlt = tuple(c for c, name in zip(root.coords, names) if name.startswith("d"))
    return eps, dlt


def _symplectic_compact(dlt: Tuple) -> bool:
    # sp(n,R): compact roots are the u(n) roots d_i - d_j
    return sorted(c for c in dlt if c != 0) == [-1, 1]


def _orthosymplectic_rule(eps_rule: Callable[[Tuple], bool]) -> Callable[[RootSystem, Root], bool]:
    def rule(rs: RootSystem, root: Root) -> bool:
        eps, dlt = _split(rs, root)
        if any(dlt):
            return _symplectic_compact(dlt)
        return eps_rule(eps)
    return rule


def _su_rule(p: int) -> Callable[[RootSystem, Root], bool]:
    def rule(rs: RootSystem, root: Root) -> bool:
        eps, dlt = _split(rs, root)
        if any(dlt):
            return True
        support = [i for i, c in enumerate(eps) if c != 0]
        return (support[0] < p) == (support[1] < p)
    return rule


def _f4_rule(rs: RootSystem, root: Root) -> bool:
    # so(2,5): roots touching e1 are noncompact; the su(2) roots +-d are compact
    return root.coords[0] == 0


def _g3_rule(rs: RootSystem, root: Root) -> bool:
    return root.coords[-1] == 0


def _d21_rule(variant: str) -> Callable[[RootSystem, Root], bool]:
    def rule(rs: RootSystem, root: Root) -> bool:
        if variant == "sl2_cubed":
            return False
        return root.coords[0] == 0
    return rule


def _compactness_rule(rf: RealForm) -> Callable[[RootSystem, Root], bool]:
    family = rf.algebra.family
    if family == "A":
        return _su_rule(rf.p)
    if family in ("B", "C"):
        return _orthosymplectic_rule(lambda eps: True)
    if family == "D":
        rules: Dict[str, Callable[[Tuple], bool]] = {
            "so_compact": lambda eps: True,
            "so_2m-2_2": lambda eps: eps[0] == 0,
            "so_star": lambda eps: sum(eps) == 0,
        }
        return _orthosymplectic_rule(rules[rf.variant])
    if family == "D21alpha":
        return _d21_rule(rf.variant)
    if family == "F4":
        return _f4_rule
    return _g3_rule


def classify_even_roots(rf: RealForm, rs: RootSystem) -> RootPartition:
    if rf.algebra != rs.spec:
        raise InconsistentRealForm(f"Real form {rf.tag} belongs to {rf.algebra.label}, not {rs.spec.label}.")
    rule = _compactness_rule(rf)
    compact, noncompact = [], []
    for root in rs.even_roots:
        (compact if rule(rs, root) else noncompact).append(root)
    partition = RootPartition(tuple(compact), tuple(noncompact))
    for root in compact:
        if not partition.is_compact(-root):
            raise InconsistentRealForm(f"{rf.tag}: compactness of {rs.label(root.coords)} is not symmetric.")
    if rf.provisional:
        logging.debug(f"{tool_name()}: compact roots of {rf.tag} follow a provisional Hermitian-pair convention.")
    return partition
