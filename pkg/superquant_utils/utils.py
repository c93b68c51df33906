import json
import logging
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from superquant_utils import linalg
from superquant_utils.errors import ConfigError
from superquant_utils.linalg import RationalVector

DEFAULT_LOG_LEVEL = logging.INFO
DEFAULT_BOX = 4
DEFAULT_OUT_DIR = "reports"


def setup_logging(level=DEFAULT_LOG_LEVEL):
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%d-%m-%Y %H:%M:%S',
        handlers=[logging.StreamHandler(sys.stdout)]
    )
    logging.debug(f"Logging setup complete. Level set to: {logging.getLevelName(level)}")


def load_config(config_path: str) -> Tuple[Dict[str, Any], str]:
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            text = f.read()
    except FileNotFoundError as e:
        raise ConfigError(f"Configuration file not found at '{config_path}'.") from e
    except OSError as e:
        raise ConfigError(f"Could not read configuration file '{config_path}': {e}") from e
    try:
        config_data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Could not decode JSON from '{config_path}': {e.msg}", e.lineno) from e
    if not isinstance(config_data, dict):
        raise ConfigError(f"Configuration in '{config_path}' must be a JSON object.", 1)
    logging.info(f"Configuration successfully loaded from '{config_path}'.")
    return config_data, text


def find_key_line(text: str, key: str) -> Optional[int]:
    """1-based line of the first occurrence of "key": in the raw config text."""
    match = re.search(r'"' + re.escape(key) + r'"\s*:', text or "")
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


@dataclass(frozen=True)
class PotentialConfig:
    kind: str
    coefficients: Optional[Tuple[float, ...]] = None
    terms: Tuple[Tuple[float, RationalVector], ...] = ()
    quad: Optional[Tuple[RationalVector, ...]] = None


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iter: int = 200
    divergence_radius: float = 1e3


@dataclass(frozen=True)
class JobConfig:
    family: str
    m: int
    n: int
    alpha: Optional[Fraction]
    realform: str
    functional: Optional[RationalVector] = None
    cell: Optional[Tuple[int, ...]] = None
    potential: Optional[PotentialConfig] = None
    box: int = DEFAULT_BOX
    lattice_scale: int = 1
    weight: Optional[RationalVector] = None
    lam_hat: Optional[RationalVector] = None
    solver: SolverConfig = SolverConfig()
    sampling_box: float = 2.0
    sampling_points: int = 5
    osp: Optional[Dict[str, Any]] = None
    exception: Optional[Dict[str, Fraction]] = None
    slice: Optional[str] = None
    out_dir: str = DEFAULT_OUT_DIR
    lines: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def line_of(self, key: str) -> Optional[int]:
        return self.lines.get(key)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.lines: Dict[str, int] = {}

    def line(self, key: str) -> Optional[int]:
        if key not in self.lines:
            found = find_key_line(self.text, key)
            if found is not None:
                self.lines[key] = found
        return self.lines.get(key)

    def fail(self, key: str, message: str):
        raise ConfigError(f"'{key}': {message}", self.line(key))

    def rational(self, key: str, value) -> Fraction:
        try:
            return linalg.to_fraction(value)
        except (TypeError, ValueError, ZeroDivisionError):
            self.fail(key, f"{value!r} is not a rational number (use an integer or a 'p/q' string)")

    def vector(self, key: str, value) -> RationalVector:
        if not isinstance(value, list):
            self.fail(key, f"expected a list of rationals, got {type(value).__name__}")
        return tuple(self.rational(key, v) for v in value)

    def integer(self, key: str, value, minimum: Optional[int] = None) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(key, f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            self.fail(key, f"must be at least {minimum}, got {value}")
        return value

    def number(self, key: str, value, positive: bool = True) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            self.fail(key, f"expected a number, got {value!r}")
        try:
            number = float(value)
        except ValueError:
            self.fail(key, f"{value!r} is not a number")
        if positive and not number > 0:
            self.fail(key, f"must be positive, got {value!r}")
        return number

    def section(self, raw: Dict, key: str, required: bool = False) -> Optional[Dict]:
        value = raw.get(key)
        if value is None:
            if required:
                raise ConfigError(f"Missing required section '{key}'.", None)
            return None
        if not isinstance(value, dict):
            self.fail(key, f"expected an object, got {type(value).__name__}")
        self.line(key)
        return value


def _parse_potential(reader: _Reader, block: Dict) -> PotentialConfig:
    kind = block.get("kind", "terms" if "terms" in block else "model")
    if kind == "model":
        coefficients = block.get("coefficients")
        if coefficients is not None:
            if not isinstance(coefficients, list):
                reader.fail("coefficients", "expected a list of positive numbers")
            coefficients = tuple(reader.number("coefficients", c) for c in coefficients)
        return PotentialConfig("model", coefficients=coefficients)
    if kind != "terms":
        reader.fail("kind", f"unknown potential kind '{kind}' (expected 'model' or 'terms')")
    raw_terms = block.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        reader.fail("terms", "expected a non-empty list of {coefficient, weight} objects")
    terms = []
    for term in raw_terms:
        if not isinstance(term, dict) or "coefficient" not in term or "weight" not in term:
            reader.fail("terms", f"term {term!r} needs 'coefficient' and 'weight'")
        terms.append((reader.number("coefficient", term["coefficient"]), reader.vector("weight", term["weight"])))
    quad = block.get("quad")
    if quad is not None:
        if not isinstance(quad, list):
            reader.fail("quad", "expected a list of rows")
        quad = tuple(reader.vector("quad", row) for row in quad)
    return PotentialConfig("terms", terms=tuple(terms), quad=quad)


def parse_job_config(raw: Dict[str, Any], text: str = "",
                     overrides: Optional[Dict[str, Any]] = None) -> JobConfig:
    """Validates a loaded config; every failure is a ConfigError pointing at the offending line."""
    reader = _Reader(text)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    algebra = reader.section(raw, "algebra", required=True)
    family = algebra.get("family")
    if not isinstance(family, str):
        reader.fail("family", "expected a family name such as 'A' or 'B'")
    m = reader.integer("m", algebra.get("m", 0), minimum=0)
    n = reader.integer("n", algebra.get("n", 0), minimum=0)
    alpha = algebra.get("alpha")
    alpha = None if alpha is None else reader.rational("alpha", alpha)

    realform = raw.get("realform")
    if not isinstance(realform, str) or not realform.strip():
        raise ConfigError("Missing required 'realform' tag.", reader.line("realform"))

    functional = raw.get("functional")
    functional = None if functional is None else reader.vector("functional", functional)

    cell = raw.get("cell")
    if cell is not None:
        if not isinstance(cell, list):
            reader.fail("cell", "expected a list of 1-based simple root indices")
        cell = tuple(sorted(set(reader.integer("cell", i, minimum=1) for i in cell)))

    potential = reader.section(raw, "potential")
    potential = None if potential is None else _parse_potential(reader, potential)

    box = reader.integer("box", overrides.get("box", raw.get("box", DEFAULT_BOX)), minimum=0)
    lattice_scale = reader.integer("lattice_scale", raw.get("lattice_scale", 1), minimum=1)

    weight = raw.get("weight")
    weight = None if weight is None else reader.vector("weight", weight)
    lam_hat = raw.get("lam_hat")
    lam_hat = None if lam_hat is None else reader.vector("lam_hat", lam_hat)

    solver_block = reader.section(raw, "solver") or {}
    solver = SolverConfig(
        tol=reader.number("tol", overrides.get("tol", solver_block.get("tol", SolverConfig.tol))),
        max_iter=reader.integer("max_iter", solver_block.get("max_iter", SolverConfig.max_iter), minimum=1),
        divergence_radius=reader.number("divergence_radius",
                                        solver_block.get("divergence_radius", SolverConfig.divergence_radius)),
    )

    sampling = reader.section(raw, "sampling") or {}
    sampling_box = reader.number("box", sampling.get("box", 2.0))
    sampling_points = reader.integer("points", sampling.get("points", 5), minimum=1)

    osp = reader.section(raw, "osp")
    if osp is not None:
        osp = {
            "mu": reader.vector("mu", osp.get("mu", [])),
            "lam": reader.rational("lam", osp.get("lam", 0)),
            "a": reader.vector("a", osp.get("a", [])),
        }

    exception = reader.section(raw, "exception")
    if exception is not None:
        exception = {k: reader.rational(k, v) for k, v in exception.items()}

    slice_text = overrides.get("slice", raw.get("slice"))
    if slice_text is not None and not isinstance(slice_text, str):
        reader.fail("slice", "expected a string of the form 'v1;v2;origin'")

    output = reader.section(raw, "output") or {}
    out_dir = overrides.get("out", output.get("dir", DEFAULT_OUT_DIR))
    if not isinstance(out_dir, str) or not out_dir:
        reader.fail("dir", "expected a directory path")

    job = JobConfig(family=family, m=m, n=n, alpha=alpha, realform=realform, functional=functional,
                    cell=cell, potential=potential, box=box, lattice_scale=lattice_scale, weight=weight,
                    lam_hat=lam_hat, solver=solver, sampling_box=sampling_box, sampling_points=sampling_points,
                    osp=osp, exception=exception, slice=slice_text, out_dir=out_dir,
                    lines={k: v for k, v in ((key, reader.line(key)) for key in (
                        "algebra", "realform", "functional", "cell", "potential", "box", "weight",
                        "lam_hat", "osp", "exception", "slice")) if v is not None})
    logging.debug(f"Job configuration parsed: {job.family}({job.m},{job.n}) / {job.realform}, box {job.box}.")
    return job
