import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional

from superquant_toolkit.atlas import service as atlas_service
from superquant_toolkit.cones import service as cones_service
from superquant_toolkit.cones.service import Cell, NotSimplicial
from superquant_toolkit.kahler import service as kahler_service
from superquant_toolkit.kahler.service import NewtonParams, Potential, Term
from superquant_toolkit.possys import service as possys_service
from superquant_toolkit.possys.service import Context
from superquant_toolkit.quantize import service as quantize_service
from superquant_toolkit.rootdata import service as rootdata_service
from superquant_toolkit.rootdata.service import AlgebraSpec
from superquant_toolkit.unitarity import service as unitarity_service
from superquant_utils import cache, linalg, reports
from superquant_utils.errors import ConfigError, ToolkitError
from superquant_utils.utils import JobConfig

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_CONFIG_ERROR = 2


@dataclass
class CommandConfig:
    config_key: Optional[str]
    command_name: str


class Command(ABC):
    @abstractmethod
    def get_command_config(self) -> CommandConfig:
        pass

    @abstractmethod
    def run(self, job: JobConfig) -> List[str]:
        """Writes the command's reports under job.out_dir and returns their paths."""
        pass


def algebra_spec(job: JobConfig) -> AlgebraSpec:
    return AlgebraSpec(job.family, job.m, job.n, job.alpha)


def context_for(job: JobConfig) -> Context:
    return cache.get_context(algebra_spec(job), job.realform, job.functional)


def report_path(job: JobConfig, name: str, suffix: str = "tsv") -> str:
    return os.path.join(job.out_dir, f"{name}.{suffix}")


def newton_params(job: JobConfig) -> NewtonParams:
    return NewtonParams(tol=job.solver.tol, max_iter=job.solver.max_iter,
                        divergence_radius=job.solver.divergence_radius)


def select_cell(ctx: Context, job: JobConfig) -> Cell:
    """The cell named by 1-based simple root indices; every index must point into Pi_c."""
    if job.cell is None:
        raise ConfigError("This command needs a 'cell' selector (list of compact simple root indices).",
                          job.line_of("cell"))
    ps = ctx.ps
    R = []
    for index in job.cell:
        if index > len(ps.simples):
            raise ConfigError(f"Cell index {index} exceeds the {len(ps.simples)} simple roots of {ctx.label}.",
                              job.line_of("cell"))
        root = ps.simples[index - 1]
        if root not in ps.pi_c:
            raise ConfigError(f"Simple root {index} ({ctx.rs.label(root.coords)}) is not compact.",
                              job.line_of("cell"))
        R.append(root)
    return cones_service.make_cell(ps, R)


def build_potential(ctx: Context, cell: Cell, job: JobConfig) -> Potential:
    """Model potential of the cell, or explicit terms whose weights are ambient weights of the cell subspace."""
    config = job.potential
    if config is None or config.kind == "model":
        coefficients = None if config is None else config.coefficients
        return quantize_service.model_potential(cell, coefficients)
    terms = []
    for coefficient, weight in config.terms:
        if len(weight) != ctx.rs.ambient_dim:
            raise ConfigError(f"Potential weight ({linalg.format_vector(weight)}) needs {ctx.rs.ambient_dim} "
                              "coordinates.", job.line_of("potential"))
        terms.append(Term(coefficient, cones_service.coordinates(cell, weight)))
    return Potential(tuple(terms), cell.dim, config.quad, f"configured {cell.label}")


def require_vector(job: JobConfig, key: str, ambient_dim: int):
    value = getattr(job, key)
    if value is None:
        raise ConfigError(f"This command needs '{key}'.", job.line_of(key))
    if len(value) != ambient_dim:
        raise ConfigError(f"'{key}' has {len(value)} entries, expected {ambient_dim}.", job.line_of(key))
    return value


class RootsCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="algebra", command_name="Root Table")

    def run(self, job: JobConfig) -> List[str]:
        rs = rootdata_service.build_root_system(algebra_spec(job))
        rows = rootdata_service.run_roots(rs)
        return [reports.write_table(rows, report_path(job, "roots"))]


class RhoCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="functional", command_name="Positive System and rho")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        rs, rf, ps = ctx.rs, ctx.rf, ctx.ps
        literal = possys_service.admissible_literal(ps, rs, rf)
        feasible = possys_service.admissible_feasible(ps, rs, rf)
        if rf.provisional:
            logging.warning(f"{self.get_command_config().command_name}: compact roots of {rf.tag} are provisional.")
        summary = reports.key_value_rows([
            ("algebra", rs.spec.label),
            ("realform", rf.tag),
            ("functional", ps.functional),
            ("rho", ps.rho),
            ("positive_roots", len(ps.positives)),
            ("pi_c", ",".join(str(ps.simple_index(r)) for r in ps.pi_c)),
            ("k_stable", literal.k_stable),
            ("q_abelian", literal.q_abelian),
            ("hc_cone_nonempty", feasible.feasible),
            ("hc_witness", feasible.witness),
        ])
        simples = [{"index": ps.simple_index(r), "root": rs.label(r.coords), "coords": r.coords,
                    "parity": r.parity.value, "compact": r in ps.pi_c} for r in ps.simples]
        witnesses = [{"condition": kind, "first": rs.label(a.coords), "second": rs.label(b.coords)}
                     for kind, a, b in literal.witnesses]
        return [reports.write_table(summary, report_path(job, "rho")),
                reports.write_table(simples, report_path(job, "simples")),
                reports.write_table(witnesses, report_path(job, "admissibility"),
                                    columns=["condition", "first", "second"])]


class ConeCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="weight", command_name="Harish-Chandra Cone")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        regions = [cones_service.hc_cone(ctx.ps, ctx.rs, ctx.rf),
                   cones_service.parameter_set_C(ctx.ps, ctx.rs, ctx.rf)]
        rows = [dict(region=region.name, **row) for region in regions for row in region.rows()]
        paths = [reports.write_table(rows, report_path(job, "cone"))]
        if job.weight is not None:
            lam = require_vector(job, "weight", ctx.rs.ambient_dim)
            cell = cones_service.cell_of(cones_service.cells(ctx.ps, ctx.rs, ctx.rf), lam)
            membership = reports.key_value_rows(
                [(f"in {region.name}", region.contains(lam)) for region in regions] +
                [("canonical", cones_service.canonical(ctx.rs, lam)),
                 ("chamber_signature", cones_service.chamber_signature(ctx.ps, lam)),
                 ("cell", cell.label if cell is not None else "")])
            paths.append(reports.write_table(membership, report_path(job, "membership")))
        return paths


class CellsCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key=None, command_name="Cell Decomposition")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        rows = []
        for position, cell in enumerate(cones_service.cells(ctx.ps, ctx.rs, ctx.rf), start=1):
            try:
                rays = ";".join(linalg.format_vector(r) for r in cones_service.extreme_rays(cell))
            except NotSimplicial as e:
                logging.warning(f"{self.get_command_config().command_name}: {e}")
                rays = "not simplicial"
            rows.append({"cell": position, "R": cell.label, "indices": cell.indices, "dim": cell.dim,
                         "closure_R": ",".join(ctx.rs.label(r.coords) for r in cell.closure_R),
                         "empty": cell.region.is_empty(), "rays": rays})
        return [reports.write_table(rows, report_path(job, "cells"))]


class ClassifyCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="potential", command_name="Pseudo-Kahler Classification")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        cell = select_cell(ctx, job)
        potential = build_potential(ctx, cell, job)
        verdict = kahler_service.classify_form(potential, cell, job.sampling_box, job.sampling_points)
        rows = reports.key_value_rows([
            ("cell", cell.label),
            ("potential", potential.name),
            ("nondegenerate", verdict.nondegenerate),
            ("strictly_convex", verdict.strictly_convex),
            ("image_in_regular", verdict.image_in_regular),
            ("pseudo_kahler", verdict.pseudo_kahler),
            ("analytic", verdict.analytic),
        ] + [("certificate", note) for note in verdict.certificates])
        return [reports.write_table(rows, report_path(job, "classify"))]


def spectrum_rows(ctx: Context, report: quantize_service.SpectrumReport) -> List[Dict]:
    rows = [{"cell": report.cell.label, "lam": e.lam, "highest_weight": e.highest_weight_label,
             "multiplicity": e.multiplicity, "status": "member"} for e in report.entries]
    rows += [{"cell": report.cell.label, "lam": lam, "highest_weight": linalg.add(lam, ctx.ps.rho),
              "multiplicity": "", "status": "undecided"} for lam in report.undecided]
    return rows


SPECTRUM_COLUMNS = ["cell", "lam", "highest_weight", "multiplicity", "status"]


class SpectrumCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="potential", command_name="Cell Spectrum")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        cell = select_cell(ctx, job)
        potential = build_potential(ctx, cell, job)
        report = quantize_service.spectrum(ctx, cell, potential, job.box, job.lattice_scale, newton_params(job))
        return [reports.write_table(spectrum_rows(ctx, report), report_path(job, "spectrum"), SPECTRUM_COLUMNS)]


class ModelCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="box", command_name="Gelfand Model")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        model = quantize_service.gelfand_model(ctx, job.box, job.lattice_scale, newton_params(job))
        check = quantize_service.verify_exactly_once(ctx, model.reports, job.box, job.lattice_scale, model.skipped)
        defect = quantize_service.boundary_defect(ctx, job.box, job.lattice_scale)
        rows = [row for report in model.reports for row in spectrum_rows(ctx, report)]
        summary = reports.key_value_rows([
            ("exactly_once", check.ok),
            ("checked", check.checked),
            ("excluded", check.excluded),
            ("misses", len(check.misses)),
            ("doubles", len(check.doubles)),
            ("skipped_cells", ";".join(c.label for c in model.skipped)),
            ("boundary_defect", len(defect)),
        ] + [("miss", lam) for lam in check.misses] + [("double", lam) for lam in check.doubles]
          + [("warning", w) for w in model.warnings])
        return [reports.write_table(rows, report_path(job, "model"), SPECTRUM_COLUMNS),
                reports.write_table(summary, report_path(job, "exactly_once"))]


class ReduceCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="lam_hat", command_name="Symplectic Reduction")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        lam_hat = require_vector(job, "lam_hat", ctx.rs.ambient_dim)
        cell = select_cell(ctx, job)
        potential = build_potential(ctx, cell, job)
        result = quantize_service.reduce(ctx, cell, potential, lam_hat, newton_params(job))
        rows = reports.key_value_rows(
            [("lam_hat", result.lam_hat),
             ("fiber_points", len(result.gamma)),
             ("reduced_form", result.reduced_form_label),
             ("reduced_quantization", result.reduced_quantization_label),
             ("in_C", result.in_C)] +
            [(f"gamma_{i}", point) for i, point in enumerate(result.gamma, start=1)] +
            [(f"residual_{i}", r) for i, r in enumerate(result.residuals, start=1)])
        return [reports.write_table(rows, report_path(job, "reduce"))]


class QRCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="lam_hat", command_name="Quantization Commutes with Reduction")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        lam_hat = require_vector(job, "lam_hat", ctx.rs.ambient_dim)
        if not quantize_service.is_integral(lam_hat, job.lattice_scale):
            raise ConfigError("λ̂ not in the integral lattice", job.line_of("lam_hat"))
        cell = select_cell(ctx, job)
        potential = build_potential(ctx, cell, job)
        try:
            check = quantize_service.check_qr(ctx, cell, potential, lam_hat, job.box, job.lattice_scale,
                                              newton_params(job))
        except ValueError as e:
            raise ConfigError(str(e), job.line_of("lam_hat")) from e
        rows = reports.key_value_rows([
            ("cell", cell.label),
            ("lam_hat", check.lam_hat),
            ("reduced_quantization", check.lhs),
            ("spectrum_multiplicity", check.rhs),
            ("decided", check.decided),
            ("equal", check.equal),
        ])
        return [reports.write_table(rows, report_path(job, "qr"))]


class UnitaryCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="osp", command_name="Unitarizability")

    def run(self, job: JobConfig) -> List[str]:
        if job.osp is None and job.exception is None and job.weight is None:
            raise ConfigError("The unitary command needs an 'osp', 'exception' or 'weight' block.")
        rows = []
        if job.osp is not None:
            if job.family != "B":
                raise ConfigError(f"The 'osp' block applies to B(m,n), not {job.family}.", job.line_of("osp"))
            params = unitarity_service.JakobsenParamsOsp.build(job.m, job.n, job.osp["mu"], job.osp["lam"],
                                                               job.osp["a"])
            verdict = unitarity_service.osp_unitarizable(params)
            rows += [{"check": "osp", "root": r.root, "kind": r.kind, "relation": r.relation,
                      "value": r.value, "satisfied": r.satisfied} for r in verdict.rows]
            rows.append({"check": "osp", "root": verdict.binding_root, "kind": "binding", "relation": "< 0",
                         "value": verdict.binding_value, "satisfied": verdict.in_C})
        if job.exception is not None:
            verdict = unitarity_service.exception_flags(job.family, job.exception)
            if verdict is not None:
                rows.append({"check": "exception", "root": "", "kind": "C", "relation": verdict.c_condition,
                             "value": "", "satisfied": verdict.c_holds})
                rows.append({"check": "exception", "root": "", "kind": "unitarizable",
                             "relation": verdict.unitarizable_condition, "value": "",
                             "satisfied": verdict.unitarizable_holds})
                rows.append({"check": "exception", "root": "", "kind": "agree", "relation": "", "value": "",
                             "satisfied": verdict.agree})
            else:
                rows.append({"check": "exception", "root": "", "kind": "gap",
                             "relation": unitarity_service.F4_GAP, "value": "", "satisfied": ""})
        if job.weight is not None:
            ctx = context_for(job)
            lam = require_vector(job, "weight", ctx.rs.ambient_dim)
            rows += [{"check": "weight", "root": r.root, "kind": r.kind, "relation": r.relation,
                      "value": r.value, "satisfied": r.satisfied}
                     for r in unitarity_service.inequality_table(ctx, lam)]
        return [reports.write_table(rows, report_path(job, "unitary"),
                                    ["check", "root", "kind", "relation", "value", "satisfied"])]


class AtlasCommand(Command):
    def get_command_config(self) -> CommandConfig:
        return CommandConfig(config_key="slice", command_name="Cone Atlas")

    def run(self, job: JobConfig) -> List[str]:
        ctx = context_for(job)
        rs = ctx.rs
        if job.slice is not None:
            try:
                plane = atlas_service.parse_slice(job.slice, rs.ambient_dim)
            except ValueError as e:
                raise ConfigError(str(e), job.line_of("slice")) from e
        else:
            plane = atlas_service.default_slice(rs.ambient_dim, rs.rank)
            if plane is None:
                raise ConfigError(f"{ctx.label} has rank {rs.rank}; give a 'slice' plane 'v1;v2;origin'.",
                                  job.line_of("slice"))
        cell = potential = None
        if job.cell is not None:
            cell = select_cell(ctx, job)
            region = cell.region
            try:
                potential = build_potential(ctx, cell, job)
            except NotSimplicial as e:
                logging.warning(f"{self.get_command_config().command_name}: no moment image shading, {e}")
        else:
            region = cones_service.parameter_set_C(ctx.ps, rs, ctx.rf)
        highlight = [v for v in (job.weight, job.lam_hat) if v is not None and len(v) == rs.ambient_dim]
        os.makedirs(job.out_dir, exist_ok=True)
        svg = atlas_service.render_slice(region, plane, job.box, report_path(job, "atlas", "svg"), cell, potential,
                                         f"{ctx.label}: {region.name}", highlight)
        rows = [{"i": i, "j": j, "weight": plane.point(i, j), "inside": inside}
                for i, j, inside in atlas_service.slice_points(region, plane, job.box)]
        return [reports.write_table(rows, report_path(job, "atlas")), svg]


class CommandManager:
    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def register_command(self, identifier: str, command_instance: Command) -> None:
        if identifier in self.commands:
            logging.warning(f"Command with identifier '{identifier}' is already registered. "
                            "Overwriting previous instance.")
        self.commands[identifier] = command_instance
        logging.debug(f"Command '{command_instance.get_command_config().command_name}' registered "
                      f"with identifier '{identifier}'.")

    def run_command(self, identifier: str, job: JobConfig) -> int:
        command = self.commands.get(identifier)
        if command is None:
            logging.error(f"Unknown command '{identifier}'. Available: {', '.join(sorted(self.commands))}.")
            return EXIT_CONFIG_ERROR
        config = command.get_command_config()
        if config.config_key and job.line_of(config.config_key) is None:
            logging.debug(f"{config.command_name}: no '{config.config_key}' entry in the configuration, "
                          "using defaults.")

        logging.info("==============================================================")
        logging.info(f"================ EXECUTING: {config.command_name} ================")
        logging.info("==============================================================")
        try:
            paths = command.run(job)
        except ConfigError as e:
            logging.error(f"Configuration error in {config.command_name}: {e}")
            return EXIT_CONFIG_ERROR
        except ToolkitError as e:
            logging.error(f"{config.command_name} failed: {e}")
            return EXIT_DOMAIN_ERROR
        except Exception as e:
            logging.error(f"CRITICAL ERROR during execution of {config.command_name}: {e}", exc_info=True)
            return EXIT_DOMAIN_ERROR
        for path in paths:
            logging.info(f"{config.command_name}: wrote '{path}'.")
        logging.info(f"========== {config.command_name} FINISHED ==========")
        return EXIT_OK


def default_manager() -> CommandManager:
    manager = CommandManager()
    manager.register_command("roots", RootsCommand())
    manager.register_command("rho", RhoCommand())
    manager.register_command("cone", ConeCommand())
    manager.register_command("cells", CellsCommand())
    manager.register_command("classify", ClassifyCommand())
    manager.register_command("spectrum", SpectrumCommand())
    manager.register_command("model", ModelCommand())
    manager.register_command("reduce", ReduceCommand())
    manager.register_command("qr", QRCommand())
    manager.register_command("unitary", UnitaryCommand())
    manager.register_command("atlas", AtlasCommand())
    return manager
