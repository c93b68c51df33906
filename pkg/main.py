import argparse
import logging
import sys

from superquant_toolkit.toolkit import EXIT_CONFIG_ERROR, default_manager
from superquant_utils import utils as common_utils
from superquant_utils.errors import ConfigError

COMMANDS = ("roots", "rho", "cone", "cells", "classify", "spectrum", "model", "reduce", "qr", "unitary", "atlas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Quantization toolkit for real forms of contragredient Lie supergroups",
        formatter_class=argparse.RawTextHelpFormatter
    )
    parser.add_argument(
        "command",
        choices=COMMANDS,
        help="Report to produce:\n"
             "  roots     root table with parities and square lengths\n"
             "  rho       positive system, simple roots, rho and admissibility diagnostics\n"
             "  cone      Harish-Chandra cone and parameter set C (and a 'weight' membership)\n"
             "  cells     cell decomposition of C with extreme rays\n"
             "  classify  pseudo-Kahler test of a potential on a cell\n"
             "  spectrum  integral weights in the moment image of a cell potential\n"
             "  model     Gelfand model over all cells with the exactly-once check\n"
             "  reduce    fiber and reduced labels over 'lam_hat'\n"
             "  qr        quantization versus reduction at 'lam_hat'\n"
             "  unitary   unitarizability inequalities\n"
             "  atlas     SVG slice of C or of a cell"
    )
    parser.add_argument(
        "--config",
        required=True,
        help="Path to the job configuration JSON file (e.g., ./config_sample.json)."
    )
    parser.add_argument("--box", type=int, help="Box bound N for lattice enumeration (overrides 'box').")
    parser.add_argument("--tol", type=float, help="Newton residual tolerance (overrides 'solver.tol').")
    parser.add_argument("--out", help="Output directory for reports (overrides 'output.dir').")
    parser.add_argument("--slice", help="Atlas plane as \"v1;v2;origin\" (overrides 'slice').")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    common_utils.setup_logging(logging.DEBUG if args.verbose else common_utils.DEFAULT_LOG_LEVEL)

    try:
        raw, text = common_utils.load_config(args.config)
        job = common_utils.parse_job_config(
            raw, text, overrides={"box": args.box, "tol": args.tol, "out": args.out, "slice": args.slice})
    except ConfigError as e:
        logging.critical(f"CRITICAL: {e}")
        return EXIT_CONFIG_ERROR

    logging.info(f"========= Superquant Toolkit starting '{args.command}' for {job.family}({job.m},{job.n}) "
                 f"/ {job.realform} =========")
    exit_code = default_manager().run_command(args.command, job)
    logging.info(f"===== Superquant Toolkit finished with exit code {exit_code}. =====")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
