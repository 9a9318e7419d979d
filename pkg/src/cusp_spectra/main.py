import argparse
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from .app.cli.commands import (
    EXIT_DOMAIN,
    EXIT_NUMERIC,
    EXIT_USAGE,
    RunConfig,
    run,
)
from .app.errors import ConfigError, DomainError, NumericError, OracleError, WindowViolationError
from .app.logger import logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cusp-spectra",
        description="Eigenvalue counts and Weyl-law checks for magnetic Laplacians on hyperbolic surfaces with cusps.",
    )
    parser.add_argument("subcommand", choices=["count", "eigenvalues", "weyl", "verify"])
    parser.add_argument("--surface", dest="surface_path", help="JSON surface description (default: one cusp, L=1, xi=1/2).")
    parser.add_argument("--lambda", dest="lam", type=float, help="Spectral parameter for count/eigenvalues.")
    parser.add_argument("--lambda-max", dest="lambda_max", type=float, help="Top of the weyl grid.")
    parser.add_argument("--grid", dest="grid_size", type=int, default=64, help="Number of weyl grid points (default: 64).")
    parser.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet", help="Boundary condition for eigenvalues.")
    parser.add_argument("--cusp", type=int, default=1, help="1-based cusp index for eigenvalues.")
    parser.add_argument("--out", dest="output_path", help="Output file (default: stdout).")
    parser.add_argument("--format", choices=["csv", "json"], default="json")
    parser.add_argument("--seed", type=int, default=0, help="Seed for the randomized verification batteries.")
    parser.add_argument("--thresholds", dest="thresholds_path", help="Verification YAML (default: VERIFY_CONFIG_PATH).")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.model_validate({k: v for k, v in vars(args).items() if v is not None})
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_USAGE

    try:
        return run(cfg)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except DomainError as e:
        logger.error(str(e))
        return EXIT_DOMAIN
    except (NumericError, OracleError, WindowViolationError) as e:
        logger.error(f"Numerical failure: {e}", exc_info=True)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
