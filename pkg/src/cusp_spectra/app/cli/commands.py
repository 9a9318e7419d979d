import csv
import io
import math
import sys
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.config import properties
from ..counting import eigenvalues_below
from ..errors import ConfigError
from ..geometry import Cusp, ExplicitWeyl, Surface
from ..logger import logger
from ..modes import BoundaryCondition, ModeOperator, support_window
from ..verify import VerificationReport, load_verification_config, run_verification
from ..weyl import Bracket, WeylReport, make_grid, surface_bracket, weyl_report

Subcommand = Literal["count", "eigenvalues", "weyl", "verify"]
OutputFormat = Literal["csv", "json"]

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    surface_path: Path | None = None
    lam: float | None = None
    lambda_max: float | None = None
    grid_size: int = Field(default=64, ge=4)
    bc: BoundaryCondition = "dirichlet"
    # 1-based, as in the surface file
    cusp: int = Field(default=1, ge=1)
    output_path: Path | None = None
    format: OutputFormat = "json"
    seed: int = 0
    thresholds_path: Path | None = None
    threads: int = Field(default_factory=lambda: properties.CUSP_SPECTRA_THREADS, ge=1)

    @model_validator(mode="after")
    def _check_inputs(self) -> "RunConfig":
        if self.subcommand in ("count", "eigenvalues") and self.lam is None:
            raise ValueError(f"'{self.subcommand}' needs --lambda")
        if self.subcommand == "weyl" and self.lambda_max is None:
            raise ValueError("'weyl' needs --lambda-max")
        return self


class ModeEigenvalues(BaseModel):
    ell: int
    eigenvalues: list[float]


class EigenvaluesResponse(BaseModel):
    cusp: int
    lam: float = Field(alias="lambda")
    bc: BoundaryCondition
    modes: list[ModeEigenvalues]

    model_config = ConfigDict(populate_by_name=True)


def default_surface() -> Surface:
    """Один касп L=1, α²=0, ξ=1/2, b=0 и пустое ядро ExplicitWeyl(0, 0)."""
    return Surface(cusps=[Cusp(L=1.0, holonomy=math.pi)], core=ExplicitWeyl(area=0.0))


def load_surface(cfg: RunConfig) -> Surface:
    if cfg.surface_path is None:
        logger.info("No --surface given, using the single half-flux cusp")
        return default_surface()
    logger.info(f"Loading surface from '{cfg.surface_path}'")
    return Surface.from_json_file(cfg.surface_path)


def _dump_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2, by_alias=True) + "\n"


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def render_bracket(bracket: Bracket, fmt: OutputFormat) -> str:
    if fmt == "json":
        return _dump_json(bracket)
    return _rows_to_csv(
        ["lambda", "lower", "upper", "core_D", "core_N", "near_degenerate"],
        [[_fmt(bracket.lam), bracket.lower, bracket.upper, bracket.core_D, bracket.core_N, bracket.near_degenerate]],
    )


def render_eigenvalues(response: EigenvaluesResponse, fmt: OutputFormat) -> str:
    if fmt == "json":
        return _dump_json(response)
    rows = [
        [m.ell, k, _fmt(e)]
        for m in response.modes
        for k, e in enumerate(m.eigenvalues, start=1)
    ]
    return _rows_to_csv(["ell", "index", "eigenvalue"], rows)


def render_weyl(report: WeylReport, fmt: OutputFormat) -> str:
    return _dump_json(report) if fmt == "json" else report.to_csv()


def render_verification(report: VerificationReport, fmt: OutputFormat) -> str:
    if fmt == "json":
        return _dump_json(report)
    return _rows_to_csv(["check", "passed"], [[ch.name, ch.passed] for ch in report.checks])


def write_output(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot write output '{path}': {e}") from e
    logger.info(f"Wrote {len(text)} bytes to '{path}'")


def run_count(cfg: RunConfig) -> int:
    """Скобки Дирихле/Неймана для N(λ) всей поверхности."""
    surface = load_surface(cfg)
    bracket = surface_bracket(surface, cfg.lam, threads=cfg.threads)
    write_output(render_bracket(bracket, cfg.format), cfg.output_path)
    return EXIT_OK


def run_eigenvalues(cfg: RunConfig) -> int:
    """Собственные значения P_ℓ ниже λ для выбранного каспа, по всем модам окна."""
    surface = load_surface(cfg)
    if cfg.cusp > len(surface.cusps):
        raise ConfigError(f"--cusp {cfg.cusp} out of range: the surface has {len(surface.cusps)} cusp(s)")
    c = surface.cusps[cfg.cusp - 1]
    modes: list[ModeEigenvalues] = []
    if cfg.lam > 0.25:
        for ell in support_window(c, cfg.lam):
            eigs = eigenvalues_below(ModeOperator.from_cusp(c, ell, "P", cfg.bc), cfg.lam)
            if eigs:
                modes.append(ModeEigenvalues(ell=ell, eigenvalues=eigs))
    logger.info(f"Cusp {cfg.cusp}: {sum(len(m.eigenvalues) for m in modes)} eigenvalue(s) below {cfg.lam!r}")
    response = EigenvaluesResponse(cusp=cfg.cusp, lam=cfg.lam, bc=cfg.bc, modes=modes)
    write_output(render_eigenvalues(response, cfg.format), cfg.output_path)
    return EXIT_OK


def run_weyl(cfg: RunConfig) -> int:
    surface = load_surface(cfg)
    grid = make_grid(cfg.lambda_max, cfg.grid_size)
    report = weyl_report(surface, grid, threads=cfg.threads)
    write_output(render_weyl(report, cfg.format), cfg.output_path)
    return EXIT_OK


def run_verify(cfg: RunConfig) -> int:
    """Полный набор проверок; ненулевой код выхода при любом провале."""
    thresholds = load_verification_config(cfg.thresholds_path)
    report = run_verification(thresholds, cfg.seed)
    write_output(render_verification(report, cfg.format), cfg.output_path)
    if not report.passed:
        failed = [ch.name for ch in report.checks if not ch.passed]
        logger.error(f"Verification failed: {failed}")
        return EXIT_VERIFICATION_FAILED
    logger.info(f"Verification passed ({len(report.checks)} checks, seed={cfg.seed})")
    return EXIT_OK


HANDLERS = {
    "count": run_count,
    "eigenvalues": run_eigenvalues,
    "weyl": run_weyl,
    "verify": run_verify,
}


def run(cfg: RunConfig) -> int:
    logger.info(f"Running '{cfg.subcommand}'")
    try:
        return HANDLERS[cfg.subcommand](cfg)
    finally:
        logger.info(f"Finished '{cfg.subcommand}'")
