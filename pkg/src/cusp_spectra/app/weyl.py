"""
Whole-surface counting by Dirichlet/Neumann bracketing and the Weyl-law report.

The surface is cut along the cusp boundaries; the minimax principle puts N(λ) between
the sum of the Dirichlet counts of the pieces and the sum of their Neumann counts.
"""
import csv
import io
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .config.config import properties
from .counting import BoundaryCondition, cusp_count, ordered_map
from .errors import DomainError, SpectrumNotDiscreteError
from .geometry import Discrete, ExplicitWeyl, FlatRectangle, Surface, discreteness_verdict
from .logger import logger

CSV_COLUMNS = [
    "lambda",
    "count_D",
    "count_N",
    "principal",
    "resid_D",
    "resid_N",
    "normalized_resid_D",
    "normalized_resid_N",
]


def _flat_rectangle_count(core: FlatRectangle, lam: float, bc: BoundaryCondition) -> int:
    if lam <= 0:
        return 0
    first = 1 if bc == "dirichlet" else 0
    m = np.arange(first, math.floor(core.width * math.sqrt(lam) / math.pi) + 2)
    rest = lam - (math.pi * m / core.width) ** 2
    rest = rest[rest > 0]
    # n ≥ first with π²n²/height² < rest
    n_top = np.ceil(core.height * np.sqrt(rest) / math.pi).astype(int) - 1
    return int(np.clip(n_top - first + 1, 0, None).sum())


def core_count(core: FlatRectangle | ExplicitWeyl, lam: float, bc: BoundaryCondition) -> int:
    if lam < 0:
        raise DomainError(f"core count needs lambda >= 0, got {lam!r}")
    if isinstance(core, FlatRectangle):
        return _flat_rectangle_count(core, lam, bc)
    sign = -1.0 if bc == "dirichlet" else 1.0
    value = core.area / (4.0 * math.pi) * lam + sign * core.remainder_coeff * math.sqrt(lam)
    return max(0, math.floor(value))


class Bracket(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    lower: int
    upper: int
    core_D: int
    core_N: int
    cusps_D: list[int]
    cusps_N: list[int]
    near_degenerate: bool = False


def _require_discrete(s: Surface) -> None:
    verdict = discreteness_verdict(s)
    if not isinstance(verdict, Discrete):
        raise SpectrumNotDiscreteError(verdict.j_a, verdict.bottom)


def surface_bracket(s: Surface, lam: float, *, threads: int | None = None) -> Bracket:
    _require_discrete(s)
    if lam < 0:
        raise DomainError(f"surface bracket needs lambda >= 0, got {lam!r}")
    dirichlet = [cusp_count(c, lam, "dirichlet", threads=threads) for c in s.cusps]
    neumann = [cusp_count(c, lam, "neumann", threads=threads) for c in s.cusps]
    core_d = core_count(s.core, lam, "dirichlet")
    core_n = core_count(s.core, lam, "neumann")
    cusps_d = [r.count for r in dirichlet]
    cusps_n = [r.count for r in neumann]
    return Bracket(
        lam=lam,
        lower=core_d + sum(cusps_d),
        upper=core_n + sum(cusps_n),
        core_D=core_d,
        core_N=core_n,
        cusps_D=cusps_d,
        cusps_N=cusps_n,
        near_degenerate=any(r.near_degenerate for r in dirichlet + neumann),
    )


def make_grid(lambda_max: float, n: int) -> list[float]:
    """λ_k = k·λ_max/n for k = 1..n."""
    if n < 1 or lambda_max <= 0:
        raise DomainError(f"grid needs n >= 1 and lambda_max > 0, got n={n}, lambda_max={lambda_max!r}")
    return [lambda_max * k / n for k in range(1, n + 1)]


class BracketFit(BaseModel):
    """Remainder of one bracket against λ|M|/4π, scaled by √λ ln λ."""

    model_config = ConfigDict(frozen=True)

    residuals: list[float]
    # None where √λ ln λ ≤ 0 (λ ≤ 1); those points stay out of the fit
    normalized: list[float | None]
    # least-squares C in |residual| ≈ C√λ ln λ on the training half, clamped at 0
    fitted_constant: float
    # max |normalized| on the training half
    envelope_constant: float
    # least-squares slope of |normalized| against ln λ on the validation half
    trend_slope: float
    max_validation_ratio: float
    validated: bool


def _fit_bracket(grid: np.ndarray, counts: np.ndarray, principal: np.ndarray, headroom: float) -> BracketFit:
    residuals = counts - principal
    usable = grid > 1.0
    if np.count_nonzero(usable) < 2:
        raise DomainError("Weyl fit needs at least two grid points above lambda = 1")
    scale = np.sqrt(grid[usable]) * np.log(grid[usable])
    abs_r = np.abs(residuals[usable])
    ratios = abs_r / scale
    half = scale.size // 2
    train, valid = slice(0, half), slice(half, None)
    fitted = max(0.0, float(np.dot(abs_r[train], scale[train]) / np.dot(scale[train], scale[train])))
    envelope = float(ratios[train].max())
    if ratios[valid].size >= 2:
        slope = float(np.polyfit(np.log(grid[usable][valid]), ratios[valid], 1)[0])
    else:
        slope = 0.0
    normalized: list[float | None] = [None] * grid.size
    for i, value in zip(np.flatnonzero(usable), residuals[usable] / scale):
        normalized[i] = float(value)
    return BracketFit(
        residuals=residuals.tolist(),
        normalized=normalized,
        fitted_constant=fitted,
        envelope_constant=envelope,
        trend_slope=slope,
        max_validation_ratio=float(ratios[valid].max()),
        validated=bool(np.all(ratios[valid] <= headroom * fitted)),
    )


class WeylReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    lambda_grid: list[float]
    counts_D: list[int]
    counts_N: list[int]
    principal: list[float]
    total_area: float
    # |M|/4π
    principal_slope: float
    headroom: float
    perturbed: list[bool]
    fit_D: BracketFit
    fit_N: BracketFit

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for i, lam in enumerate(self.lambda_grid):
            writer.writerow(
                [
                    _fmt(lam),
                    self.counts_D[i],
                    self.counts_N[i],
                    _fmt(self.principal[i]),
                    _fmt(self.fit_D.residuals[i]),
                    _fmt(self.fit_N.residuals[i]),
                    _fmt_optional(self.fit_D.normalized[i]),
                    _fmt_optional(self.fit_N.normalized[i]),
                ]
            )
        return buffer.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_optional(x: float | None) -> str:
    return "nan" if x is None else _fmt(x)


def _bracket_off_degenerate(s: Surface, lam: float, threads: int | None) -> tuple[Bracket, bool]:
    bracket = surface_bracket(s, lam, threads=threads)
    perturbed = False
    for _ in range(5):
        if not bracket.near_degenerate:
            break
        shifted = bracket.lam + properties.WEYL_PERTURBATION
        logger.warning(f"Grid point {bracket.lam!r} is near an eigenvalue; moving to {shifted!r}")
        bracket = surface_bracket(s, shifted, threads=threads)
        perturbed = True
    return bracket, perturbed


def weyl_report(s: Surface, grid: list[float], *, headroom: float | None = None, threads: int | None = None) -> WeylReport:
    _require_discrete(s)
    headroom = properties.WEYL_HEADROOM if headroom is None else headroom
    if len(grid) < 4:
        raise DomainError("Weyl report needs at least four grid points (two per half)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("lambda grid must be strictly increasing")
    if grid[0] <= 0.25:
        raise DomainError(f"lambda grid must start above 1/4, got {grid[0]!r}")

    logger.info(f"Evaluating brackets on {len(grid)} grid points up to lambda={grid[-1]!r}")
    # grid points run in parallel; each one keeps its own cusp sums sequential
    outcomes = ordered_map(lambda lam: _bracket_off_degenerate(s, lam, 1), grid, threads)
    brackets = [b for b, _ in outcomes]

    lam = np.array([b.lam for b in brackets])
    counts_d = np.array([b.lower for b in brackets], dtype=float)
    counts_n = np.array([b.upper for b in brackets], dtype=float)
    slope = s.total_area / (4.0 * math.pi)
    principal = slope * lam
    report = WeylReport(
        lambda_grid=lam.tolist(),
        counts_D=[b.lower for b in brackets],
        counts_N=[b.upper for b in brackets],
        principal=principal.tolist(),
        total_area=s.total_area,
        principal_slope=slope,
        headroom=headroom,
        perturbed=[p for _, p in outcomes],
        fit_D=_fit_bracket(lam, counts_d, principal, headroom),
        fit_N=_fit_bracket(lam, counts_n, principal, headroom),
    )
    fit_d, fit_n = report.fit_D, report.fit_N
    logger.info(
        f"Weyl fit: C_D={fit_d.fitted_constant:.4f} (envelope {fit_d.envelope_constant:.4f}), "
        f"C_N={fit_n.fitted_constant:.4f} (envelope {fit_n.envelope_constant:.4f}), "
        f"validated D={fit_d.validated} N={fit_n.validated}"
    )
    return report
