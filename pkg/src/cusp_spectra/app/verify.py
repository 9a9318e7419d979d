"""
Invariant battery behind `cusp-spectra verify`.

Every check returns a CheckOutcome with machine-readable details. The report carries no
timings; a fixed config and seed reproduce it byte for byte.
"""
import math
import time
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config.config import properties
from .counting import comparison_check, count_below, cusp_count, eigenvalues_below, minimal_comparison_constant
from .errors import ConfigError
from .geometry import Cusp, Discrete, Essential, Surface, discreteness_verdict
from .logger import logger
from .modes import ModeOperator, mode_window, potential_minimum
from .oracle import OracleConfig, oracle_count, oracle_eigenvalues, quad_double_phase_integral, quad_phase_integral
from .phase import (
    double_phase_integral,
    lattice_defect,
    phase_cutoff,
    phase_profile,
    riemann_gap,
    titchmarsh_check,
    w_closed,
)


class CuspParams(BaseModel):
    """Cusp given by its flux rather than its holonomy."""

    L: float = 1.0
    alpha2: float = 0.0
    b: float = 0.0
    xi: float

    def cusp(self) -> Cusp:
        return Cusp(L=self.L, alpha2=self.alpha2, b=self.b, holonomy=2.0 * math.pi * self.xi)


class OracleSection(BaseModel):
    xis: list[float] = [0.05, 0.3, 0.5]
    ells: list[int] = [-3, -2, -1, 0, 1, 2, 3]
    bs: list[float] = [0.0, 1.0, 5.0]
    # λ is placed this far above the potential minimum, plus a seeded jitter in [0, 1)
    energy_above_minimum: float = 25.0
    eigenvalue_tolerance: float = 1e-6
    # battery λ values closer than this to an oracle eigenvalue are moved
    eigenvalue_clearance: float = 1e-4
    grid_points: int = 20000


class GaugeSection(BaseModel):
    cusps: list[CuspParams] = [CuspParams(xi=0.3, b=1.0), CuspParams(xi=0.5, L=2.0, alpha2=0.5)]
    lambdas: list[float] = [50.3, 120.7]


class ClosedFormSection(BaseModel):
    pairs: int = 200
    cusp: CuspParams = CuspParams(xi=0.3)
    ell_range: tuple[int, int] = (-20, 20)
    log10_mu_range: tuple[float, float] = (0.0, 4.0)
    relative_tolerance: float = 1e-8


class TitchmarshSection(BaseModel):
    cusps: list[CuspParams] = [CuspParams(xi=0.05), CuspParams(xi=0.5), CuspParams(xi=0.3, L=2.0, alpha2=0.5)]
    mus: list[float] = [1e2, 1e3, 1e4]
    constant: float = 10.0


class RiemannSection(BaseModel):
    cusps: list[CuspParams] = [CuspParams(xi=0.5), CuspParams(xi=0.05)]
    mus: list[float] = [1e2, 1e3, 1e4]
    heights: int = 9
    gap_constant: float = 1.5
    defect_constant: float = 2.0
    cutoff_constant: float = 1.0
    quadrature_tolerance: float = 1e-10


class AsymptoticsSection(BaseModel):
    cusp: CuspParams = CuspParams(xi=0.5)
    mus: list[float] = [1e2, 1e3, 1e4, 1e5, 1e6]
    bound: float = 1.0
    trend_tolerance: float = 0.05


class ComparisonSection(BaseModel):
    bs: list[float] = [1.0, 5.0]
    xi: float = 0.5
    lambdas: list[float] = [1e3, 1e4]
    # modes for which the smallest working constant is computed
    minimal_sample: list[int] = [-2, 0, 1]


class VerificationConfig(BaseModel):
    oracle: OracleSection = OracleSection()
    gauge: GaugeSection = GaugeSection()
    closed_form: ClosedFormSection = ClosedFormSection()
    titchmarsh: TitchmarshSection = TitchmarshSection()
    riemann: RiemannSection = RiemannSection()
    asymptotics: AsymptoticsSection = AsymptoticsSection()
    comparison: ComparisonSection = ComparisonSection()

    @classmethod
    def from_yaml(cls, path: str | Path) -> "VerificationConfig":
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read verification config '{path}': {e}") from e
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(f"malformed verification config '{path}': {e}") from e


def load_verification_config(path: str | Path | None = None) -> VerificationConfig:
    path = Path(path or properties.VERIFY_CONFIG_PATH)
    if not path.exists():
        logger.warning(f"Verification config {path} not found; using built-in defaults")
        return VerificationConfig()
    return VerificationConfig.from_yaml(path)


class CheckOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    details: dict[str, Any] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    passed: bool
    checks: list[CheckOutcome]


def check_discreteness() -> CheckOutcome:
    cases = [
        (Surface(cusps=[Cusp(L=1.0, holonomy=math.pi, b=5.0)]), Discrete()),
        (
            Surface(cusps=[Cusp(L=1.0, holonomy=2 * math.pi, b=3.0), Cusp(L=1.0, holonomy=math.pi, b=0.0)]),
            Essential(bottom=0.25 + 9.0, j_a=(1,)),
        ),
        (Surface(cusps=[Cusp(L=1.0, holonomy=0.0, b=0.0)]), Essential(bottom=0.25, j_a=(1,))),
    ]
    got = [discreteness_verdict(s) for s, _ in cases]
    return CheckOutcome(
        name="discreteness_verdict",
        passed=all(g == want for g, (_, want) in zip(got, cases)),
        details={"verdicts": [g.model_dump() for g in got]},
    )


def _battery_lambda(m: ModeOperator, cfg: OracleSection, rng: np.random.Generator, oracle_cfg: OracleConfig) -> float:
    lam = potential_minimum(m) + cfg.energy_above_minimum + float(rng.uniform(0.0, 1.0))
    for _ in range(10):
        eigs = oracle_eigenvalues(m.with_bc("dirichlet"), lam + 1.0, oracle_cfg)
        eigs += oracle_eigenvalues(m.with_bc("neumann"), lam + 1.0, oracle_cfg)
        if all(abs(e - lam) > cfg.eigenvalue_clearance for e in eigs):
            return lam
        lam += 0.137
    return lam


def battery(cfg: OracleSection) -> list[ModeOperator]:
    """One P-mode per (ξ, ℓ); b cycles through cfg.bs so every value is covered."""
    modes = []
    for i, xi in enumerate(cfg.xis):
        for j, ell in enumerate(cfg.ells):
            b = cfg.bs[(i + j) % len(cfg.bs)]
            modes.append(ModeOperator(kind="P", ell=ell, xi=xi, L=1.0, alpha2=0.0, b=b))
    return modes


def check_oracle_and_interlacing(cfg: OracleSection, rng: np.random.Generator) -> list[CheckOutcome]:
    oracle_cfg = OracleConfig(grid_points=cfg.grid_points)
    agreement, interlacing = [], []
    agree_ok = interlace_ok = True
    for m in battery(cfg):
        lam = _battery_lambda(m, cfg, rng, oracle_cfg)
        dirichlet, neumann = m.with_bc("dirichlet"), m.with_bc("neumann")
        n_d = count_below(dirichlet, lam).count
        n_n = count_below(neumann, lam).count
        ref = oracle_eigenvalues(dirichlet, lam, oracle_cfg)
        ref_n = oracle_count(neumann, lam, oracle_cfg)
        shot = eigenvalues_below(dirichlet, lam)
        err = max((abs(a - b) for a, b in zip(shot, ref)), default=0.0)
        ok = n_d == len(ref) and n_n == ref_n and len(shot) == len(ref) and err <= cfg.eigenvalue_tolerance
        agree_ok &= ok
        agreement.append(
            {"ell": m.ell, "xi": m.xi, "b": m.b, "lambda": lam, "count_D": n_d, "oracle_D": len(ref),
             "count_N": n_n, "oracle_N": ref_n, "max_eigenvalue_error": err, "ok": ok}
        )
        gap = n_n - n_d
        interlace_ok &= 0 <= gap <= 1
        interlacing.append({"ell": m.ell, "xi": m.xi, "b": m.b, "lambda": lam, "N_minus_D": gap})
    return [
        CheckOutcome(name="oracle_agreement", passed=agree_ok, details={"instances": agreement}),
        CheckOutcome(name="dirichlet_neumann_interlacing", passed=interlace_ok, details={"instances": interlacing}),
    ]


def check_gauge(cfg: GaugeSection) -> CheckOutcome:
    rows = []
    ok = True
    for params in cfg.cusps:
        c = params.cusp()
        shifted = c.model_copy(update={"holonomy": c.holonomy + 2.0 * math.pi})
        mirrored = c.with_flux(1.0 - c.xi, sign=-c.sign)
        for lam in cfg.lambdas:
            for bc in ("dirichlet", "neumann"):
                base = cusp_count(c, lam, bc).count
                a = cusp_count(shifted, lam, bc).count
                m = cusp_count(mirrored, lam, bc).count
                ok &= base == a == m
                rows.append({"xi": c.xi, "b": c.b, "lambda": lam, "bc": bc, "count": base, "shifted": a, "mirrored": m})
    return CheckOutcome(name="gauge_invariance", passed=ok, details={"rows": rows})


def check_closed_form(cfg: ClosedFormSection, rng: np.random.Generator) -> CheckOutcome:
    c = cfg.cusp.cusp()
    worst = 0.0
    for _ in range(cfg.pairs):
        ell = int(rng.integers(cfg.ell_range[0], cfg.ell_range[1] + 1))
        mu = float(10.0 ** rng.uniform(*cfg.log10_mu_range))
        w = w_closed(c, ell, mu).w
        ref = quad_phase_integral(c, ell, mu)
        worst = max(worst, abs(w - ref) / max(1.0, w))
    return CheckOutcome(
        name="phase_closed_form",
        passed=worst <= cfg.relative_tolerance,
        details={"pairs": cfg.pairs, "max_relative_error": worst},
    )


def check_titchmarsh(cfg: TitchmarshSection) -> CheckOutcome:
    ok = True
    rows = []
    for params in cfg.cusps:
        c = params.cusp()
        for mu in cfg.mus:
            checks = [titchmarsh_check(c, ell, mu, constant=cfg.constant) for ell in mode_window(c, mu)]
            ok &= all(t.holds for t in checks)
            rows.append(
                {"xi": c.xi, "L": c.L, "alpha2": c.alpha2, "mu": mu, "modes": len(checks),
                 "min_slack_low": min((t.slack_low for t in checks), default=0.0),
                 "min_slack_high": min((t.slack_high for t in checks), default=0.0),
                 "observed_constant": max((t.minimal_constant for t in checks), default=0.0),
                 "holds": all(t.holds for t in checks)}
            )
    return CheckOutcome(name="titchmarsh_sandwich", passed=ok, details={"constant": cfg.constant, "rows": rows})


def check_riemann_chain(cfg: RiemannSection) -> CheckOutcome:
    rows = []
    ok = True
    for params in cfg.cusps:
        c = params.cusp()
        for mu in cfg.mus:
            top = phase_cutoff(c, mu)
            heights = np.linspace(c.alpha2, top, cfg.heights)
            gap_ratio = max(riemann_gap(c, mu, float(t)) / (math.sqrt(mu) + math.exp(t) / c.L) for t in heights)
            defect_ratio = lattice_defect(c, mu) / (math.sqrt(mu) * math.log(mu))
            area_term = 0.5 * math.pi * mu * c.L * math.exp(-c.alpha2)
            cutoff_ratio = abs(double_phase_integral(c, mu) - area_term) / math.sqrt(mu)
            quad_error = abs(quad_double_phase_integral(c, mu) - double_phase_integral(c, mu)) / area_term
            row_ok = (
                gap_ratio <= cfg.gap_constant
                and defect_ratio <= cfg.defect_constant
                and cutoff_ratio <= cfg.cutoff_constant
                and quad_error <= cfg.quadrature_tolerance
            )
            ok &= row_ok
            rows.append(
                {"xi": c.xi, "mu": mu, "riemann_gap_constant": gap_ratio, "lattice_defect_constant": defect_ratio,
                 "cutoff_constant": cutoff_ratio, "quadrature_relative_error": quad_error, "ok": row_ok}
            )
    return CheckOutcome(name="riemann_sum_chain", passed=ok, details={"rows": rows})


def check_asymptotics(cfg: AsymptoticsSection) -> CheckOutcome:
    profile = phase_profile(cfg.cusp.cusp(), cfg.mus)
    ok = profile.bound <= cfg.bound and profile.trend_slope <= cfg.trend_tolerance and profile.top_step <= cfg.trend_tolerance
    return CheckOutcome(name="phase_sum_asymptotics", passed=ok, details=profile.model_dump())


def check_comparison(cfg: ComparisonSection) -> CheckOutcome:
    ok = True
    rows = []
    for b in cfg.bs:
        c = Cusp(L=1.0, alpha2=0.0, b=b, holonomy=2.0 * math.pi * cfg.xi)
        for lam in cfg.lambdas:
            checks = [comparison_check(c, ell, lam) for ell in mode_window(c, lam)]
            minimal = {ell: minimal_comparison_constant(c, ell, lam) for ell in cfg.minimal_sample if ell in mode_window(c, lam)}
            holds = all(ch.holds for ch in checks)
            ok &= holds
            rows.append(
                {"b": b, "lambda": lam, "modes": len(checks), "constant": checks[0].constant if checks else None,
                 "holds": holds, "minimal_constants": {str(k): v for k, v in minimal.items()}}
            )
    return CheckOutcome(name="comparison_sandwich", passed=ok, details={"rows": rows})


def _timed(name: str, fn: Callable[[], Any]) -> Any:
    start = time.perf_counter()
    result = fn()
    logger.info(f"Check {name} finished in {time.perf_counter() - start:.2f}s")
    return result


def run_verification(cfg: VerificationConfig, seed: int) -> VerificationReport:
    rng = np.random.default_rng(seed)
    checks: list[CheckOutcome] = [_timed("discreteness", check_discreteness)]
    checks += _timed("oracle", lambda: check_oracle_and_interlacing(cfg.oracle, rng))
    checks.append(_timed("gauge", lambda: check_gauge(cfg.gauge)))
    checks.append(_timed("closed_form", lambda: check_closed_form(cfg.closed_form, rng)))
    checks.append(_timed("titchmarsh", lambda: check_titchmarsh(cfg.titchmarsh)))
    checks.append(_timed("riemann", lambda: check_riemann_chain(cfg.riemann)))
    checks.append(_timed("asymptotics", lambda: check_asymptotics(cfg.asymptotics)))
    checks.append(_timed("comparison", lambda: check_comparison(cfg.comparison)))
    for ch in checks:
        if not ch.passed:
            logger.error(f"Verification check {ch.name} FAILED")
    return VerificationReport(seed=seed, passed=all(ch.passed for ch in checks), checks=checks)
