"""
Phase integrals w_ℓ(μ) = ∫_{α²}^{∞} [μ − (ℓ+ξ)²e^{2t}/L²]_+^{1/2} dt, the cutoff T_{μ,L}
and the checks tying them to the Q_ℓ counts and to the cusp area.
"""
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from .counting import count_below
from .errors import DomainError
from .geometry import Cusp, cusp_area, flux_distance, is_integer_class
from .modes import ModeOperator, ModeWindow, window_from_radius

# C in the upper Titchmarsh bound; the bound only claims some constant exists
TITCHMARSH_CONSTANT = 10.0


class PhaseValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    mu: float
    ell: int
    w: float
    # √(1 − (c_ℓ/μ)e^{2α²}) clamped at 0
    r: float


def _require_flux(c: Cusp) -> float:
    xi = c.xi
    if is_integer_class(xi):
        raise DomainError(f"flux xi={xi!r} is an integer class; phase integrals need xi in (0, 1)")
    return xi


def w_values(c: Cusp, ells: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed form √μ(artanh r − r) for an array of indices; returns (w, r)."""
    xi = _require_flux(c)
    ells = np.asarray(ells, dtype=float)
    # s = 1 − r² computed directly, so artanh(r) = ln((1+r)/√s) never subtracts nearby numbers
    s = ((ells + xi) / c.L) ** 2 * math.exp(2.0 * c.alpha2) / mu
    inside = s < 1.0
    s_in = np.where(inside, s, 1.0)
    r = np.where(inside, np.sqrt(1.0 - s_in), 0.0)
    artanh = np.log((1.0 + r) / np.sqrt(s_in))
    w = np.where(inside, math.sqrt(mu) * (artanh - r), 0.0)
    return w, r


def w_closed(c: Cusp, ell: int, mu: float) -> PhaseValue:
    if mu <= 0:
        raise DomainError(f"phase integral needs mu > 0, got {mu!r}")
    w, r = w_values(c, np.array([ell]), mu)
    return PhaseValue(mu=mu, ell=ell, w=float(w[0]), r=float(r[0]))


def phase_cutoff(c: Cusp, mu: float) -> float:
    """T_{μ,L} = ln(L√μ / inf_k|ξ − k|)."""
    xi = _require_flux(c)
    if mu <= 0:
        raise DomainError(f"phase cutoff needs mu > 0, got {mu!r}")
    return math.log(c.L * math.sqrt(mu) / flux_distance(xi))


def phase_support(c: Cusp, mu: float, t: float | None = None) -> ModeWindow:
    """Indices with (ℓ+ξ)²e^{2t}/L² < μ, at t = α² by default."""
    t = c.alpha2 if t is None else t
    return window_from_radius(c.xi, c.L * math.sqrt(mu) * math.exp(-t))


def phase_sum(c: Cusp, mu: float) -> float:
    """(1/π) Σ_ℓ w_ℓ(μ)."""
    if mu <= 0:
        raise DomainError(f"phase sum needs mu > 0, got {mu!r}")
    window = phase_support(c, mu)
    if window.empty:
        return 0.0
    w, _ = w_values(c, np.arange(window.lo, window.hi + 1), mu)
    return float(math.fsum(w)) / math.pi


class TitchmarshCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ell: int
    mu: float
    w: float
    count: int
    # π·N + π − w
    slack_low: float
    # w + ln(μ)/12 + C − π·N
    slack_high: float
    # smallest C for which the upper bound would still hold
    minimal_constant: float
    holds: bool


def titchmarsh_check(c: Cusp, ell: int, mu: float, *, constant: float = TITCHMARSH_CONSTANT) -> TitchmarshCheck:
    """w − π ≤ π N(μ − 1/4, Q_ℓ) ≤ w + ln(μ)/12 + C.

    N(μ − 1/4, Q_ℓ) counts the eigenvalues of the operator −d²/dt² + (ℓ+ξ)²e^{2t}/L² below
    μ − 1/4, which are the eigenvalues of Q_ℓ (with its 1/4) below μ.
    """
    value = w_closed(c, ell, mu)
    n = count_below(ModeOperator.from_cusp(c, ell, "Q", "dirichlet"), mu).count
    log_term = math.log(mu) / 12.0
    slack_low = math.pi * n + math.pi - value.w
    slack_high = value.w + log_term + constant - math.pi * n
    return TitchmarshCheck(
        ell=ell,
        mu=mu,
        w=value.w,
        count=n,
        slack_low=slack_low,
        slack_high=slack_high,
        minimal_constant=math.pi * n - value.w - log_term,
        holds=slack_low >= 0 and slack_high >= 0,
    )


def lattice_integral(c: Cusp, mu: float, t: float) -> float:
    """∫_R [μ − (x+ξ)²e^{2t}/L²]_+^{1/2} dx = (π/2) μ L e^{−t}."""
    return 0.5 * math.pi * mu * c.L * math.exp(-t)


def lattice_sum(c: Cusp, mu: float, t: float) -> float:
    window = phase_support(c, mu, t)
    if window.empty:
        return 0.0
    ells = np.arange(window.lo, window.hi + 1, dtype=float)
    values = mu - ((ells + c.xi) / c.L) ** 2 * math.exp(2.0 * t)
    return float(math.fsum(np.sqrt(np.clip(values, 0.0, None))))


def riemann_gap(c: Cusp, mu: float, t: float) -> float:
    """|∫_R f_t − Σ_ℓ f_t(ℓ)| for the semicircle profile f_t at height t."""
    top = phase_cutoff(c, mu)
    if not c.alpha2 <= t <= top:
        raise DomainError(f"t={t!r} outside [alpha2, T_mu] = [{c.alpha2!r}, {top!r}]")
    return abs(lattice_integral(c, mu, t) - lattice_sum(c, mu, t))


def double_phase_integral(c: Cusp, mu: float) -> float:
    """∫_{α²}^{T_{μ,L}} ∫_R [...]^{1/2} dx dt = (π/2) μ L (e^{−α²} − e^{−T})."""
    top = phase_cutoff(c, mu)
    return 0.5 * math.pi * mu * c.L * (math.exp(-c.alpha2) - math.exp(-top))


def lattice_defect(c: Cusp, mu: float) -> float:
    """|double_phase_integral − Σ_ℓ w_ℓ(μ)|."""
    return abs(double_phase_integral(c, mu) - math.pi * phase_sum(c, mu))


class PhaseProfile(BaseModel):
    """Normalized remainders |phase_sum(μ) − μ|M|/4π| / (√μ ln μ) over a μ grid."""

    model_config = ConfigDict(frozen=True)

    mus: list[float]
    normalized: list[float]
    bound: float
    # least-squares slope of the normalized remainder against ln μ
    trend_slope: float
    # change of the normalized remainder across the last interval of the grid
    top_step: float


def phase_profile(c: Cusp, mus: list[float]) -> PhaseProfile:
    if len(mus) < 2 or any(mu <= 1.0 for mu in mus):
        raise DomainError("phase profile needs at least two energies, all above 1")
    slope_area = cusp_area(c) / (4.0 * math.pi)
    normalized = [abs(phase_sum(c, mu) - slope_area * mu) / (math.sqrt(mu) * math.log(mu)) for mu in mus]
    slope = float(np.polyfit(np.log(mus), normalized, 1)[0])
    return PhaseProfile(
        mus=list(mus),
        normalized=normalized,
        bound=max(normalized),
        trend_slope=slope,
        top_step=normalized[-1] - normalized[-2],
    )
