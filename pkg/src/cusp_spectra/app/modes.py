"""
Fourier-mode operators of the gauge-reduced cusp Laplacian.

On a cusp the operator L^{-2}e^{2t}(D_θ − A_1)² + D_t² + 1/4 with A_1 = −ξ ± bLe^{−t}
splits over θ-modes ℓ into the half-line operators

    P_ℓ = D_t² + 1/4 + (e^t (ℓ+ξ)/L ± b)²      Q_ℓ = D_t² + 1/4 + (ℓ+ξ)² e^{2t} / L²

on (α², ∞) with a Dirichlet or Neumann condition at t = α².
"""
import math
from collections.abc import Callable, Iterator
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import bisect

from .config.config import properties
from .errors import DomainError
from .geometry import Cusp

ModeKind = Literal["P", "Q"]
BoundaryCondition = Literal["dirichlet", "neumann"]


class ModeOperator(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ModeKind
    ell: int
    xi: float = Field(ge=0.0, lt=1.0)
    L: float = Field(gt=0)
    alpha2: float = 0.0
    b: float = 0.0
    sign: Literal[1, -1] = 1
    bc: BoundaryCondition = "dirichlet"

    @classmethod
    def from_cusp(
        cls, c: Cusp, ell: int, kind: ModeKind = "P", bc: BoundaryCondition = "dirichlet"
    ) -> "ModeOperator":
        return cls(kind=kind, ell=ell, xi=c.xi, L=c.L, alpha2=c.alpha2, b=c.b, sign=c.sign, bc=bc)

    @property
    def k(self) -> float:
        """Slope (ℓ+ξ)/L of the exponential term."""
        return (self.ell + self.xi) / self.L

    @property
    def shift(self) -> float:
        """Signed constant ±b inside the square; zero for Q."""
        return self.sign * self.b if self.kind == "P" else 0.0

    def label(self) -> str:
        return f"{self.kind}[ell={self.ell}, xi={self.xi:.6g}, bc={self.bc}]"

    def with_bc(self, bc: BoundaryCondition) -> "ModeOperator":
        return self.model_copy(update={"bc": bc})


def potential(m: ModeOperator, t):
    """V(t); accepts a float or a numpy array."""
    if m.kind == "P":
        return 0.25 + (np.exp(t) * m.k + m.shift) ** 2
    return 0.25 + m.k ** 2 * np.exp(2.0 * t)


def scalar_potential(m: ModeOperator) -> Callable[[float], float]:
    """Fast float-only V for the integrator's right-hand side."""
    k, s = m.k, m.shift
    if m.kind == "P":
        return lambda t: 0.25 + (math.exp(t) * k + s) ** 2
    k2 = k * k
    return lambda t: 0.25 + k2 * math.exp(2.0 * t)


def potential_argmin(m: ModeOperator) -> float:
    """Point of [α², ∞) where V is smallest; V is nondecreasing to the right of it."""
    k, s = m.k, m.shift
    if k * s < 0:
        return max(m.alpha2, math.log(-s / k))
    return m.alpha2


def potential_minimum(m: ModeOperator) -> float:
    return float(potential(m, potential_argmin(m)))


class ModeWindow(BaseModel):
    """Integer interval [lo, hi]; empty when lo > hi."""

    model_config = ConfigDict(frozen=True)

    lo: int
    hi: int

    def __iter__(self) -> Iterator[int]:  # type: ignore[override]
        return iter(range(self.lo, self.hi + 1))

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def __contains__(self, ell: int) -> bool:
        return self.lo <= ell <= self.hi

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def enlarged(self, margin: int) -> "ModeWindow":
        return ModeWindow(lo=self.lo - margin, hi=self.hi + margin)


def window_from_radius(xi: float, radius: float) -> ModeWindow:
    """Integers ℓ with |ℓ+ξ| < radius."""
    if radius <= 0:
        # keep the empty window centred on the lattice so that enlarging it still brackets ℓ = −ξ
        return ModeWindow(lo=0, hi=-1)
    return ModeWindow(lo=math.floor(-radius - xi) + 1, hi=math.ceil(radius - xi) - 1)


def mode_window(c: Cusp, lam: float) -> ModeWindow:
    """X_λ = {ℓ : e^{α²}|ℓ+ξ|/L < √(λ−1/4) − |b|}."""
    if lam <= 0.25:
        raise DomainError(f"mode window needs lambda > 1/4, got {lam!r}")
    slack = math.sqrt(lam - 0.25) - abs(c.b)
    return window_from_radius(c.xi, slack * c.L * math.exp(-c.alpha2))


def support_window(c: Cusp, lam: float) -> ModeWindow:
    """Indices whose P-potential dips below λ somewhere: e^{α²}|ℓ+ξ|/L < √(λ−1/4) + |b|."""
    if lam <= 0.25:
        raise DomainError(f"support window needs lambda > 1/4, got {lam!r}")
    slack = math.sqrt(lam - 0.25) + abs(c.b)
    return window_from_radius(c.xi, slack * c.L * math.exp(-c.alpha2))


def _q_crossing(m: ModeOperator, mu: float) -> float | None:
    if mu <= 0.25 or m.k == 0:
        return None
    return 0.5 * math.log((mu - 0.25) / m.k ** 2)


def outer_turning_point(m: ModeOperator, mu: float, *, xtol: float | None = None) -> float | None:
    """Right end of {t ≥ α² : V(t) < μ}, or None when that set is empty."""
    t_min = potential_argmin(m)
    if potential_minimum(m) >= mu:
        return None
    if m.kind == "Q":
        return _q_crossing(m, mu)
    xtol = properties.TURNING_POINT_XTOL if xtol is None else xtol
    v = scalar_potential(m)
    hi = t_min + properties.TURNING_POINT_BRACKET
    while v(hi) <= mu:
        hi += properties.TURNING_POINT_BRACKET
    return bisect(lambda t: v(t) - mu, t_min, hi, xtol=xtol)


def turning_point(m: ModeOperator, mu: float) -> float | None:
    """The t* ≥ α² with V(t*) = μ, or None when V(α²) ≥ μ."""
    v = scalar_potential(m)
    if v(m.alpha2) >= mu:
        return None
    if m.kind == "Q":
        t_star = _q_crossing(m, mu)
        return None if t_star is None or t_star <= m.alpha2 else t_star
    # V(α²) < μ makes {V < μ} an interval starting at α², so the crossing is unique
    lo, hi = m.alpha2, m.alpha2 + properties.TURNING_POINT_BRACKET
    return bisect(lambda t: v(t) - mu, lo, hi, xtol=properties.TURNING_POINT_XTOL)


def sandwich_margin(m: ModeOperator, t) -> np.ndarray:
    """C√Q(t) − |P(t) − Q(t)| with C = 2|b| + b²; nonnegative wherever the pointwise sandwich holds."""
    p = potential(m.model_copy(update={"kind": "P"}), t)
    q = potential(m.model_copy(update={"kind": "Q"}), t)
    c = 2.0 * abs(m.b) + m.b ** 2
    return c * np.sqrt(q) - np.abs(p - q)
