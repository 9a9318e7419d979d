"""
Brute-force references for the test suite and the `verify` command.

Mode spectra come from a symmetric tridiagonal central-difference matrix solved at two
resolutions and Richardson-extrapolated; phase integrals come from QUADPACK. Production
counting never imports this module.
"""
import math
from collections.abc import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .config.config import properties
from .errors import OracleError
from .geometry import Cusp
from .logger import logger
from .modes import BoundaryCondition, ModeOperator, outer_turning_point, potential, potential_argmin
from .phase import phase_cutoff


class OracleConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid_points: int = Field(default_factory=lambda: properties.ORACLE_GRID_POINTS, ge=1000)
    # right end of the interval; None puts it ORACLE_MARGIN past the outer turning point at λ
    T_oracle: float | None = None
    margin: float = Field(default_factory=lambda: properties.ORACLE_MARGIN)
    # largest change between the two resolutions accepted as converged
    drift_tol: float = 1e-3


def _fd_matrix(
    potential_fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, bc: BoundaryCondition, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of −d²/dt² + V on (a, b), u(b) = 0, bc at a."""
    h = (b - a) / n
    inv_h2 = 1.0 / (h * h)
    if bc == "dirichlet":
        # nodes a + ih, i = 1..n−1
        x = a + h * np.arange(1, n)
        diag = 2.0 * inv_h2 + potential_fn(x)
    else:
        # cell centres a + (i+½)h; ghost u_{−1} = u_0 on the left, u_n = −u_{n−1} on the right
        x = a + h * (np.arange(n) + 0.5)
        diag = 2.0 * inv_h2 + potential_fn(x)
        diag[0] -= inv_h2
        diag[-1] += inv_h2
    off = np.full(diag.size - 1, -inv_h2)
    return diag, off


def _eigs_below(diag: np.ndarray, off: np.ndarray, upper: float) -> np.ndarray:
    try:
        return eigh_tridiagonal(diag, off, eigvals_only=True, select="v", select_range=(-np.inf, upper))
    except (LinAlgError, ValueError) as e:
        raise OracleError(f"tridiagonal eigen-solve failed: {e}") from e


def discrete_eigenvalues(
    potential_fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    bc: BoundaryCondition,
    upper: float,
    n: int,
) -> np.ndarray:
    """Eigenvalues below upper of the n-cell central-difference matrix, without extrapolation."""
    h = (b - a) / n
    # the kinetic part of the matrix tops out at 4/h²; only its lower half is resolved
    if upper >= 2.0 / (h * h):
        raise OracleError(
            f"{n} cells on [{a:.4f}, {b:.4f}] resolve eigenvalues below {2.0 / (h * h):.4e} only, "
            f"asked for {upper!r}"
        )
    return _eigs_below(*_fd_matrix(potential_fn, a, b, bc, n), upper)


def fd_eigenvalues(
    potential_fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    bc: BoundaryCondition,
    lam: float,
    n: int,
    *,
    drift_tol: float = 1e-3,
) -> list[float]:
    """Eigenvalues below lam, extrapolated from n and 2n cells: (4e_{2n} − e_n)/3."""
    # look a little above λ so eigenvalues drifting across λ between resolutions stay paired
    pad = 1.0 + 0.01 * abs(lam)
    coarse = discrete_eigenvalues(potential_fn, a, b, bc, lam + pad, n)
    fine = discrete_eigenvalues(potential_fn, a, b, bc, lam + pad, 2 * n)
    k = min(coarse.size, fine.size)
    coarse, fine = coarse[:k], fine[:k]
    drift = np.abs(fine - coarse)
    if k and float(drift.max()) > drift_tol * max(1.0, abs(lam)):
        raise OracleError(
            f"finite differences did not converge below lambda={lam!r}: "
            f"max drift {float(drift.max()):.3e} between {n} and {2 * n} cells"
        )
    extrapolated = (4.0 * fine - coarse) / 3.0
    return [float(e) for e in extrapolated if e < lam]


def oracle_interval(m: ModeOperator, lam: float, cfg: OracleConfig) -> tuple[float, float]:
    if cfg.T_oracle is not None:
        return m.alpha2, cfg.T_oracle
    t_out = outer_turning_point(m, lam)
    right = (t_out if t_out is not None else potential_argmin(m)) + cfg.margin
    return m.alpha2, right


def oracle_eigenvalues(m: ModeOperator, lam: float, cfg: OracleConfig | None = None) -> list[float]:
    cfg = cfg or OracleConfig()
    a, b = oracle_interval(m, lam, cfg)
    logger.debug(f"Oracle for {m.label()} on [{a:.4f}, {b:.4f}] with {cfg.grid_points} cells")
    return fd_eigenvalues(
        lambda x: potential(m, x), a, b, m.bc, lam, cfg.grid_points, drift_tol=cfg.drift_tol
    )


def oracle_count(m: ModeOperator, lam: float, cfg: OracleConfig | None = None) -> int:
    return len(oracle_eigenvalues(m, lam, cfg))


def quad_phase_integral(c: Cusp, ell: int, mu: float) -> float:
    """w_ℓ(μ) by QUADPACK with the (t* − t)^{1/2} endpoint factor taken as the weight."""
    k2 = ((ell + c.xi) / c.L) ** 2
    t_star = 0.5 * math.log(mu / k2)
    if t_star <= c.alpha2:
        return 0.0

    def smooth(t: float) -> float:
        # μ − k²e^{2t} = −μ·expm1(2(t − t*))
        gap = t_star - t
        if gap <= 0.0:
            return math.sqrt(2.0 * mu)
        return math.sqrt(-mu * math.expm1(-2.0 * gap) / gap)

    value, _ = quad(smooth, c.alpha2, t_star, weight="alg", wvar=(0.0, 0.5), epsabs=1e-12, epsrel=1e-12, limit=200)
    return value


def quad_lattice_integral(c: Cusp, mu: float, t: float) -> float:
    """∫_R [μ − (x+ξ)²e^{2t}/L²]_+^{1/2} dx with the square-root endpoint weights."""
    a = math.exp(t) / c.L
    radius = math.sqrt(mu) / a
    lo, hi = -c.xi - radius, -c.xi + radius
    # integrand = a·√((hi − x)(x − lo))
    value, _ = quad(lambda x: a, lo, hi, weight="alg", wvar=(0.5, 0.5), epsabs=1e-12, epsrel=1e-12)
    return value


def quad_double_phase_integral(c: Cusp, mu: float) -> float:
    top = phase_cutoff(c, mu)
    value, _ = quad(lambda t: quad_lattice_integral(c, mu, t), c.alpha2, top, epsabs=1e-10, epsrel=1e-12, limit=200)
    return value
