"""
Eigenvalue counting for mode operators by Prüfer-angle shooting.

With u = r sin θ, u' = r cos θ the equation −u'' + V u = λ u becomes

    θ' = cos²θ + (λ − V(t)) sin²θ,

and θ crosses every multiple of π upwards, once per zero of u. By Sturm oscillation the
number of eigenvalues below λ is the number of zeros of the solution launched from the
boundary condition at α², i.e. floor(θ(T)/π) once T is far enough out.
"""
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import solve_ivp

from .config.config import properties
from .errors import DomainError, NumericError, WindowViolationError
from .geometry import Cusp, is_integer_class
from .logger import logger
from .modes import (
    BoundaryCondition,
    ModeKind,
    ModeOperator,
    outer_turning_point,
    potential_minimum,
    scalar_potential,
    support_window,
)

_T = TypeVar("_T")
_R = TypeVar("_R")


class CountResult(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda")
    count: int = Field(ge=0)
    truncation_T: float
    # distance of the final angle from the nearest multiple of π
    prufer_residual: float
    near_degenerate: bool = False
    modes: int = 1


def _require_discrete(xi: float) -> None:
    if is_integer_class(xi) or not 0.0 < xi < 1.0:
        raise DomainError(f"flux xi={xi!r} is an integer class: the mode spectrum is not discrete")


def _advance(
    rhs: Callable[[float, Sequence[float]], list[float]],
    t0: float,
    t1: float,
    theta: float,
    *,
    lam: float,
    m: ModeOperator,
    rtol: float,
    atol: float,
    method: str,
) -> float:
    if t1 <= t0:
        return theta
    sol = solve_ivp(rhs, (t0, t1), [theta], method=method, rtol=rtol, atol=atol)
    if not sol.success:
        logger.error(f"Prüfer integration failed for {m.label()} at lambda={lam!r}: {sol.message}")
        raise NumericError(sol.message, t_start=t0, t_end=t1, lam=lam, mode=m.label())
    return float(sol.y[0, -1])


def count_below(
    m: ModeOperator,
    lam: float,
    *,
    cushion: float | None = None,
    rtol: float | None = None,
    atol: float | None = None,
    method: str | None = None,
    early_freeze: bool = True,
) -> CountResult:
    """Number of eigenvalues of m strictly below lam.

    With early_freeze=False the angle is carried all the way to the truncation cap.
    """
    _require_discrete(m.xi)
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam!r}")

    if lam <= 0.25 or lam <= potential_minimum(m):
        # the quadratic form is bounded below by inf V for either boundary condition
        return CountResult(lam=lam, count=0, truncation_T=m.alpha2, prufer_residual=math.pi / 2)

    cushion = properties.TRUNCATION_MIN_CUSHION if cushion is None else cushion
    rtol = properties.PRUFER_RTOL if rtol is None else rtol
    atol = properties.PRUFER_ATOL if atol is None else atol
    method = properties.PRUFER_METHOD if method is None else method

    v = scalar_potential(m)
    t_out = outer_turning_point(m, lam)
    assert t_out is not None
    t_cap = t_out + max(cushion, math.log(lam + 2.0))
    while v(t_cap) < lam + properties.TRUNCATION_POTENTIAL_GAP:
        t_cap += 1.0

    def rhs(t: float, y: Sequence[float]) -> list[float]:
        s = math.sin(y[0])
        c = math.cos(y[0])
        return [c * c + (lam - v(t)) * s * s]

    step_kw = dict(lam=lam, m=m, rtol=rtol, atol=atol, method=method)
    theta = 0.0 if m.bc == "dirichlet" else math.pi / 2
    theta = _advance(rhs, m.alpha2, t_out, theta, **step_kw)

    # Past t_out V > λ, so once u·u' > 0 the solution grows monotonically and keeps its zeros.
    t = t_out
    frozen = early_freeze and math.sin(2.0 * theta) > 0
    while not frozen and t < t_cap:
        t_next = min(t + properties.FREEZE_STEP, t_cap)
        theta = _advance(rhs, t, t_next, theta, **step_kw)
        t = t_next
        frozen = (early_freeze or t >= t_cap) and math.sin(2.0 * theta) > 0

    count = max(0, math.floor(theta / math.pi))
    excess = theta - count * math.pi
    residual = min(excess, math.pi - excess)
    near_degenerate = (not frozen) or residual < properties.NEAR_DEGENERATE_RESIDUAL
    if near_degenerate:
        logger.warning(
            f"Near-degenerate count for {m.label()} at lambda={lam!r} (residual={residual:.3e}, frozen={frozen})"
        )
    logger.debug(f"{m.label()}: N({lam!r})={count}, T={t:.4f}")
    return CountResult(
        lam=lam, count=count, truncation_T=t, prufer_residual=residual, near_degenerate=near_degenerate
    )


def _count(m: ModeOperator, mu: float) -> int:
    return count_below(m, mu).count


def _isolate(m: ModeOperator, lo: float, c_lo: int, hi: float, c_hi: int, tol: float) -> list[float]:
    """Jump points of the count inside [lo, hi) given the counts at both ends."""
    if c_hi <= c_lo:
        return []
    if hi - lo <= tol:
        return [0.5 * (lo + hi)] * (c_hi - c_lo)
    mid = 0.5 * (lo + hi)
    c_mid = _count(m, mid)
    return _isolate(m, lo, c_lo, mid, c_mid, tol) + _isolate(m, mid, c_mid, hi, c_hi, tol)


def eigenvalues_below(m: ModeOperator, lam: float, *, tol: float | None = None) -> list[float]:
    """All eigenvalues of m below lam, each bracketed to width tol."""
    tol = properties.EIGENVALUE_TOL if tol is None else tol
    top = count_below(m, lam).count
    if top == 0:
        return []
    return _isolate(m, potential_minimum(m), 0, lam, top, tol)


def kth_eigenvalue(m: ModeOperator, k: int, *, upper: float | None = None, tol: float | None = None) -> float:
    """The k-th eigenvalue (k ≥ 1) as the smallest μ with count_below(m, μ) ≥ k."""
    if k < 1:
        raise DomainError(f"eigenvalue index starts at 1, got {k}")
    tol = properties.EIGENVALUE_TOL if tol is None else tol
    lo = potential_minimum(m)
    hi = max(upper if upper is not None else lo + 1.0, lo + 1.0)
    while _count(m, hi) < k:
        hi = lo + 2.0 * (hi - lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _count(m, mid) >= k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ordered_map(fn: Callable[[_T], _R], items: Iterable[_T], threads: int | None = None) -> list[_R]:
    """map() over a thread pool capped by CUSP_SPECTRA_THREADS; results keep input order."""
    threads = properties.CUSP_SPECTRA_THREADS if threads is None else threads
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def mode_counts(
    c: Cusp,
    lam: float,
    bc: BoundaryCondition,
    *,
    kind: ModeKind = "P",
    margin: int | None = None,
    threads: int | None = None,
) -> dict[int, CountResult]:
    """Per-mode counts over the support window plus margin, in increasing ℓ."""
    _require_discrete(c.xi)
    margin = properties.WINDOW_MARGIN if margin is None else margin
    window = support_window(c, lam)
    ells = list(window.enlarged(margin))
    results = ordered_map(lambda ell: count_below(ModeOperator.from_cusp(c, ell, kind, bc), lam), ells, threads)
    counts = dict(zip(ells, results))
    for ell, r in counts.items():
        if ell not in window and r.count:
            raise WindowViolationError(
                f"mode ell={ell} outside the support window [{window.lo}, {window.hi}] "
                f"has {r.count} eigenvalue(s) below lambda={lam!r}"
            )
    return counts


def cusp_count(
    c: Cusp,
    lam: float,
    bc: BoundaryCondition,
    *,
    kind: ModeKind = "P",
    margin: int | None = None,
    threads: int | None = None,
) -> CountResult:
    """N(λ) of the cusp operator with the given condition at t = α²: Σ_ℓ N(λ, P_ℓ)."""
    _require_discrete(c.xi)
    if lam <= 0.25:
        return CountResult(lam=lam, count=0, truncation_T=c.alpha2, prufer_residual=math.pi / 2, modes=0)
    counts = mode_counts(c, lam, bc, kind=kind, margin=margin, threads=threads)
    results = list(counts.values())
    # fixed ℓ order keeps the sum bit-stable whatever the thread count
    total = 0
    for r in results:
        total += r.count
    return CountResult(
        lam=lam,
        count=total,
        truncation_T=max(r.truncation_T for r in results),
        prufer_residual=min(r.prufer_residual for r in results),
        near_degenerate=any(r.near_degenerate for r in results),
        modes=len(results),
    )


def comparison_constant(b: float) -> float:
    """C(b) = 2|b| + b² + 1 used for the P/Q comparison sandwich."""
    return 2.0 * abs(b) + b * b + 1.0


class ComparisonCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    ell: int
    lam: float
    constant: float
    q_lower: int
    p_count: int
    q_upper: int
    holds: bool


def comparison_check(c: Cusp, ell: int, lam: float, *, constant: float | None = None) -> ComparisonCheck:
    """N(λ − √λC, Q_ℓ) ≤ N(λ, P_ℓ) ≤ N(λ + √λC, Q_ℓ) for one mode (Dirichlet)."""
    constant = comparison_constant(c.b) if constant is None else constant
    p = ModeOperator.from_cusp(c, ell, "P")
    q = ModeOperator.from_cusp(c, ell, "Q")
    shift = math.sqrt(lam) * constant
    q_lower = count_below(q, lam - shift).count
    p_count = count_below(p, lam).count
    q_upper = count_below(q, lam + shift).count
    return ComparisonCheck(
        ell=ell,
        lam=lam,
        constant=constant,
        q_lower=q_lower,
        p_count=p_count,
        q_upper=q_upper,
        holds=q_lower <= p_count <= q_upper,
    )


def minimal_comparison_constant(c: Cusp, ell: int, lam: float, *, tol: float = 1e-3) -> float:
    """Smallest C making the comparison sandwich hold for mode ℓ at λ (to tolerance tol in energy)."""
    p = ModeOperator.from_cusp(c, ell, "P")
    q = ModeOperator.from_cusp(c, ell, "Q")
    n = count_below(p, lam).count
    root = math.sqrt(lam)
    # lower side needs λ − √λC ≤ q_{n+1}, upper side needs q_n < λ + √λC
    q_next = kth_eigenvalue(q, n + 1, upper=lam, tol=tol)
    need = max(0.0, (lam - q_next) / root)
    if n >= 1:
        q_n = kth_eigenvalue(q, n, upper=lam, tol=tol)
        need = max(need, (q_n - lam) / root)
    return need
