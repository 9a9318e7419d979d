import math

import numpy as np
import pytest

from cusp_spectra.app.errors import DomainError
from cusp_spectra.app.geometry import Cusp
from cusp_spectra.app.modes import mode_window
from cusp_spectra.app.phase import (
    double_phase_integral,
    lattice_defect,
    lattice_integral,
    phase_cutoff,
    phase_profile,
    phase_sum,
    riemann_gap,
    titchmarsh_check,
    w_closed,
    w_values,
)


def test_phase_cutoff_examples():
    assert phase_cutoff(Cusp(L=1.0, holonomy=math.pi), 4.0) == pytest.approx(math.log(4.0))
    assert phase_cutoff(Cusp(L=2.0, holonomy=0.5 * math.pi), 1.0) == pytest.approx(math.log(8.0))


def test_phase_cutoff_needs_fractional_flux():
    with pytest.raises(DomainError):
        phase_cutoff(Cusp(L=1.0, holonomy=0.0), 4.0)


def test_w_vanishes_outside_support(half_cusp):
    # (5 + 1/2)² ≥ 1
    assert w_closed(half_cusp, 5, 1.0).w == 0.0
    assert w_closed(half_cusp, 5, 1.0).r == 0.0


def test_w_closed_small_case(half_cusp):
    r = math.sqrt(0.75)
    expected = math.atanh(r) - r
    assert w_closed(half_cusp, 0, 1.0).w == pytest.approx(expected, rel=1e-13)


def test_w_closed_at_four(half_cusp):
    r = math.sqrt(15.0) / 4.0
    value = w_closed(half_cusp, 0, 4.0)
    assert value.r == pytest.approx(r, rel=1e-14)
    assert value.w == pytest.approx(2.0 * (math.atanh(r) - r), rel=1e-12)
    assert value.w == pytest.approx(2.1904, abs=1e-4)
    assert w_closed(half_cusp, 1, 4.0).w < value.w


def test_w_values_vectorized_matches_scalar(half_cusp):
    ells = np.arange(-6, 6)
    w, _ = w_values(half_cusp, ells, 30.0)
    assert np.allclose(w, [w_closed(half_cusp, int(ell), 30.0).w for ell in ells], rtol=1e-15, atol=0.0)


def test_w_near_turning_regime_stays_finite():
    c = Cusp(L=1.0, holonomy=2 * math.pi * 1e-4)
    value = w_closed(c, 0, 1e8)
    assert math.isfinite(value.w) and value.w > 0
    assert value.r == pytest.approx(1.0, abs=1e-12)


def test_phase_sum_empty_support(half_cusp):
    assert phase_sum(half_cusp, 0.2) == 0.0


def test_phase_sum_slope(half_cusp):
    mu = 1e4
    assert abs(phase_sum(half_cusp, mu) / mu - 0.5) <= 0.5 * 5 * math.log(mu) / math.sqrt(mu)


def test_phase_sum_reflection():
    c = Cusp(L=1.3, alpha2=0.2, holonomy=0.6 * math.pi)
    mirrored = c.with_flux(1.0 - c.xi)
    assert phase_sum(c, 500.0) == pytest.approx(phase_sum(mirrored, 500.0), rel=1e-12)


@pytest.mark.parametrize("xi", [0.05, 0.5])
@pytest.mark.parametrize("mu", [1e2, 1e3])
def test_titchmarsh_sandwich(xi, mu):
    c = Cusp(L=1.0, holonomy=2 * math.pi * xi)
    for ell in mode_window(c, mu):
        check = titchmarsh_check(c, ell, mu)
        assert check.holds, check
        assert check.minimal_constant <= 10.0


def test_lattice_integral_closed_form(half_cusp):
    assert lattice_integral(half_cusp, 100.0, 1.0) == pytest.approx(0.5 * math.pi * 100.0 * math.exp(-1.0))


@pytest.mark.parametrize("mu", [1e2, 1e3, 1e4])
def test_riemann_gap_bound(half_cusp, mu):
    top = phase_cutoff(half_cusp, mu)
    for t in np.linspace(0.0, top, 7):
        gap = riemann_gap(half_cusp, mu, float(t))
        assert gap <= 1.5 * (math.sqrt(mu) + math.exp(t))


def test_riemann_gap_reflection():
    c = Cusp(L=1.0, holonomy=0.6 * math.pi)
    mirrored = c.with_flux(1.0 - c.xi)
    assert riemann_gap(c, 300.0, 1.0) == pytest.approx(riemann_gap(mirrored, 300.0, 1.0), abs=1e-9)


def test_riemann_gap_outside_range(half_cusp):
    with pytest.raises(DomainError):
        riemann_gap(half_cusp, 100.0, -0.1)
    with pytest.raises(DomainError):
        riemann_gap(half_cusp, 100.0, phase_cutoff(half_cusp, 100.0) + 0.1)


@pytest.mark.parametrize("xi", [0.05, 0.5])
@pytest.mark.parametrize("mu", [1e2, 1e3, 1e4])
def test_lattice_defect_and_cutoff(xi, mu):
    c = Cusp(L=1.0, holonomy=2 * math.pi * xi)
    assert lattice_defect(c, mu) <= 2.0 * math.sqrt(mu) * math.log(mu)
    area_term = 0.5 * math.pi * mu
    assert abs(double_phase_integral(c, mu) - area_term) <= math.sqrt(mu)


def test_phase_profile_half_flux(half_cusp):
    profile = phase_profile(half_cusp, [1e2, 1e3, 1e4, 1e5, 1e6])
    assert profile.bound <= 1.0
    assert profile.trend_slope <= 0.05
    assert len(profile.normalized) == 5


def test_phase_profile_needs_energies_above_one(half_cusp):
    with pytest.raises(DomainError):
        phase_profile(half_cusp, [1e2])
    with pytest.raises(DomainError):
        phase_profile(half_cusp, [1.0, 1e2])
