import json
import math

import pytest

from cusp_spectra.app.counting import (
    CountResult,
    comparison_check,
    comparison_constant,
    count_below,
    cusp_count,
    eigenvalues_below,
    kth_eigenvalue,
    minimal_comparison_constant,
    mode_counts,
    ordered_map,
)
from cusp_spectra.app.errors import DomainError
from cusp_spectra.app.geometry import Cusp
from cusp_spectra.app.modes import ModeOperator, mode_window, potential_minimum, support_window
from cusp_spectra.app.oracle import oracle_count, oracle_eigenvalues


def test_nothing_below_quarter(q_mode):
    for m in (q_mode, q_mode.with_bc("neumann"), ModeOperator(kind="P", ell=-1, xi=0.5, L=1.0, b=2.0)):
        result = count_below(m, 0.25)
        assert result.count == 0
        assert not result.near_degenerate
    assert eigenvalues_below(q_mode, 0.25) == []


@pytest.mark.parametrize("lam", [5.0, 10.0, 20.0])
def test_q_counts_match_oracle(q_mode, oracle_cfg, lam):
    assert count_below(q_mode, lam).count == oracle_count(q_mode, lam, oracle_cfg)


def test_q_eigenvalues_match_oracle(q_mode):
    shot = eigenvalues_below(q_mode, 20.0)
    ref = oracle_eigenvalues(q_mode, 20.0)
    assert len(shot) == len(ref) > 0
    for a, b in zip(shot, ref):
        assert a == pytest.approx(b, abs=1e-6)


@pytest.mark.parametrize(
    "m",
    [
        ModeOperator(kind="P", ell=-1, xi=0.5, L=1.0, b=2.0),
        ModeOperator(kind="P", ell=2, xi=0.3, L=1.0, b=1.0, sign=-1),
        ModeOperator(kind="P", ell=0, xi=0.05, L=2.0, alpha2=0.5, b=0.0),
    ],
)
@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
def test_p_counts_match_oracle(m, bc, oracle_cfg):
    m = m.with_bc(bc)
    lam = 30.7
    assert count_below(m, lam).count == oracle_count(m, lam, oracle_cfg)


@pytest.mark.parametrize("ell", [-3, -1, 0, 2])
@pytest.mark.parametrize("lam", [12.3, 47.9])
def test_dirichlet_neumann_interlace(ell, lam):
    m = ModeOperator(kind="P", ell=ell, xi=0.3, L=1.0, b=1.0)
    gap = count_below(m.with_bc("neumann"), lam).count - count_below(m, lam).count
    assert 0 <= gap <= 1


def test_count_is_monotone_in_lambda(q_mode):
    counts = [count_below(q_mode, lam).count for lam in (2.0, 8.0, 32.0, 128.0)]
    assert counts == sorted(counts)
    assert counts[-1] > counts[0]


def test_integer_flux_is_rejected():
    m = ModeOperator(kind="Q", ell=1, xi=0.0, L=1.0)
    with pytest.raises(DomainError):
        count_below(m, 10.0)
    with pytest.raises(DomainError):
        cusp_count(Cusp(L=1.0, holonomy=0.0), 10.0, "dirichlet")


def test_count_is_stable_under_wider_truncation(q_mode):
    frozen = count_below(q_mode, 20.0)
    capped = count_below(q_mode, 20.0, early_freeze=False)
    wider = count_below(q_mode, 20.0, early_freeze=False, cushion=7.0)
    assert frozen.truncation_T <= capped.truncation_T < wider.truncation_T
    assert frozen.count == capped.count == wider.count > 0
    assert not capped.near_degenerate and not wider.near_degenerate


@pytest.mark.parametrize(
    "m",
    [
        ModeOperator(kind="Q", ell=0, xi=0.5, L=1.0),
        ModeOperator(kind="P", ell=-1, xi=0.5, L=1.0, b=2.0, bc="neumann"),
    ],
)
def test_eigenvalues_are_jump_points(m):
    eigs = eigenvalues_below(m, 30.0)
    assert eigs
    for mu in eigs:
        assert count_below(m, mu + 1e-6).count - count_below(m, mu - 1e-6).count == 1


def test_kth_eigenvalue_agrees_with_isolation(q_mode):
    eigs = eigenvalues_below(q_mode, 40.0)
    for k, e in enumerate(eigs, start=1):
        assert kth_eigenvalue(q_mode, k) == pytest.approx(e, abs=1e-8)


def test_kth_eigenvalue_index_starts_at_one(q_mode):
    with pytest.raises(DomainError):
        kth_eigenvalue(q_mode, 0)


def test_cusp_count_trivial(half_cusp):
    assert cusp_count(half_cusp, 0.3, "dirichlet").count == 0
    assert cusp_count(half_cusp, 0.3, "neumann").count == 0


def test_cusp_count_sums_modes():
    c = Cusp(L=1.0, holonomy=0.6 * math.pi, b=1.0)
    per_mode = mode_counts(c, 60.0, "dirichlet")
    total = cusp_count(c, 60.0, "dirichlet")
    assert total.count == sum(r.count for r in per_mode.values())
    assert total.modes == len(per_mode) == len(support_window(c, 60.0)) + 4


@pytest.mark.parametrize(
    "cusp", [Cusp(L=1.0, holonomy=math.pi), Cusp(L=1.0, holonomy=0.6 * math.pi, b=1.0)]
)
def test_neumann_count_through_interlacing(cusp):
    lam = 47.9
    dirichlet = mode_counts(cusp, lam, "dirichlet")
    neumann = mode_counts(cusp, lam, "neumann")
    gaps = {ell: neumann[ell].count - dirichlet[ell].count for ell in dirichlet}
    assert set(gaps.values()) <= {0, 1}
    direct = cusp_count(cusp, lam, "neumann").count
    assert direct == cusp_count(cusp, lam, "dirichlet").count + sum(gaps.values())
    if cusp.b == 0:
        # without field the support window is X_λ
        assert sum(gaps.values()) <= len(mode_window(cusp, lam))


def test_cusp_count_independent_of_threads():
    c = Cusp(L=1.0, holonomy=0.6 * math.pi, b=1.0)
    assert cusp_count(c, 60.0, "neumann", threads=1) == cusp_count(c, 60.0, "neumann", threads=4)


@pytest.mark.parametrize(
    "cusp",
    [
        Cusp(L=1.0, holonomy=0.6 * math.pi, b=1.0),
        Cusp(L=2.0, alpha2=0.5, holonomy=math.pi, b=0.0),
        Cusp(L=1.0, holonomy=0.1 * math.pi, b=5.0, sign=-1),
    ],
)
@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
def test_gauge_invariance(cusp, bc):
    lam = 41.3
    base = cusp_count(cusp, lam, bc).count
    shifted = cusp.model_copy(update={"holonomy": cusp.holonomy + 2 * math.pi})
    mirrored = cusp.with_flux(1.0 - cusp.xi, sign=-cusp.sign)
    assert cusp_count(shifted, lam, bc).count == base
    assert cusp_count(mirrored, lam, bc).count == base


def test_q_count_of_cusp():
    c = Cusp(L=1.0, holonomy=math.pi)
    # with b = 0 the P and Q operators coincide
    assert cusp_count(c, 55.0, "dirichlet", kind="Q").count == cusp_count(c, 55.0, "dirichlet").count


def test_count_result_serializes_with_lambda_key(q_mode):
    dumped = json.loads(count_below(q_mode, 10.0).model_dump_json(by_alias=True))
    assert dumped["lambda"] == 10.0
    assert CountResult.model_validate(dumped) == count_below(q_mode, 20.0)


def test_ordered_map_keeps_order():
    assert ordered_map(lambda x: x * x, range(10), threads=3) == [x * x for x in range(10)]


def test_comparison_constant():
    assert comparison_constant(1.0) == 4.0
    assert comparison_constant(-5.0) == 36.0


def test_comparison_sandwich_unit_field():
    c = Cusp(L=1.0, holonomy=math.pi, b=1.0)
    for ell in mode_window(c, 100.0):
        check = comparison_check(c, ell, 100.0)
        assert check.holds, check


def test_minimal_comparison_constant():
    c = Cusp(L=1.0, holonomy=math.pi, b=1.0)
    minimal = minimal_comparison_constant(c, 0, 100.0)
    assert 0.0 <= minimal <= comparison_constant(1.0)
    assert comparison_check(c, 0, 100.0, constant=minimal + 1e-3).holds


@pytest.mark.slow
def test_oracle_battery_agreement():
    for xi in (0.05, 0.3, 0.5):
        for i, ell in enumerate(range(-3, 4)):
            b = (0.0, 1.0, 5.0)[i % 3]
            m = ModeOperator(kind="P", ell=ell, xi=xi, L=1.0, b=b)
            lam = potential_minimum(m) + 26.37
            shot = eigenvalues_below(m, lam)
            ref = oracle_eigenvalues(m, lam)
            assert len(shot) == len(ref)
            for a, r in zip(shot, ref):
                assert a == pytest.approx(r, abs=1e-6)
