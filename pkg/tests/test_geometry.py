import math

import pytest
from pydantic import ValidationError

from cusp_spectra.app.errors import ConfigError
from cusp_spectra.app.geometry import (
    Cusp,
    Discrete,
    Essential,
    ExplicitWeyl,
    FlatRectangle,
    Surface,
    cusp_area,
    discreteness_verdict,
    flux_distance,
    is_integer_class,
    reduced_flux,
)


@pytest.mark.parametrize(
    "L, alpha2, expected",
    [
        (1.0, 0.0, 2 * math.pi),
        (2.0, 1.0, 4 * math.pi * math.exp(-1.0)),
        (1.0, math.log(2.0), math.pi),
    ],
)
def test_cusp_area(L, alpha2, expected):
    assert cusp_area(Cusp(L=L, alpha2=alpha2, holonomy=1.0)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize(
    "holonomy, xi",
    [
        (0.6 * math.pi, 0.3),
        (-0.5 * math.pi, 0.75),
        (4 * math.pi, 0.0),
        (5 * math.pi, 0.5),
    ],
)
def test_reduced_flux(holonomy, xi):
    assert reduced_flux(holonomy) == pytest.approx(xi, abs=1e-14)
    assert 0.0 <= reduced_flux(holonomy) < 1.0


def test_integer_class_tolerance():
    assert is_integer_class(0.0)
    assert is_integer_class(1.0 - 1e-13)
    assert not is_integer_class(1e-6)
    assert flux_distance(0.3) == pytest.approx(0.3)
    assert flux_distance(0.75) == pytest.approx(0.25)


def test_verdict_discrete():
    s = Surface(cusps=[Cusp(L=1.0, holonomy=math.pi, b=5.0)])
    assert discreteness_verdict(s) == Discrete()


def test_verdict_essential_bottom_uses_integer_cusps_only(non_discrete_surface):
    verdict = discreteness_verdict(non_discrete_surface)
    assert isinstance(verdict, Essential)
    assert verdict.bottom == 0.25 + 9.0
    assert verdict.j_a == (1,)


def test_verdict_classical_cusp():
    verdict = discreteness_verdict(Surface(cusps=[Cusp(L=1.0, holonomy=0.0)]))
    assert verdict == Essential(bottom=0.25, j_a=(1,))


def test_with_flux_keeps_field_and_flips_sign():
    c = Cusp(L=1.5, alpha2=0.2, b=2.0, holonomy=0.6 * math.pi)
    mirrored = c.with_flux(1.0 - c.xi, sign=-1)
    assert mirrored.xi == pytest.approx(0.7)
    assert mirrored.sign == -1
    assert (mirrored.L, mirrored.alpha2, mirrored.b) == (c.L, c.alpha2, c.b)


def test_total_area(rectangle_surface):
    assert rectangle_surface.total_area == pytest.approx(math.pi ** 2 + 2 * math.pi)


def test_surface_needs_a_cusp():
    with pytest.raises(ValidationError):
        Surface(cusps=[])


def test_core_kinds_are_discriminated():
    s = Surface.model_validate(
        {"cusps": [{"L": 1.0, "holonomy": 1.0}], "core": {"kind": "flat_rectangle", "width": 1.0, "height": 2.0}}
    )
    assert isinstance(s.core, FlatRectangle)
    assert isinstance(Surface(cusps=[Cusp(L=1.0, holonomy=1.0)]).core, ExplicitWeyl)


def test_surface_from_json_file(tmp_path, single_cusp_surface):
    path = tmp_path / "surface.json"
    path.write_text(single_cusp_surface.model_dump_json(), encoding="utf-8")
    assert Surface.from_json_file(path) == single_cusp_surface


def test_surface_from_malformed_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"cusps": [{"L": -1}]}', encoding="utf-8")
    with pytest.raises(ConfigError):
        Surface.from_json_file(path)
    with pytest.raises(ConfigError):
        Surface.from_json_file(tmp_path / "missing.json")


def test_small_flux_warning_names_cusp_and_distance(service_logs):
    Surface(cusps=[Cusp(L=1.0, holonomy=math.pi), Cusp(L=1.0, holonomy=2 * math.pi * 1e-4)])
    warnings = [r.getMessage() for r in service_logs.records if r.levelname == "WARNING"]
    assert len(warnings) == 1
    assert warnings[0].startswith("Cusp 2 has flux 1.000e-04 away from an integer")
