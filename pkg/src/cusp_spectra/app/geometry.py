"""
Surface and cusp data model: holonomy reduced to flux, cusp areas, toy compact cores
and the discreteness verdict for the magnetic Laplacian.
"""
import math
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .config.config import properties
from .errors import ConfigError
from .logger import logger

TWO_PI = 2.0 * math.pi


def reduced_flux(holonomy: float) -> float:
    """Fractional part of holonomy / 2π, in [0, 1)."""
    x = holonomy / TWO_PI
    xi = x - math.floor(x)
    # x just below an integer can round up to 1.0
    return 0.0 if xi >= 1.0 else xi


def flux_distance(xi: float) -> float:
    """inf_k |ξ − k|."""
    return min(xi, 1.0 - xi)


def is_integer_class(xi: float, tol: float | None = None) -> bool:
    tol = properties.FLUX_INTEGER_TOL if tol is None else tol
    return abs(xi) < tol or abs(xi - 1.0) < tol


class Cusp(BaseModel):
    """One cuspidal end S¹ × (α², ∞) with metric L²e^{−2t}dθ² + dt² and constant field b."""

    model_config = ConfigDict(frozen=True)

    L: float = Field(gt=0)
    alpha2: float = 0.0
    b: float = 0.0
    holonomy: float
    sign: Literal[1, -1] = 1

    @property
    def xi(self) -> float:
        return reduced_flux(self.holonomy)

    @property
    def area(self) -> float:
        return cusp_area(self)

    def with_flux(self, xi: float, sign: Literal[1, -1] | None = None) -> "Cusp":
        """Same cusp with holonomy 2πξ (and optionally the other orientation)."""
        return self.model_copy(update={"holonomy": TWO_PI * xi, "sign": self.sign if sign is None else sign})


def cusp_area(c: Cusp) -> float:
    return TWO_PI * c.L * math.exp(-c.alpha2)


class FlatRectangle(BaseModel):
    """Flat rectangle with explicit spectrum π²(m²/width² + n²/height²)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["flat_rectangle"] = "flat_rectangle"
    width: float = Field(gt=0)
    height: float = Field(gt=0)

    @property
    def area(self) -> float:
        return self.width * self.height


class ExplicitWeyl(BaseModel):
    """Abstract core whose count is area·λ/4π ∓ remainder_coeff·√λ."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["explicit_weyl"] = "explicit_weyl"
    area: float = Field(ge=0)
    remainder_coeff: float = Field(default=0.0, ge=0)


ToyCore = Annotated[Union[FlatRectangle, ExplicitWeyl], Field(discriminator="kind")]


class Surface(BaseModel):
    model_config = ConfigDict(frozen=True)

    cusps: list[Cusp] = Field(min_length=1)
    core: ToyCore = Field(default_factory=lambda: ExplicitWeyl(area=0.0))

    @field_validator("cusps")
    @classmethod
    def _warn_small_flux(cls, cusps: list[Cusp]) -> list[Cusp]:
        for j, c in enumerate(cusps, start=1):
            d = flux_distance(c.xi)
            if not is_integer_class(c.xi) and d < properties.FLUX_WARNING_DISTANCE:
                logger.warning(
                    f"Cusp {j} has flux {d:.3e} away from an integer; counting constants grow like 1/dist"
                )
        return cusps

    @property
    def total_area(self) -> float:
        return self.core.area + sum(c.area for c in self.cusps)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "Surface":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read surface file '{path}': {e}") from e
        try:
            return cls.model_validate_json(text)
        except ValidationError as e:
            raise ConfigError(f"malformed surface description '{path}': {e}") from e


class Discrete(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["discrete"] = "discrete"


class Essential(BaseModel):
    """Essential spectrum [bottom, ∞) produced by the cusps in J^A (1-based indices)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["essential"] = "essential"
    bottom: float
    j_a: tuple[int, ...]


def discreteness_verdict(s: Surface) -> Discrete | Essential:
    j_a = tuple(j for j, c in enumerate(s.cusps, start=1) if is_integer_class(c.xi))
    if not j_a:
        return Discrete()
    bottom = 0.25 + min(s.cusps[j - 1].b ** 2 for j in j_a)
    return Essential(bottom=bottom, j_a=j_a)
