"""Exception hierarchy shared by the numerical modules and the CLI."""


class CuspSpectraError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(CuspSpectraError, ValueError):
    """An operation was called outside its mathematical domain."""


class SpectrumNotDiscreteError(DomainError):
    """The surface has a cusp with integer holonomy class, so N(lambda) is not finite."""

    def __init__(self, j_a: tuple[int, ...], bottom: float) -> None:
        self.j_a = j_a
        self.bottom = bottom
        super().__init__(
            "spectrum is not purely discrete: the counting function needs [A]_M outside 2πZ "
            f"for every cusp, but cusps {list(j_a)} have integer class; "
            f"essential spectrum starts at 1/4 + min b_j^2 = {bottom!r}"
        )


class ConfigError(CuspSpectraError):
    """A surface description or threshold file could not be parsed."""


class NumericError(CuspSpectraError, RuntimeError):
    """The ODE integrator gave up."""

    def __init__(self, message: str, *, t_start: float, t_end: float, lam: float, mode: str) -> None:
        self.t_start = t_start
        self.t_end = t_end
        self.lam = lam
        self.mode = mode
        super().__init__(f"{message} (mode={mode}, lambda={lam!r}, t in [{t_start!r}, {t_end!r}])")


class OracleError(CuspSpectraError, RuntimeError):
    """The finite-difference reference failed to solve or to converge."""


class WindowViolationError(CuspSpectraError, AssertionError):
    """A mode outside the computed window produced eigenvalues below lambda."""
