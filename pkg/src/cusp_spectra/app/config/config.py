"""
Toolkit configuration using Pydantic Settings for type safety, validation and environment variable support
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Upper bound on worker threads for mode and grid fan-out
    CUSP_SPECTRA_THREADS: int = 1
    # Level of the cusp_spectra logger
    LOG_LEVEL: str = "INFO"
    # scipy.integrate.solve_ivp method used for the Prüfer angle
    PRUFER_METHOD: str = "DOP853"
    PRUFER_RTOL: float = 1e-10
    PRUFER_ATOL: float = 1e-12
    # Minimal distance past the outer turning point before the integration may stop
    TRUNCATION_MIN_CUSHION: float = 5.0
    # The cap T must also satisfy V(T) >= lambda + gap
    TRUNCATION_POTENTIAL_GAP: float = 10.0
    # t-step between freeze checks in the classically forbidden region
    FREEZE_STEP: float = 0.25
    # Final angles closer than this to a multiple of pi are flagged
    NEAR_DEGENERATE_RESIDUAL: float = 1e-8
    # Width of the bracket around each located eigenvalue
    EIGENVALUE_TOL: float = 1e-9
    # Extra Fourier indices on each side of the mode window
    WINDOW_MARGIN: int = 2
    # Flux closer than this to an integer puts the cusp in J^A
    FLUX_INTEGER_TOL: float = 1e-12
    # Flux closer than this to an integer is accepted but logged
    FLUX_WARNING_DISTANCE: float = 1e-3
    TURNING_POINT_XTOL: float = 1e-12
    # Length of the bisection bracket for P-mode turning points
    TURNING_POINT_BRACKET: float = 100.0
    # Finite-difference oracle resolution (coarse level, the fine level doubles it)
    ORACLE_GRID_POINTS: int = 20000
    # Oracle interval extends this far past the outer turning point
    ORACLE_MARGIN: float = 5.0
    # Shift applied to grid points that hit a near-degenerate count
    WEYL_PERTURBATION: float = 1e-6
    # Allowed growth of the fitted remainder constant on the validation half
    WEYL_HEADROOM: float = 1.5
    # YAML file with the verification battery and its thresholds
    VERIFY_CONFIG_PATH: str = "config/verification.yaml"

    model_config = SettingsConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore'
    )


# Create settings instance
properties = Settings()
