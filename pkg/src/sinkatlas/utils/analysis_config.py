"""Environment-driven defaults for analyses and simulations."""

import os

from pydantic import BaseModel, Field

from ..errors import ParameterError


class AnalysisConfig(BaseModel):
    """Numeric defaults shared by the library and the CLI."""

    tie_tol: float = Field(
        default=1e-12,
        ge=0.0,
        description="Payoff differences at or below this are ties",
    )
    support_threshold: float = Field(
        default=1e-9,
        gt=0.0,
        description="Coordinates below this count as outside the support",
    )
    step: float = Field(default=1e-3, gt=0.0, description="Integrator step size")
    t_max: float = Field(default=1e4, gt=0.0, description="Integration horizon")
    nash_tol: float = Field(
        default=1e-9,
        gt=0.0,
        description="Equality and strict-margin tolerance for Nash checks",
    )
    omega_floor: float = Field(
        default=1e-3,
        gt=0.0,
        description="Correlated mass floor for omega-limit estimates",
    )
    evidence_step: float = Field(
        default=1e-2,
        gt=0.0,
        description="Step used by scripted numerical evidence",
    )
    evidence_radius: float = Field(
        default=1e-2,
        gt=0.0,
        description="Near-passage radius accepted as numerical evidence",
    )
    strict_pseudoconvex: bool = Field(
        default=False,
        description="Require a strictly negative cavity sum",
    )


_ENV_FIELDS = {
    "SINKATLAS_TIE_TOL": "tie_tol",
    "SINKATLAS_SUPPORT_THRESHOLD": "support_threshold",
    "SINKATLAS_STEP": "step",
    "SINKATLAS_TMAX": "t_max",
    "SINKATLAS_NASH_TOL": "nash_tol",
    "SINKATLAS_OMEGA_FLOOR": "omega_floor",
    "SINKATLAS_EVIDENCE_STEP": "evidence_step",
    "SINKATLAS_EVIDENCE_RADIUS": "evidence_radius",
}


def load_analysis_config() -> AnalysisConfig:
    """
    Load analysis defaults from environment variables.

    Returns:
        AnalysisConfig with every SINKATLAS_* override applied
    """
    values: dict[str, float | bool] = {}
    for env_name, field_name in _ENV_FIELDS.items():
        raw = os.getenv(env_name)
        if raw is None or raw.strip() == "":
            continue
        try:
            values[field_name] = float(raw)
        except ValueError:
            raise ParameterError(f"{env_name} must be a number, got {raw!r}")

    strict = os.getenv("SINKATLAS_STRICT_PSEUDOCONVEX")
    if strict is not None:
        values["strict_pseudoconvex"] = strict.strip().lower() == "true"

    try:
        return AnalysisConfig(**values)
    except ValueError as e:
        raise ParameterError(f"Invalid SINKATLAS_* setting: {e}")
