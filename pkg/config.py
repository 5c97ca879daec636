import os
from dataclasses import dataclass, field, replace
from typing import Literal

from dotenv import load_dotenv

load_dotenv()


Variant = Literal["sr", "uniform", "chance"]
VARIANTS: tuple[str, ...] = ("sr", "uniform", "chance")


@dataclass
class Settings:
    """Application settings loaded from environment."""

    density: float = 200.0
    seed: int = 0
    max_iterations: int = 500
    tension_threshold: float = 5.0
    results_db_url: str = "sqlite:///placer_results.db"
    workers: int = 1
    debug_log: bool = False


@dataclass(frozen=True)
class Tolerances:
    """Geometric tolerances shared by matching, collision and contact resolution."""

    penetration: float = 1e-4
    contact: float = 1e-4
    afford_deg: float = 1.0
    equilibrium: float = 1e-6


@dataclass(frozen=True)
class PlannerConfig:
    max_iterations: int = 500
    tension_threshold: float = 5.0
    target_prob: float = 0.10
    decay: float = 0.99
    fixed_decay: float = 0.5
    variant: Variant = "sr"
    seed: int = 0
    allow_fixed_support: bool = False
    density: float = 200.0
    restarts: int = 1
    selection: Literal["median_sr", "volume"] = "median_sr"
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay (lambda) must be in (0, 1)")
        if not 0.0 < self.fixed_decay <= 1.0:
            raise ValueError("fixed_decay (gamma) must be in (0, 1]")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.selection not in ("median_sr", "volume"):
            raise ValueError(f"unknown selection rule {self.selection!r}")


def _env_number(name: str, default, cast):
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return cast(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be a number, got {raw!r}") from exc


def get_settings() -> Settings:
    """Return settings from environment variables."""
    debug_log = os.getenv("DEBUG_LOG", "0").lower() in {"1", "true", "yes"}
    return Settings(
        density=_env_number("PLACER_DENSITY", 200.0, float),
        seed=_env_number("PLACER_SEED", 0, int),
        max_iterations=_env_number("PLACER_MAX_ITERS", 500, int),
        tension_threshold=_env_number("PLACER_TENSION", 5.0, float),
        results_db_url=os.getenv("RESULTS_DB_URL", "sqlite:///placer_results.db"),
        workers=_env_number("PLACER_WORKERS", 1, int),
        debug_log=debug_log,
    )


def planner_config(settings: Settings, **overrides) -> PlannerConfig:
    """Build a PlannerConfig from settings; CLI flags override, None values are skipped."""
    config = PlannerConfig(
        max_iterations=settings.max_iterations,
        tension_threshold=settings.tension_threshold,
        seed=settings.seed,
        density=settings.density,
    )
    given = {key: value for key, value in overrides.items() if value is not None}
    return replace(config, **given) if given else config
