"""
Configuration settings for the discord toolkit
"""
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import dotenv_values, load_dotenv

from hdiscord.errors import ConfigError

# Load environment variables
load_dotenv()

# File paths
BASE_DIR = Path(__file__).resolve().parent.parent
LOG_DIR = Path(os.getenv("LOG_DIR", str(BASE_DIR / "logs")))
OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", str(BASE_DIR / "output")))

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Numerical tolerances
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
# Eigenvalues at or below this (unit trace) are round-off, not weight
SPECTRAL_CUTOFF = 1e-12
TRACE_TOL = 1e-10
STATE_FILE_TOL = 1e-6

# Output
SIGNIFICANT_DIGITS = 12

# Optimizer defaults
DEFAULT_GRID_POINTS = 9
DEFAULT_RESTARTS = 8
DEFAULT_TOLERANCE = 1e-9
DEFAULT_SEED = 0
DEFAULT_MAX_GRID_CELLS = 200_000

# Symmetric ansatz scan
DEFAULT_SYMMETRIC_THETA = 181
DEFAULT_SYMMETRIC_PHI = 90

# Dicke model truncation
DEFAULT_FOCK_CUTOFF = 50
DEFAULT_MAX_FOCK_CUTOFF = 400

# Maps env keys to (field name, caster)
ENV_KEYS = {
    "DISCORD_GRID_POINTS": ("grid_points", int),
    "DISCORD_RESTARTS": ("restarts", int),
    "DISCORD_TOLERANCE": ("tolerance", float),
    "DISCORD_WORKERS": ("workers", int),
    "DISCORD_SEED": ("seed", int),
    "DISCORD_MAX_GRID_CELLS": ("max_grid_cells", int),
    "DISCORD_SYMMETRIC_THETA": ("theta_points", int),
    "DISCORD_SYMMETRIC_PHI": ("phi_points", int),
    "DISCORD_FOCK_CUTOFF": ("fock_cutoff", int),
    "DISCORD_MAX_FOCK_CUTOFF": ("max_fock_cutoff", int),
}


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the grid + simplex search over product bases"""

    grid_points: int = DEFAULT_GRID_POINTS
    restarts: int = DEFAULT_RESTARTS
    tolerance: float = DEFAULT_TOLERANCE
    workers: int = 1
    seed: int = DEFAULT_SEED
    max_grid_cells: int = DEFAULT_MAX_GRID_CELLS

    def __post_init__(self):
        if self.grid_points < 3:
            raise ConfigError(f"grid_points must be >= 3, got {self.grid_points}")
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be positive, got {self.tolerance}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.max_grid_cells < 1:
            raise ConfigError(f"max_grid_cells must be >= 1, got {self.max_grid_cells}")


@dataclass(frozen=True)
class SymmetricScanConfig:
    """Resolution of the (theta, phi) scan used by the symmetric ansatz"""

    theta_points: int = DEFAULT_SYMMETRIC_THETA
    phi_points: int = DEFAULT_SYMMETRIC_PHI
    restarts: int = 4
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if self.theta_points < 3 or self.phi_points < 2:
            raise ConfigError(
                f"symmetric scan needs >= 3 theta and >= 2 phi points, "
                f"got {self.theta_points}x{self.phi_points}"
            )
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True)
class ResolvedConfig:
    """Everything the CLI needs after flags, config file and environment are merged"""

    grid_points: int = DEFAULT_GRID_POINTS
    restarts: int = DEFAULT_RESTARTS
    tolerance: float = DEFAULT_TOLERANCE
    workers: int = 1
    seed: int = DEFAULT_SEED
    max_grid_cells: int = DEFAULT_MAX_GRID_CELLS
    theta_points: int = DEFAULT_SYMMETRIC_THETA
    phi_points: int = DEFAULT_SYMMETRIC_PHI
    fock_cutoff: int = DEFAULT_FOCK_CUTOFF
    max_fock_cutoff: int = DEFAULT_MAX_FOCK_CUTOFF

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(
            grid_points=self.grid_points,
            restarts=self.restarts,
            tolerance=self.tolerance,
            workers=self.workers,
            seed=self.seed,
            max_grid_cells=self.max_grid_cells,
        )

    def symmetric(self) -> SymmetricScanConfig:
        return SymmetricScanConfig(
            theta_points=self.theta_points,
            phi_points=self.phi_points,
            tolerance=self.tolerance,
        )

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _cast_values(source: Mapping[str, Optional[str]], origin: str) -> Dict[str, Any]:
    """Pick known DISCORD_* keys out of a mapping and cast them"""
    values = {}
    for key, (name, caster) in ENV_KEYS.items():
        raw = source.get(key)
        if raw is None or str(raw).strip() == "":
            continue
        try:
            values[name] = caster(str(raw).strip())
        except ValueError:
            raise ConfigError(f"{origin}: {key}={raw!r} is not a valid {caster.__name__}")
    return values


def resolve_config(
    overrides: Optional[Mapping[str, Any]] = None,
    config_file: Optional[str] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ResolvedConfig:
    """Merge defaults < environment < config file < explicit overrides"""
    environ = os.environ if environ is None else environ

    resolved = ResolvedConfig(workers=default_workers())
    resolved = replace(resolved, **_cast_values(environ, "environment"))

    if config_file:
        path = Path(config_file)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {config_file}")
        resolved = replace(resolved, **_cast_values(dotenv_values(path), str(path)))

    known = {f.name for f in fields(ResolvedConfig)}
    explicit = {k: v for k, v in (overrides or {}).items() if v is not None and k in known}
    resolved = replace(resolved, **explicit)

    # Validate eagerly so a bad value fails before any work starts
    resolved.optimizer()
    resolved.symmetric()
    if resolved.fock_cutoff < 1 or resolved.max_fock_cutoff < resolved.fock_cutoff:
        raise ConfigError(
            f"fock cutoff range invalid: {resolved.fock_cutoff}..{resolved.max_fock_cutoff}"
        )
    return resolved
