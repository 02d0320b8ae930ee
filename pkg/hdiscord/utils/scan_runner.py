"""
Parameter scans of D^H along spin-model ground states, written as CSV.
"""

import csv
import io
import logging
from dataclasses import dataclass, field, fields
from typing import Any, Callable, Dict, List, Optional, TextIO

import numpy as np

from hdiscord.config import DEFAULT_MAX_FOCK_CUTOFF, SIGNIFICANT_DIGITS, SymmetricScanConfig
from hdiscord.errors import UsageError
from hdiscord.models.spin_models import (
    DickeParams,
    LMGParams,
    UniaxialParams,
    converged_dicke_discord,
    lmg_ground_aniso,
    lmg_ground_isotropic,
    uniaxial_ground,
)
from hdiscord.processors.engine import DiscordResult
from hdiscord.processors.symmetric import dh_symmetric
from hdiscord.utils.worker_pool import map_ordered

logger = logging.getLogger(__name__)

DEFAULT_N = 20


@dataclass(frozen=True)
class ModelEntry:
    params: type
    defaults: Dict[str, Any]
    swept: str


MODELS: Dict[str, ModelEntry] = {
    "lmg-iso": ModelEntry(LMGParams, {"n": DEFAULT_N, "lam": 1.0, "gamma": 1.0, "h_z": 0.5}, "h_z"),
    "lmg-aniso": ModelEntry(LMGParams, {"n": DEFAULT_N, "lam": 1.0, "gamma": 0.5, "h_z": 0.5}, "h_z"),
    "uniaxial": ModelEntry(UniaxialParams, {"n": DEFAULT_N, "h_x": 0.0, "h_z": 0.5}, "h_x"),
    "dicke": ModelEntry(DickeParams, {"n": DEFAULT_N, "omega": 1.0, "omega0": 1.0, "lam": 0.5}, "lam"),
}


@dataclass(frozen=True)
class ScanSpec:
    """One model, fixed parameters, and a grid over one swept parameter"""

    model: str
    start: float
    stop: float
    points: int
    param: Optional[str] = None
    fixed: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise UsageError(f"Unknown model '{self.model}'; choose from {', '.join(MODELS)}")
        entry = MODELS[self.model]
        if self.param is None:
            object.__setattr__(self, "param", entry.swept)
        names = {f.name for f in fields(entry.params)}
        unknown = (set(self.fixed) | {self.param}) - names
        if unknown:
            raise UsageError(f"Model '{self.model}' has no parameter(s) {sorted(unknown)}; known: {sorted(names)}")
        if self.points < 2:
            raise UsageError(f"A scan needs at least 2 points, got {self.points}")
        if not self.start < self.stop:
            raise UsageError(f"Scan start {self.start} must be below stop {self.stop}")
        if self.model == "lmg-aniso" and int(self.params_at(self.start).n) % 2:
            raise UsageError("Anisotropic LMG scans use even N")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def params_at(self, value: float):
        entry = MODELS[self.model]
        values = {**entry.defaults, **self.fixed, self.param: value}
        if "n" in values:
            values["n"] = int(values["n"])
        if "fock_cutoff" in values:
            values["fock_cutoff"] = int(values["fock_cutoff"])
        return entry.params(**values)


@dataclass
class ScanRow:
    param: float
    dh: Optional[float] = None
    theta: Optional[float] = None
    phi: Optional[float] = None
    error: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)


def discord_evaluator(spec: ScanSpec, max_fock_cutoff: int = DEFAULT_MAX_FOCK_CUTOFF
                      ) -> Callable[[Any, SymmetricScanConfig], DiscordResult]:
    """D^H along the ground state of the scanned model"""
    if spec.model == "dicke":
        # D^H comes out of the cutoff check
        return lambda p, scan: converged_dicke_discord(p, max_fock_cutoff, scan)[1]
    build = {
        "lmg-iso": lmg_ground_isotropic,
        "lmg-aniso": lmg_ground_aniso,
        "uniaxial": uniaxial_ground,
    }[spec.model]
    return lambda p, scan: dh_symmetric(build(p), scan)


def run_scan(spec: ScanSpec, scan: Optional[SymmetricScanConfig] = None, workers: int = 1,
             fock_cutoff: Optional[int] = None, max_fock_cutoff: int = DEFAULT_MAX_FOCK_CUTOFF) -> List[ScanRow]:
    """Evaluate D^H at every grid point; failures become rows with an error message"""
    scan = scan or SymmetricScanConfig()
    if spec.model == "dicke" and fock_cutoff is not None and "fock_cutoff" not in spec.fixed:
        spec = ScanSpec(spec.model, spec.start, spec.stop, spec.points, spec.param,
                        {**spec.fixed, "fock_cutoff": fock_cutoff})
    discord = discord_evaluator(spec, max_fock_cutoff)
    grid = spec.grid()
    logger.info(f"Scanning {spec.model} over {spec.param} in [{spec.start}, {spec.stop}] ({spec.points} points)")

    def evaluate(value: float) -> ScanRow:
        result = discord(spec.params_at(float(value)), scan)
        theta, phi = result.basis_angles()[0]
        return ScanRow(float(value), result.value, theta, phi, diagnostics=result.diagnostics)

    rows = []
    for value, (row, error) in zip(grid, map_ordered(evaluate, list(grid), workers=workers)):
        if error is not None:
            logger.error(f"Row {spec.param}={value:.6g} failed: {error}")
            row = ScanRow(float(value), error=str(error))
        rows.append(row)

    failed = sum(1 for r in rows if r.error)
    logger.info(f"Scan finished: {len(rows) - failed} rows, {failed} failed")
    return rows


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.{SIGNIFICANT_DIGITS}g}"


def write_csv(rows: List[ScanRow], out: TextIO):
    """param,dh,theta,phi plus an error column when any row failed"""
    with_errors = any(r.error for r in rows)
    writer = csv.writer(out, lineterminator="\n")
    header = ["param", "dh", "theta", "phi"] + (["error"] if with_errors else [])
    writer.writerow(header)
    for r in rows:
        line = [_fmt(r.param), _fmt(r.dh), _fmt(r.theta), _fmt(r.phi)]
        if with_errors:
            line.append(r.error or "")
        writer.writerow(line)


def rows_to_csv(rows: List[ScanRow]) -> str:
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()
