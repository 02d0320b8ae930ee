"""
JSON state-file codec.

{"dims": [2, 2], "amplitudes": [[re, im], ...]}
{"dims": [2, 2], "matrix": [[re, im], ...]}          # row-major, flat or nested rows
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from hdiscord.config import STATE_FILE_TOL
from hdiscord.core.states import DensityMatrix, PureState
from hdiscord.errors import DiscordError, StateFileError

logger = logging.getLogger(__name__)

State = Union[PureState, DensityMatrix]


def _complex_array(raw: Any, what: str) -> np.ndarray:
    try:
        pairs = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise StateFileError(f"'{what}' must be a list of [re, im] pairs")
    if pairs.ndim < 2 or pairs.shape[-1] != 2:
        raise StateFileError(f"'{what}' must be a list of [re, im] pairs, got shape {pairs.shape}")
    values = pairs[..., 0] + 1j * pairs[..., 1]
    if not np.all(np.isfinite(values)):
        raise StateFileError(f"'{what}' contains NaN or infinite entries")
    return values.reshape(-1)


def parse_state(data: Dict[str, Any]) -> State:
    """Build a PureState or DensityMatrix from the decoded JSON object"""
    if not isinstance(data, dict):
        raise StateFileError("State file must contain a JSON object")
    if "dims" not in data:
        raise StateFileError("State file is missing 'dims'")
    try:
        dims = tuple(int(d) for d in data["dims"])
    except (TypeError, ValueError):
        raise StateFileError(f"'dims' must be a list of integers, got {data['dims']!r}")
    size = int(np.prod(dims)) if dims else 0
    if size < 1:
        raise StateFileError(f"Invalid dims {dims}")

    has_amps, has_matrix = "amplitudes" in data, "matrix" in data
    if has_amps == has_matrix:
        raise StateFileError("State file needs exactly one of 'amplitudes' or 'matrix'")

    try:
        if has_amps:
            amps = _complex_array(data["amplitudes"], "amplitudes")
            if amps.size != size:
                raise StateFileError(f"Expected {size} amplitudes for dims {dims}, got {amps.size}")
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > STATE_FILE_TOL:
                raise StateFileError(f"Amplitudes are not normalized (norm {norm:.9f})")
            return PureState(amps / norm, dims)

        entries = _complex_array(data["matrix"], "matrix")
        if entries.size != size * size:
            raise StateFileError(f"Expected {size * size} matrix entries for dims {dims}, got {entries.size}")
        rho = entries.reshape(size, size)
        trace = np.trace(rho).real
        if abs(trace - 1.0) > STATE_FILE_TOL:
            raise StateFileError(f"Density matrix trace is {trace:.9f}, expected 1")
        return DensityMatrix(rho / trace, dims)
    except StateFileError:
        raise
    except DiscordError as e:
        raise StateFileError(f"Invalid state: {e}")


def load_state(path: Union[str, Path]) -> State:
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise StateFileError(f"State file not found: {path}")
    except json.JSONDecodeError as e:
        raise StateFileError(f"State file {path} is not valid JSON: {e}")
    state = parse_state(data)
    logger.info(f"Loaded {type(state).__name__} with dims {list(state.dims)} from {path}")
    return state


def _pairs(values: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values).reshape(-1)]


def state_to_dict(state: State) -> Dict[str, Any]:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "amplitudes": _pairs(state.amplitudes)}
    return {"dims": list(state.dims), "matrix": _pairs(state.matrix)}


def save_state(state: State, path: Union[str, Path]):
    with open(path, 'w') as f:
        json.dump(state_to_dict(state), f, indent=2)
