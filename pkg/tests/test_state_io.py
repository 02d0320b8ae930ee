import json

import numpy as np
import pytest

from hdiscord.core import catalogue
from hdiscord.core.state_io import load_state, parse_state, save_state, state_to_dict
from hdiscord.core.states import DensityMatrix, PureState
from hdiscord.errors import StateFileError


def test_parse_amplitudes():
    s = 1 / np.sqrt(2)
    state = parse_state({"dims": [2, 2], "amplitudes": [[0, 0], [s, 0], [s, 0], [0, 0]]})
    assert isinstance(state, PureState)
    assert np.allclose(state.amplitudes, catalogue.bell_state().amplitudes)


def test_parse_nested_matrix_rows():
    rows = [[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]
    state = parse_state({"dims": [2], "matrix": rows})
    assert isinstance(state, DensityMatrix)
    assert np.allclose(state.matrix, [[0.5, -0.5j], [0.5j, 0.5]])


def test_small_normalization_drift_is_renormalized():
    state = parse_state({"dims": [2], "amplitudes": [[1.0 + 5e-7, 0], [0, 0]]})
    assert np.isclose(np.linalg.norm(state.amplitudes), 1.0, atol=1e-14)


@pytest.mark.parametrize(
    "payload",
    [
        [],
        {"amplitudes": [[1, 0]]},
        {"dims": "two", "amplitudes": [[1, 0]]},
        {"dims": [2]},
        {"dims": [2], "amplitudes": [[1, 0], [0, 0]], "matrix": [[1, 0]] * 4},
        {"dims": [2], "amplitudes": [1, 0]},
        {"dims": [2, 2], "amplitudes": [[1, 0], [0, 0]]},
        {"dims": [2], "amplitudes": [[1, 0], [1, 0]]},
        {"dims": [2], "matrix": [[1, 0], [0, 0], [0, 0], [1, 0]]},
        {"dims": [2], "matrix": [[1.5, 0], [0, 0], [0, 0], [-0.5, 0]]},
    ],
    ids=[
        "not-object", "no-dims", "bad-dims", "no-payload", "both-payloads", "not-pairs",
        "wrong-size", "not-normalized", "bad-trace", "not-psd",
    ],
)
def test_rejects_malformed(payload):
    with pytest.raises(StateFileError):
        parse_state(payload)


def test_save_and_load(tmp_path, rng):
    rho = catalogue.random_density_matrix((2, 3), rng=rng)
    path = tmp_path / "rho.json"
    save_state(rho, path)
    loaded = load_state(path)
    assert loaded.dims == (2, 3)
    assert np.allclose(loaded.matrix, rho.matrix)


def test_state_to_dict_is_json_serializable():
    payload = state_to_dict(catalogue.ghz_state(3))
    assert json.loads(json.dumps(payload))["dims"] == [2, 2, 2]


def test_load_missing_and_invalid(tmp_path):
    with pytest.raises(StateFileError):
        load_state(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(StateFileError):
        load_state(bad)
