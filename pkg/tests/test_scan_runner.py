import numpy as np
import pytest

from hdiscord.errors import UsageError
from hdiscord.models.spin_models import LMGParams
from hdiscord.utils.scan_runner import ScanRow, ScanSpec, rows_to_csv, run_scan


@pytest.mark.parametrize(
    "kwargs",
    [
        {"model": "ising", "start": 0.0, "stop": 1.0, "points": 3},
        {"model": "lmg-iso", "start": 0.0, "stop": 1.0, "points": 3, "param": "omega"},
        {"model": "lmg-iso", "start": 0.0, "stop": 1.0, "points": 1},
        {"model": "lmg-iso", "start": 1.0, "stop": 1.0, "points": 3},
        {"model": "lmg-aniso", "start": 0.0, "stop": 1.0, "points": 3, "fixed": {"n": 7}},
        {"model": "dicke", "start": 0.0, "stop": 1.0, "points": 3, "fixed": {"h_z": 1.0}},
    ],
    ids=["unknown-model", "unknown-param", "one-point", "empty-range", "odd-n", "foreign-fixed"],
)
def test_scan_spec_validation(kwargs):
    with pytest.raises(UsageError):
        ScanSpec(**kwargs)


def test_params_at_merges_defaults():
    spec = ScanSpec("lmg-iso", 0.5, 1.5, 5, fixed={"n": 8.0})
    params = spec.params_at(0.75)
    assert params == LMGParams(8, 1.0, 1.0, 0.75)
    assert np.allclose(spec.grid(), [0.5, 0.75, 1.0, 1.25, 1.5])


def test_isotropic_scan_above_saturation_is_classical(coarse_scan):
    rows = run_scan(ScanSpec("lmg-iso", 1.2, 2.0, 3, fixed={"n": 6}), coarse_scan)
    assert [r.error for r in rows] == [None] * 3
    assert all(r.dh < 1e-9 for r in rows)
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == "param,dh,theta,phi"
    assert len(text.splitlines()) == 4


def test_failed_points_become_error_rows(coarse_scan):
    # h_z = 1 sits on the transition of the anisotropic model
    rows = run_scan(ScanSpec("lmg-aniso", 0.5, 1.5, 3, fixed={"n": 6}), coarse_scan)
    assert rows[1].error is not None and rows[1].dh is None
    assert rows[0].error is None and rows[2].error is None
    lines = rows_to_csv(rows).splitlines()
    assert lines[0] == "param,dh,theta,phi,error"
    assert lines[2].startswith("1,,,,")


def test_scan_is_deterministic_across_workers(coarse_scan):
    spec = ScanSpec("uniaxial", 0.0, 0.4, 3, fixed={"n": 6, "h_z": 2.0})
    serial = rows_to_csv(run_scan(spec, coarse_scan, workers=1))
    parallel = rows_to_csv(run_scan(spec, coarse_scan, workers=3))
    assert serial == parallel


def test_csv_formatting():
    rows = [ScanRow(0.1, 0.123456789012345, 1.5707963267948966, 0.0)]
    assert rows_to_csv(rows).splitlines()[1] == "0.1,0.123456789012,1.57079632679,0"
