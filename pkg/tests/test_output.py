import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afmllg.core import Mesh, random_field, uniform_field
from afmllg.output import (ENERGY_COLUMNS, FIELD_NAMES, PHASE_COLUMNS, OutputError, read_snapshot, read_trace,
                           snapshot_bytes, write_snapshot, write_trace)

MESH3 = Mesh((4, 3, 2), (0.25, 1 / 3, 0.5))


def test_uniform_antiparallel_snapshot(tmp_path):
    a = uniform_field(MESH3, (1, 0, 0)).values
    b = uniform_field(MESH3, (-1, 0, 0)).values
    snap = read_snapshot(write_snapshot(a, b, MESH3, 0.0, tmp_path / "u.vtk"))
    assert set(FIELD_NAMES) <= set(snap)
    assert np.all(snap["m_avg"] == 0.0)
    assert np.all(snap["l_staggered"][0] == 1.0) and np.all(snap["l_staggered"][1:] == 0.0)


@pytest.mark.parametrize("binary", [False, True])
def test_round_trip_exact(tmp_path, binary):
    a = random_field(MESH3, 1.0, 1).values
    b = random_field(MESH3, 0.8, 2).values
    path = write_snapshot(a, b, MESH3, 1.25e-12, tmp_path / "r.vtk", binary=binary, L=1e-7)
    snap = read_snapshot(path)
    assert snap["dims"] == (4, 3, 2)
    assert snap["t"] == 1.25e-12
    assert snap["spacing"] == pytest.approx((0.25e-7, 1e-7 / 3, 0.5e-7))
    assert snap["origin"] == pytest.approx((0.125e-7, 0.5e-7 / 3, 0.25e-7))
    assert np.array_equal(snap["m_A"], a) and np.array_equal(snap["m_B"], b)


def test_one_dimensional_embedding(tmp_path):
    mesh = Mesh((7,), (1 / 7,))
    a = random_field(mesh, 1.0, 3).values
    snap = read_snapshot(write_snapshot(a, -a, mesh, 0.0, tmp_path / "l.vtk"))
    assert snap["dims"] == (7, 1, 1)
    assert np.array_equal(snap["m_A"][:, :, 0, 0], a)


def test_header_layout():
    text = snapshot_bytes(np.ones((3, 2, 1, 1)), np.ones((3, 2, 1, 1)), Mesh((2, 1, 1), (0.5, 1, 1)), 0.0)
    lines = text.decode().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    assert lines[2:5] == ["ASCII", "DATASET STRUCTURED_POINTS", "DIMENSIONS 2 1 1"]
    assert lines[7] == "POINT_DATA 2"
    assert lines[8] == "VECTORS m_A double"


def test_x_varies_fastest():
    a = np.zeros((3, 2, 2, 1))
    a[0] = np.arange(4.0).reshape(2, 2, 1)  # a[0][i, j] = 2 i + j
    rows = snapshot_bytes(a, a, Mesh((2, 2, 1), (1, 1, 1)), 0.0).decode().splitlines()[9:13]
    assert [float(r.split()[0]) for r in rows] == [0.0, 2.0, 1.0, 3.0]


@given(st.integers(0, 2**32 - 1), st.booleans())
def test_deterministic_bytes(seed, binary):
    a = random_field(MESH3, 1.0, seed).values
    assert snapshot_bytes(a, -a, MESH3, 0.5, binary) == snapshot_bytes(a.copy(), -a, MESH3, 0.5, binary)


def test_unwritable_snapshot(tmp_path):
    with pytest.raises(OutputError) as err:
        write_snapshot(np.ones((3, 4, 3, 2)), np.ones((3, 4, 3, 2)), MESH3, 0.0, tmp_path / "no" / "x.vtk")
    assert "no/x.vtk" in err.value.path


def test_single_record_trace(tmp_path):
    rec = dict(zip(ENERGY_COLUMNS, [0.0, -1.5, 0.25, 0.0, -2.0, 0.25, 0.5, 0.5]))
    path = write_trace([rec], tmp_path / "e.csv", ENERGY_COLUMNS)
    lines = path.read_text().splitlines()
    assert len(lines) == 2 and lines[0] == ",".join(ENERGY_COLUMNS)
    assert read_trace(path) == [rec]


def test_phase_trace_columns(tmp_path):
    recs = [dict(B_tesla=b, mean_m_along_field=0.01 * b, steps_to_converge=100, converged_flag=True)
            for b in (0.0, 25.0, 50.0)]
    path = write_trace(recs, tmp_path / "p.csv", PHASE_COLUMNS)
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["B_tesla"]) for r in rows] == [0.0, 25.0, 50.0]
    assert rows[0]["converged_flag"] == "1"


def test_trace_errors(tmp_path):
    with pytest.raises(ValueError):
        write_trace([], tmp_path / "e.csv")
    with pytest.raises(OutputError):
        write_trace([{"a": 1.0}], tmp_path / "missing" / "e.csv")
