import json

import numpy as np
import pytest

from gossipsim.trajectory import Trajectory, write_atomic


def make_traj(**kw):
    base = dict(times=np.array([0.0, 1.0, 2.5]), z=np.array([0.5, 0.4, 0.6]),
                xi=np.array([0.25, 0.24, 0.24]), horizon=2.5, absorbed_at=None,
                event_count=2, seed=7)
    base.update(kw)
    return Trajectory(**base)


class TestValueAt:
    def test_piecewise_constant(self):
        traj = make_traj()
        assert traj.value_at(0.0) == 0.5
        assert traj.value_at(0.99) == 0.5
        assert traj.value_at(1.0) == 0.4
        assert traj.value_at(2.5) == 0.6

    def test_xi_at(self):
        traj = make_traj()
        assert traj.xi_at(1.5) == 0.24

    def test_vectorized(self):
        traj = make_traj()
        out = traj.value_at(np.array([0.5, 1.5]))
        assert np.array_equal(out, [0.5, 0.4])


class TestCsv:
    def test_header_and_shape(self):
        text = make_traj().to_csv_text()
        lines = text.strip().split("\n")
        assert lines[0] == "t,Z,xi"
        assert len(lines) == 4
        assert lines[1] == "0.0,0.5,0.25"

    def test_missing_xi_leaves_field_empty(self):
        traj = make_traj(xi=None)
        lines = traj.to_csv_text().strip().split("\n")
        assert lines[1] == "0.0,0.5,"

    def test_roundtrip_floats_exact(self):
        traj = make_traj(times=np.array([0.0, 1 / 3, 2 / 3]),
                         z=np.array([0.1, 0.2, 0.30000000000000004]),
                         xi=None, horizon=1.0)
        lines = traj.to_csv_text().strip().split("\n")[1:]
        parsed = [float(line.split(",")[0]) for line in lines]
        assert parsed == [0.0, 1 / 3, 2 / 3]

    def test_sidecar_metadata(self, tmp_path):
        path = tmp_path / "traj.csv"
        make_traj().to_csv(path, metadata={"beta": 10.0, "seed": 7})
        sidecar = json.loads((tmp_path / "traj.csv.meta.json").read_text())
        assert sidecar["beta"] == 10.0
        assert path.read_text().startswith("t,Z,xi")


class TestWriteAtomic:
    def test_writes_and_replaces(self, tmp_path):
        path = tmp_path / "out.txt"
        write_atomic(path, "first")
        write_atomic(path, "second")
        assert path.read_text() == "second"
        assert list(tmp_path.iterdir()) == [path]
