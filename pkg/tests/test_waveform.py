# Copyright 2018-2019 Xanadu Quantum Technologies Inc.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Unit tests for the :mod:`phcircuit.waveform` module.
"""
import pytest
import numpy as np

from phcircuit.integrators import Trapezoidal
from phcircuit.phdae import assemble_model1
from phcircuit.waveform import TimeGrid, read_waveform_csv, stitch, write_waveform_csv


class TestTimeGrid:
    """Tests for the uniform time grid."""

    def test_nodes(self):
        """Test the number of nodes and the times."""
        grid = TimeGrid(0, 1, 0.1)

        assert grid.nodes == len(grid) == 11
        assert grid.times[-1] == pytest.approx(1.0)
        assert grid.h == 0.1

    def test_windows(self):
        """Test that windows share their end nodes and the last may be shorter."""
        grid = TimeGrid(0, 1, 0.1)
        assert grid.windows(0.3) == [(0, 3), (3, 6), (6, 9), (9, 10)]
        assert grid.windows(5.0) == [(0, 10)]

    @pytest.mark.parametrize(
        "args, match",
        [
            ((0, 1, 0), "must be positive"),
            ((0, 1, -0.1), "must be positive"),
            ((1, 1, 0.1), "must lie after"),
            ((0, 1, 2), "exceeds the grid length"),
        ],
    )
    def test_invalid(self, args, match):
        """Test that invalid grids are rejected."""
        with pytest.raises(ValueError, match=match):
            TimeGrid(*args)

    def test_slice(self):
        """Test sub-grids."""
        grid = TimeGrid(0, 1, 0.1)
        sub = grid.slice(3, 6)

        assert sub.nodes == 4
        assert sub.t0 == pytest.approx(0.3)
        assert sub.h == pytest.approx(0.1)
        assert sub == TimeGrid.from_times(grid.times[3:7])


class TestWaveform:
    """Tests for sampled solutions."""

    @pytest.fixture
    def rc(self, build):
        phdae = assemble_model1(build("rc"))
        return phdae, Trapezoidal().integrate(phdae, TimeGrid(0, 1, 0.1))

    def test_columns(self, rc):
        """Test access by label."""
        _, waveform = rc

        assert waveform.column("q[C1]").shape == (11,)
        assert np.allclose(waveform.column("u[C1]"), waveform.column("q[C1]"))
        assert np.allclose(waveform.column("y[V1]"), -waveform.column("j[V1]"))

        with pytest.raises(KeyError, match="Unknown waveform label"):
            waveform.column("q[C9]")

    def test_stitch(self, rc):
        """Test that stitching consecutive windows restores the waveform."""
        _, waveform = rc
        parts = [waveform.slice(a, b) for a, b in waveform.grid.windows(0.3)]
        joined = stitch(parts)

        assert joined.grid == waveform.grid
        assert np.array_equal(joined.states, waveform.states)
        assert np.array_equal(joined.final_state, waveform.final_state)

    def test_csv(self, rc, tmp_path):
        """Test that the CSV file restores the states exactly."""
        phdae, waveform = rc
        path = str(tmp_path / "waveform.csv")
        write_waveform_csv(waveform, path)

        with open(path) as f:
            assert f.readline().strip() == "t,q[C1],e[1],e[2],j[V1],y[V1]"

        loaded = read_waveform_csv(path, phdae)
        assert np.array_equal(loaded.states, waveform.states)
        assert np.allclose(loaded.outputs, waveform.outputs)
        assert np.allclose(loaded.times, waveform.times)

    def test_csv_mismatch(self, rc, build, tmp_path):
        """Test that a waveform of another system is rejected."""
        _, waveform = rc
        path = str(tmp_path / "waveform.csv")
        write_waveform_csv(waveform, path)

        with pytest.raises(ValueError, match="do not match the system"):
            read_waveform_csv(path, assemble_model1(build("lc")))
