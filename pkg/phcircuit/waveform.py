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
This module contains the uniform :class:`TimeGrid`, the sampled
:class:`Waveform` produced by the integrators, and CSV input/output of
waveforms.
"""
import csv

import numpy as np


class TimeGrid:
    """A uniform time grid.

    The grid has ``round((t_end - t0)/h) + 1`` nodes :math:`t_0 + nh`.

    Args:
        t0 (float): initial time
        t_end (float): final time
        h (float): step size

    Raises:
        ValueError: if ``h <= 0``, ``t_end <= t0`` or ``h > t_end - t0``
    """

    def __init__(self, t0, t_end, h):
        t0, t_end, h = float(t0), float(t_end), float(h)

        if not h > 0:
            raise ValueError("The step size must be positive; got h={}.".format(h))
        if not t_end > t0:
            raise ValueError("The grid end {} must lie after its start {}.".format(t_end, t0))
        if h > t_end - t0:
            raise ValueError("The step size {} exceeds the grid length {}.".format(h, t_end - t0))

        self.t0 = t0
        self.t_end = t_end
        self.h = h
        self.nodes = int(round((t_end - t0) / h)) + 1
        self.times = t0 + h * np.arange(self.nodes)

    @classmethod
    def from_times(cls, times):
        """Grid through the given equidistant times."""
        times = np.asarray(times, dtype=float)
        grid = cls.__new__(cls)
        grid.times = times
        grid.nodes = len(times)
        grid.t0 = float(times[0])
        grid.t_end = float(times[-1])
        grid.h = float(times[1] - times[0]) if len(times) > 1 else 0.0
        return grid

    def __len__(self):
        return self.nodes

    def __repr__(self):
        return "<TimeGrid: t0={}, t_end={}, h={}, nodes={}>".format(
            self.t0, self.t_end, self.h, self.nodes
        )

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and np.array_equal(self.times, other.times)

    def slice(self, start, stop):
        """The sub-grid of nodes ``start`` to ``stop`` (inclusive)."""
        return TimeGrid.from_times(self.times[start : stop + 1])

    def windows(self, length):
        """Split the grid into consecutive windows sharing their end nodes.

        Args:
            length (float): window length; the last window may be shorter

        Returns:
            list[tuple[int]]: the ``(start, stop)`` node indices of every window
        """
        steps = max(1, int(round(length / self.h)))
        bounds = list(range(0, self.nodes - 1, steps)) + [self.nodes - 1]
        return list(zip(bounds[:-1], bounds[1:]))


class Waveform:
    """Sampled solution of a PH-DAE on a time grid.

    Args:
        grid (TimeGrid): the grid
        states (array): ``nodes x n`` state samples
        efforts (array): ``nodes x n`` effort samples
        outputs (array): ``nodes x m`` output samples
        inputs (array): ``nodes x m`` input samples
        labels (dict[str, list[str]]): coordinate labels of the PH-DAE
    """

    # pylint: disable=too-many-arguments

    def __init__(self, grid, states, efforts, outputs, inputs, labels):
        self.grid = grid
        self.states = np.asarray(states, dtype=float)
        self.efforts = np.asarray(efforts, dtype=float)
        self.outputs = np.asarray(outputs, dtype=float)
        self.inputs = np.asarray(inputs, dtype=float)
        self.labels = labels

    def __repr__(self):
        return "<Waveform: {} nodes, {} states>".format(self.grid.nodes, self.states.shape[1])

    @property
    def times(self):
        """array: the grid times"""
        return self.grid.times

    @property
    def final_state(self):
        """array: the state at the last node"""
        return self.states[-1]

    def column(self, label):
        """Samples of a labelled state, effort or output coordinate."""
        for kind, data in (("state", self.states), ("effort", self.efforts), ("output", self.outputs)):
            if label in self.labels[kind]:
                return data[:, self.labels[kind].index(label)]
        raise KeyError("Unknown waveform label {}.".format(label))

    def slice(self, start, stop):
        """The waveform restricted to the nodes ``start`` to ``stop`` (inclusive)."""
        s = slice(start, stop + 1)
        return Waveform(
            self.grid.slice(start, stop),
            self.states[s],
            self.efforts[s],
            self.outputs[s],
            self.inputs[s],
            self.labels,
        )

    def is_finite(self):
        """Whether all samples are finite."""
        return all(np.all(np.isfinite(a)) for a in (self.states, self.efforts, self.outputs))


def stitch(waveforms):
    """Concatenate waveforms of consecutive windows.

    The first node of every window after the first duplicates the last node
    of its predecessor and is dropped.

    Args:
        waveforms (list[Waveform]): waveforms of consecutive windows

    Returns:
        Waveform: the waveform on the union of the grids
    """
    first = waveforms[0]
    parts = [first] + [w.slice(1, w.grid.nodes - 1) for w in waveforms[1:]]

    def cat(attr):
        return np.concatenate([getattr(w, attr) for w in parts])

    return Waveform(
        TimeGrid.from_times(cat("times")),
        cat("states"),
        cat("efforts"),
        cat("outputs"),
        cat("inputs"),
        first.labels,
    )


def write_waveform_csv(waveform, path):
    """Write a waveform as CSV.

    The header is ``t`` followed by the state and output labels; every
    value is written with 17 significant digits.

    Args:
        waveform (Waveform): the waveform
        path (str): the file to write
    """
    header = ["t"] + list(waveform.labels["state"]) + list(waveform.labels["output"])
    data = np.column_stack([waveform.times, waveform.states, waveform.outputs])

    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in data:
            writer.writerow(["{:.17g}".format(v) for v in row])


def read_waveform_csv(path, phdae):
    """Read a waveform written by :func:`write_waveform_csv`.

    Efforts and outputs are recomputed from the states; inputs are the
    default inputs of ``phdae``.

    Args:
        path (str): the CSV file
        phdae (PhDae): the system the waveform belongs to

    Returns:
        Waveform: the waveform

    Raises:
        ValueError: if the state columns do not match the labels of ``phdae``
    """
    with open(path, newline="") as f:
        rows = list(csv.reader(f))

    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in row] for row in body], dtype=float).reshape(len(body), -1)

    state_labels = phdae.labels["state"]
    missing = [l for l in state_labels if l not in header]
    if header[0] != "t" or missing:
        raise ValueError(
            "The waveform columns do not match the system; missing {}.".format(missing or ["t"])
        )

    states = data[:, [header.index(l) for l in state_labels]]
    grid = TimeGrid.from_times(data[:, 0])
    efforts = np.array([phdae.effort(x) for x in states]).reshape(len(states), -1)
    outputs = np.array([phdae.B.T @ z for z in efforts]).reshape(len(states), -1)
    inputs = np.array([phdae.input_vector(t) for t in grid.times]).reshape(len(states), -1)
    return Waveform(grid, states, efforts, outputs, inputs, phdae.labels)
