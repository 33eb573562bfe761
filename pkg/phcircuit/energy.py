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
r"""
This module contains the energy bookkeeping of sampled PH-DAE solutions.

Along solutions with :math:`z(x)\in\mathcal{V}` the Hamiltonian satisfies

.. math::

    H(x(t_1)) - H(x(t_0)) = -\int_{t_0}^{t_1} z^T r(z)\,dt + \int_{t_0}^{t_1} y^T u\,dt.

:func:`energy_audit` evaluates both sides on a :class:`~.Waveform` with the
trapezoidal rule, interval by interval.
"""
import numpy as np


class GridMismatchError(ValueError):
    """Exception raised when a waveform does not fit the system or the input samples."""


class EnergyAudit:
    """Interval-wise energy balance of a waveform.

    All arrays have one entry per grid interval.

    Args:
        times (array): the grid times
        delta_h (array): change of the Hamiltonian
        dissipation (array): dissipated energy :math:`\\int z^T r\\,dt`
        supplied (array): supplied energy :math:`\\int y^T u\\,dt`
        defect (array or None): splitting defect of an iterated coupled system
    """

    def __init__(self, times, delta_h, dissipation, supplied, defect=None):
        self.times = np.asarray(times, dtype=float)
        self.delta_h = np.asarray(delta_h, dtype=float)
        self.dissipation = np.asarray(dissipation, dtype=float)
        self.supplied = np.asarray(supplied, dtype=float)
        self.defect = None if defect is None else np.asarray(defect, dtype=float)

    def __repr__(self):
        return "<EnergyAudit: {} intervals, residual {:.3e}>".format(
            len(self.delta_h), self.total("residual")
        )

    @property
    def residual(self):
        """array: :math:`\\Delta H + \\int z^T r - \\int y^T u` minus the defect"""
        res = self.delta_h + self.dissipation - self.supplied
        if self.defect is not None:
            res = res - self.defect
        return res

    @property
    def margin(self):
        """array: :math:`\\int y^T u - \\Delta H`, nonnegative for passive systems"""
        return self.supplied - self.delta_h

    def total(self, field):
        """Sum of one of the interval-wise quantities over the grid."""
        value = getattr(self, field)
        return 0.0 if value is None else float(np.sum(value))

    def by_window(self, bounds):
        """Sum the interval-wise quantities over windows.

        Args:
            bounds (list[tuple[int]]): ``(start, stop)`` node indices of the windows

        Returns:
            list[dict[str, float]]: the balance of every window
        """
        fields = ["delta_h", "dissipation", "supplied", "residual", "margin"]
        if self.defect is not None:
            fields.append("defect")
        return [
            {f: float(np.sum(getattr(self, f)[start:stop])) for f in fields}
            for start, stop in bounds
        ]

    def to_dict(self):
        """JSON-serializable summary: totals and the worst interval residual."""
        fields = ["delta_h", "dissipation", "supplied", "residual", "margin"]
        summary = {f: self.total(f) for f in fields}
        summary["defect"] = self.total("defect") if self.defect is not None else None
        summary["max_interval_residual"] = (
            float(np.max(np.abs(self.residual))) if len(self.delta_h) else 0.0
        )
        summary["min_interval_margin"] = float(np.min(self.margin)) if len(self.delta_h) else 0.0
        summary["intervals"] = len(self.delta_h)
        return summary

    def __add__(self, other):
        if not np.array_equal(self.times, other.times):
            raise GridMismatchError("Only audits on identical grids can be combined.")

        if self.defect is None and other.defect is None:
            defect = None
        else:
            zero = np.zeros_like(self.delta_h)
            defect = (zero if self.defect is None else self.defect) + (
                zero if other.defect is None else other.defect
            )

        return EnergyAudit(
            self.times,
            self.delta_h + other.delta_h,
            self.dissipation + other.dissipation,
            self.supplied + other.supplied,
            defect,
        )


def _trapezoid(times, samples):
    return 0.5 * np.diff(times) * (samples[1:] + samples[:-1])


def energy_audit(phdae, waveform, input_signals=None, defect=None, external_only=False):
    """Audit the energy balance of a waveform.

    Args:
        phdae (PhDae): the system
        waveform (Waveform): a solution of ``phdae``
        input_signals (None, callable or array): the inputs ``u``; the samples
            stored in the waveform if not given
        defect (array): interval-wise splitting defect to account for
        external_only (bool): count only the external ports as supplied power,
            leaving out the coupling ports

    Returns:
        EnergyAudit: the interval-wise balance

    Raises:
        GridMismatchError: if the waveform or the inputs do not fit ``phdae``
    """
    states = waveform.states
    nodes = waveform.grid.nodes
    n, m, _ = phdae.dims

    if states.shape != (nodes, n) or list(waveform.labels["state"]) != phdae.labels["state"]:
        raise GridMismatchError(
            "The waveform with {} states per node does not belong to the system {}.".format(
                states.shape[1], phdae.name
            )
        )

    if input_signals is None:
        u = waveform.inputs
    elif callable(input_signals):
        u = np.array([input_signals(t) for t in waveform.times], dtype=float)
    else:
        u = np.asarray(input_signals, dtype=float)
    u = u.reshape(len(u), -1) if u.size else np.zeros((len(u), m))

    if u.shape != (nodes, m):
        raise GridMismatchError(
            "Expected {} input samples of dimension {}, got shape {}.".format(nodes, m, u.shape)
        )

    if defect is not None and len(np.atleast_1d(defect)) != nodes - 1:
        raise GridMismatchError("The splitting defect needs one entry per grid interval.")

    efforts = np.array([phdae.effort(x) for x in states]).reshape(nodes, -1)
    H = np.array([phdae.hamiltonian(x) for x in states])
    p_diss = np.array([z @ phdae.dissipation(z) for z in efforts])

    ports = slice(phdae.coupling_ports if external_only else 0, m)
    y = efforts @ phdae.B[:, ports]
    p_supply = np.sum(y * u[:, ports], axis=1)

    times = waveform.times
    return EnergyAudit(
        times, np.diff(H), _trapezoid(times, p_diss), _trapezoid(times, p_supply), defect
    )


def coupled_energy_balance(phdaes, waveforms, defect=None):
    r"""Energy balance of a coupled system with Hamiltonian :math:`H = \sum_i H_i`.

    Only the external ports count as supplied power. For an exact solution
    of the coupled system the coupling ports exchange no net power, so the
    residual vanishes up to quadrature error; for the iterates of a dynamic
    iteration the balance closes with the splitting ``defect``.

    Args:
        phdaes (list[PhDae]): the subsystems
        waveforms (list[Waveform]): their solutions on a common grid
        defect (array): interval-wise splitting defect

    Returns:
        EnergyAudit: the aggregated balance

    Raises:
        GridMismatchError: if the waveforms do not share a grid
    """
    audits = [energy_audit(p, w, external_only=True) for p, w in zip(phdaes, waveforms)]
    total = audits[0]
    for audit in audits[1:]:
        total = total + audit

    if defect is not None:
        total = total + EnergyAudit(
            total.times,
            np.zeros_like(total.delta_h),
            np.zeros_like(total.delta_h),
            np.zeros_like(total.delta_h),
            defect,
        )
    return total


def coupling_power(phdaes, waveforms):
    r"""Interval-wise energy :math:`\int \sum_i \hat y_i^T \hat u_i\,dt` exchanged at the coupling ports."""
    total = None
    for phdae, w in zip(phdaes, waveforms):
        ports = slice(0, phdae.coupling_ports)
        p = np.sum((w.efforts @ phdae.B[:, ports]) * w.inputs[:, ports], axis=1)
        part = _trapezoid(w.times, p)
        total = part if total is None else total + part
    return total
