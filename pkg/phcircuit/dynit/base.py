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
r"""Jacobi-type dynamic iteration.

The time interval is split into windows. On every window, the coupled
subsystems are integrated separately and repeatedly; in sweep :math:`l+1`
every subsystem receives the coupling inputs

.. math:: \hat u^{(l+1)} = -\hat C\,\hat y^{(l)}

computed from the outputs of sweep :math:`l`. The sweeps stop when the
coupling signals change by at most ``wr_tol`` in the maximum norm.
"""
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import json
import logging as log
import time
import warnings

import numpy as np

from phcircuit._integrator import IntegratorError, consistent_init, sample_inputs
from phcircuit.coupling import assemble_joint_condensed
from phcircuit.integrators import Trapezoidal
from phcircuit.waveform import TimeGrid, Waveform, stitch

from .structure import splitting_defect

log.getLogger()


#: str: the Jacobi-type scheme
JACOBI = "jacobi"

#: str: the Gauss-Seidel-type scheme
GAUSS_SEIDEL = "gauss-seidel"

SCHEMES = (JACOBI, GAUSS_SEIDEL)

_ALIASES = {"gs": GAUSS_SEIDEL, "gauss_seidel": GAUSS_SEIDEL, "gaussseidel": GAUSS_SEIDEL}


class DynamicIterationError(Exception):
    """Exception raised when a dynamic iteration cannot be set up or a subsystem fails.

    Args:
        message (str): the diagnostic
        subsystem (int): index of the failing subsystem
        sweep (int): the sweep in which the failure occurred
    """

    def __init__(self, message, subsystem=None, sweep=None):
        super().__init__(message)
        self.subsystem = subsystem
        self.sweep = sweep


class NonConvergedWindow(DynamicIterationError):
    """Exception raised in strict mode when the sweeps of a window do not converge.

    Args:
        message (str): the diagnostic
        window (int): the window index
        update_norm (float): the last update norm of the coupling signals
    """

    def __init__(self, message, window=None, update_norm=None):
        super().__init__(message)
        self.window = window
        self.update_norm = update_norm


class ConvergenceWarning(RuntimeWarning):
    """Warning issued when the sweeps of a window do not converge."""


class WindowConfig(namedtuple("WindowConfig", ["window", "h", "lmax", "wr_tol", "scheme", "workers"])):
    """Options of a dynamic iteration.

    Args:
        window (float): the window length :math:`H_w`
        h (float): the step size inside the windows
        lmax (int): maximal number of sweeps per window
        wr_tol (float): tolerance of the coupling-signal updates
        scheme (str): ``"jacobi"`` or ``"gauss-seidel"`` (alias ``"gs"``)
        workers (int): number of threads running subsystem integrations;
            one per subsystem if ``None``

    Raises:
        ValueError: for invalid options
    """

    __slots__ = ()

    def __new__(cls, window, h, lmax=20, wr_tol=1e-8, scheme=JACOBI, workers=None):
        scheme = _ALIASES.get(str(scheme).lower(), str(scheme).lower())

        if not h > 0 or not window >= h:
            raise ValueError("The step size must be positive and at most the window length.")
        if lmax < 1:
            raise ValueError("At least one sweep per window is required.")
        if not wr_tol > 0:
            raise ValueError("The iteration tolerance must be positive.")
        if scheme not in SCHEMES:
            raise ValueError("Unknown scheme {}; expected one of {}.".format(scheme, SCHEMES))
        if workers is not None and workers < 1:
            raise ValueError("The number of workers must be positive.")

        return super().__new__(
            cls,
            float(window),
            float(h),
            int(lmax),
            float(wr_tol),
            scheme,
            None if workers is None else int(workers),
        )

    @classmethod
    def from_config(cls, config=None, **kwargs):
        """Options from the ``[dynit]`` configuration section, overridden by keyword arguments."""
        options = {}
        if config is not None:
            options.update(config["dynit"] or {})
        options.update({k: v for k, v in kwargs.items() if v is not None})
        return cls(**{k: v for k, v in options.items() if k in cls._fields})


SweepRecord = namedtuple(
    "SweepRecord",
    ["window", "sweep", "update_lambda", "update_potential", "update_norm", "defect", "error", "wall_time"],
)
"""Record of one sweep of a dynamic iteration.

Args:
    window (int): window index
    sweep (int): sweep index, starting at 1
    update_lambda (float): max-norm change of the coupling currents
    update_potential (float): max-norm change of the coupling potentials
    update_norm (float): the larger of both
    defect (float): the splitting defect of the sweep on the window
    error (float or None): max-norm error against a monolithic reference
    wall_time (float): the duration of the sweep in seconds
"""


class IterationTrace:
    """Sweep-by-sweep history of a dynamic iteration."""

    def __init__(self):
        self.records = []
        self.converged = {}

    def __len__(self):
        return len(self.records)

    def __repr__(self):
        return "<IterationTrace: {} windows, {} sweeps>".format(len(self.converged), len(self))

    def append(self, record):
        """Add a sweep record."""
        self.records.append(record)

    def window(self, index):
        """The records of one window."""
        return [r for r in self.records if r.window == index]

    def update_norms(self, index):
        """The update norms of the sweeps of one window."""
        return np.array([r.update_norm for r in self.window(index)])

    def defects(self, index):
        """The splitting defects of the sweeps of one window.

        With two Jacobi subsystems the defects alternate in sign and decay
        over every second sweep rather than from one sweep to the next.
        """
        return np.array([r.defect for r in self.window(index)])

    def contraction_ratios(self, index):
        """Ratios of consecutive update norms within one window."""
        norms = self.update_norms(index)
        with np.errstate(divide="ignore", invalid="ignore"):
            return norms[1:] / norms[:-1]

    def to_dict(self):
        """JSON-serializable trace, one list of sweeps per window."""
        return {
            "windows": [
                {
                    "window": w,
                    "converged": self.converged[w],
                    "sweeps": [
                        {k: v for k, v in r._asdict().items() if k != "window"}
                        for r in self.window(w)
                    ],
                }
                for w in sorted(self.converged)
            ]
        }

    def to_json(self, **kwargs):
        """The trace as a JSON string."""
        return json.dumps(self.to_dict(), **kwargs)


def _constant_waveform(phdae, x, grid, u):
    states = np.tile(np.asarray(x, dtype=float), (grid.nodes, 1))
    efforts = np.tile(phdae.effort(x), (grid.nodes, 1))
    outputs = efforts @ phdae.B
    return Waveform(grid, states, efforts, outputs, u, phdae.labels)


def extrapolate(partitioned, previous, grid):
    """Constant extrapolation of subsystem solutions onto a new window.

    Args:
        partitioned (PartitionedSystem): the split circuit
        previous (list[Waveform or array]): per subsystem, the waveform of the
            previous window or, for the first window, the initial state
        grid (TimeGrid): the grid of the new window

    Returns:
        list[Waveform]: per subsystem, the last value held constant over ``grid``
    """
    result = []
    for phdae, prev in zip(partitioned.phdaes, previous):
        if isinstance(prev, Waveform):
            x, u = prev.states[-1], prev.inputs[-1]
        else:
            x, u = prev, phdae.input_vector(grid.t0)
        result.append(_constant_waveform(phdae, x, grid, np.tile(u, (grid.nodes, 1))))
    return result


def initial_states(partitioned, t0=0.0, guess=None, newton=None):
    """Consistent initial states of the subsystems, from the joint system.

    Args:
        partitioned (PartitionedSystem): the split circuit
        t0 (float): the initial time
        guess (array): guess of the joint state
        newton (NewtonConfig): Newton options

    Returns:
        list[array]: the subsystem states
    """
    joint = assemble_joint_condensed(partitioned)
    return joint.scatter(consistent_init(joint, guess, t0, config=newton))


def merge_waveforms(joint, waveforms):
    """Assemble the waveform of the joint system from subsystem waveforms.

    Args:
        joint (JointPhDae): the condensed system
        waveforms (list[Waveform]): the subsystem waveforms on a common grid

    Returns:
        Waveform: the joint waveform
    """
    grid = waveforms[0].grid
    states = np.array([joint.gather([w.states[n] for w in waveforms]) for n in range(grid.nodes)])
    states = states.reshape(grid.nodes, -1)
    efforts = np.array([joint.effort(x) for x in states]).reshape(grid.nodes, -1)
    return Waveform(
        grid,
        states,
        efforts,
        efforts @ joint.B,
        sample_inputs(joint, grid),
        joint.labels,
    )


class JacobiIteration:
    r"""Jacobi-type dynamic iteration of a partitioned circuit.

    Base class of the other iteration schemes. All subsystems of a sweep
    are integrated concurrently; their results are collected in subsystem
    order, so that the outcome does not depend on the scheduling.

    Args:
        partitioned (PartitionedSystem): the split circuit
        config (WindowConfig): the iteration options
        integrator (Integrator): the integrator of the subsystems; trapezoidal if not given
        order (list[int]): submission order of the subsystem integrations

    Raises:
        DynamicIterationError: if a coupling branch does not touch the last subsystem
    """

    scheme = JACOBI

    def __init__(self, partitioned, config, integrator=None, order=None):
        self.partitioned = partitioned
        self.config = config
        self.integrator = integrator or Trapezoidal()
        self.order = list(order) if order is not None else list(range(partitioned.k))

        if partitioned.k > 1:
            A_last = np.asarray(partitioned.subsystems[-1].A_lambda)
            loose = [
                name for j, name in enumerate(partitioned.coupling_names) if not np.any(A_last[:, j])
            ]
            if loose:
                raise DynamicIterationError(
                    "The coupling branches {} do not touch the last subsystem; their currents "
                    "are undetermined there.".format(", ".join(loose)),
                    subsystem=partitioned.k - 1,
                )

    def coupling_inputs(self, i, outputs):
        r"""Coupling inputs :math:`\hat u_i = -\sum_j \hat C_{ij}\hat y_j` of subsystem ``i``.

        Args:
            i (int): the subsystem
            outputs (list[array]): per subsystem, the ``nodes x n_lambda`` coupling outputs

        Returns:
            array: the ``nodes x n_lambda`` coupling inputs
        """
        k = self.partitioned.k
        if i < k - 1:
            return -outputs[-1]
        return np.sum(outputs[:-1], axis=0)

    def coupling_outputs(self, waveforms):
        """Per subsystem, the coupling outputs of a set of waveforms."""
        n_lam = self.partitioned.n_lambda
        return [w.outputs[:, :n_lam] for w in waveforms]

    def solve(self, i, grid, u_hat, x0, sweep=None):
        """Integrate subsystem ``i`` with prescribed coupling inputs.

        Args:
            i (int): the subsystem
            grid (TimeGrid): the window grid
            u_hat (array): ``nodes x n_lambda`` coupling inputs
            x0 (array): the initial state
            sweep (int): the sweep index, reported on failure

        Returns:
            Waveform: the subsystem waveform

        Raises:
            DynamicIterationError: if the integration fails
        """
        phdae = self.partitioned.subsystems[i].phdae
        u = sample_inputs(phdae, grid)
        u[:, : phdae.coupling_ports] = u_hat

        try:
            return self.integrator.integrate(phdae, grid, u, x0=x0)
        except IntegratorError as e:
            raise DynamicIterationError(
                "Subsystem {} failed in sweep {}: {}".format(i, sweep, e), subsystem=i, sweep=sweep
            ) from e

    def _run_parallel(self, indices, task):
        ordered = [i for i in self.order if i in indices]
        workers = self.config.workers or max(1, len(ordered))

        if workers == 1 or len(ordered) == 1:
            results = {i: task(i) for i in ordered}
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {i: pool.submit(task, i) for i in ordered}
                results = {i: futures[i].result() for i in ordered}

        return [results[i] for i in sorted(indices)]

    def sweep(self, waveforms, grid, x0s, sweep=None):
        """Perform one sweep on a window.

        Args:
            waveforms (list[Waveform]): the subsystem waveforms of the previous sweep
            grid (TimeGrid): the window grid
            x0s (list[array]): the initial subsystem states of the window
            sweep (int): the sweep index

        Returns:
            list[Waveform]: the subsystem waveforms of the new sweep
        """
        outputs = self.coupling_outputs(waveforms)

        def task(i):
            return self.solve(i, grid, self.coupling_inputs(i, outputs), x0s[i], sweep)

        return self._run_parallel(list(range(self.partitioned.k)), task)

    def update_norms(self, old, new):
        """Max-norm changes of the coupling currents and coupling potentials.

        Returns:
            tuple[float]: the changes of :math:`\\lambda` and of the outputs of subsystems :math:`i < k`
        """
        if self.partitioned.n_lambda == 0:
            return 0.0, 0.0
        d_old, d_new = self.coupling_outputs(old), self.coupling_outputs(new)
        d_lam = float(np.max(np.abs(d_new[-1] - d_old[-1])))
        d_pot = max(float(np.max(np.abs(a - b))) for a, b in zip(d_new[:-1], d_old[:-1]))
        return d_lam, d_pot

    def defect(self, old, new):
        """The splitting defect of a sweep on its window."""
        return splitting_defect(self.partitioned, old, new, self.scheme)

    @staticmethod
    def _reference_error(waveforms, reference, start, stop):
        err = 0.0
        for w in waveforms:
            idx = []
            for l in w.labels["state"]:
                if l not in reference.labels["state"]:
                    l = "j" + l[len("lambda") :] if l.startswith("lambda[") else l
                idx.append(reference.labels["state"].index(l))
            ref = reference.states[start : stop + 1][:, idx]
            err = max(err, float(np.max(np.abs(w.states - ref), initial=0.0)))
        return err

    def run_window(self, grid, previous, x0s, index=0, reference=None, bounds=None):
        """Iterate on one window until the coupling signals converge.

        Args:
            grid (TimeGrid): the window grid
            previous (list[Waveform or array]): the data extrapolated into the window
            x0s (list[array]): the initial subsystem states
            index (int): the window index
            reference (Waveform): a monolithic reference on the global grid
            bounds (tuple[int]): the global node indices of the window

        Returns:
            tuple[list[Waveform], list[SweepRecord], bool]: the last sweep, its
            records and whether the sweeps converged
        """
        current = extrapolate(self.partitioned, previous, grid)
        records = []
        converged = False

        for l in range(1, self.config.lmax + 1):
            tic = time.perf_counter()
            new = self.sweep(current, grid, x0s, sweep=l)
            d_lam, d_pot = self.update_norms(current, new)
            norm = max(d_lam, d_pot)

            error = None
            if reference is not None and bounds is not None:
                error = self._reference_error(new, reference, *bounds)

            records.append(
                SweepRecord(
                    index, l, d_lam, d_pot, norm, self.defect(current, new), error,
                    time.perf_counter() - tic,
                )
            )
            log.debug("Window %d, sweep %d: update %.3e", index, l, norm)

            current = new
            if norm <= self.config.wr_tol:
                converged = True
                break

        return current, records, converged

    def run(self, t0, t_end, guess=None, reference=None, strict=False):
        """Run the windowed dynamic iteration.

        Args:
            t0 (float): the initial time
            t_end (float): the final time
            guess (array): guess for the joint consistent initialization
            reference (Waveform): a monolithic reference solution on the global grid
            strict (bool): raise instead of warning on a non-converged window

        Returns:
            tuple[list[Waveform], IterationTrace]: the stitched subsystem
            waveforms and the iteration history

        Raises:
            NonConvergedWindow: in strict mode, if a window does not converge
        """
        grid = TimeGrid(t0, t_end, self.config.h)
        trace = IterationTrace()

        x0s = initial_states(self.partitioned, t0, guess, self.integrator.newton)
        previous = x0s
        pieces = []

        for w, (start, stop) in enumerate(grid.windows(self.config.window)):
            wgrid = grid.slice(start, stop)
            result, records, converged = self.run_window(
                wgrid, previous, x0s, w, reference, (start, stop)
            )
            for r in records:
                trace.append(r)
            trace.converged[w] = converged

            if not converged:
                norm = records[-1].update_norm
                message = "Window {} did not converge in {} sweeps; last update {:.3e}.".format(
                    w, self.config.lmax, norm
                )
                if strict:
                    raise NonConvergedWindow(message, window=w, update_norm=norm)
                warnings.warn(message, ConvergenceWarning)
            else:
                log.info("Window %d converged after %d sweeps.", w, len(records))

            pieces.append(result)
            previous = result
            x0s = [wf.states[-1] for wf in result]

        waveforms = [stitch([p[i] for p in pieces]) for i in range(self.partitioned.k)]
        return waveforms, trace


def jacobi_sweep(partitioned, waveforms, grid, config, integrator=None, x0s=None):
    """One Jacobi sweep on a window.

    Args:
        partitioned (PartitionedSystem): the split circuit
        waveforms (list[Waveform]): the subsystem waveforms of the previous sweep
        grid (TimeGrid): the window grid
        config (WindowConfig): the iteration options
        integrator (Integrator): the subsystem integrator
        x0s (list[array]): initial states; the first samples of ``waveforms`` if not given

    Returns:
        list[Waveform]: the new subsystem waveforms
    """
    x0s = x0s or [w.states[0] for w in waveforms]
    return JacobiIteration(partitioned, config, integrator).sweep(waveforms, grid, x0s)


def run_dynamic_iteration(partitioned, t0, t_end, config, integrator=None, reference=None, strict=False):
    """Run the windowed dynamic iteration with the scheme selected in ``config``.

    Args:
        partitioned (PartitionedSystem): the split circuit
        t0 (float): the initial time
        t_end (float): the final time
        config (WindowConfig): the iteration options
        integrator (Integrator): the subsystem integrator
        reference (Waveform): a monolithic reference solution
        strict (bool): raise on non-converged windows

    Returns:
        tuple[list[Waveform], IterationTrace]: the stitched waveforms and the trace
    """
    # pylint: disable=import-outside-toplevel,cyclic-import
    from .gauss_seidel import GaussSeidelIteration

    cls = GaussSeidelIteration if config.scheme == GAUSS_SEIDEL else JacobiIteration
    return cls(partitioned, config, integrator).run(t0, t_end, reference=reference, strict=strict)

