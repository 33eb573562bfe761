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
This module contains the :class:`Integrator` abstract base class, the damped
Newton solver shared by all integrators, and the consistent initialization
of PH-DAEs.

One-step schemes are parametrized by a weight :math:`\theta`. With
:math:`P_1` the orthogonal projector onto :math:`\operatorname{im}E`,
:math:`P_2 = I - P_1` and :math:`F(x, t) = Jz(x) - r(z(x)) + Bu(t)`, a step
solves

.. math::

    E\frac{x_{n+1}-x_n}{h} = (\theta P_1 + P_2) F(x_{n+1}, t_{n+1})
        + (1-\theta) P_1 F(x_n, t_n),

so that the algebraic equations always hold at the new time point.
"""
# pylint: disable=too-many-arguments
import abc
from collections import namedtuple
import logging as log
import warnings

import numpy as np
import scipy.linalg

from .laws import NonConvergenceError
from .waveform import Waveform

log.getLogger()


#: float: relative pivot size below which a Newton matrix is considered singular
PIVOT_TOL = 1e-14


class IntegratorError(Exception):
    """Exception raised by an :class:`Integrator` when a time step or the
    initialization fails, or when an integrator cannot be loaded.

    Args:
        message (str): the diagnostic
        residual (float): the last residual norm
        iterations (int): the number of Newton iterations performed
        step (int): the index of the failed time step
    """

    def __init__(self, message, residual=None, iterations=None, step=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.step = step


class NewtonDivergence(IntegratorError):
    """Exception raised when the Newton iteration of a time step fails."""


class InitNewtonFailure(IntegratorError):
    """Exception raised when no consistent initial value is found."""


class IndexWarning(RuntimeWarning):
    """Warning issued when a system of index two is simulated."""


class NewtonConfig(namedtuple("NewtonConfig", ["abs_tol", "rel_tol", "max_iter", "min_damping"])):
    """Options of the damped Newton iteration.

    Args:
        abs_tol (float): absolute tolerance of the residual and the update
        rel_tol (float): relative tolerance of the update
        max_iter (int): maximal number of iterations
        min_damping (float): smallest damping factor of the halving line search

    Raises:
        ValueError: if an option is not positive
    """

    __slots__ = ()

    def __new__(cls, abs_tol=1e-10, rel_tol=1e-8, max_iter=50, min_damping=2.0 ** -20):
        if min(abs_tol, rel_tol, max_iter, min_damping) <= 0:
            raise ValueError("Newton tolerances, iteration count and damping must be positive.")
        return super().__new__(cls, float(abs_tol), float(rel_tol), int(max_iter), float(min_damping))

    @classmethod
    def from_config(cls, config=None, section="newton", **kwargs):
        """Options from a configuration section, overridden by keyword arguments.

        Args:
            config (Configuration): the configuration; the built-in defaults if ``None``
            section (str): the configuration section

        Returns:
            NewtonConfig: the options
        """
        options = {}
        if config is not None:
            options.update(config[section] or {})
        options.update(kwargs)
        return cls(**{k: v for k, v in options.items() if k in cls._fields})


def _solve(A, b, error, **info):
    """Solve ``A x = b`` by LU decomposition with partial pivoting."""
    if A.size == 0:
        return np.zeros(A.shape[1])

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A)

    scale = max(np.linalg.norm(A, np.inf), np.finfo(float).tiny)
    if np.min(np.abs(np.diag(lu))) < PIVOT_TOL * scale:
        raise error("The Newton matrix is singular.", **info)

    return scipy.linalg.lu_solve((lu, piv), b)


def _norm(v):
    return float(np.max(np.abs(v))) if len(v) else 0.0


def _safe_residual(residual, x):
    try:
        R = residual(x)
    except NonConvergenceError:
        return None, np.inf
    n = _norm(R)
    return R, (n if np.isfinite(n) else np.inf)


def newton_solve(residual, jacobian, x0, config=None, error=NewtonDivergence, step=None):
    r"""Damped Newton iteration for :math:`R(x) = 0`.

    Every iteration solves :math:`R'(x)\delta = -R(x)` by LU decomposition
    and halves the step length until the residual norm decreases.

    The iteration stops when :math:`\|R(x)\|_\infty \leq` ``abs_tol`` or
    :math:`\|\delta\|_\infty \leq` ``abs_tol`` :math:`+` ``rel_tol``
    :math:`\|x\|_\infty`.

    Args:
        residual (callable): the map :math:`x\mapsto R(x)`
        jacobian (callable): the map :math:`x\mapsto R'(x)`
        x0 (array): the initial iterate
        config (NewtonConfig): the options
        error (type): the exception class raised on failure
        step (int): the time step index reported on failure

    Returns:
        tuple[array, int]: the solution and the number of iterations

    Raises:
        IntegratorError: of class ``error`` if the matrix is singular, the
            line search fails or the iteration count is exceeded
    """
    config = config or NewtonConfig()
    x = np.array(x0, dtype=float)
    R, norm = _safe_residual(residual, x)

    if R is None:
        raise error("The residual cannot be evaluated at the initial iterate.", step=step)

    for it in range(1, config.max_iter + 1):
        if norm <= config.abs_tol:
            return x, it - 1

        delta = _solve(jacobian(x), -R, error, residual=norm, iterations=it, step=step)

        if _norm(delta) <= config.abs_tol + config.rel_tol * _norm(x):
            return x + delta, it

        damping = 1.0
        while True:
            x_new = x + damping * delta
            R_new, norm_new = _safe_residual(residual, x_new)
            if norm_new < norm or norm_new <= config.abs_tol:
                break
            damping /= 2
            if damping < config.min_damping:
                raise error(
                    "The Newton line search failed with residual {:.3e}.".format(norm),
                    residual=norm,
                    iterations=it,
                    step=step,
                )

        log.debug("Newton iteration %d: residual %.3e, damping %g", it, norm_new, damping)
        x, R, norm = x_new, R_new, norm_new

    if norm <= config.abs_tol:
        return x, config.max_iter

    raise error(
        "Newton's method did not converge in {} iterations; residual {:.3e}.".format(
            config.max_iter, norm
        ),
        residual=norm,
        iterations=config.max_iter,
        step=step,
    )


def _warn_index(phdae):
    report = phdae.index_report
    if report is not None and report.index == 2:
        warnings.warn(
            "Simulating a system of index 2 ({}); algebraic constraints may drift.".format(
                ", ".join(report.kinds) or report.model
            ),
            IndexWarning,
        )


def consistent_init(phdae, guess=None, t0=0.0, u0=None, config=None):
    r"""Compute consistent initial values.

    The differential coordinates (nonzero columns of :math:`E`) are frozen
    at ``guess``; the algebraic coordinates are determined by a Gauss-Newton
    iteration on the algebraic equations :math:`Q_2^T F(x, t_0) = 0`, with
    :math:`Q_2` an orthonormal basis of :math:`\ker E^T`.

    Args:
        phdae (PhDae): the system
        guess (array): initial guess; zero if not given
        t0 (float): initial time
        u0 (array): input at ``t0``; the default input of ``phdae`` if not given
        config (NewtonConfig): Newton options

    Returns:
        array: the consistent initial state

    Raises:
        InitNewtonFailure: if the algebraic equations cannot be solved
    """
    config = config or NewtonConfig()
    _warn_index(phdae)

    n = phdae.E.shape[1]
    x = np.zeros(n) if guess is None else np.array(guess, dtype=float)
    u0 = phdae.input_vector(t0) if u0 is None else np.asarray(u0, dtype=float)

    Q2 = phdae.cokernel_basis
    alg = phdae.algebraic_states

    if Q2.shape[1] == 0:
        return x

    def residual(xa):
        y = x.copy()
        y[alg] = xa
        return Q2.T @ phdae.rhs(y, u0)

    def jacobian(xa):
        y = x.copy()
        y[alg] = xa
        return (Q2.T @ phdae.rhs_jacobian(y))[:, alg]

    xa = x[alg]
    R, norm = _safe_residual(residual, xa)
    it = 0

    while norm > config.abs_tol:
        it += 1
        if it > config.max_iter or R is None:
            break

        delta = scipy.linalg.lstsq(jacobian(xa), -R)[0]

        damping = 1.0
        while damping >= config.min_damping:
            R_new, norm_new = _safe_residual(residual, xa + damping * delta)
            if norm_new < norm:
                break
            damping /= 2
        else:
            break

        xa, R, norm = xa + damping * delta, R_new, norm_new
        log.debug("Initialization iteration %d: residual %.3e", it, norm)

    if not norm <= config.abs_tol:
        raise InitNewtonFailure(
            "No consistent initial value found; algebraic residual {:.3e} after {} "
            "iterations.".format(norm, it),
            residual=norm,
            iterations=it,
        )

    x[alg] = xa
    return x


def theta_step(phdae, x_n, t_n, t_next, u_n, u_next, theta, config=None, step=None):
    r"""One step of the projected :math:`\theta` scheme.

    Args:
        phdae (PhDae): the system
        x_n (array): the state at ``t_n``
        t_n (float): the current time
        t_next (float): the next time
        u_n (array): the input at ``t_n``
        u_next (array): the input at ``t_next``
        theta (float): the weight of the new time point, :math:`0 < \theta \leq 1`
        config (NewtonConfig): Newton options
        step (int): index of the step, reported on failure

    Returns:
        array: the state at ``t_next``

    Raises:
        NewtonDivergence: if the Newton iteration fails
    """
    h = t_next - t_n
    x_n = np.asarray(x_n, dtype=float)
    E = phdae.E

    if theta == 1:
        P_theta = None
        explicit = 0.0
    else:
        Q1 = phdae.range_basis
        P1 = Q1 @ Q1.T
        P_theta = theta * P1 + (np.eye(E.shape[0]) - P1)
        explicit = (1 - theta) * P1 @ phdae.rhs(x_n, u_n)

    def residual(x):
        F = phdae.rhs(x, u_next)
        if P_theta is not None:
            F = P_theta @ F
        return E @ (x - x_n) / h - F - explicit

    def jacobian(x):
        dF = phdae.rhs_jacobian(x)
        if P_theta is not None:
            dF = P_theta @ dF
        return E / h - dF

    return newton_solve(residual, jacobian, x_n, config, NewtonDivergence, step)[0]


def sample_inputs(phdae, grid, inputs=None):
    """Input samples on the grid nodes.

    Args:
        phdae (PhDae): the system
        grid (TimeGrid): the grid
        inputs (None, callable or array): ``None`` for the default inputs of
            ``phdae``, a map ``t -> u``, or a ``nodes x m`` array of samples

    Returns:
        array: ``nodes x m`` input samples
    """
    m = phdae.B.shape[1]
    if inputs is None:
        inputs = phdae.input_vector
    if callable(inputs):
        return np.array([inputs(t) for t in grid.times], dtype=float).reshape(grid.nodes, m)

    samples = np.asarray(inputs, dtype=float).reshape(grid.nodes, -1)
    if samples.shape[1] != m:
        raise ValueError("Expected {} inputs per node, got {}.".format(m, samples.shape[1]))
    return samples


class Integrator(abc.ABC):
    """Abstract base class for PHCircuit integrators.

    Keyword Args:
        abs_tol (float): absolute Newton tolerance
        rel_tol (float): relative Newton tolerance
        max_iter (int): maximal number of Newton iterations per step
        min_damping (float): smallest damping factor of the line search
    """

    def __init__(self, **kwargs):
        self.newton = NewtonConfig(
            **{k: v for k, v in kwargs.items() if k in NewtonConfig._fields}
        )

    def __repr__(self):
        """String representation."""
        return "<{}.{}: {}>".format(self.__module__, self.__class__.__name__, self.short_name)

    def __str__(self):
        """Verbose string representation."""
        return "{}\nShort name: {}\nAPI version: {}\nPlugin version: {}\nAuthor: {}".format(
            self.name, self.short_name, self.phcircuit_requires, self.version, self.author
        )

    @property
    @abc.abstractmethod
    def name(self):
        """The full name of the integrator."""

    @property
    @abc.abstractmethod
    def short_name(self):
        """Returns the string used to load the integrator."""

    @property
    @abc.abstractmethod
    def phcircuit_requires(self):
        """The current API version that the integrator plugin was made for."""

    @property
    @abc.abstractmethod
    def version(self):
        """The current version of the plugin."""

    @property
    @abc.abstractmethod
    def author(self):
        """The author(s) of the plugin."""

    @property
    @abc.abstractmethod
    def theta(self):
        """The weight of the new time point in the one-step scheme."""

    def consistent_init(self, phdae, guess=None, t0=0.0, u0=None):
        """Consistent initial values, see :func:`~.consistent_init`."""
        return consistent_init(phdae, guess, t0, u0, self.newton)

    def step(self, phdae, x_n, t_n, t_next, u_n, u_next, index=None):
        """Advance the state ``x_n`` from ``t_n`` to ``t_next``.

        Args:
            phdae (PhDae): the system
            x_n (array): the state at ``t_n``
            t_n (float): the current time
            t_next (float): the next time
            u_n (array): the input at ``t_n``
            u_next (array): the input at ``t_next``
            index (int): the step index, reported on failure

        Returns:
            array: the state at ``t_next``
        """
        return theta_step(phdae, x_n, t_n, t_next, u_n, u_next, self.theta, self.newton, index)

    def integrate(self, phdae, grid, inputs=None, x0=None, guess=None):
        """Integrate a PH-DAE on a time grid.

        Args:
            phdae (PhDae): the system
            grid (TimeGrid): the time grid
            inputs (None, callable or array): the inputs, see :func:`~.sample_inputs`
            x0 (array): the initial state, used as is; if not given, consistent
                initial values are computed from ``guess``
            guess (array): the guess for the consistent initialization

        Returns:
            Waveform: the sampled solution

        Raises:
            InitNewtonFailure: if the initialization fails
            NewtonDivergence: if a step fails; ``step`` holds the step index
        """
        u = sample_inputs(phdae, grid, inputs)
        times = grid.times

        if x0 is None:
            x = self.consistent_init(phdae, guess, times[0], u[0])
        else:
            _warn_index(phdae)
            x = np.array(x0, dtype=float)

        states = np.empty((grid.nodes, phdae.E.shape[1]))
        states[0] = x

        for n in range(1, grid.nodes):
            try:
                x = self.step(phdae, x, times[n - 1], times[n], u[n - 1], u[n], index=n)
            except NewtonDivergence as e:
                raise NewtonDivergence(
                    "Step {} at t={:g} failed: {}".format(n, times[n], e),
                    residual=e.residual,
                    iterations=e.iterations,
                    step=n,
                ) from e
            states[n] = x

        efforts = np.array([phdae.effort(x) for x in states]).reshape(grid.nodes, -1)
        outputs = (efforts @ phdae.B).reshape(grid.nodes, -1)

        log.debug("Integrated %s over %d nodes with %s.", phdae.name, grid.nodes, self.short_name)
        return Waveform(grid, states, efforts, outputs, u, phdae.labels)
