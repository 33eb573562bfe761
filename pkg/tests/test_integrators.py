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
Unit tests for the :mod:`phcircuit._integrator` module and the reference
integrator plugins.
"""
import pytest
import numpy as np

from phcircuit._integrator import (
    IndexWarning,
    InitNewtonFailure,
    NewtonConfig,
    NewtonDivergence,
    consistent_init,
    newton_solve,
    sample_inputs,
)
from phcircuit.integrators import ImplicitEuler, Trapezoidal, step_implicit_euler
from phcircuit.phdae import PhDae, assemble_model1, assemble_model2
from phcircuit.topology import MODEL1, MODEL2, classify_index
from phcircuit.waveform import TimeGrid


#: corpus circuits of index one in both formulations
INDEX_ONE = [
    "rc",
    "lc",
    "rlc_sin",
    "current_driven",
    "ladder",
    "nonlinear",
    "bridge",
    "inductive_source",
]

#: step sizes of the convergence order fits
ORDER_STEPS = [0.05, 0.025, 0.0125, 0.00625]


def rc_reference(h, steps, theta):
    """Charge of the RC circuit (R = C = 1, DC 1 V) under the theta scheme."""
    q = [0.0]
    for _ in range(steps):
        q.append((q[-1] * (1 - (1 - theta) * h) + h) / (1 + theta * h))
    return np.array(q)


def constant_system(value):
    """A scalar algebraic system ``0 = u`` with constant input ``value``."""
    labels = {
        "state": ["x"],
        "effort": ["x"],
        "equation": ["eq"],
        "input": ["u"],
        "output": ["y"],
    }
    return PhDae(
        [[0.0]],
        [[0.0]],
        [[1.0]],
        [0],
        [None],
        [[0.0]],
        np.zeros((1, 0)),
        [],
        np.zeros((0, 1)),
        [],
        labels,
        inputs=lambda t: [value],
    )


class TestNewton:
    """Tests for the damped Newton iteration."""

    def test_config(self):
        """Test the option defaults and validation."""
        config = NewtonConfig()
        assert config.max_iter == 50
        assert config.min_damping == 2.0 ** -20

        assert NewtonConfig.from_config(None, abs_tol=1e-6).abs_tol == 1e-6

        with pytest.raises(ValueError, match="must be positive"):
            NewtonConfig(abs_tol=0)

    def test_square_root(self):
        """Test a scalar nonlinear equation."""
        x, it = newton_solve(
            lambda x: x ** 2 - 2, lambda x: np.array([[2 * x[0]]]), np.array([1.0])
        )
        assert x[0] == pytest.approx(np.sqrt(2), abs=1e-10)
        assert 0 < it < 10

    def test_singular(self):
        """Test that a singular Newton matrix raises."""
        with pytest.raises(NewtonDivergence, match="singular"):
            newton_solve(lambda x: x ** 2 + 1, lambda x: np.array([[2 * x[0]]]), np.array([0.0]))

    def test_error_class(self):
        """Test that failures raise the requested exception class."""
        with pytest.raises(InitNewtonFailure):
            newton_solve(
                lambda x: x ** 2 + 1,
                lambda x: np.array([[2 * x[0]]]),
                np.array([1.0]),
                error=InitNewtonFailure,
            )


class TestConsistentInit:
    """Tests for the consistent initialization."""

    def test_rc(self, build):
        """Test the algebraic coordinates of the RC circuit."""
        phdae = assemble_model1(build("rc"))
        x = consistent_init(phdae)

        assert x[phdae.index_of("q[C1]")] == 0
        assert x[phdae.index_of("e[1]")] == pytest.approx(1.0)
        assert x[phdae.index_of("e[2]")] == pytest.approx(0.0)
        assert abs(x[phdae.index_of("j[V1]")]) == pytest.approx(1.0)

    def test_differential_part_frozen(self, build):
        """Test that the guess of the differential coordinates is kept."""
        phdae = assemble_model1(build("rc"))
        x = consistent_init(phdae, guess=[0.25, 0.0, 0.0, 0.0])

        assert x[0] == 0.25
        assert x[phdae.index_of("e[2]")] == pytest.approx(0.25)

    def test_failure(self):
        """Test that an unsolvable algebraic equation raises."""
        with pytest.raises(InitNewtonFailure, match="No consistent initial value"):
            consistent_init(constant_system(1.0))

    def test_index_two(self, build):
        """Test that index-two systems warn but initialize from a consistent guess."""
        phdae = assemble_model1(build("cv_loop"))
        assert phdae.labels["state"] == ["q[C1]", "e[1]", "j[V1]"]

        with pytest.warns(IndexWarning, match="CVLoop"):
            waveform = ImplicitEuler().integrate(
                phdae, TimeGrid(0, 0.1, 0.05), guess=[1.0, 0.0, 0.0]
            )

        assert np.allclose(waveform.column("e[1]"), 1.0)


class TestRC:
    """Tests against the closed-form recurrences of the RC circuit."""

    @pytest.mark.parametrize("integrator, theta", [(ImplicitEuler(), 1.0), (Trapezoidal(), 0.5)])
    def test_recurrence(self, build, integrator, theta):
        """Test the charge against the recurrence of the scheme."""
        phdae = assemble_model1(build("rc"))
        waveform = integrator.integrate(phdae, TimeGrid(0, 1, 0.1))

        expected = rc_reference(0.1, 10, theta)
        assert np.allclose(waveform.column("q[C1]"), expected, atol=1e-9)
        assert np.allclose(waveform.column("e[2]"), expected, atol=1e-9)
        assert np.allclose(waveform.column("e[1]"), 1.0)

    @pytest.mark.parametrize("integrator, order", [(ImplicitEuler(), 1), (Trapezoidal(), 2)])
    def test_order(self, build, integrator, order):
        """Test the convergence order at t = 1 by a fit over four step sizes."""
        phdae = assemble_model1(build("rc"))
        errors = []
        for h in ORDER_STEPS:
            q = integrator.integrate(phdae, TimeGrid(0, 1, h)).column("q[C1]")[-1]
            errors.append(abs(q - (1 - np.exp(-1))))

        slope = np.polyfit(np.log(ORDER_STEPS), np.log(errors), 1)[0]
        assert slope == pytest.approx(order, abs=0.2)

    def test_single_step(self, build):
        """Test the single step helper."""
        phdae = assemble_model1(build("rc"))
        x1 = step_implicit_euler(phdae, consistent_init(phdae), 0.0, 0.1)
        assert x1[0] == pytest.approx(0.1 / 1.1)

    def test_array_inputs(self, build):
        """Test that sampled inputs replace the default inputs."""
        phdae = assemble_model1(build("rc"))
        grid = TimeGrid(0, 0.3, 0.1)

        expected = Trapezoidal().integrate(phdae, grid)
        waveform = Trapezoidal().integrate(phdae, grid, inputs=np.ones((grid.nodes, 1)))
        assert np.allclose(waveform.states, expected.states)

        with pytest.raises(ValueError, match="Expected 1 inputs"):
            sample_inputs(phdae, grid, np.zeros((grid.nodes, 3)))


class TestFormulations:
    """Tests comparing the two formulations of the same circuit."""

    @pytest.mark.parametrize("name", INDEX_ONE)
    def test_models_agree(self, build, name):
        """Test that both formulations give the same shared coordinates."""
        circuit = build(name)
        assert classify_index(circuit, MODEL1).index == 1
        assert classify_index(circuit, MODEL2).index == 1

        grid = TimeGrid(0, 0.5, 0.05)
        first = Trapezoidal().integrate(assemble_model1(circuit), grid)
        second = Trapezoidal().integrate(assemble_model2(circuit), grid)

        shared = [s for s in first.labels["state"] if s in second.labels["state"]]
        assert any(s.startswith("q[") for s in shared)
        for label in shared:
            assert np.allclose(first.column(label), second.column(label), atol=1e-8), label


class TestEnergy:
    """Tests for the energy behaviour of the schemes on the LC circuit."""

    def lc(self, build, integrator):
        phdae = assemble_model1(build("lc"))
        waveform = integrator.integrate(phdae, TimeGrid(0, 10, 0.1), guess=[1.0, 0.0, 0.0])
        return np.array([phdae.hamiltonian(x) for x in waveform.states])

    def test_trapezoidal_conserves(self, build):
        """Test that the trapezoidal rule conserves the Hamiltonian."""
        H = self.lc(build, Trapezoidal())
        assert H[0] == pytest.approx(0.5)
        assert np.allclose(H, 0.5, atol=1e-9)

    def test_euler_dissipates(self, build):
        """Test that implicit Euler decreases the Hamiltonian."""
        H = self.lc(build, ImplicitEuler())
        assert np.all(np.diff(H) < 0)
        assert H[-1] < 0.5 * H[0]

    def test_ten_periods(self, build):
        """Test the energy drift of the trapezoidal rule over ten periods of the LC circuit."""
        phdae = assemble_model1(build("lc"))
        period = 2 * np.pi
        grid = TimeGrid(0, 10 * period, period / 200)
        waveform = Trapezoidal().integrate(phdae, grid, guess=[1.0, 0.0, 0.0])

        H = np.array([phdae.hamiltonian(x) for x in waveform.states])
        assert grid.nodes == 2001
        assert np.max(np.abs(H - H[0])) / H[0] <= 1e-6
        assert waveform.column("q[C1]")[-1] == pytest.approx(1.0, abs=1e-2)

    @pytest.mark.parametrize("integrator, order", [(ImplicitEuler(), 1), (Trapezoidal(), 2)])
    def test_order(self, build, integrator, order):
        """Test the convergence order against q(t) = cos t of the LC circuit."""
        phdae = assemble_model1(build("lc"))
        errors = []
        for h in ORDER_STEPS:
            waveform = integrator.integrate(phdae, TimeGrid(0, 1, h), guess=[1.0, 0.0, 0.0])
            errors.append(abs(waveform.column("q[C1]")[-1] - np.cos(1)))

        slope = np.polyfit(np.log(ORDER_STEPS), np.log(errors), 1)[0]
        assert slope == pytest.approx(order, abs=0.2)

    def test_nonlinear(self, build):
        """Test that a nonlinear circuit integrates with finite values."""
        phdae = assemble_model1(build("nonlinear"))
        waveform = Trapezoidal().integrate(phdae, TimeGrid(0, 1, 0.01))
        assert waveform.is_finite()

    def test_step_failure(self):
        """Test that a failed step reports its index."""
        with pytest.raises(InitNewtonFailure):
            ImplicitEuler().integrate(constant_system(1.0), TimeGrid(0, 1, 0.5))

        with pytest.raises(NewtonDivergence) as e:
            ImplicitEuler().integrate(constant_system(1.0), TimeGrid(0, 1, 0.5), x0=[0.0])
        assert e.value.step == 1
