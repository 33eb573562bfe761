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
This is the top level module from which all basic functions and classes of
PHCircuit can be directly imported.
"""
from importlib.metadata import entry_points

from semantic_version import Version, Spec

from .about import about
from .circuit_graph import (
    CircuitError,
    CircuitGraph,
    NotConnectedError,
    SoundnessViolation,
    build_circuit,
)
from .configuration import Configuration
from .coupling import (
    CouplingSpanError,
    JointPhDae,
    PartitionedSystem,
    PartitionError,
    PartitionNotConnectedError,
    assemble_joint_condensed,
    assemble_multiply_coupled,
    check_interconnection,
    interconnection_matrix,
    split_circuit,
)
from .energy import EnergyAudit, GridMismatchError, coupled_energy_balance, energy_audit
from .laws import (
    CapacitorLaw,
    InductorLaw,
    LawError,
    NonConvergenceError,
    QuadratureError,
    ResistorLaw,
)
from .netlist import NetlistError, parse_netlist, print_netlist, read_netlist
from .phdae import (
    PhDae,
    assemble_model1,
    assemble_model2,
    check_structure,
    hamiltonian,
    hamiltonian_gradient_check,
)
from .topology import MODEL1, MODEL2, IndexReport, classify_coupled, classify_index
from .waveform import TimeGrid, Waveform, read_waveform_csv, write_waveform_csv
from ._integrator import (
    IndexWarning,
    InitNewtonFailure,
    Integrator,
    IntegratorError,
    NewtonConfig,
    NewtonDivergence,
    consistent_init,
)
from .integrators import ImplicitEuler, Trapezoidal
from ._version import __version__


# Look for an existing configuration file
default_config = Configuration("config.toml")


def _installed(group):
    try:
        found = entry_points(group=group)
    except TypeError:
        found = entry_points().get(group, [])
    return {entry.name: entry for entry in found}


# reference integrators, overridden by installed plugins of the same name
plugin_integrators = {ImplicitEuler.short_name: ImplicitEuler, Trapezoidal.short_name: Trapezoidal}
plugin_integrators.update(_installed("phcircuit.integrators"))


def integrator(name, **kwargs):
    r"""Load an :class:`~.Integrator` plugin and return the instance.

    PHCircuit comes with two integrators:

    * :mod:`'euler' <phcircuit.integrators.implicit_euler>`: the implicit
      Euler method, of order one.

    * :mod:`'trapezoidal' <phcircuit.integrators.trapezoidal>`: the
      trapezoidal rule on the differential part of the equations, of order two.

    Options are taken from the keyword arguments, then from the section of
    the integrator in the configuration, then from the ``[newton]`` section,
    then from the ``[main]`` section.

    Args:
        name (str): the short name of the integrator

    Keyword Args:
        config (phcircuit.Configuration): a PHCircuit configuration object
        abs_tol (float): absolute Newton tolerance
        rel_tol (float): relative Newton tolerance
        max_iter (int): maximal number of Newton iterations per step
        min_damping (float): smallest damping factor of the line search

    Raises:
        IntegratorError: if the integrator does not exist or requires
            another PHCircuit version
    """
    if name in plugin_integrators:
        options = {}

        config = kwargs.pop("config", default_config)

        if config:
            options.update(config.options("main", "newton", name))

        options.update(kwargs)

        plugin = plugin_integrators[name]
        integrator_class = plugin.load() if hasattr(plugin, "load") else plugin

        if Version(version()) not in Spec(integrator_class.phcircuit_requires):
            raise IntegratorError(
                "The {} integrator requires PHCircuit versions {}, however PHCircuit "
                "version {} is installed.".format(
                    name, integrator_class.phcircuit_requires, __version__
                )
            )

        return integrator_class(**options)

    raise IntegratorError(
        "Integrator {} does not exist. Make sure the required plugin is installed.".format(name)
    )


def integrate(phdae, grid, inputs=None, method=None, x0=None, guess=None, **kwargs):
    """Integrate a PH-DAE on a time grid.

    Args:
        phdae (PhDae): the system
        grid (TimeGrid): the time grid
        inputs (None, callable or array): the inputs; the default inputs of ``phdae`` if not given
        method (str): short name of the integrator; the ``[main]`` integrator of the
            configuration, or ``"trapezoidal"``, if not given
        x0 (array): initial state, used as is
        guess (array): guess for the consistent initialization

    Keyword Args:
        config (phcircuit.Configuration): a PHCircuit configuration object
        abs_tol (float): absolute Newton tolerance
        rel_tol (float): relative Newton tolerance

    Returns:
        Waveform: the sampled solution
    """
    config = kwargs.get("config", default_config)
    method = method or (config["main"].get("integrator") if config else None) or "trapezoidal"
    return integrator(method, **kwargs).integrate(phdae, grid, inputs, x0=x0, guess=guess)


def version():
    """Returns the PHCircuit version number."""
    return __version__
