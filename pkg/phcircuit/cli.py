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
The ``phcircuit`` command line interface.

.. code-block:: console

    phcircuit analyze  circuit.net --model model1 --out run/
    phcircuit simulate circuit.net --integrator trapezoidal --h 1e-3 --t-end 1 --out run/
    phcircuit cosim    circuit.net --window 0.1 --scheme gs --reference --out run/
    phcircuit audit    circuit.net --waveform run/waveform.csv --out run/

Every run writes JSON results and a ``manifest.json`` with the hash of its
configuration into the output directory. The exit codes are 0 on success,
1 on input errors, 2 for unsound circuits and 3 for non-convergence.
"""
import argparse
from collections import namedtuple
import hashlib
import json
import logging as log
import os
import sys

import numpy as np

import phcircuit
from phcircuit.circuit_graph import CircuitError, build_circuit
from phcircuit.coupling import PartitionError, assemble_joint_condensed, split_circuit
from phcircuit.dynit import (
    DynamicIterationError,
    NonConvergedWindow,
    WindowConfig,
    merge_waveforms,
    run_dynamic_iteration,
)
from phcircuit.energy import coupled_energy_balance, energy_audit
from phcircuit.laws import INVERSION_TOL, QUADRATURE_TOL, LawError
from phcircuit.netlist import NetlistError, read_netlist
from phcircuit.phdae import assemble_model1, assemble_model2
from phcircuit.topology import MODEL1, MODEL2
from phcircuit.waveform import TimeGrid, read_waveform_csv, write_waveform_csv
from phcircuit._integrator import IntegratorError

log.getLogger()


EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNSOUND = 2
EXIT_NONCONVERGED = 3


class UsageError(Exception):
    """Exception raised for invalid command line arguments."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


RunConfig = namedtuple(
    "RunConfig",
    [
        "command",
        "netlist",
        "model",
        "integrator",
        "t0",
        "t_end",
        "h",
        "window",
        "lmax",
        "wr_tol",
        "scheme",
        "workers",
        "out",
        "strict",
        "reference",
        "waveform",
        "inversion_tol",
        "quadrature_tol",
    ],
)
"""The options of one command line run."""


def build_parser():
    """The argument parser of the ``phcircuit`` command."""
    parser = _Parser(
        prog="phcircuit",
        description="Port-Hamiltonian analysis and simulation of circuits.",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("netlist", help="path to the netlist")
        p.add_argument("--model", choices=[MODEL1, MODEL2], default=None, help="circuit formulation")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("-v", "--verbose", action="count", default=0, help="more logging")

    def grid(p):
        p.add_argument("--integrator", default=None, help="short name of the integrator")
        p.add_argument("--t0", type=float, default=0.0, help="initial time")
        p.add_argument("--t-end", type=float, default=None, help="final time")
        p.add_argument("--h", type=float, default=None, help="step size")

    common(sub.add_parser("analyze", help="topology, index and matrices"))

    simulate = sub.add_parser("simulate", help="monolithic simulation")
    common(simulate)
    grid(simulate)

    cosim = sub.add_parser("cosim", help="dynamic iteration of the partitioned circuit")
    common(cosim)
    grid(cosim)
    cosim.add_argument("--window", type=float, default=None, help="window length")
    cosim.add_argument("--scheme", choices=["jacobi", "gs", "gauss-seidel"], default=None)
    cosim.add_argument("--lmax", type=int, default=None, help="maximal sweeps per window")
    cosim.add_argument("--wr-tol", type=float, default=None, help="tolerance of the coupling updates")
    cosim.add_argument("--workers", type=int, default=None, help="threads per sweep")
    cosim.add_argument("--strict", action="store_true", help="fail on non-converged windows")
    cosim.add_argument("--reference", action="store_true", help="compare with the joint system")

    audit = sub.add_parser("audit", help="energy balance of a stored waveform")
    common(audit)
    audit.add_argument("--waveform", required=True, help="waveform CSV written by simulate")
    return parser


def run_config(args, config=None):
    """Validate parsed arguments and fill in configured defaults.

    Args:
        args (argparse.Namespace): the parsed arguments
        config (Configuration): the configuration with the defaults

    Returns:
        RunConfig: the options

    Raises:
        UsageError: for missing files or non-positive numbers
    """
    config = config if config is not None else phcircuit.default_config
    main = config["main"] if config else {}
    dynit = config["dynit"] if config else {}
    laws = config["laws"] if config else {}

    if not os.path.isfile(args.netlist):
        raise UsageError("Netlist {} not found.".format(args.netlist))

    get = lambda name, default=None: getattr(args, name, default)  # pylint: disable=unnecessary-lambda-assignment

    t0 = get("t0", 0.0)
    t_end = get("t_end")
    h = get("h")

    if args.command in ("simulate", "cosim"):
        if t_end is None or h is None:
            raise UsageError("--t-end and --h are required.")
        if not h > 0 or not t_end > t0 or h > t_end - t0:
            raise UsageError("The grid needs 0 < h <= t_end - t0.")

    for name in ("window", "lmax", "wr_tol", "workers"):
        value = get(name)
        if value is not None and not value > 0:
            raise UsageError("--{} must be positive.".format(name.replace("_", "-")))

    integrator = get("integrator") or main.get("integrator", "trapezoidal")
    if args.command in ("simulate", "cosim") and integrator not in phcircuit.plugin_integrators:
        raise UsageError(
            "Unknown integrator {}; installed: {}.".format(
                integrator, ", ".join(sorted(phcircuit.plugin_integrators))
            )
        )

    waveform = get("waveform")
    if waveform is not None and not os.path.isfile(waveform):
        raise UsageError("Waveform {} not found.".format(waveform))

    return RunConfig(
        command=args.command,
        netlist=args.netlist,
        model=args.model or main.get("model", MODEL1),
        integrator=integrator,
        t0=t0,
        t_end=t_end,
        h=h,
        window=get("window") or dynit.get("window"),
        lmax=get("lmax") or dynit.get("lmax", 20),
        wr_tol=get("wr_tol") or dynit.get("wr_tol", 1e-8),
        scheme=get("scheme") or dynit.get("scheme", "jacobi"),
        workers=get("workers") or dynit.get("workers"),
        out=args.out,
        strict=bool(get("strict", False)),
        reference=bool(get("reference", False)),
        waveform=waveform,
        inversion_tol=laws.get("inversion_tol", INVERSION_TOL),
        quadrature_tol=laws.get("quadrature_tol", QUADRATURE_TOL),
    )


def _config_hash(config):
    text = json.dumps(config._asdict(), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _write_json(out, name, data):
    with open(os.path.join(out, name), "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)


def write_manifest(config, outputs):
    """Write ``manifest.json`` into the output directory of a run.

    Args:
        config (RunConfig): the options of the run
        outputs (list[str]): the files written by the run

    Returns:
        dict: the manifest
    """
    manifest = {
        "command": config.command,
        "config": config._asdict(),
        "config_hash": _config_hash(config),
        "version": phcircuit.version(),
        "outputs": sorted(outputs),
    }
    _write_json(config.out, "manifest.json", manifest)
    return manifest


def _load_circuit(config):
    return build_circuit(
        read_netlist(config.netlist),
        inversion_tol=config.inversion_tol,
        quadrature_tol=config.quadrature_tol,
    )


def _assemble(circuit, model):
    return assemble_model2(circuit) if model == MODEL2 else assemble_model1(circuit)


def _matrices(phdae):
    return {
        "labels": phdae.labels,
        "E": phdae.E.tolist(),
        "J": phdae.J.tolist(),
        "B": phdae.B.tolist(),
        "K_V": phdae.K_V.tolist(),
    }


def cmd_analyze(config):
    """Classify the index of a circuit and dump its PH-DAE matrices.

    Writes ``index.json`` and ``matrices.json``, and ``split.json`` for a
    partitioned circuit.

    Returns:
        dict: the results
    """
    circuit = _load_circuit(config)
    phdae = _assemble(circuit, config.model)
    report = phdae.index_report

    result = {"index": report.to_dict(), "dims": list(phdae.dims)}
    outputs = {"index.json": result["index"], "matrices.json": _matrices(phdae)}

    print("Model:  {}".format(report.model))
    print("Index:  {}".format(report.index))
    for d in report.defects:
        print("  {:<8} edges: {}  vertices: {}".format(d.kind, ", ".join(d.edges), ", ".join(d.vertices)))

    if len(set(circuit.partitions.values())) > 1:
        partitioned = split_circuit(circuit)
        result["split"] = partitioned.to_dict()
        result["coupled_index"] = partitioned.coupled_index.to_dict()
        outputs["split.json"] = {"split": result["split"], "index": result["coupled_index"]}
        for name, ok in sorted(partitioned.coupled_index.index_one.items()):
            print("  ({}) index one: {}".format(name, ok))

    if config.out:
        for name, data in outputs.items():
            _write_json(config.out, name, data)
        write_manifest(config, list(outputs))

    return result


def _subspace_violations(phdae, waveform):
    return int(sum(not phdae.in_subspace(z) for z in waveform.efforts))


def cmd_simulate(config):
    """Simulate a circuit monolithically.

    Writes ``waveform.csv`` and ``audit.json``.

    Returns:
        dict: the energy audit and the number of samples outside the constraint subspace
    """
    circuit = _load_circuit(config)
    phdae = _assemble(circuit, config.model)
    grid = TimeGrid(config.t0, config.t_end, config.h)

    waveform = phcircuit.integrator(config.integrator).integrate(phdae, grid)
    audit = energy_audit(phdae, waveform)

    result = audit.to_dict()
    result["subspace_violations"] = _subspace_violations(phdae, waveform)

    print("Simulated {} nodes with {}.".format(grid.nodes, config.integrator))
    print("Energy: dH={delta_h:.6e}  dissipated={dissipation:.6e}  supplied={supplied:.6e}  "
          "residual={residual:.3e}".format(**result))

    if config.out:
        write_waveform_csv(waveform, os.path.join(config.out, "waveform.csv"))
        _write_json(config.out, "audit.json", result)
        write_manifest(config, ["waveform.csv", "audit.json"])

    return result


def cmd_cosim(config):
    """Co-simulate a partitioned circuit by dynamic iteration.

    Writes ``waveform.csv`` (the stitched joint waveform), ``trace.json``,
    ``audit.json`` and, with ``--reference``, ``comparison.json``.

    Returns:
        dict: the trace, the coupled energy balance and the comparison
    """
    circuit = _load_circuit(config)
    partitioned = split_circuit(circuit)
    integ = phcircuit.integrator(config.integrator)

    window_config = WindowConfig(
        config.window or (config.t_end - config.t0),
        config.h,
        config.lmax,
        config.wr_tol,
        config.scheme,
        config.workers,
    )

    joint = assemble_joint_condensed(partitioned)
    grid = TimeGrid(config.t0, config.t_end, config.h)
    reference = integ.integrate(joint, grid) if config.reference else None

    waveforms, trace = run_dynamic_iteration(
        partitioned,
        config.t0,
        config.t_end,
        window_config,
        integrator=integ,
        reference=reference,
        strict=config.strict,
    )
    merged = merge_waveforms(joint, waveforms)
    balance = coupled_energy_balance(partitioned.phdaes, waveforms)

    result = {"trace": trace.to_dict(), "audit": balance.to_dict()}
    if reference is not None:
        result["comparison"] = {
            "max_error": float(np.max(np.abs(merged.states - reference.states), initial=0.0))
        }

    converged = sum(trace.converged.values())
    print("Windows converged: {}/{}".format(converged, len(trace.converged)))
    if reference is not None:
        print("Max error vs. joint system: {:.3e}".format(result["comparison"]["max_error"]))

    if config.out:
        write_waveform_csv(merged, os.path.join(config.out, "waveform.csv"))
        _write_json(config.out, "trace.json", result["trace"])
        _write_json(config.out, "audit.json", result["audit"])
        files = ["waveform.csv", "trace.json", "audit.json"]
        if reference is not None:
            _write_json(config.out, "comparison.json", result["comparison"])
            files.append("comparison.json")
        write_manifest(config, files)

    return result


def cmd_audit(config):
    """Audit the energy balance of a stored waveform.

    Writes ``audit.json``.

    Returns:
        dict: the energy audit
    """
    circuit = _load_circuit(config)
    phdae = _assemble(circuit, config.model)
    waveform = read_waveform_csv(config.waveform, phdae)

    result = energy_audit(phdae, waveform).to_dict()
    result["subspace_violations"] = _subspace_violations(phdae, waveform)

    print("Energy: dH={delta_h:.6e}  residual={residual:.3e}  margin={margin:.6e}".format(**result))

    if config.out:
        _write_json(config.out, "audit.json", result)
        write_manifest(config, ["audit.json"])

    return result


COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "cosim": cmd_cosim,
    "audit": cmd_audit,
}


def main(argv=None):
    """Entry point of the ``phcircuit`` command.

    Args:
        argv (list[str]): the arguments; ``sys.argv[1:]`` if not given

    Returns:
        int: the exit code
    """
    # pylint: disable=too-many-return-statements
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("A command is required: analyze, simulate, cosim or audit.")

        log.basicConfig(level=[log.WARNING, log.INFO, log.DEBUG][min(args.verbose, 2)])

        config = run_config(args)
        if config.out:
            os.makedirs(config.out, exist_ok=True)

        COMMANDS[config.command](config)
        return EXIT_OK

    except (UsageError, NetlistError, LawError, OSError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT
    except (CircuitError, PartitionError) as e:
        print("unsound circuit: {}".format(e), file=sys.stderr)
        return EXIT_UNSOUND
    except NonConvergedWindow as e:
        print("not converged: {}".format(e), file=sys.stderr)
        return EXIT_NONCONVERGED
    except DynamicIterationError as e:
        print("dynamic iteration failed: {}".format(e), file=sys.stderr)
        return EXIT_UNSOUND if e.sweep is None else EXIT_NONCONVERGED
    except IntegratorError as e:
        print("integration failed: {}".format(e), file=sys.stderr)
        return EXIT_NONCONVERGED
    except ValueError as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
