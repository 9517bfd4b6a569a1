#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import argparse
import logging
from pathlib import Path
from typing import Any, Optional, Tuple

from rich.table import Table

from .manifest import RunManifest
from .pipelines import run_experiment
from .schema import ExperimentConfig, InputFileError, SchemaError, load_experiment
from ..core.config import get_config
from ..core.errors import ToolkitError
from ..core.logs import console, stderr_console
from ..core.units import radians_to_flux_quanta
from ..service import svc_class
from ..version import __software__

logger = logging.getLogger(__name__)


def report_error(err: ToolkitError) -> int:
    """Print a toolkit error on stderr and map it to the process exit code."""
    stderr_console.print(f"[bold red]Error ({err.module}):[/bold red] {err}", highlight=False)
    if isinstance(err, InputFileError):
        return 3
    if isinstance(err, SchemaError):
        return 2
    return 1


def resolve_output(experiment: ExperimentConfig, out: Optional[str], seed: Optional[int],
                   default_root: str, default_seed: int) -> Tuple[Path, int]:
    """
    Output directory and seed of a run.

    Command-line values win over the experiment's ``[output]`` section, which wins over the
    application settings; the default directory is ``<application.output>/<experiment name>``.
    """
    if out is not None:
        directory = Path(out)
    elif experiment.output.directory is not None:
        directory = Path(experiment.output.directory)
    else:
        directory = Path(default_root) / experiment.experiment.name
    if seed is None:
        seed = experiment.output.seed if experiment.output.seed is not None else default_seed
    return directory, int(seed)


def _option(args: argparse.Namespace, name: str) -> Any:
    value = getattr(args, name, None)
    return value[0] if isinstance(value, list) else value


def manifest_table(manifest: RunManifest, directory: Path) -> Table:
    table = Table(title=f"{manifest.experiment} ({manifest.kind}) -> {directory}")
    table.add_column("file")
    table.add_column("rows", justify="right")
    for output in manifest.outputs:
        table.add_row(output.name, str(output.rows))
    table.caption = f"config hash {manifest.config_hash}, seed {manifest.seed}, {manifest.wall_clock:.2f} s"
    return table


class run_services(svc_class):
    default_config = {}

    params_link = {}

    @staticmethod
    def subparser() -> Tuple[str, str, str]:
        return ("run", "Run an experiment file and write its CSV files and manifest",
                """
                Experiment kinds: spectrum, zz-map, perturbative-zz, capnet, adiabatic-cz, mw-cz, noise-sweep.

                example: ftfgates --jobs 4 run configs/adiabatic_cz.toml
                """)

    @staticmethod
    def params(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("experiment", help="Experiment file (TOML)")

    @staticmethod
    def test_name(name: str) -> bool:
        return name == __software__ + "-run"

    @staticmethod
    def cmd_name(name: Optional[str]) -> bool:
        return name == "run"

    def run(self) -> int:
        config = get_config()
        args = config.args
        try:
            experiment = load_experiment(args.experiment)
            directory, seed = resolve_output(experiment, _option(args, "out"), _option(args, "seed"),
                                             config["application.output"], config["application.seed"])
            manifest = run_experiment(experiment, directory, seed, int(config["application.jobs"]))
        except ToolkitError as err:
            return report_error(err)
        console.print(manifest_table(manifest, directory))
        return 0


def _flux_cell(radians: float) -> str:
    return f"{radians:.6f} rad = {radians_to_flux_quanta(radians):.6f} Phi0"


def resolved_table(experiment: ExperimentConfig) -> Table:
    """Resolved parameters of an experiment, fluxes in both units."""
    table = Table(title=f"{experiment.experiment.name} ({experiment.experiment.kind.value})")
    table.add_column("parameter")
    table.add_column("value")
    if experiment.circuit is not None:
        circuit = experiment.build_circuit()
        for name, mode in (("fluxonium1", circuit.fluxonium1), ("fluxonium2", circuit.fluxonium2)):
            table.add_row(f"{name}.E_C / E_J / E_L", f"{mode.E_C:g} / {mode.E_J:g} / {mode.E_L:g} GHz")
            table.add_row(f"{name}.phi_ext", _flux_cell(mode.phi_ext))
        coupler = circuit.coupler
        table.add_row("coupler.E_C", f"{coupler.E_C:g} GHz")
        table.add_row("coupler.E_J", f"{coupler.E_J:g} GHz")
        table.add_row("coupler.phi_ext", _flux_cell(coupler.phi_ext))
        table.add_row("coupler.convention", coupler.convention.value)
        c = circuit.couplings
        table.add_row("J_12 / J_1c / J_2c", f"{c.J_12:g} / {c.J_1c:g} / {c.J_2c:g} GHz")
        t = circuit.truncation
        table.add_row("truncation", f"osc_levels={t.osc_levels}, charge_cutoff={t.charge_cutoff}, "
                                    f"fluxonium_levels={t.fluxonium_levels}, coupler_levels={t.coupler_levels}")
    sweep = experiment.sweep
    if sweep is not None and sweep.flux is not None:
        fluxes = sweep.flux.radians()
        table.add_row("sweep.flux", f"{len(fluxes)} points, {_flux_cell(fluxes[0])} .. {_flux_cell(fluxes[-1])}")
    if sweep is not None and sweep.coupling is not None:
        table.add_row("sweep.coupling", f"{sweep.coupling.points} points, J_c {sweep.coupling.start:g} .. "
                                        f"{sweep.coupling.stop:g} GHz, ratio {sweep.ratio:g}")
    if experiment.adiabatic is not None:
        a = experiment.adiabatic
        table.add_row("adiabatic.flux_range", f"{a.flux_range.points} points")
        table.add_row("adiabatic.candidates", f"{len(a.edge_durations)} edges x {len(a.flat_grid())} flat durations")
        table.add_row("adiabatic.levels", str(a.levels))
    if experiment.microwave is not None:
        m = experiment.microwave
        table.add_row("microwave.gate_times", ", ".join(f"{t:g}" for t in m.gate_times) + " ns")
        table.add_row("microwave.envelope", m.envelope.value)
        table.add_row("microwave.idle_padding", f"{m.idle_padding:g} ns")
        table.add_row("microwave.target", str(m.target_spec()))
        table.add_row("microwave.levels", str(m.levels))
    if experiment.noise is not None:
        n = experiment.noise
        table.add_row("noise.gate", n.gate)
        table.add_row("noise.amplitudes", f"{len(n.amplitudes)} values, quadrature order {n.quadrature_order}")
        table.add_row("noise.t1_values_us", f"{len(n.t1_values_us)} values, channels "
                                            + ", ".join(c.value for c in n.channels))
    if experiment.capnet is not None:
        cap = experiment.capnet
        rows = "published table" if cap.table else f"{len(cap.network)} network(s)"
        table.add_row("capnet", f"{cap.topology.value}, gauge {cap.gauge.value}, {rows}")
    return table


class validate_services(svc_class):
    default_config = {}

    params_link = {}

    @staticmethod
    def subparser() -> Tuple[str, str, str]:
        return ("validate", "Check an experiment file and print its resolved parameters")

    @staticmethod
    def params(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("experiment", help="Experiment file (TOML)")

    @staticmethod
    def test_name(name: str) -> bool:
        return name == __software__ + "-validate"

    @staticmethod
    def cmd_name(name: Optional[str]) -> bool:
        return name == "validate"

    def run(self) -> int:
        args = get_config().args
        try:
            experiment = load_experiment(args.experiment)
            table = resolved_table(experiment)
        except ToolkitError as err:
            return report_error(err)
        console.print(table)
        console.print("ok")
        return 0
