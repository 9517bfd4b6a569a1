#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""One pipeline per experiment kind; each writes CSV files and returns a summary for the manifest."""

import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .manifest import OutputFile, RunManifest
from .schema import AdiabaticSection, CapnetSection, ExperimentConfig, ExperimentKind
from ..capnet.network import (ExtractedParams, Topology, asymptotic_report, build_network, compile_table,
                              extract_params, published_table, table_columns)
from ..circuits.composite import (QUBIT_STATES, CompositeSystem, FTFCircuit, delocalization, flux_sweep, static_zz,
                                  zz_map)
from ..circuits.modes import classify_regime
from ..circuits.perturbation import order_scaling_check, perturbative_zz, truncation_convergence
from ..core.output import config_hash, write_csv
from ..core.parallel import parallel_map
from ..dynamics.evolution import drive_workspace, flux_workspace
from ..dynamics.pulses import Envelope, PulseShape, d_factor_table
from ..gates.adiabatic import FlatDurationOptimum, optimize_flat_duration, zz_vs_flux
from ..gates.metrics import GateError
from ..gates.microwave import (MicrowaveCalibration, calibrate_mw_cz, selectivity, selectivity_sweep,
                               selectivity_window, spectator_shift_scan)
from ..gates.noise import dissipative_gate, monte_carlo_flux_noise_error, quasistatic_flux_noise_error, t1_sweep

logger = logging.getLogger(__name__)

SPECTRUM_LEVELS = 20


class RunContext:
    """Output directory, CSV header and the files written so far."""

    def __init__(self, experiment: ExperimentConfig, directory: Path, seed: int, jobs: int) -> None:
        self.experiment = experiment
        self.directory = Path(directory)
        self.seed = seed
        self.jobs = jobs
        self.config_hash = config_hash(experiment.canonical(), seed)
        self.outputs: List[OutputFile] = []

    @property
    def header(self) -> Dict[str, Any]:
        return {"experiment": self.experiment.experiment.name, "config_hash": self.config_hash}

    def csv(self, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]],
            int_columns: Sequence[str] = ()) -> Path:
        path = self.directory / name
        count = write_csv(path, columns, rows, self.header, int_columns)
        self.outputs.append(OutputFile(name=name, rows=count))
        return path

    def pulse(self, name: str, pulse: PulseShape) -> None:
        path = pulse.export(self.directory / name, self.header)
        self.outputs.append(OutputFile(name=path.name, rows=len(pulse.times)))


def _fluxes(experiment: ExperimentConfig, circuit: FTFCircuit) -> np.ndarray:
    sweep = experiment.sweep
    if sweep is not None and sweep.flux is not None:
        return sweep.flux.radians()
    return np.array([circuit.coupler.phi_ext])


def _label_rows(phi: float, system: CompositeSystem, levels: int) -> List[list]:
    rows = []
    for k in range(min(levels, system.dimension)):
        rows.append([phi, k, system.energies[k], *system.labels[k], system.max_overlaps[k], bool(system.flagged[k])])
    return rows


def spectrum(ctx: RunContext) -> Dict[str, Any]:
    circuit = ctx.experiment.build_circuit()
    f1, f2 = circuit.fluxonium_spectra()
    coupler = circuit.coupler_spectrum()
    rows = [[m, k, energy] for m, mode in enumerate((f1, coupler, f2)) for k, energy in enumerate(mode.energies)]
    ctx.csv("modes.csv", ["mode", "level", "energy_ghz"], rows, int_columns=["mode", "level"])

    systems = flux_sweep(circuit, _fluxes(ctx.experiment, circuit), ctx.jobs)
    rows = [row for system in systems for row in _label_rows(system.coupler.phi_ext, system, SPECTRUM_LEVELS)]
    ctx.csv("spectrum.csv", ["phi_rad", "index", "energy_ghz", "n1", "nc", "n2", "max_overlap", "flagged"], rows,
            int_columns=["index", "n1", "nc", "n2", "flagged"])
    return {"f01": {"fluxonium1": f1.transition(0, 1), "coupler": coupler.transition(0, 1),
                    "fluxonium2": f2.transition(0, 1)},
            "regime": {"fluxonium1": classify_regime(circuit.fluxonium1).model_dump(mode="json"),
                       "fluxonium2": classify_regime(circuit.fluxonium2).model_dump(mode="json")}}


def zero_crossings(fluxes: Sequence[float], values: Sequence[float], valid: Sequence[bool]) -> List[float]:
    """Linearly interpolated sign changes between consecutive resolved points."""
    roots = []
    points = [(p, v) for p, v, ok in zip(fluxes, values, valid) if ok]
    for (p0, v0), (p1, v1) in zip(points, points[1:]):
        if v0 == 0.0:
            roots.append(p0)
        elif v0 * v1 < 0:
            roots.append(p0 - v0 * (p1 - p0) / (v1 - v0))
    return roots


def zz_sweep(ctx: RunContext) -> Dict[str, Any]:
    circuit = ctx.experiment.build_circuit()
    sweep = ctx.experiment.sweep
    fluxes = _fluxes(ctx.experiment, circuit)
    if sweep.coupling is not None:
        points = zz_map(circuit, sweep.coupling.values(), fluxes, sweep.ratio, ctx.jobs)
        ctx.csv("zz_map.csv", ["J_c_ghz", "phi_rad", "zeta_ghz", "epsilon", "valid"],
                [[p.J_c, p.phi, p.zeta, p.epsilon, p.valid] for p in points], int_columns=["valid"])
        return {"points": len(points)}
    systems = flux_sweep(circuit, fluxes, ctx.jobs)
    zz = [static_zz(system) for system in systems]
    deloc = [delocalization(system) for system in systems]
    valid = [z.valid and d.valid for z, d in zip(zz, deloc)]
    ctx.csv("zz.csv", ["phi_rad", "zeta_ghz", "epsilon", "valid"],
            [[phi, z.zeta, d.epsilon, ok] for phi, z, d, ok in zip(fluxes, zz, deloc, valid)], int_columns=["valid"])
    roots = zero_crossings(fluxes, [z.zeta for z in zz], valid)
    return {"zero_crossings_rad": roots}


def _perturbative_point(task: tuple) -> list:
    circuit, phi, levels = task
    f1, f2 = circuit.fluxonium_spectra()
    modes = (f1, circuit.coupler_spectrum(phi), f2)
    result = perturbative_zz(modes, circuit.couplings, levels)
    exact = static_zz(circuit.system(phi))
    return [phi, result.zeta2, result.zeta3, result.zeta4, result.total, exact.zeta, exact.valid]


def perturbative(ctx: RunContext) -> Dict[str, Any]:
    circuit = ctx.experiment.build_circuit()
    section = ctx.experiment.perturbation
    fluxes = _fluxes(ctx.experiment, circuit)
    rows = parallel_map(_perturbative_point, [(circuit, float(phi), section.intermediate_levels) for phi in fluxes],
                        ctx.jobs)
    ctx.csv("perturbative_zz.csv", ["phi_rad", "zeta2_ghz", "zeta3_ghz", "zeta4_ghz", "total_ghz", "exact_ghz",
                                    "valid"], rows, int_columns=["valid"])
    f1, f2 = circuit.fluxonium_spectra()
    modes = (f1, circuit.coupler_spectrum(), f2)
    scaling = order_scaling_check(modes, circuit.couplings, section.scales,
                                  intermediate_levels=section.intermediate_levels)
    convergence = truncation_convergence(modes, circuit.couplings, section.intermediate_levels)
    return {"scaling": scaling.model_dump(mode="json"), "convergence": convergence.model_dump(mode="json")}


def capnet_rows(section: CapnetSection, jobs: int = 1) -> List[Tuple[int, ExtractedParams]]:
    """Published table or the listed networks, numbered from 1 in file order."""
    if section.table:
        return compile_table(section.topology, section.gauge, jobs)
    results = []
    for k, caps in enumerate(section.network, start=1):
        network = build_network(section.topology, caps, section.qubits, section.dangling_coupler, section.gauge)
        results.append((k, extract_params(network)))
    return results


def capnet_columns(topology: Topology) -> List[str]:
    return ["id", *(name for name, _ in table_columns(topology))]


def capnet(ctx: RunContext) -> Dict[str, Any]:
    section = ctx.experiment.capnet
    rows = capnet_rows(section, ctx.jobs)
    ctx.csv("capnet.csv", capnet_columns(section.topology), [[k, *params.table_row()] for k, params in rows],
            int_columns=["id"])
    sources = [row.capacitances for row in published_table(section.topology)] if section.table else section.network
    reports = []
    for caps in sources:
        network = build_network(section.topology, caps, section.qubits, section.dangling_coupler, section.gauge)
        reports.append(asymptotic_report(network).model_dump(mode="json"))
    return {"rows": len(rows), "asymptotics": reports}


def _adiabatic_optimum(ctx: RunContext, section: AdiabaticSection,
                       circuit: FTFCircuit) -> Tuple[FlatDurationOptimum, CompositeSystem]:
    systems = flux_sweep(circuit, section.flux_range.radians(), ctx.jobs)
    table = d_factor_table(systems)
    curve = zz_vs_flux(systems)
    ctx.csv("dtable.csv", ["phi_rad", *(f"D_{key}" for key in QUBIT_STATES), "D", "valid"],
            [[phi, *(table.components[key][k] for key in QUBIT_STATES), table.total[k], table.valid[k]]
             for k, phi in enumerate(table.fluxes)], int_columns=["valid"])
    ctx.csv("zz_curve.csv", ["phi_rad", "zeta_ghz", "valid"],
            [[phi, z, ok] for phi, z, ok in zip(curve.fluxes, curve.zeta, curve.valid)], int_columns=["valid"])
    idle = circuit.system()
    workspace = flux_workspace(idle, min(section.levels, idle.dimension))
    options = {"target": section.target_phase, "phi_idle": circuit.coupler.phi_ext,
               "idle_padding": section.idle_padding, "filter_sigma": section.filter_sigma}
    if section.phi_limit is not None:
        options["phi_limit"] = section.phi_limit.radians
    optimum = optimize_flat_duration(workspace, table, curve, section.edge_durations, section.flat_grid(), ctx.jobs,
                                     **options)
    nan = float("nan")
    ctx.csv("flat_scan.csv", ["edge_ns", "flat_ns", "total_ns", "beta", "leakage_error", "phase_error",
                              *(f"leak_{key}" for key in QUBIT_STATES)],
            [[p.edge_duration, p.flat_duration, p.total_duration, nan if p.beta is None else p.beta,
              nan if p.leakage_error is None else p.leakage_error, nan if p.phase_error is None else p.phase_error,
              *(p.leakage.get(key, nan) for key in QUBIT_STATES)] for p in optimum.scan])
    ctx.pulse("flux_pulse", optimum.design.pulse)
    return optimum, idle


def _design_summary(optimum: FlatDurationOptimum) -> Dict[str, Any]:
    d = optimum.design
    return {"beta": d.beta, "edge_ns": d.edge_duration, "flat_ns": d.flat_duration, "total_ns": d.total_duration,
            "phi_idle_rad": d.phi_idle, "phi_flat_rad": d.phi_flat, "phase_rad": d.phase}


def adiabatic(ctx: RunContext) -> Dict[str, Any]:
    circuit = ctx.experiment.build_circuit()
    optimum, _ = _adiabatic_optimum(ctx, ctx.experiment.adiabatic, circuit)
    return {"design": _design_summary(optimum), "gate": optimum.result.model_dump(mode="json")}


def _calibrate_task(task: tuple) -> MicrowaveCalibration:
    system, gate_time, section = task
    sigma = None if section.envelope is Envelope.SQUARE else section.sigma_ratio * gate_time
    return calibrate_mw_cz(system, gate_time, sigma, section.target_spec(), section.envelope,
                           min(section.levels, system.dimension), section.drive_elements, section.rounds,
                           idle_padding=section.idle_padding)


def _calibrations(ctx: RunContext, system: CompositeSystem) -> List[MicrowaveCalibration]:
    section = ctx.experiment.microwave
    calibrations = parallel_map(_calibrate_task, [(system, float(t), section) for t in section.gate_times], ctx.jobs)
    ctx.csv("mw_gates.csv", ["gate_time_ns", "amplitude_ghz", "detuning_ghz", "frequency_ghz", "raw_error",
                             "phase_error", "leakage_error", "converged"],
            [[t, c.amplitude, c.detuning, c.frequency, c.result.raw_error, c.result.phase_error,
              c.result.leakage_error, c.converged] for t, c in zip(section.gate_times, calibrations)],
            int_columns=["converged"])
    ctx.pulse("drive_pulse", calibrations[-1].pulse)
    return calibrations


def microwave(ctx: RunContext) -> Dict[str, Any]:
    experiment = ctx.experiment
    section = experiment.microwave
    circuit = experiment.build_circuit()
    system = circuit.system()
    report = selectivity(system, section.target_spec(), section.levels, section.drive_elements)
    results: Dict[str, Any] = {"selectivity": report.model_dump(mode="json") | {"S_sum": report.S_sum}}
    if experiment.sweep is not None and experiment.sweep.flux is not None:
        reports = selectivity_sweep(circuit, experiment.sweep.flux.radians(), section.target_spec(), section.levels,
                                    section.drive_elements, ctx.jobs)
        ctx.csv("selectivity.csv", ["phi_rad", *(f"S_{key}" for key in QUBIT_STATES), "S_ts", "S_sum"],
                [r.row() for r in reports])
        try:
            window = selectivity_window(reports, section.selectivity_threshold)
            results["window"] = window.model_dump() | {"width_mhz": window.width_mhz}
        except GateError as err:
            logger.warning("%s", err)
            results["window"] = None
    calibrations = _calibrations(ctx, system)
    results["gates"] = [{"gate_time_ns": t, "converged": c.converged, "rounds": c.rounds,
                         "gate": c.result.model_dump(mode="json")}
                        for t, c in zip(section.gate_times, calibrations)]
    if section.spectator_shifts:
        points = spectator_shift_scan(calibrations[-1], system, section.spectator_shifts, section.levels,
                                      section.drive_elements, ctx.jobs)
        ctx.csv("spectator.csv", ["shift_ghz", "fidelity", "phase_error"],
                [[p.shift, p.fidelity, p.phase_error] for p in points])
    return results


def noise_sweep(ctx: RunContext) -> Dict[str, Any]:
    experiment = ctx.experiment
    section = experiment.noise
    circuit = experiment.build_circuit()
    results: Dict[str, Any] = {}
    if section.gate == "adiabatic":
        optimum, system = _adiabatic_optimum(ctx, experiment.adiabatic, circuit)
        pulse = optimum.design.pulse
        workspace = flux_workspace(system, min(section.levels, system.dimension))
        target: Optional[int] = None
        results["design"] = _design_summary(optimum)
    else:
        system = circuit.system()
        calibration = _calibrations(ctx, system)[0]
        pulse = calibration.pulse
        workspace = drive_workspace(system, min(experiment.microwave.levels, system.dimension),
                                    experiment.microwave.drive_elements)
        target = calibration.target.final_index
        results["calibration"] = {"converged": calibration.converged,
                                  "gate": calibration.result.model_dump(mode="json")}

    if section.amplitudes:
        if section.gate != "adiabatic":
            logger.warning("flux noise amplitudes ignored: the microwave gate has no flux pulse")
        else:
            cfg = section.config
            rows = []
            for amplitude in section.amplitudes:
                average = quasistatic_flux_noise_error(workspace, pulse, amplitude, section.quadrature_order, cfg.f_ir,
                                                       cfg.f_uv, ctx.jobs)
                mc_mean = mc_error = float("nan")
                if section.monte_carlo_samples:
                    mc = monte_carlo_flux_noise_error(workspace, pulse, amplitude, section.monte_carlo_samples,
                                                      ctx.seed, cfg.f_ir, cfg.f_uv)
                    mc_mean, mc_error = mc.mean, mc.standard_error
                rows.append([amplitude, average.sigma, average.average, average.noiseless, mc_mean, mc_error])
            ctx.csv("flux_noise.csv", ["A_phi", "sigma_rad", "averaged_error", "noiseless_error", "mc_mean",
                                       "mc_stderr"], rows)
    for channel in section.channels if section.t1_values_us else []:
        if channel.value == "target" and target is None:
            logger.warning("target T1 sweep skipped: the adiabatic gate has no target state")
            continue
        points = t1_sweep(workspace, pulse, section.t1_values_us, channel, target, ctx.jobs)
        ctx.csv(f"t1_{channel.value}.csv", ["t1_us", "error", "leakage_error"],
                [[p.t1_us, p.error, p.leakage_error] for p in points])
    cfg = section.config
    if any(t1 is not None for t1 in (cfg.coupler_t1_us, cfg.fluxonium1_t1_us, cfg.fluxonium2_t1_us, cfg.target_t1_us)):
        results["dissipative"] = dissipative_gate(workspace, pulse, cfg, target).model_dump(mode="json")
    return results


PIPELINES: Dict[ExperimentKind, Callable[[RunContext], Dict[str, Any]]] = {
    ExperimentKind.SPECTRUM: spectrum,
    ExperimentKind.ZZ_MAP: zz_sweep,
    ExperimentKind.PERTURBATIVE_ZZ: perturbative,
    ExperimentKind.CAPNET: capnet,
    ExperimentKind.ADIABATIC_CZ: adiabatic,
    ExperimentKind.MW_CZ: microwave,
    ExperimentKind.NOISE_SWEEP: noise_sweep,
}


def run_experiment(experiment: ExperimentConfig, directory: Path | str, seed: int, jobs: int = 1) -> RunManifest:
    """
    Execute the pipeline of the experiment kind and write ``manifest.json`` next to its CSV files.

    :raises ToolkitError: propagated from the pipeline with its module context.
    """
    start = time.perf_counter()
    ctx = RunContext(experiment, Path(directory), seed, jobs)
    kind = experiment.experiment.kind
    logger.info("running %s experiment %r into %s", kind.value, experiment.experiment.name, ctx.directory)
    results = PIPELINES[kind](ctx)
    manifest = RunManifest(experiment=experiment.experiment.name, kind=kind.value, config_hash=ctx.config_hash,
                           seed=seed, outputs=ctx.outputs, results=results,
                           wall_clock=time.perf_counter() - start)
    manifest.write(ctx.directory)
    return manifest
