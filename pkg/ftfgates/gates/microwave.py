#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Microwave-activated CZ: transition selectivity, 2 pi rotation calibration and phase tunability."""

import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from ..circuits.composite import COMPUTATIONAL_LABELS, QUBIT_STATES, CompositeSystem, FTFCircuit, Label, flux_sweep
from ..core.parallel import parallel_map
from ..core.units import TWO_PI
from ..dynamics.evolution import DEFAULT_DRIVE_LEVELS, Workspace, drive_workspace, propagate_schrodinger
from ..dynamics.pulses import (DEFAULT_DT, DRIVE_IDLE_PADDING, Envelope, PulseShape, gaussian_drive,
                               gaussian_unit_area, square_drive)
from .metrics import GateError, GateResult, computational_block, gate_metrics

logger = logging.getLogger(__name__)

MIN_TARGET_ELEMENT = 1e-6
TARGET_SUBSPACE: Tuple[Label, ...] = ((3, 0, 0), (0, 1, 0), (0, 0, 3))
GAUSSIAN_TUNABILITY = 0.663  # dtheta_00/dDelta in units of pi T_g, plain Gaussian with sigma = T_g/4
PHASE_TARGET = 1e-4          # rad, calibrated |dtheta_zz|
MAX_ROUNDS = 3
TUNABILITY_STEP = 0.0005     # GHz


class TargetLevel(str, Enum):
    LOWER = "lower"
    MIDDLE = "middle"
    UPPER = "upper"


TargetSpec = Union[TargetLevel, str, Tuple[Label, Label]]


class TargetTransition(BaseModel):
    initial: Label
    final: Label
    frequency: float  # GHz
    element: float    # |<final~|n_c|initial~>|
    initial_index: int
    final_index: int


class WorstTransition(BaseModel):
    final: Label
    gap: float      # GHz
    element: float
    value: float


class SelectivityReport(BaseModel):
    """S_ij = max_m N_ij,m / (N_T |E_ij,m - E_T|) for the computational states and the target state."""

    flux: Optional[float] = None
    target: TargetTransition
    S: Dict[str, float]
    S_ts: float
    worst: Dict[str, WorstTransition]

    @property
    def S_sum(self) -> float:
        return float(sum(self.S.values()))

    def row(self) -> List[float]:
        return [self.flux, *(self.S[key] for key in QUBIT_STATES), self.S_ts, self.S_sum]


def _target_indices(workspace: Workspace, target: TargetSpec) -> Tuple[int, int]:
    system = workspace.system
    if isinstance(target, tuple):
        initial, final = target
        return workspace.index(tuple(initial)), workspace.index(tuple(final))
    level = TargetLevel(target)
    rows = [system.bare_index(label) for label in TARGET_SUBSPACE]
    weights = np.sum(np.abs(workspace.basis[rows, :]) ** 2, axis=0)
    members = np.sort(np.argsort(weights)[::-1][:3])  # dressed indices are energy ordered
    chosen = members[[TargetLevel.LOWER, TargetLevel.MIDDLE, TargetLevel.UPPER].index(level)]
    return workspace.index(COMPUTATIONAL_LABELS["00"]), int(chosen)


def resolve_target(workspace: Workspace, target: TargetSpec = TargetLevel.LOWER) -> TargetTransition:
    """
    :raises GateError: the target matrix element is below 1e-6.
    """
    i, f = _target_indices(workspace, target)
    element = float(abs(workspace.operator[f, i]))
    labels = workspace.system.labels
    transition = TargetTransition(initial=labels[i], final=labels[f],
                                  frequency=float(workspace.energies[f] - workspace.energies[i]), element=element,
                                  initial_index=i, final_index=f)
    if element < MIN_TARGET_ELEMENT:
        raise GateError("untargetable transition", {"initial": labels[i], "final": labels[f], "N_T": element})
    return transition


def _worst(workspace: Workspace, k: int, excluded: Sequence[int], target: TargetTransition) -> WorstTransition:
    elements = np.abs(workspace.operator[:, k])
    gaps = np.abs(workspace.energies - workspace.energies[k])
    with np.errstate(divide="ignore"):
        ratios = elements / (target.element * np.abs(gaps - target.frequency))
    ratios[np.isnan(ratios)] = 0.0
    ratios[[k, *excluded]] = 0.0
    m = int(np.argmax(ratios))
    return WorstTransition(final=workspace.system.labels[m], gap=float(gaps[m]), element=float(elements[m]),
                           value=float(ratios[m]))


def selectivity(system: CompositeSystem, target: TargetSpec = TargetLevel.LOWER, levels: int = DEFAULT_DRIVE_LEVELS,
                drive_elements: Optional[int] = None, workspace: Optional[Workspace] = None) -> SelectivityReport:
    """
    Selectivity of a coupler charge drive at the target frequency.

    The target state is excluded from m for the initial state of the target transition; the
    target transition itself and its initial state are excluded for S_ts.

    :param system: composite system at the operating flux.
    :param target: ``lower``, ``middle`` or ``upper`` state of the subspace spanned by |300>, |010>, |003>
        driven from |000>, or an explicit (initial, final) label pair.
    :param levels: dressed states m taken into account.
    """
    workspace = workspace or drive_workspace(system, min(levels, system.dimension), drive_elements)
    transition = resolve_target(workspace, target)
    i, f = transition.initial_index, transition.final_index
    S, worst = {}, {}
    for key in QUBIT_STATES:
        k = workspace.index(COMPUTATIONAL_LABELS[key])
        worst[key] = _worst(workspace, k, [f] if k == i else [], transition)
        S[key] = worst[key].value
    worst["ts"] = _worst(workspace, f, [i], transition)
    flux = system.coupler.phi_ext if system.coupler is not None else None
    return SelectivityReport(flux=flux, target=transition, S=S, S_ts=worst["ts"].value, worst=worst)


def _selectivity_task(task: tuple) -> SelectivityReport:
    system, target, levels, drive_elements = task
    return selectivity(system, target, levels, drive_elements)


def selectivity_sweep(circuit: FTFCircuit, fluxes: Sequence[float], target: TargetSpec = TargetLevel.LOWER,
                      levels: int = DEFAULT_DRIVE_LEVELS, drive_elements: Optional[int] = None,
                      jobs: int = 1) -> List[SelectivityReport]:
    systems = flux_sweep(circuit, fluxes, jobs)
    return parallel_map(_selectivity_task, [(s, target, levels, drive_elements) for s in systems], jobs)


class SelectivityWindow(BaseModel):
    threshold: float
    flux_low: float
    flux_high: float
    frequency_low: float   # GHz, target transition
    frequency_high: float

    @property
    def width_mhz(self) -> float:
        return 1e3 * abs(self.frequency_high - self.frequency_low)


def selectivity_window(reports: Sequence[SelectivityReport], threshold: float = 1.0) -> SelectivityWindow:
    """
    Longest contiguous run of sweep points with S_sum below `threshold`.

    :raises GateError: no point lies below the threshold.
    """
    reports = sorted(reports, key=lambda r: r.flux)
    below = [r.S_sum < threshold for r in reports]
    best, start = (0, -1), None
    for k, ok in enumerate([*below, False]):
        if ok and start is None:
            start = k
        elif not ok and start is not None:
            if k - start > best[1] - best[0] + 1 or best[1] < 0:
                best = (start, k - 1)
            start = None
    if best[1] < 0:
        raise GateError("no flux point with S_sum below the threshold", {"threshold": threshold})
    low, high = reports[best[0]], reports[best[1]]
    return SelectivityWindow(threshold=threshold, flux_low=low.flux, flux_high=high.flux,
                             frequency_low=low.target.frequency, frequency_high=high.target.frequency)


def build_drive(gate_time: float, sigma: Optional[float], amplitude: float, frequency: float,
                envelope: Envelope | str = Envelope.ZERO_BASED, dt: float = DEFAULT_DT, **options: Any) -> PulseShape:
    """Gaussian or square microwave drive, padded with DRIVE_IDLE_PADDING ns unless `idle_padding` is given."""
    envelope = Envelope(envelope)
    options.setdefault("idle_padding", DRIVE_IDLE_PADDING)
    if envelope is Envelope.SQUARE:
        return square_drive(gate_time, amplitude, frequency, dt=dt, **options)
    if sigma is None:
        raise GateError("a Gaussian drive needs sigma")
    return gaussian_drive(gate_time, sigma, amplitude, frequency, envelope=envelope, dt=dt, **options)


def unit_area(gate_time: float, sigma: Optional[float], envelope: Envelope | str) -> float:
    envelope = Envelope(envelope)
    return gate_time if envelope is Envelope.SQUARE else gaussian_unit_area(gate_time, sigma, envelope)


def warm_start_detuning(delta_theta: float, gate_time: float) -> float:
    """Delta_0 = dtheta_zz / (0.663 pi T_g) in GHz."""
    return delta_theta / (GAUSSIAN_TUNABILITY * np.pi * gate_time)


class MicrowaveCalibration(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    target: TargetTransition
    pulse: PulseShape
    amplitude: float
    detuning: float  # f_t - f_d, GHz
    result: GateResult
    converged: bool
    rounds: int
    history: List[Dict[str, float]]

    @property
    def frequency(self) -> float:
        return self.target.frequency - self.detuning


def _computational_labels() -> List[Label]:
    return [COMPUTATIONAL_LABELS[key] for key in QUBIT_STATES]


def evaluate_drive(workspace: Workspace, pulse: PulseShape) -> GateResult:
    result = propagate_schrodinger(workspace, pulse, _computational_labels())
    return gate_metrics(computational_block(result, workspace))


def calibrate_mw_cz(system: CompositeSystem, gate_time: float, sigma: Optional[float] = None,
                    target: TargetSpec = TargetLevel.LOWER, envelope: Envelope | str = Envelope.ZERO_BASED,
                    levels: int = DEFAULT_DRIVE_LEVELS, drive_elements: Optional[int] = None,
                    rounds: int = MAX_ROUNDS, dt: float = DEFAULT_DT,
                    workspace: Optional[Workspace] = None, **drive_options: Any) -> MicrowaveCalibration:
    """
    Calibrate a 2 pi rotation on the target transition into a CZ.

    Stage 1 sets the amplitude to 1/(A N_T) at resonance. Each round then tunes the amplitude
    against the |00> leakage and the detuning against dtheta_zz, the detuning search warm-started
    at Delta_0 = dtheta_zz/(0.663 pi T_g).

    :param rounds: maximal number of amplitude/detuning rounds.
    :return: the best calibration found; ``converged`` is False when |dtheta_zz| stays above 1e-4 rad.
    """
    workspace = workspace or drive_workspace(system, min(levels, system.dimension), drive_elements)
    transition = resolve_target(workspace, target)
    area = unit_area(gate_time, sigma, envelope)
    amplitude = 1.0 / (area * transition.element)
    detuning = 0.0
    k00 = workspace.index(COMPUTATIONAL_LABELS["00"])
    computational = [workspace.index(label) for label in _computational_labels()]

    def drive(amp: float, delta: float) -> PulseShape:
        return build_drive(gate_time, sigma, amp, transition.frequency - delta, envelope, dt, **drive_options)

    def leakage_00(amp: float) -> float:
        state = propagate_schrodinger(workspace, drive(amp, detuning), [workspace.ket(COMPUTATIONAL_LABELS["00"])])
        return float(1.0 - np.sum(np.abs(state.states[computational, 0]) ** 2))

    def phase_offset(delta: float) -> float:
        return evaluate_drive(workspace, drive(amplitude, delta)).delta_theta ** 2

    logger.info("mw calibration: E_T=%.6f GHz, N_T=%.4f, initial amplitude %.6f GHz", transition.frequency,
                transition.element, amplitude)
    history: List[Dict[str, float]] = []
    result = evaluate_drive(workspace, drive(amplitude, detuning))
    best = (result, amplitude, detuning)
    converged = False
    done = 0
    for done in range(1, rounds + 1):
        res = minimize_scalar(leakage_00, bounds=(0.8 * amplitude, 1.2 * amplitude), method="bounded",
                              options={"xatol": 1e-6 * amplitude})
        amplitude = float(res.x)
        result = evaluate_drive(workspace, drive(amplitude, detuning))
        start = detuning + warm_start_detuning(result.delta_theta, gate_time)
        reach = abs(start - detuning) + 1e-3
        res = minimize_scalar(phase_offset, bounds=(min(start, detuning) - reach, max(start, detuning) + reach),
                              method="bounded", options={"xatol": 1e-9})
        detuning = float(res.x)
        result = evaluate_drive(workspace, drive(amplitude, detuning))
        history.append({"round": done, "amplitude": amplitude, "detuning": detuning, "leakage_00": result.leakage["00"],
                        "delta_theta": result.delta_theta, "phase_error": result.phase_error})
        logger.info("round %d: amplitude %.6f, detuning %.4f MHz, dtheta %.2e, error %.3e", done, amplitude,
                    1e3 * detuning, result.delta_theta, result.phase_error)
        if result.phase_error < best[0].phase_error:
            best = (result, amplitude, detuning)
        if abs(result.delta_theta) < PHASE_TARGET and done >= 2:
            converged = True
            break
    result, amplitude, detuning = best
    if not converged:
        logger.warning("mw calibration did not converge after %d rounds: dtheta=%.3e rad", done, result.delta_theta)
    return MicrowaveCalibration(target=transition, pulse=drive(amplitude, detuning), amplitude=amplitude,
                                detuning=detuning, result=result, converged=converged, rounds=done, history=history)


class Tunability(BaseModel):
    slope: float        # rad/GHz
    gate_time: float

    @property
    def coefficient(self) -> float:
        """|slope| in units of pi T_g."""
        return abs(self.slope) / (np.pi * self.gate_time)


def _two_level_phase(envelope: PulseShape, detuning: float) -> float:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        omega = float(envelope.value_at(t))
        h = np.array([[0.0, 0.5 * omega], [0.5 * omega, detuning]])
        return -1j * TWO_PI * (h @ y)

    sol = solve_ivp(rhs, (0.0, envelope.duration), np.array([1.0, 0.0], dtype=complex), method="DOP853",
                    rtol=1e-10, atol=1e-12)
    return float(np.angle(sol.y[0, -1]))


def phase_tunability(envelope: Envelope | str, gate_time: float, sigma: Optional[float] = None,
                     model: str = "two-level", system: Optional[CompositeSystem] = None,
                     target: TargetSpec = TargetLevel.LOWER, step: float = TUNABILITY_STEP,
                     levels: int = DEFAULT_DRIVE_LEVELS, drive_elements: Optional[int] = None,
                     dt: float = DEFAULT_DT) -> Tunability:
    """
    Central finite-difference slope of theta_00 versus Delta = f_t - f_d for a 2 pi rotation.

    ``two-level`` integrates H = Delta |1><1| + Omega(t)/2 sigma_x in the rotating frame; ``full``
    drives the target transition of `system` and reads the phase of the initial state relative to
    its free evolution.
    """
    area = unit_area(gate_time, sigma, envelope)
    if model == "two-level":
        shape = build_drive(gate_time, sigma, 1.0 / area, 0.0, envelope, dt, filter_sigma=0.0)
        theta = lambda delta: _two_level_phase(shape, delta)
    elif model == "full":
        if system is None:
            raise GateError("the full tunability model needs a system")
        workspace = drive_workspace(system, min(levels, system.dimension), drive_elements)
        transition = resolve_target(workspace, target)
        i = transition.initial_index
        amplitude = 1.0 / (area * transition.element)

        def theta(delta: float) -> float:
            pulse = build_drive(gate_time, sigma, amplitude, transition.frequency - delta, envelope, dt)
            state = propagate_schrodinger(workspace, pulse, [np.eye(workspace.levels)[i]]).states[i, 0]
            return float(np.angle(state * np.exp(1j * TWO_PI * workspace.energies[i] * pulse.duration)))
    else:
        raise GateError(f"unknown tunability model {model!r}", {"models": ["two-level", "full"]})
    upper, lower = theta(step), theta(-step)
    slope = float(np.angle(np.exp(1j * (upper - lower)))) / (2.0 * step)
    logger.debug("tunability %s/%s: %.4f rad/GHz", Envelope(envelope).value, model, slope)
    return Tunability(slope=slope, gate_time=gate_time)


def stray_coupling_shift(coupling: float, detuning: float) -> float:
    """Second-order shift g^2/Delta (GHz) of the target transition from a spectator coupling."""
    if detuning == 0:
        raise GateError("the spectator is resonant with the target state")
    return coupling ** 2 / detuning


class SpectatorShiftPoint(BaseModel):
    shift: float  # GHz
    fidelity: float
    phase_error: float


def spectator_shift_scan(calibration: MicrowaveCalibration, system: CompositeSystem, shifts: Sequence[float],
                         levels: int = DEFAULT_DRIVE_LEVELS, drive_elements: Optional[int] = None,
                         jobs: int = 1) -> List[SpectatorShiftPoint]:
    """Re-run a calibrated drive with the target state energy shifted by each value (GHz)."""
    workspace = drive_workspace(system, min(levels, system.dimension), drive_elements)
    f = calibration.target.final_index
    tasks = []
    for shift in shifts:
        energies = workspace.energies.copy()
        energies[f] += shift
        tasks.append((workspace.model_copy(update={"energies": energies}), calibration.pulse, float(shift)))
    return parallel_map(_shifted_gate, tasks, jobs)


def _shifted_gate(task: tuple) -> SpectatorShiftPoint:
    workspace, pulse, shift = task
    result = evaluate_drive(workspace, pulse)
    return SpectatorShiftPoint(shift=shift, fidelity=result.average_fidelity, phase_error=result.phase_error)
