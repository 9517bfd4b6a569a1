#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Time evolution in a truncated dressed-state workspace.

H(t) = diag(E) + sum_k g_k(t) H_k with E the dressed energies at the idle point. States are
propagated in the interaction picture of diag(E) and returned in the lab frame.
"""

import logging
import time
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import solve_ivp

from .pulses import PulseKind, PulseShape
from ..circuits.composite import CompositeSystem, Label
from ..core.errors import ToolkitError
from ..core.parallel import parallel_map
from ..core.units import H_OVER_KB_K_PER_GHZ, TWO_PI, rate_from_t1

logger = logging.getLogger(__name__)

DEFAULT_DRIVE_LEVELS = 50
DEFAULT_FLUX_LEVELS = 60
DEFAULT_LINDBLAD_LEVELS = 30
SCHRODINGER_RTOL = 1e-10
LINDBLAD_RTOL = 1e-8
TRACE_ABORT = 1e-6


class EvolutionError(ToolkitError, ValueError):
    module = "evolution"


class TraceDriftError(EvolutionError):
    """The density matrix trace left its tolerance."""


class WorkspaceKind(str, Enum):
    FLUX = "flux"
    DRIVE = "drive"


class Workspace(BaseModel):
    """Lowest K dressed states of a reference system and the fixed operators of the time dependent terms."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: WorkspaceKind
    system: CompositeSystem
    levels: int
    energies: np.ndarray
    basis: np.ndarray
    operator: np.ndarray
    idle_flux: float

    @property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies)

    def index(self, label: Label) -> int:
        k = self.system.index(tuple(label), allow_flagged=True)
        if k is None:
            raise EvolutionError(f"no dressed state labeled {tuple(label)}")
        if k >= self.levels:
            raise EvolutionError(f"state {tuple(label)} lies outside the {self.levels} level workspace",
                                 {"dressed_index": k})
        return k

    def ket(self, label: Label) -> np.ndarray:
        vector = np.zeros(self.levels, dtype=complex)
        vector[self.index(label)] = 1.0
        return vector

    def project(self, operator: np.ndarray) -> np.ndarray:
        """Bare product-space operator written in the workspace basis."""
        return self.basis.conj().T @ operator @ self.basis

    def coefficient(self, pulse: PulseShape) -> Callable[[float], float]:
        """g(t) multiplying the workspace operator for `pulse`."""
        if self.kind is WorkspaceKind.FLUX:
            if pulse.kind is not PulseKind.FLUX:
                raise EvolutionError("a flux workspace needs a flux pulse")
            coupler = self.system.coupler
            reference = coupler.ej_eff(self.idle_flux)
            return lambda t: -(coupler.ej_eff(pulse.value_at(t)) - reference)
        if pulse.kind is not PulseKind.DRIVE or pulse.carrier is None:
            raise EvolutionError("a drive workspace needs a drive pulse with a carrier")
        f, phase = pulse.carrier.frequency, pulse.carrier.phase
        return lambda t: pulse.value_at(t) * np.cos(TWO_PI * f * t + phase)


def _check_levels(system: CompositeSystem, levels: int) -> int:
    if levels < 2:
        raise EvolutionError("a workspace needs at least two levels", {"levels": levels})
    if levels > system.dimension:
        raise EvolutionError("workspace larger than the product space",
                             {"levels": levels, "dimension": system.dimension})
    return levels


def flux_workspace(system: CompositeSystem, levels: int = DEFAULT_FLUX_LEVELS) -> Workspace:
    """
    Workspace for coupler flux pulses.

    The operator is the embedded cos(phi_c) and g(t) = -(E_J,eff(phi(t)) - E_J,eff(phi_idle)), so the
    constant part is exactly the idle dressed spectrum.
    """
    levels = _check_levels(system, levels)
    if system.coupler is None:
        raise EvolutionError("a flux workspace needs the coupler parameters of the system")
    basis = system.vectors[:, :levels]
    operator = basis.conj().T @ system.coupler_cos() @ basis
    return Workspace(kind=WorkspaceKind.FLUX, system=system, levels=levels, energies=system.energies[:levels].copy(),
                     basis=basis, operator=_hermitian(operator), idle_flux=system.coupler.phi_ext)


def drive_workspace(system: CompositeSystem, levels: int = DEFAULT_DRIVE_LEVELS,
                    drive_elements: Optional[int] = None) -> Workspace:
    """
    Workspace for a charge drive on the coupler.

    :param drive_elements: keep only the coupler charge elements between adjacent levels up to this
        transition (1 keeps n_01, 2 keeps n_01 and n_12); the full operator by default.
    """
    levels = _check_levels(system, levels)
    n_c = np.array(system.modes[1].n_elements, dtype=complex)
    if drive_elements is not None:
        kept = np.zeros_like(n_c)
        for j in range(min(drive_elements, n_c.shape[0] - 1)):
            kept[j, j + 1] = n_c[j, j + 1]
            kept[j + 1, j] = n_c[j + 1, j]
        n_c = kept
    basis = system.vectors[:, :levels]
    operator = basis.conj().T @ system.embed(n_c, 1) @ basis
    idle = system.coupler.phi_ext if system.coupler is not None else 0.0
    return Workspace(kind=WorkspaceKind.DRIVE, system=system, levels=levels, energies=system.energies[:levels].copy(),
                     basis=basis, operator=_hermitian(operator), idle_flux=idle)


def _hermitian(operator: np.ndarray) -> np.ndarray:
    return 0.5 * (operator + operator.conj().T)


class PropagationResult(BaseModel):
    """Final lab-frame states (columns) or density matrices, with solver diagnostics."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: Optional[np.ndarray] = None
    densities: Optional[List[np.ndarray]] = None
    duration: float
    times: Optional[np.ndarray] = None
    populations: Optional[np.ndarray] = None
    evaluations: int = 0
    wall_clock: float = 0.0
    norm_error: float = 0.0

    def populations_csv_rows(self) -> List[List[float]]:
        if self.times is None or self.populations is None:
            return []
        return [[float(t), *np.ravel(row).tolist()] for t, row in zip(self.times, self.populations)]


def _initial_columns(workspace: Workspace, initial: Sequence) -> np.ndarray:
    columns = []
    for item in initial:
        if isinstance(item, np.ndarray):
            columns.append(np.asarray(item, dtype=complex))
        else:
            columns.append(workspace.ket(item))
    return np.stack(columns, axis=1)


def _phases(energies: np.ndarray, t: float) -> np.ndarray:
    return np.exp(1j * TWO_PI * energies * t)


def _schrodinger(task: tuple) -> PropagationResult:
    workspace, pulse, psi0, rtol, atol, record = task
    g = workspace.coefficient(pulse)
    energies = workspace.energies
    operator = workspace.operator
    shape = psi0.shape

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        phase = _phases(energies, t)
        psi = y.reshape(shape)
        return (-1j * TWO_PI * g(t) * (phase[:, None] * (operator @ (phase.conj()[:, None] * psi)))).ravel()

    start = time.perf_counter()
    sol = solve_ivp(rhs, (0.0, pulse.duration), psi0.ravel(), method="DOP853", rtol=rtol, atol=atol,
                    t_eval=record)
    if sol.status != 0:
        failed = float(sol.t[-1]) if len(sol.t) else 0.0
        raise EvolutionError("Schroedinger propagation failed", {"time": failed, "message": sol.message})
    final = sol.y[:, -1].reshape(shape)
    lab = _phases(energies, pulse.duration).conj()[:, None] * final
    populations = None
    if record is not None:
        populations = np.abs(sol.y.T.reshape(len(sol.t), *shape)) ** 2
    norm_error = float(np.max(np.abs(np.linalg.norm(lab, axis=0) - np.linalg.norm(psi0, axis=0))))
    return PropagationResult(states=lab, duration=pulse.duration, times=None if record is None else sol.t,
                             populations=populations, evaluations=int(sol.nfev),
                             wall_clock=time.perf_counter() - start, norm_error=norm_error)


def propagate_schrodinger(workspace: Workspace, pulse: PulseShape, initial: Sequence, rtol: float = SCHRODINGER_RTOL,
                          atol: float = 1e-12, record: Optional[np.ndarray] = None, jobs: int = 1) -> PropagationResult:
    """
    Solve i dpsi/dt = 2 pi H(t) psi over the pulse with DOP853.

    :param workspace: dressed workspace matching the pulse kind.
    :param pulse: flux or drive waveform, linearly interpolated between samples.
    :param initial: dressed labels or workspace vectors.
    :param rtol: relative tolerance.
    :param record: times at which populations are recorded (must end at the pulse duration).
    :param jobs: initial states are split across this many workers.
    :raises EvolutionError: unknown label, or the solver failed (with the time of failure).
    """
    psi0 = _initial_columns(workspace, initial)
    if record is not None:
        record = np.asarray(record, dtype=float)
        if abs(record[-1] - pulse.duration) > 1e-9:
            raise EvolutionError("recorded times must end at the pulse duration", {"last": float(record[-1])})
    if jobs > 1 and psi0.shape[1] > 1 and record is None:
        chunks = np.array_split(np.arange(psi0.shape[1]), min(jobs, psi0.shape[1]))
        parts = parallel_map(_schrodinger, [(workspace, pulse, psi0[:, c], rtol, atol, None) for c in chunks], jobs)
        return PropagationResult(states=np.concatenate([p.states for p in parts], axis=1), duration=pulse.duration,
                                 evaluations=sum(p.evaluations for p in parts),
                                 wall_clock=max(p.wall_clock for p in parts),
                                 norm_error=max(p.norm_error for p in parts))
    result = _schrodinger((workspace, pulse, psi0, rtol, atol, record))
    if result.norm_error > 1e-9:
        logger.warning("norm drift %.2e exceeds 1e-9", result.norm_error)
    logger.debug("propagated %d states over %.3f ns with %d evaluations", psi0.shape[1], pulse.duration,
                 result.evaluations)
    return result


class NoiseConfig(BaseModel):
    """Relaxation times (us), flux noise amplitude (Phi0/sqrt(Hz)) with its cutoffs (Hz), temperature (K)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    coupler_t1_us: Optional[float] = Field(None, gt=0)
    fluxonium1_t1_us: Optional[float] = Field(None, gt=0)
    fluxonium2_t1_us: Optional[float] = Field(None, gt=0)
    target_t1_us: Optional[float] = Field(None, gt=0)
    flux_noise_amplitude: float = Field(0.0, ge=0)
    f_ir: float = 1e-6
    f_uv: float = 1e9
    temperature_k: float = Field(0.03, gt=0)

    @model_validator(mode="after")
    def _check_cutoffs(self) -> "NoiseConfig":
        if not (self.f_uv > self.f_ir > 0):
            raise ValueError(f"cutoffs must satisfy f_UV > f_IR > 0, got f_IR={self.f_ir}, f_UV={self.f_uv}")
        return self

    @property
    def coupler_rates(self) -> Tuple[float, float]:
        """(Gamma_1c, Gamma_2c = 2 Gamma_1c) in 1/ns."""
        gamma = rate_from_t1(self.coupler_t1_us)
        return gamma, 2.0 * gamma


class CollapseOperator(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    matrix: np.ndarray


def _lowering(levels: int, rates: Sequence[float]) -> np.ndarray:
    op = np.zeros((levels, levels), dtype=complex)
    for j, rate in enumerate(rates):
        if j + 1 < levels:
            op[j, j + 1] = np.sqrt(rate)
    return op


def build_collapse_ops(noise: NoiseConfig, workspace: Workspace,
                       target: Optional[Union[Label, int]] = None) -> List[CollapseOperator]:
    """
    Coupler decay I x (sqrt(G1c)|0><1| + sqrt(G2c)|1><2|) x I and fluxonium decays sqrt(G)|0><1|,
    built in the bare product space and projected into the workspace.

    :param target: with `noise.target_t1_us`, adds the dressed decay of this state (label or workspace
        index) to the ground state.
    """
    system = workspace.system
    d1, dc, d2 = system.dims
    operators: List[CollapseOperator] = []

    gamma1, gamma2 = noise.coupler_rates
    if gamma1 > 0:
        bare = system.embed(_lowering(dc, (gamma1, gamma2)), 1)
        operators.append(CollapseOperator(name="coupler", matrix=workspace.project(bare)))
    for name, t1, mode, dim in (("fluxonium1", noise.fluxonium1_t1_us, 0, d1),
                                ("fluxonium2", noise.fluxonium2_t1_us, 2, d2)):
        gamma = rate_from_t1(t1)
        if gamma > 0:
            matrix = workspace.project(system.embed(_lowering(dim, (gamma,)), mode))
            operators.append(CollapseOperator(name=name, matrix=matrix))
    gamma = rate_from_t1(noise.target_t1_us)
    if gamma > 0:
        if target is None:
            raise EvolutionError("a target-state T1 needs the target label")
        op = np.zeros((workspace.levels, workspace.levels), dtype=complex)
        final = target if isinstance(target, (int, np.integer)) else workspace.index(target)
        op[workspace.index((0, 0, 0)), final] = np.sqrt(gamma)
        operators.append(CollapseOperator(name="target", matrix=op))
    logger.debug("collapse operators: %s", [op.name for op in operators])
    return operators


def operator_basis(workspace: Workspace, labels: Sequence[Label]) -> List[np.ndarray]:
    """|a><b| for every ordered pair of labels, row-major in (a, b)."""
    kets = [workspace.ket(label) for label in labels]
    return [np.outer(a, b.conj()) for a in kets for b in kets]


def propagate_lindblad(workspace: Workspace, pulse: PulseShape, collapse: Sequence[CollapseOperator],
                       initial: Sequence[np.ndarray], rtol: float = LINDBLAD_RTOL, atol: float = 1e-10,
                       record: Optional[np.ndarray] = None) -> PropagationResult:
    """
    Integrate drho/dt = -i 2 pi [H, rho] + sum_k (L rho L^+ - {L^+ L, rho}/2), rates in 1/ns.

    Inputs may be density matrices or operator-basis elements |a><b|; the map is linear so the
    latter give the full channel. Operators are moved to the interaction picture of diag(E).

    :raises TraceDriftError: the trace of a density-matrix input drifts by more than 1e-6.
    :raises EvolutionError: the solver failed.
    """
    levels = workspace.levels
    rho0 = np.stack([np.asarray(r, dtype=complex) for r in initial])
    if rho0.shape[1:] != (levels, levels):
        raise EvolutionError("initial matrices do not match the workspace", {"shape": rho0.shape, "levels": levels})
    g = workspace.coefficient(pulse)
    energies = workspace.energies
    operator = workspace.operator
    ops = [op.matrix for op in collapse]
    products = [op.conj().T @ op for op in ops]
    count = rho0.shape[0]

    def frame(t: float) -> np.ndarray:
        phase = _phases(energies, t)
        return np.outer(phase, phase.conj())

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(count, levels, levels)
        rot = frame(t)
        h = g(t) * (rot * operator)
        out = -1j * TWO_PI * (h @ rho - rho @ h)
        for op, prod in zip(ops, products):
            l_t = rot * op
            lp_t = rot * prod
            out += l_t @ rho @ l_t.conj().T - 0.5 * (lp_t @ rho + rho @ lp_t)
        return out.ravel()

    start = time.perf_counter()
    sol = solve_ivp(rhs, (0.0, pulse.duration), rho0.ravel(), method="DOP853", rtol=rtol, atol=atol, t_eval=record)
    if sol.status != 0:
        failed = float(sol.t[-1]) if len(sol.t) else 0.0
        raise EvolutionError("Lindblad propagation failed", {"time": failed, "message": sol.message})
    final = sol.y[:, -1].reshape(count, levels, levels)
    back = frame(pulse.duration).conj()
    densities = [back * rho for rho in final]

    drift = 0.0
    for before, after in zip(rho0, densities):
        drift = max(drift, abs(np.trace(after) - np.trace(before)))
    if drift > TRACE_ABORT:
        raise TraceDriftError("trace drift beyond tolerance", {"drift": float(drift), "duration": pulse.duration})
    populations = None
    if record is not None:
        traj = sol.y.T.reshape(len(sol.t), count, levels, levels)
        populations = np.real(np.diagonal(traj, axis1=2, axis2=3))
    return PropagationResult(densities=densities, duration=pulse.duration, times=None if record is None else sol.t,
                             populations=populations, evaluations=int(sol.nfev),
                             wall_clock=time.perf_counter() - start, norm_error=float(drift))


def thermal_population(frequency: float, temperature: float) -> float:
    """Excited population exp(-hf/kT) / (1 + exp(-hf/kT)) of a two-level system."""
    if temperature <= 0:
        raise EvolutionError("temperature must be positive", {"temperature": temperature})
    x = np.exp(-frequency * H_OVER_KB_K_PER_GHZ / temperature)
    return float(x / (1.0 + x))
