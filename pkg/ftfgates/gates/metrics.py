#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Average gate fidelity over 36 product states and its raw, phase and leakage decomposition.

The computational block of a gate is stored as a channel C[c, d, a, b] = <c| E(|a><b|) |d>
over the basis 00, 01, 10, 11 (fluxonium 1 first). State fidelities use the root
convention F = tr sqrt(sqrt(rho) sigma sqrt(rho)), which is sqrt(<psi|rho|psi>) for the pure
ideal output sigma = |psi><psi|.
"""

import itertools
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import minimize_scalar

from ..circuits.composite import COMPUTATIONAL_LABELS, QUBIT_STATES
from ..core.errors import ToolkitError
from ..dynamics.evolution import PropagationResult, Workspace

logger = logging.getLogger(__name__)

PHASE_TOLERANCE = 1e-9  # relative, golden-section stop
PHASE_GRID = 16         # coarse scan points over one period
NEGATIVE_EIGENVALUE = -1e-8
SWEEPS = 8


class GateError(ToolkitError, ValueError):
    module = "gates"


class UnreachablePhaseError(GateError):
    """The requested conditional phase cannot be accumulated."""


def wrap_phase(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    wrapped = (angle + np.pi) % (2.0 * np.pi) - np.pi
    return float(np.pi if wrapped == -np.pi else wrapped)


def single_qubit_states() -> np.ndarray:
    """|0>, |1>, (|0> +- |1>)/sqrt2, (|0> +- i|1>)/sqrt2 as rows."""
    s = 1.0 / np.sqrt(2.0)
    return np.array([[1, 0], [0, 1], [s, s], [s, -s], [s, 1j * s], [s, -1j * s]], dtype=complex)


def product_states() -> np.ndarray:
    """The 36 two-qubit product states as rows, qubit 1 first."""
    singles = single_qubit_states()
    return np.array([np.kron(a, b) for a, b in itertools.product(singles, singles)])


PRODUCT_STATES = product_states()


def channel_from_block(block: np.ndarray) -> np.ndarray:
    """Channel of a pure (possibly leaky) evolution with computational block M[c, a]."""
    return np.einsum("ca,db->cdab", block, block.conj())


def computational_block(result: PropagationResult, workspace: Workspace) -> np.ndarray:
    """M[c, a] = <c~|psi_a(T)> for final states propagated from the computational labels in order."""
    if result.states is None or result.states.shape[1] != 4:
        raise GateError("expected four final states, one per computational basis state")
    rows = [workspace.index(COMPUTATIONAL_LABELS[key]) for key in QUBIT_STATES]
    return result.states[rows, :]


def computational_channel(densities: Sequence[np.ndarray], workspace: Workspace) -> np.ndarray:
    """Channel from the 16 outputs of the operator basis |a><b| (row-major in a, b)."""
    if len(densities) != 16:
        raise GateError("expected sixteen operator-basis outputs", {"got": len(densities)})
    rows = [workspace.index(COMPUTATIONAL_LABELS[key]) for key in QUBIT_STATES]
    channel = np.zeros((4, 4, 4, 4), dtype=complex)
    for n, rho in enumerate(densities):
        a, b = divmod(n, 4)
        channel[:, :, a, b] = rho[np.ix_(rows, rows)]
    return channel


def ideal_phases(phi1: float, phi2: float, delta: float) -> np.ndarray:
    """Diagonal of (U_phi1 x U_phi2) CZ(pi + delta)."""
    return np.exp(1j * np.array([0.0, phi2, phi1, phi1 + phi2 + np.pi + delta]))


def state_fidelities(channel: np.ndarray, phases: np.ndarray, check: bool = False) -> np.ndarray:
    """sqrt(<psi_ideal| rho |psi_ideal>) for every product state."""
    psi = PRODUCT_STATES
    rho = np.einsum("cdab,sa,sb->scd", channel, psi, psi.conj())
    if check:
        lowest = min(float(np.min(np.linalg.eigvalsh(0.5 * (r + r.conj().T)))) for r in rho)
        if lowest < NEGATIVE_EIGENVALUE:
            raise GateError("non-physical output state", {"lowest_eigenvalue": lowest})
    target = psi * phases[np.newaxis, :]
    overlaps = np.real(np.einsum("sc,scd,sd->s", target.conj(), rho, target))
    return np.sqrt(np.clip(overlaps, 0.0, None))


def average_fidelity(channel: np.ndarray, phi1: float, phi2: float, delta: float) -> float:
    return float(np.mean(state_fidelities(channel, ideal_phases(phi1, phi2, delta))))


class GateResult(BaseModel):
    """Fidelity and error decomposition of a CZ implementation."""

    average_fidelity: float
    raw_error: float
    phase_error: float
    leakage_error: float
    phases: Dict[str, float]
    delta_theta: float
    single_qubit_phases: Tuple[float, float]
    optimized_delta: float
    leakage: Dict[str, float]

    @property
    def gate_error(self) -> float:
        return self.phase_error


def extracted_phases(channel: np.ndarray) -> Dict[str, float]:
    """theta_ij = arg <ij|U|ij> relative to theta_00."""
    return {key: float(np.angle(channel[k, 0, k, 0])) if k else 0.0 for k, key in enumerate(QUBIT_STATES)}


def conditional_phase_deviation(phases: Dict[str, float]) -> float:
    """theta_11 - theta_10 - theta_01 + theta_00 - pi, wrapped to (-pi, pi]."""
    return wrap_phase(phases["11"] - phases["10"] - phases["01"] + phases["00"] - np.pi)


def _refine(objective: Callable[[float], float], start: float) -> Tuple[float, float]:
    """
    Minimize a 2*pi periodic function of one phase.

    A coarse scan over the whole period (starting point included) brackets the minimum, then a
    golden-section search refines it. Never returns a value worse than the starting point.
    """
    step = 2.0 * np.pi / PHASE_GRID
    grid = start + step * (np.arange(PHASE_GRID) - PHASE_GRID // 2)
    values = np.array([objective(x) for x in grid])
    k = int(np.argmin(values))
    best_x, best = float(grid[k]), float(values[k])
    left, right = values[(k - 1) % PHASE_GRID], values[(k + 1) % PHASE_GRID]
    if left > best and right > best:
        res = minimize_scalar(objective, bracket=(best_x - step, best_x, best_x + step), method="golden",
                              tol=PHASE_TOLERANCE)
        if res.fun < best:
            best_x, best = float(res.x), float(res.fun)
    return wrap_phase(best_x), best


def _optimize(channel: np.ndarray, params: List[float], free: Sequence[int]) -> Tuple[List[float], float]:
    params = list(params)

    def infidelity(values: Sequence[float]) -> float:
        return 1.0 - average_fidelity(channel, *values)

    current = infidelity(params)
    for _ in range(SWEEPS):
        before = current
        for k in free:
            def partial(x: float, k: int = k) -> float:
                trial = list(params)
                trial[k] = x
                return infidelity(trial)
            params[k], current = _refine(partial, params[k])
        if before - current < 1e-14:
            break
    return params, current


def gate_metrics(final: np.ndarray, fixed_phases: Optional[Tuple[float, float]] = None,
                 optimize_single: bool = True, check_physical: bool = False) -> GateResult:
    """
    Score a gate against CZ up to single-qubit phases.

    * raw error: single-qubit phases fixed (`fixed_phases`, or the extracted theta_10 - theta_00 and
      theta_01 - theta_00), conditional phase exactly pi;
    * phase error: single-qubit phases optimized, conditional phase exactly pi;
    * leakage error: single-qubit phases and the conditional phase deviation optimized.

    Each stage starts from the optimum of the previous one and only accepts improvements, so
    raw >= phase >= leakage.

    :param final: a 4x4 computational block M[c, a] or a channel C[c, d, a, b].
    :param fixed_phases: (phi1, phi2) used for the raw error.
    :param optimize_single: optimize phi1 and phi2 for the phase and leakage errors.
    :param check_physical: reject output states with eigenvalues below -1e-8.
    :raises GateError: malformed input or non-physical output.
    """
    final = np.asarray(final, dtype=complex)
    if final.shape == (4, 4):
        channel = channel_from_block(final)
    elif final.shape == (4, 4, 4, 4):
        channel = final
    else:
        raise GateError("expected a 4x4 block or a 4x4x4x4 channel", {"shape": final.shape})
    if check_physical:
        state_fidelities(channel, ideal_phases(0.0, 0.0, 0.0), check=True)

    phases = extracted_phases(channel)
    delta_theta = conditional_phase_deviation(phases)
    if fixed_phases is None:
        fixed_phases = (phases["10"], phases["01"])
    start = [float(fixed_phases[0]), float(fixed_phases[1]), 0.0]
    raw_error = 1.0 - average_fidelity(channel, *start)

    free = (0, 1) if optimize_single else ()
    phase_params, phase_error = _optimize(channel, start, free)

    seeded = list(phase_params)
    seeded[2] = delta_theta
    leak_start = seeded if 1.0 - average_fidelity(channel, *seeded) < phase_error else phase_params
    leak_params, leakage_error = _optimize(channel, leak_start, (*free, 2))
    leakage_error = min(leakage_error, phase_error)

    populations = {key: float(1.0 - np.sum(np.real(np.diagonal(channel[:, :, k, k]))))
                   for k, key in enumerate(QUBIT_STATES)}
    logger.debug("gate errors raw=%.3e phase=%.3e leakage=%.3e dtheta=%.4f", raw_error, phase_error, leakage_error,
                 delta_theta)
    return GateResult(average_fidelity=1.0 - phase_error, raw_error=raw_error, phase_error=phase_error,
                      leakage_error=leakage_error, phases=phases, delta_theta=delta_theta,
                      single_qubit_phases=(phase_params[0], phase_params[1]), optimized_delta=leak_params[2],
                      leakage=populations)
