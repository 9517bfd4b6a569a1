#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Error budgets: quasistatic coupler flux noise and relaxation sweeps."""

import logging
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy.special import roots_hermitenorm

from ..circuits.composite import COMPUTATIONAL_LABELS, QUBIT_STATES, Label
from ..core.parallel import parallel_map
from ..core.units import TWO_PI
from ..dynamics.evolution import (NoiseConfig, Workspace, build_collapse_ops, operator_basis, propagate_lindblad,
                                  propagate_schrodinger)
from ..dynamics.pulses import PulseShape
from .metrics import (GateError, GateResult, average_fidelity, channel_from_block, computational_block,
                      computational_channel, gate_metrics)

logger = logging.getLogger(__name__)

MIN_ORDER = 3
DEFAULT_ORDER = 9


def flux_noise_sigma(amplitude: float, f_ir: float = 1e-6, f_uv: float = 1e9) -> float:
    """Quasistatic standard deviation (rad) of 1/f noise with amplitude A_phi (Phi0/sqrt(Hz))."""
    if amplitude < 0:
        raise GateError("flux noise amplitude must be non-negative", {"A_phi": amplitude})
    if not f_uv > f_ir > 0:
        raise GateError("cutoffs must satisfy f_UV > f_IR > 0", {"f_ir": f_ir, "f_uv": f_uv})
    return float(TWO_PI * amplitude * np.sqrt(np.log(f_uv / f_ir)))


def gauss_hermite_nodes(sigma: float, order: int = DEFAULT_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Offsets and weights (summing to 1) for expectations over N(0, sigma^2)."""
    if order < MIN_ORDER:
        raise GateError(f"quadrature order must be at least {MIN_ORDER}", {"order": order})
    roots, weights = roots_hermitenorm(order)
    return sigma * roots, weights / np.sqrt(TWO_PI)


def gauss_hermite_average(func: Callable[[float], float], sigma: float, order: int = DEFAULT_ORDER) -> float:
    offsets, weights = gauss_hermite_nodes(sigma, order)
    return float(sum(w * func(x) for x, w in zip(offsets, weights)))


def monte_carlo_average(func: Callable[[float], float], sigma: float, samples: int,
                        seed: Optional[int] = None) -> Tuple[float, float]:
    """Sample mean and its standard error over N(0, sigma^2) draws."""
    if samples < 2:
        raise GateError("Monte-Carlo averaging needs at least two samples", {"samples": samples})
    draws = np.random.default_rng(seed).normal(0.0, sigma, samples)
    values = np.array([func(x) for x in draws])
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(samples))


def shifted_pulse(pulse: PulseShape, offset: float) -> PulseShape:
    """Flux pulse with a static offset on the whole waveform, idle included."""
    return pulse.model_copy(update={"values": pulse.values + offset, "baseline": pulse.baseline + offset})


def _computational() -> List[Label]:
    return [COMPUTATIONAL_LABELS[key] for key in QUBIT_STATES]


def _offset_error(task: tuple) -> float:
    workspace, pulse, offset, phases = task
    result = propagate_schrodinger(workspace, shifted_pulse(pulse, offset), _computational())
    channel = channel_from_block(computational_block(result, workspace))
    return 1.0 - average_fidelity(channel, phases[0], phases[1], 0.0)


class FluxNoiseAverage(BaseModel):
    amplitude: float
    sigma: float  # rad
    offsets: List[float]
    weights: List[float]
    errors: List[float]
    average: float
    noiseless: float


def _nominal(workspace: Workspace, pulse: PulseShape) -> GateResult:
    result = propagate_schrodinger(workspace, pulse, _computational())
    return gate_metrics(computational_block(result, workspace))


def quasistatic_flux_noise_error(workspace: Workspace, pulse: PulseShape, amplitude: float,
                                 order: int = DEFAULT_ORDER, f_ir: float = 1e-6, f_uv: float = 1e9,
                                 jobs: int = 1) -> FluxNoiseAverage:
    """
    Gate error averaged over a static coupler flux offset drawn from N(0, sigma_phi^2).

    The single-qubit phases are fixed at their optimum without offset, and the conditional
    phase target is exactly pi.

    :param workspace: flux workspace at the idle point.
    :param pulse: designed flux pulse.
    :param amplitude: A_phi in Phi0/sqrt(Hz).
    :param order: Gauss-Hermite order, at least 3.
    :raises GateError: order below 3, negative amplitude, invalid cutoffs.
    """
    sigma = flux_noise_sigma(amplitude, f_ir, f_uv)
    offsets, weights = gauss_hermite_nodes(sigma, order)
    nominal = _nominal(workspace, pulse)
    if sigma == 0.0:
        errors = [nominal.phase_error] * order
    else:
        tasks = [(workspace, pulse, float(x), nominal.single_qubit_phases) for x in offsets]
        errors = parallel_map(_offset_error, tasks, jobs)
    average = float(np.dot(weights, errors))
    logger.info("flux noise A=%.2e (sigma=%.3e rad): averaged error %.3e, noiseless %.3e", amplitude, sigma, average,
                nominal.phase_error)
    return FluxNoiseAverage(amplitude=amplitude, sigma=sigma, offsets=offsets.tolist(), weights=weights.tolist(),
                            errors=list(errors), average=average, noiseless=nominal.phase_error)


class MonteCarloAverage(BaseModel):
    sigma: float
    samples: int
    mean: float
    standard_error: float


def monte_carlo_flux_noise_error(workspace: Workspace, pulse: PulseShape, amplitude: float, samples: int,
                                 seed: Optional[int] = None, f_ir: float = 1e-6,
                                 f_uv: float = 1e9) -> MonteCarloAverage:
    """Sampled counterpart of `quasistatic_flux_noise_error`."""
    sigma = flux_noise_sigma(amplitude, f_ir, f_uv)
    phases = _nominal(workspace, pulse).single_qubit_phases
    mean, stderr = monte_carlo_average(lambda x: _offset_error((workspace, pulse, x, phases)), sigma, samples, seed)
    return MonteCarloAverage(sigma=sigma, samples=samples, mean=mean, standard_error=stderr)


def dissipative_gate(workspace: Workspace, pulse: PulseShape, noise: NoiseConfig,
                     target: Optional[Union[Label, int]] = None) -> GateResult:
    """Gate metrics of the Lindblad channel restricted to the computational block."""
    collapse = build_collapse_ops(noise, workspace, target)
    basis = operator_basis(workspace, _computational())
    result = propagate_lindblad(workspace, pulse, collapse, basis)
    return gate_metrics(computational_channel(result.densities, workspace))


class RelaxationChannel(str, Enum):
    COUPLER = "coupler"
    QUBIT = "qubit"
    TARGET = "target"


class T1SweepPoint(BaseModel):
    t1_us: float
    error: float
    leakage_error: float


def _t1_noise(channel: RelaxationChannel, t1_us: float) -> NoiseConfig:
    if channel is RelaxationChannel.COUPLER:
        return NoiseConfig(coupler_t1_us=t1_us)
    if channel is RelaxationChannel.QUBIT:
        return NoiseConfig(fluxonium1_t1_us=t1_us, fluxonium2_t1_us=t1_us)
    return NoiseConfig(target_t1_us=t1_us)


def _t1_point(task: tuple) -> T1SweepPoint:
    workspace, pulse, channel, t1_us, target = task
    result = dissipative_gate(workspace, pulse, _t1_noise(channel, t1_us), target)
    return T1SweepPoint(t1_us=t1_us, error=result.phase_error, leakage_error=result.leakage_error)


def t1_sweep(workspace: Workspace, pulse: PulseShape, t1_values_us: Sequence[float],
             channel: RelaxationChannel | str = RelaxationChannel.COUPLER,
             target: Optional[Union[Label, int]] = None, jobs: int = 1) -> List[T1SweepPoint]:
    """
    Gate error versus T1 of one relaxation channel, the others switched off.

    :param channel: ``coupler`` (Gamma_2c = 2 Gamma_1c), ``qubit`` (both fluxonia) or ``target``.
    :param target: target state of a microwave gate, needed for the ``target`` channel.
    """
    channel = RelaxationChannel(channel)
    if not len(t1_values_us):
        raise GateError("empty T1 grid")
    if channel is RelaxationChannel.TARGET and target is None:
        raise GateError("the target channel needs the target state")
    tasks = [(workspace, pulse, channel, float(t1), target) for t1 in t1_values_us]
    logger.info("T1 sweep (%s) over %d values", channel.value, len(tasks))
    return parallel_map(_t1_point, tasks, jobs)
