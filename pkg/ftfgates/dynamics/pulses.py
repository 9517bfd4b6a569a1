#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Control waveforms: D factors, constant-leakage-rate flux edges, composite flux pulses and drive envelopes."""

import json
import logging
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad, solve_ivp, trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.ndimage import gaussian_filter1d
from scipy.special import erf

from ..circuits.composite import COMPUTATIONAL_LABELS, QUBIT_STATES, CompositeSystem, hamiltonian_flux_derivative
from ..core.errors import ToolkitError
from ..core.output import write_csv

logger = logging.getLogger(__name__)

DEFAULT_DT = 0.01  # ns
MIN_GRID_POINTS = 50
MAX_MASKED_FRACTION = 0.2
FLUX_FILTER_RADIUS = 3.0   # kernel half width in sigma, total width 6 sigma
DRIVE_FILTER_SIGMA = 1.0   # ns
DRIVE_FILTER_WIDTH = 4.0   # ns
DRIVE_IDLE_PADDING = 5.0   # ns of zero drive on both sides of a microwave gate
STALL_FLOOR = 1e-12        # ns/rad


class PulseError(ToolkitError, ValueError):
    module = "pulses"


class EdgeStallError(PulseError):
    """D vanishes on the edge path."""


class DFactorTable(BaseModel):
    """D_ij(phi) in ns/rad on a coupler flux grid; masked points are excluded from the interpolant."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fluxes: np.ndarray
    components: Dict[str, np.ndarray]
    total: np.ndarray
    valid: np.ndarray

    @cached_property
    def _interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.fluxes[self.valid], self.total[self.valid], extrapolate=False)

    @property
    def span(self) -> tuple:
        grid = self.fluxes[self.valid]
        return float(grid.min()), float(grid.max())

    def __call__(self, phi: float | np.ndarray) -> np.ndarray:
        """Interpolated D(phi); NaN outside the unmasked flux range."""
        return self._interpolant(phi)

    def component(self, key: str, phi: float | np.ndarray) -> np.ndarray:
        mask = self.valid
        return PchipInterpolator(self.fluxes[mask], self.components[key][mask], extrapolate=False)(phi)


def d_factors(system: CompositeSystem, derivative: Optional[np.ndarray] = None) -> Optional[Dict[str, float]]:
    """
    D_ij = sum_n |<n~| dH/dphi |i0j~>| / (E_n - E_i0j)^2 for the four computational states.

    :param system: composite system at the flux of interest.
    :param derivative: dH/dphi in the bare basis of `system`, the analytic one by default.
    :return: the four factors, or None when a computational label is not resolved.
    """
    indices = [system.index(COMPUTATIONAL_LABELS[key]) for key in QUBIT_STATES]
    if any(k is None for k in indices):
        return None
    if derivative is None:
        derivative = hamiltonian_flux_derivative(system)
    factors = {}
    for key, k in zip(QUBIT_STATES, indices):
        column = system.vectors.conj().T @ (derivative @ system.vectors[:, k])
        gaps = system.energies - system.energies[k]
        gaps[k] = np.inf
        factors[key] = float(np.sum(np.abs(column) / gaps ** 2))
    return factors


def d_factor_table(systems: Sequence[CompositeSystem], min_points: int = MIN_GRID_POINTS,
                   max_masked: float = MAX_MASKED_FRACTION) -> DFactorTable:
    """
    Tabulate D_ij and D = sum D_ij over systems evaluated along a coupler flux grid.

    :param systems: one system per flux point, each carrying its coupler parameters.
    :param min_points: minimal grid size.
    :param max_masked: largest tolerated fraction of points with unresolved computational labels.
    :raises PulseError: too few points, or too many masked points.
    """
    if len(systems) < min_points:
        raise PulseError(f"the D table needs at least {min_points} flux points", {"points": len(systems)})
    fluxes = np.array([system.coupler.phi_ext for system in systems], dtype=float)
    order = np.argsort(fluxes)
    fluxes = fluxes[order]
    components = {key: np.full(len(systems), np.nan) for key in QUBIT_STATES}
    valid = np.zeros(len(systems), dtype=bool)
    for position, k in enumerate(order):
        factors = d_factors(systems[k])
        if factors is None:
            logger.debug("masking flux %.6f rad: computational labels unresolved", fluxes[position])
            continue
        valid[position] = True
        for key, value in factors.items():
            components[key][position] = value
    masked = 1.0 - valid.mean()
    if masked > max_masked:
        raise PulseError("too many flux points with hybridized computational states; choose another flux range",
                         {"masked_fraction": round(float(masked), 3), "range": (fluxes[0], fluxes[-1])})
    total = sum(components[key] for key in QUBIT_STATES)
    return DFactorTable(fluxes=fluxes, components=components, total=total, valid=valid)


def uniform_grid(duration: float, dt: float) -> np.ndarray:
    """Grid 0..duration whose step is the largest value not above `dt` that divides `duration`."""
    steps = max(int(np.ceil(duration / dt - 1e-9)), 1)
    return np.linspace(0.0, duration, steps + 1)


class Edge(BaseModel):
    """Flux samples of one constant-leakage-rate ramp."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    fluxes: np.ndarray
    duration: float
    beta: float
    phi_start: float
    phi_end: float

    def at(self, t: float | np.ndarray) -> np.ndarray:
        return np.interp(t, self.times, self.fluxes)


def edge_duration(table: Callable, beta: float, phi_start: float, phi_end: float) -> float:
    """Quadrature of D(phi) / beta between the two fluxes."""
    low, high = sorted((phi_start, phi_end))
    value, _ = quad(lambda p: float(table(p)), low, high, limit=400, epsabs=0.0, epsrel=1e-10)
    return value / beta


def clr_edge(table: DFactorTable, beta: float, phi_start: float, phi_end: float, dt: float = DEFAULT_DT,
             rtol: float = 1e-9) -> Edge:
    """
    Integrate dphi/dt = sign(phi_end - phi_start) beta / D(phi) until phi_end is reached.

    :param table: D table covering both fluxes.
    :param beta: leakage rate constant.
    :param phi_start: idle flux (rad).
    :param phi_end: flux of the flat top (rad).
    :param dt: sample period of the returned edge (ns), adjusted so that it divides the duration.
    :raises PulseError: invalid arguments or fluxes outside the table.
    :raises EdgeStallError: D vanishes on the path.
    """
    if beta <= 0:
        raise PulseError("beta must be positive", {"beta": beta})
    if phi_start == phi_end:
        raise PulseError("the edge needs distinct start and end fluxes", {"phi": phi_start})
    low, high = table.span
    if not (low <= min(phi_start, phi_end) and max(phi_start, phi_end) <= high):
        raise PulseError("edge fluxes outside the D table", {"range": (low, high), "edge": (phi_start, phi_end)})

    inside = (table.fluxes >= min(phi_start, phi_end)) & (table.fluxes <= max(phi_start, phi_end)) & table.valid
    path = np.concatenate([[phi_start, phi_end], table.fluxes[inside]])
    d_path = table(path)
    if np.nanmin(d_path) <= STALL_FLOOR:
        where = float(path[int(np.nanargmin(d_path))])
        raise EdgeStallError("D vanishes on the edge path", {"flux": where, "D": float(np.nanmin(d_path))})

    sign = np.sign(phi_end - phi_start)

    def rate(t: float, y: np.ndarray) -> List[float]:
        return [sign * beta / float(table(np.clip(y[0], low, high)))]

    def reached(t: float, y: np.ndarray) -> float:
        return y[0] - phi_end

    reached.terminal = True  # type: ignore[attr-defined]

    t_max = 10.0 * edge_duration(table, beta, phi_start, phi_end) + 1.0
    sol = solve_ivp(rate, (0.0, t_max), [phi_start], method="DOP853", rtol=rtol, atol=1e-12,
                    events=reached, dense_output=True)
    if sol.status != 1:
        raise EdgeStallError("edge integration did not reach the end flux",
                             {"flux": float(sol.y[0, -1]), "time": float(sol.t[-1]), "message": sol.message})
    duration = float(sol.t_events[0][0])
    times = uniform_grid(duration, dt)
    fluxes = sol.sol(times)[0]
    fluxes[0], fluxes[-1] = phi_start, phi_end
    logger.debug("clr edge beta=%g: %.4f ns, %d samples", beta, duration, len(times))
    return Edge(times=times, fluxes=fluxes, duration=duration, beta=beta, phi_start=phi_start, phi_end=phi_end)


class PulseKind(str, Enum):
    FLUX = "flux"
    DRIVE = "drive"


class Envelope(str, Enum):
    PLAIN = "plain"            # truncated Gaussian, nonzero endpoints
    ZERO_BASED = "zero-based"  # shifted and rescaled so that the endpoints vanish
    SQUARE = "square"


class Carrier(BaseModel):
    frequency: float  # GHz
    phase: float = 0.0


class PulseShape(BaseModel):
    """Uniformly sampled waveform: flux in rad, or drive amplitude in GHz multiplying the coupler charge."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: PulseKind
    times: np.ndarray
    values: np.ndarray
    dt: float
    baseline: float = 0.0
    carrier: Optional[Carrier] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def value_at(self, t: float | np.ndarray) -> np.ndarray:
        return np.interp(t, self.times, self.values)

    def scaled(self, factor: float) -> "PulseShape":
        """Drive with its amplitude multiplied by `factor`."""
        scale = self.metadata.get("scale", 1.0) * factor
        return self.model_copy(update={"values": self.values * factor, "metadata": {**self.metadata, "scale": scale}})

    def with_carrier(self, frequency: float, phase: float = 0.0) -> "PulseShape":
        return self.model_copy(update={"carrier": Carrier(frequency=frequency, phase=phase)})

    def area(self) -> float:
        return float(trapezoid(self.values - self.baseline, self.times))

    def to_rows(self) -> List[tuple]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    def metadata_json(self, indent: int = 2) -> str:
        payload = {"kind": self.kind.value, "dt": self.dt, "baseline": self.baseline, "duration": self.duration,
                   "carrier": None if self.carrier is None else self.carrier.model_dump(), **self.metadata}
        return json.dumps(payload, indent=indent, default=float)

    def export(self, path: Path | str, header: Optional[Dict[str, Any]] = None) -> Path:
        """Write ``<path>.csv`` with (t_ns, value) and ``<path>.json`` with the metadata."""
        path = Path(path)
        write_csv(path.with_suffix(".csv"), ["t_ns", "value"], self.to_rows(), header)
        path.with_suffix(".json").write_text(self.metadata_json(), encoding="utf-8")
        return path.with_suffix(".csv")


def smooth(values: np.ndarray, baseline: float, sigma: float, dt: float, radius: float) -> np.ndarray:
    """Gaussian filter with the kernel truncated at `radius` (ns), the signal extended by its baseline."""
    if sigma <= 0:
        return values.copy()
    return gaussian_filter1d(values - baseline, sigma / dt, mode="constant", cval=0.0,
                             truncate=radius / sigma) + baseline


def assemble_flux_pulse(edge: Edge, flat_duration: float, idle_padding: float = 6.0, filter_sigma: float = 2.0,
                        dt: float = DEFAULT_DT, filter_radius: float = FLUX_FILTER_RADIUS) -> PulseShape:
    """
    Build [idle | rising edge | flat | falling edge | idle] and smooth it.

    The falling edge is the time mirror of the rising one and the grid is symmetric about the
    midpoint, so the unfiltered pulse satisfies phi(t) = phi(T - t) sample by sample.

    :param edge: rising edge from the idle flux to the flat-top flux.
    :param flat_duration: ns at the flat-top flux.
    :param idle_padding: ns at the idle flux before and after the pulse.
    :param filter_sigma: Gaussian filter standard deviation (ns), 0 disables filtering.
    :param dt: requested sample period (ns).
    :param filter_radius: kernel half width in units of sigma.
    :raises PulseError: negative durations, or idle padding shorter than the kernel half width.
    """
    if flat_duration < 0 or idle_padding < 0 or filter_sigma < 0:
        raise PulseError("durations and filter width must be non-negative",
                         {"flat": flat_duration, "idle": idle_padding, "sigma": filter_sigma})
    if filter_sigma > 0 and idle_padding < filter_radius * filter_sigma:
        raise PulseError("idle padding shorter than the filter half width distorts the endpoints",
                         {"idle": idle_padding, "required": filter_radius * filter_sigma})
    total = 2.0 * idle_padding + 2.0 * edge.duration + flat_duration
    times = uniform_grid(total, dt)
    step = float(times[1] - times[0])
    half = np.minimum(times, total - times)
    values = np.where(half <= idle_padding, edge.phi_start,
                      np.where(half >= idle_padding + edge.duration, edge.phi_end, edge.at(half - idle_padding)))
    values = smooth(values, edge.phi_start, filter_sigma, step, filter_radius * filter_sigma)
    values[0] = values[-1] = edge.phi_start
    metadata = {"edge_duration": edge.duration, "flat_duration": flat_duration, "idle_padding": idle_padding,
                "filter_sigma": filter_sigma, "filter_width": 2.0 * filter_radius * filter_sigma,
                "beta": edge.beta, "phi_idle": edge.phi_start, "phi_flat": edge.phi_end}
    return PulseShape(kind=PulseKind.FLUX, times=times, values=values, dt=step, baseline=edge.phi_start,
                      metadata=metadata)


def gaussian_unit_area(gate_time: float, sigma: float, envelope: Envelope | str = Envelope.ZERO_BASED) -> float:
    """Closed form integral of the unit-peak truncated Gaussian over [0, T_g]."""
    envelope = Envelope(envelope)
    plain = sigma * np.sqrt(2.0 * np.pi) * erf(gate_time / (2.0 * np.sqrt(2.0) * sigma))
    if envelope is Envelope.PLAIN:
        return float(plain)
    edge = np.exp(-gate_time ** 2 / (8.0 * sigma ** 2))
    return float((plain - edge * gate_time) / (1.0 - edge))


def gaussian_drive(gate_time: float, sigma: float, amplitude: float, frequency: float, idle_padding: float = 0.0,
                   filter_sigma: float = DRIVE_FILTER_SIGMA, filter_width: float = DRIVE_FILTER_WIDTH,
                   envelope: Envelope | str = Envelope.ZERO_BASED, phase: float = 0.0,
                   dt: float = DEFAULT_DT) -> PulseShape:
    """
    Gaussian microwave envelope centred on T_g/2, multiplied in the Hamiltonian by cos(2 pi f_d t + phase).

    :param gate_time: envelope duration T_g (ns).
    :param sigma: Gaussian standard deviation (ns).
    :param amplitude: peak amplitude (GHz).
    :param frequency: carrier frequency f_d (GHz).
    :param idle_padding: zero-amplitude time added on both sides (ns).
    :param filter_sigma: smoothing filter standard deviation (ns), 0 disables filtering.
    :param filter_width: total kernel width (ns).
    :param envelope: ``zero-based`` (default) removes the truncation steps, ``plain`` keeps them.
    :raises PulseError: non-positive sigma or duration, sigma larger than the duration.
    """
    envelope = Envelope(envelope)
    if sigma <= 0 or gate_time <= 0:
        raise PulseError("gate time and sigma must be positive", {"T_g": gate_time, "sigma": sigma})
    if sigma > gate_time:
        raise PulseError("sigma exceeds the gate time", {"T_g": gate_time, "sigma": sigma})

    def shape(t: np.ndarray) -> np.ndarray:
        g = np.exp(-(t - gate_time / 2.0) ** 2 / (2.0 * sigma ** 2))
        if envelope is Envelope.ZERO_BASED:
            edge = np.exp(-gate_time ** 2 / (8.0 * sigma ** 2))
            g = (g - edge) / (1.0 - edge)
        return g

    unit_area = gaussian_unit_area(gate_time, sigma, envelope)
    return _drive(shape, gate_time, amplitude, frequency, idle_padding, filter_sigma, filter_width, phase, dt,
                  {"envelope": envelope.value, "gate_time": gate_time, "sigma": sigma, "amplitude": amplitude,
                   "unit_area": unit_area})


def square_drive(gate_time: float, amplitude: float, frequency: float, idle_padding: float = 0.0,
                 filter_sigma: float = 0.0, filter_width: float = DRIVE_FILTER_WIDTH, phase: float = 0.0,
                 dt: float = DEFAULT_DT) -> PulseShape:
    if gate_time <= 0:
        raise PulseError("gate time must be positive", {"T_g": gate_time})
    return _drive(lambda t: np.ones_like(t), gate_time, amplitude, frequency, idle_padding, filter_sigma,
                  filter_width, phase, dt, {"envelope": Envelope.SQUARE.value, "gate_time": gate_time,
                                            "amplitude": amplitude, "unit_area": gate_time})


def _drive(shape: Callable, gate_time: float, amplitude: float, frequency: float, idle_padding: float,
           filter_sigma: float, filter_width: float, phase: float, dt: float, metadata: Dict[str, Any]) -> PulseShape:
    if idle_padding < 0:
        raise PulseError("idle padding must be non-negative", {"idle": idle_padding})
    total = gate_time + 2.0 * idle_padding
    times = uniform_grid(total, dt)
    step = float(times[1] - times[0])
    local = times - idle_padding
    inside = (local >= -1e-12) & (local <= gate_time + 1e-12)
    values = np.where(inside, amplitude * shape(np.clip(local, 0.0, gate_time)), 0.0)
    values = smooth(values, 0.0, filter_sigma, step, filter_width / 2.0)
    values[0] = values[-1] = 0.0
    metadata = {**metadata, "idle_padding": idle_padding, "filter_sigma": filter_sigma,
                "filter_width": filter_width, "area": amplitude * metadata["unit_area"]}
    return PulseShape(kind=PulseKind.DRIVE, times=times, values=values, dt=step, baseline=0.0,
                      carrier=Carrier(frequency=frequency, phase=phase), metadata=metadata)
