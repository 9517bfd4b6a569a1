#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Adiabatic CZ: ZZ versus coupler flux, beta solve for a conditional pi phase, flat-duration optimization."""

import logging
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import trapezoid
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.signal import find_peaks

from ..circuits.composite import COMPUTATIONAL_LABELS, QUBIT_STATES, CompositeSystem, static_zz
from ..core.parallel import parallel_map
from ..core.units import TWO_PI
from ..dynamics.evolution import Workspace, propagate_schrodinger
from ..dynamics.pulses import (DEFAULT_DT, DFactorTable, Edge, PulseError, PulseShape, assemble_flux_pulse,
                               clr_edge, edge_duration)
from .metrics import GateError, GateResult, UnreachablePhaseError, computational_block, gate_metrics

logger = logging.getLogger(__name__)

PHASE_TOLERANCE = 1e-3  # rad
FLAT_STEP = 0.25        # ns
FFT_POINTS = 1 << 16


class ZZCurve(BaseModel):
    """zeta(phi) in GHz on a coupler flux grid with a monotone cubic interpolant over the resolved points."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fluxes: np.ndarray
    zeta: np.ndarray
    valid: np.ndarray

    @cached_property
    def _interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.fluxes[self.valid], self.zeta[self.valid], extrapolate=False)

    def __call__(self, phi: float | np.ndarray) -> np.ndarray:
        return self._interpolant(phi)

    def check_range(self, low: float, high: float) -> None:
        """
        :raises GateError: a flagged point or the end of the grid lies inside [low, high].
        """
        low, high = min(low, high), max(low, high)
        if low < self.fluxes[0] - 1e-12 or high > self.fluxes[-1] + 1e-12:
            raise GateError("flux range leaves the ZZ grid", {"range": (low, high),
                                                              "grid": (float(self.fluxes[0]), float(self.fluxes[-1]))})
        inside = (self.fluxes >= low) & (self.fluxes <= high)
        flagged = self.fluxes[inside & ~self.valid]
        if flagged.size:
            raise GateError("the pulse enters a hybridized flux region", {"flux": float(flagged[0])})

    def admissible_limit(self, phi_start: float, direction: float) -> float:
        """Farthest flux reachable from `phi_start` in `direction` without crossing a flagged point."""
        order = np.arange(len(self.fluxes)) if direction > 0 else np.arange(len(self.fluxes))[::-1]
        limit = phi_start
        for k in order:
            phi = self.fluxes[k]
            if (phi - phi_start) * direction < 0:
                continue
            if not self.valid[k]:
                break
            limit = float(phi)
        return limit


def zz_curve(fluxes: Sequence[float], zeta: Sequence[float], valid: Optional[Sequence[bool]] = None) -> ZZCurve:
    fluxes = np.asarray(fluxes, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    valid = np.ones(len(fluxes), dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    order = np.argsort(fluxes)
    if valid.sum() < 2:
        raise GateError("a ZZ curve needs at least two resolved points", {"resolved": int(valid.sum())})
    return ZZCurve(fluxes=fluxes[order], zeta=zeta[order], valid=valid[order])


def zz_vs_flux(systems: Sequence[CompositeSystem]) -> ZZCurve:
    """Static ZZ of systems evaluated along a coupler flux grid."""
    reports = [static_zz(system) for system in systems]
    fluxes = [system.coupler.phi_ext for system in systems]
    flagged = sum(not r.valid for r in reports)
    if flagged:
        logger.info("%d of %d ZZ points carry unresolved labels", flagged, len(reports))
    return zz_curve(fluxes, [r.zeta for r in reports], [r.valid for r in reports])


class AdiabaticDesign(BaseModel):
    """Solved flux pulse for a conditional phase."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    beta: float
    edge_duration: float
    flat_duration: float
    phi_idle: float
    phi_flat: float
    target: float
    phase: float
    idle_padding: float
    filter_sigma: float
    pulse: PulseShape
    unfiltered: PulseShape

    @property
    def total_duration(self) -> float:
        """Edges and flat top, idle padding excluded."""
        return 2.0 * self.edge_duration + self.flat_duration


def conditional_phase(curve: ZZCurve, pulse: PulseShape) -> float:
    """2 pi |int zeta(phi(t)) dt| over a flux pulse."""
    curve.check_range(float(np.min(pulse.values)), float(np.max(pulse.values)))
    return float(TWO_PI * abs(trapezoid(curve(pulse.values), pulse.times)))


def _flux_for_area(table: DFactorTable, phi_start: float, phi_limit: float, area: float) -> float:
    """phi such that int_{phi_start}^{phi} D = area."""
    full = edge_duration(table, 1.0, phi_start, phi_limit)
    if area >= full:
        return phi_limit
    low, high = sorted((phi_start, phi_limit))
    return brentq(lambda phi: edge_duration(table, 1.0, phi_start, phi) - area if phi != phi_start else -area,
                  low, high, xtol=1e-13, rtol=1e-13)


def _edge_for(table: DFactorTable, beta: float, phi_idle: float, phi_limit: float, duration: float, dt: float) -> Edge:
    phi_end = _flux_for_area(table, phi_idle, phi_limit, beta * duration)
    return clr_edge(table, beta, phi_idle, phi_end, dt)


def solve_beta(table: DFactorTable, curve: ZZCurve, edge_duration_ns: float, flat_duration: float,
               target: float = np.pi, phi_idle: Optional[float] = None, phi_limit: Optional[float] = None,
               idle_padding: float = 6.0, filter_sigma: float = 2.0, dt: float = DEFAULT_DT) -> AdiabaticDesign:
    """
    Find beta whose CLR pulse accumulates `target` conditional phase.

    For a fixed edge duration beta sets the flux excursion: the edge ends where int D dphi = beta T_edge.
    The phase is evaluated on the unfiltered pulse, idle padding included.

    :param table: D table along the coupler flux path.
    :param curve: ZZ curve on the same path.
    :param edge_duration_ns: duration of each edge (ns).
    :param flat_duration: flat-top duration (ns).
    :param target: conditional phase (rad).
    :param phi_idle: idle flux, the lower end of the D table by default.
    :param phi_limit: largest excursion allowed; the farthest resolved flux of the curve by default.
    :raises UnreachablePhaseError: the largest excursion does not accumulate `target`.
    :raises GateError: invalid durations.
    """
    if edge_duration_ns <= 0 or flat_duration < 0:
        raise GateError("edge duration must be positive and flat duration non-negative",
                        {"edge": edge_duration_ns, "flat": flat_duration})
    low, high = table.span
    if phi_idle is None:
        phi_idle = low
    if phi_limit is None:
        direction = 1.0 if high - phi_idle >= phi_idle - low else -1.0
        phi_limit = curve.admissible_limit(phi_idle, direction)
        phi_limit = min(phi_limit, high) if direction > 0 else max(phi_limit, low)
    if phi_limit == phi_idle:
        raise GateError("no admissible flux excursion from the idle point", {"phi_idle": phi_idle})

    def build(beta: float) -> Tuple[Edge, PulseShape]:
        edge = _edge_for(table, beta, phi_idle, phi_limit, edge_duration_ns, dt)
        raw = assemble_flux_pulse(edge, flat_duration, idle_padding, 0.0, dt)
        return edge, raw

    def phase_of(beta: float) -> float:
        return conditional_phase(curve, build(beta)[1])

    beta_max = edge_duration(table, 1.0, phi_idle, phi_limit) / edge_duration_ns
    beta_hi = beta_max * (1.0 - 1e-9)
    reachable = phase_of(beta_hi)
    if reachable < target:
        raise UnreachablePhaseError("target conditional phase is not reachable",
                                    {"target": target, "max_phase": reachable, "phi_limit": phi_limit})
    beta_lo = beta_max * 1e-6
    if phase_of(beta_lo) >= target:
        raise UnreachablePhaseError("idle ZZ alone exceeds the target phase", {"target": target})
    beta = brentq(lambda b: phase_of(b) - target, beta_lo, beta_hi, xtol=1e-14, rtol=1e-12)
    edge, raw = build(beta)
    phase = conditional_phase(curve, raw)
    if abs(phase - target) > PHASE_TOLERANCE:
        raise GateError("beta solve did not converge", {"phase": phase, "target": target})
    pulse = assemble_flux_pulse(edge, flat_duration, idle_padding, filter_sigma, dt)
    logger.info("beta=%.6g rad: edge %.3f ns to %.5f rad, phase %.6f", beta, edge.duration, edge.phi_end, phase)
    return AdiabaticDesign(beta=beta, edge_duration=edge.duration, flat_duration=flat_duration, phi_idle=phi_idle,
                           phi_flat=edge.phi_end, target=target, phase=phase, idle_padding=idle_padding,
                           filter_sigma=filter_sigma, pulse=pulse, unfiltered=raw)


def flat_duration_grid(start: float, stop: float, step: float = FLAT_STEP) -> np.ndarray:
    if step <= 0 or stop < start:
        raise GateError("invalid flat duration grid", {"start": start, "stop": stop, "step": step})
    return start + step * np.arange(int(np.floor((stop - start) / step + 1e-9)) + 1)


class FlatScanPoint(BaseModel):
    edge_duration: float
    flat_duration: float
    total_duration: float
    beta: Optional[float] = None
    leakage_error: Optional[float] = None
    phase_error: Optional[float] = None
    leakage: Dict[str, float] = {}
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.leakage_error is not None


CandidateOutcome = Tuple[FlatScanPoint, Optional[GateResult], Optional[AdiabaticDesign]]


def _evaluate_candidate(task: Tuple[Workspace, DFactorTable, ZZCurve, float, float, Dict[str, Any]]
                        ) -> CandidateOutcome:
    workspace, table, curve, edge_ns, flat, options = task
    total = 2.0 * edge_ns + flat
    try:
        design = solve_beta(table, curve, edge_ns, flat, **options)
        result = propagate_schrodinger(workspace, design.pulse, [COMPUTATIONAL_LABELS[k] for k in QUBIT_STATES])
        metrics = gate_metrics(computational_block(result, workspace))
    except (GateError, PulseError) as err:
        failed = FlatScanPoint(edge_duration=edge_ns, flat_duration=flat, total_duration=total, message=str(err))
        return failed, None, None
    point = FlatScanPoint(edge_duration=edge_ns, flat_duration=flat, total_duration=total, beta=design.beta,
                          leakage_error=metrics.leakage_error, phase_error=metrics.phase_error,
                          leakage=metrics.leakage)
    return point, metrics, design


def flat_duration_scan(workspace: Workspace, table: DFactorTable, curve: ZZCurve, edge_durations: Sequence[float],
                       flat_durations: Sequence[float], jobs: int = 1, **options: Any) -> List[CandidateOutcome]:
    """
    Evaluate every (edge, flat) candidate; each one re-solves beta for the target phase.

    :return: scan points in grid order, with the GateResult and design of each candidate (None when infeasible).
    """
    if not len(edge_durations) or not len(flat_durations):
        raise GateError("empty duration grid")
    tasks = [(workspace, table, curve, float(e), float(f), options) for e in edge_durations for f in flat_durations]
    logger.info("flat duration scan over %d candidates", len(tasks))
    return parallel_map(_evaluate_candidate, tasks, jobs)


class FlatDurationOptimum(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    result: GateResult
    design: AdiabaticDesign
    scan: List[FlatScanPoint]

    def traces(self, edge_duration_ns: float) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        """Final leakage per computational state versus flat duration for one edge duration."""
        points = [p for p in self.scan if p.ok and abs(p.edge_duration - edge_duration_ns) < 1e-9]
        flats = np.array([p.flat_duration for p in points])
        return flats, {key: np.array([p.leakage[key] for p in points]) for key in QUBIT_STATES}


def optimize_flat_duration(workspace: Workspace, table: DFactorTable, curve: ZZCurve, edge_durations: Sequence[float],
                           flat_durations: Sequence[float], jobs: int = 1, **options: Any) -> FlatDurationOptimum:
    """
    Pick the candidate with the smallest leakage error.

    :raises GateError: no candidate reached the target phase.
    """
    outcomes = flat_duration_scan(workspace, table, curve, edge_durations, flat_durations, jobs, **options)
    feasible = [(point, metrics, design) for point, metrics, design in outcomes if metrics is not None]
    if not feasible:
        raise GateError("no candidate reaches the target phase", {"candidates": len(outcomes)})
    point, metrics, design = min(feasible, key=lambda item: item[1].leakage_error)
    logger.info("best candidate: edge %.2f ns, flat %.2f ns, leakage error %.3e", point.edge_duration,
                point.flat_duration, metrics.leakage_error)
    return FlatDurationOptimum(result=metrics, design=design, scan=[p for p, _, _ in outcomes])


def oscillation_frequencies(flat_durations: Sequence[float], trace: Sequence[float], count: int = 2) -> List[float]:
    """
    Dominant frequencies (GHz) of a trace sampled on a uniform flat-duration grid, strongest first.

    :raises GateError: fewer than 8 samples or a non-uniform grid.
    """
    x = np.asarray(flat_durations, dtype=float)
    y = np.asarray(trace, dtype=float)
    if len(x) < 8 or len(x) != len(y):
        raise GateError("oscillation fit needs at least 8 matching samples", {"samples": len(x)})
    steps = np.diff(x)
    if np.ptp(steps) > 1e-6 * steps.mean():
        raise GateError("oscillation fit needs a uniform grid")
    spectrum = np.abs(np.fft.rfft(y - y.mean(), n=max(FFT_POINTS, len(y))))
    frequencies = np.fft.rfftfreq(max(FFT_POINTS, len(y)), d=steps.mean())
    peaks, _ = find_peaks(spectrum)
    strongest = peaks[np.argsort(spectrum[peaks])[::-1][:count]]
    return [float(frequencies[k]) for k in strongest]


def leakage_gaps(system: CompositeSystem, key: str, count: int = 3) -> List[Tuple[float, float]]:
    """
    (gap GHz, |<m~|cos phi_c|ij~>|) for the `count` states most strongly coupled to a computational state
    by the coupler flux operator; the gaps set the leakage oscillation frequencies at a flat top.
    """
    k = system.index(COMPUTATIONAL_LABELS[key], allow_flagged=True)
    column = system.vectors.conj().T @ (system.coupler_cos() @ system.vectors[:, k])
    column[k] = 0.0
    strongest = np.argsort(np.abs(column))[::-1][:count]
    return [(float(abs(system.energies[m] - system.energies[k])), float(abs(column[m]))) for m in strongest]
