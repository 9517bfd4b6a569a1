#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Static ZZ from Rayleigh-Schroedinger perturbation theory in the bare product basis."""

import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel

from .composite import COMPUTATIONAL_LABELS, QUBIT_STATES, CouplingGraph, Label, build_hamiltonian
from .modes import ModeSpectrum
from ..core.errors import ToolkitError

logger = logging.getLogger(__name__)

DEFAULT_INTERMEDIATE_LEVELS = 8
DEGENERACY_GAP = 1e-6  # GHz
ORDERS = (2, 3, 4)
VANISHING = 1e-10  # relative to the largest second order shift


class PerturbationError(ToolkitError, ValueError):
    module = "zz_perturbation"


class DegeneracyError(PerturbationError):
    """A computational state is degenerate with a state it couples to."""


class PerturbativeZZ(BaseModel):
    """Per-order ZZ and the energy corrections it is built from."""

    zeta2: float
    zeta3: float
    zeta4: float
    total: float
    corrections: Dict[str, Dict[int, float]]
    intermediate_levels: int


def _label_of(index: int, dims: Tuple[int, int, int]) -> Label:
    d1, dc, d2 = dims
    return (index // (dc * d2), (index // d2) % dc, index % d2)


def _state_corrections(m: int, bare: np.ndarray, coupling: sp.csr_matrix,
                       dims: Tuple[int, int, int]) -> Dict[int, float]:
    v = np.asarray(coupling[:, [m]].todense()).ravel()
    delta = bare[m] - bare
    reach1 = np.abs(v) > 0
    reach2 = (abs(coupling) @ reach1.astype(float)) > 0
    reach = (reach1 | reach2)
    reach[m] = False
    close = reach & (np.abs(delta) < DEGENERACY_GAP)
    if close.any():
        colliding = [_label_of(int(k), dims) for k in np.flatnonzero(close)]
        raise DegeneracyError("perturbation theory is invalid: degenerate intermediate state",
                              {"state": _label_of(m, dims), "colliding": colliding})
    resolvent = np.zeros_like(delta)
    mask = np.abs(delta) >= DEGENERACY_GAP
    mask[m] = False
    resolvent[mask] = 1.0 / delta[mask]

    w = resolvent * v
    e2 = np.vdot(v, w).real
    vw = coupling @ w
    e3 = np.vdot(w, vw).real
    e4 = np.vdot(vw, resolvent * vw).real - e2 * np.vdot(w, w).real
    return {2: float(e2), 3: float(e3), 4: float(e4)}


def perturbative_zz(modes: Sequence[ModeSpectrum], couplings: CouplingGraph,
                    intermediate_levels: int = DEFAULT_INTERMEDIATE_LEVELS) -> PerturbativeZZ:
    """
    Second, third and fourth order ZZ.

    With V the coupling part of the Hamiltonian, R the diagonal resolvent 1/(E_m - E_k) (zero at m),
    v = V|m> and w = R v, the corrections to the energy of |m> are v^+ w, w^+ V w and
    w^+ V R V w - E^(2) w^+ w. Sums run over the product basis truncated to
    `intermediate_levels` levels per mode; only states reachable through V contribute.

    :param modes: fluxonium 1, coupler and fluxonium 2 spectra.
    :param couplings: charge couplings.
    :param intermediate_levels: levels kept per mode in the intermediate sums.
    :raises DegeneracyError: a reachable intermediate state lies within 1 kHz of a computational state.
    """
    truncated = [mode.truncated(min(mode.levels, intermediate_levels)) for mode in modes]
    dims = tuple(mode.levels for mode in truncated)
    full = build_hamiltonian(truncated, couplings)
    unperturbed = build_hamiltonian(truncated, CouplingGraph())
    coupling_part = full - unperturbed
    # first order shifts join the unperturbed energies, V keeps the off-diagonal part
    bare = np.real(np.diag(unperturbed)) + np.real(np.diag(coupling_part))
    np.fill_diagonal(coupling_part, 0.0)
    coupling = sp.csr_matrix(coupling_part)
    coupling.eliminate_zeros()

    d1, dc, d2 = dims
    corrections: Dict[str, Dict[int, float]] = {}
    for key in QUBIT_STATES:
        i, j, k = COMPUTATIONAL_LABELS[key]
        m = (i * dc + j) * d2 + k
        corrections[key] = _state_corrections(m, bare, coupling, dims)

    zetas = {order: corrections["11"][order] + corrections["00"][order]
             - corrections["10"][order] - corrections["01"][order] for order in ORDERS}
    return PerturbativeZZ(zeta2=zetas[2], zeta3=zetas[3], zeta4=zetas[4], total=zetas[2] + zetas[3] + zetas[4],
                          corrections=corrections, intermediate_levels=intermediate_levels)


class ScalingMode(str, Enum):
    JOINT = "joint"       # all three couplings scaled
    COUPLER = "coupler"   # only J_1c and J_2c scaled


class ScalingReport(BaseModel):
    """Log-log fitted exponents of each order against the coupling scale."""

    mode: ScalingMode
    scales: List[float]
    values: Dict[int, List[float]]
    exponents: Dict[int, Optional[float]]
    residuals: Dict[int, Optional[float]]
    expected: Dict[int, Optional[int]]

    def satisfied(self, tolerance: float = 1e-6) -> bool:
        for order, target in self.expected.items():
            if target is None:
                continue
            exponent = self.exponents[order]
            if exponent is None or abs(exponent - target) > tolerance:
                return False
        return True


def order_scaling_check(modes: Sequence[ModeSpectrum], couplings: CouplingGraph,
                        scales: Sequence[float] = (0.5, 1.0, 2.0), mode: ScalingMode | str = ScalingMode.JOINT,
                        intermediate_levels: int = DEFAULT_INTERMEDIATE_LEVELS) -> ScalingReport:
    """
    Fit the power law of each ZZ order in the coupling scale.

    In joint mode the expected exponents are 2, 3 and 4. In coupler mode the direct coupling is held
    fixed: zeta2 does not depend on the scale and zeta3 grows as its square; zeta4 mixes the
    J_12^2 J_c^2 and J_c^4 terms and has no expected exponent unless J_12 vanishes. A component
    that vanishes at every scale reports ``None``.
    """
    mode = ScalingMode(mode)
    scales = [float(s) for s in scales]
    values: Dict[int, List[float]] = {order: [] for order in ORDERS}
    energy_scale = 0.0
    for s in scales:
        scaled = couplings.scaled(direct=s, coupler=s) if mode is ScalingMode.JOINT else couplings.scaled(coupler=s)
        result = perturbative_zz(modes, scaled, intermediate_levels)
        energy_scale = max(energy_scale, max(abs(c[2]) for c in result.corrections.values()))
        for order, value in zip(ORDERS, (result.zeta2, result.zeta3, result.zeta4)):
            values[order].append(value)

    if mode is ScalingMode.JOINT:
        expected: Dict[int, Optional[int]] = {2: 2, 3: 3, 4: 4}
    else:
        expected = {2: 0, 3: 2, 4: 4 if couplings.J_12 == 0 else None}

    exponents: Dict[int, Optional[float]] = {}
    residuals: Dict[int, Optional[float]] = {}
    log_s = np.log(scales)
    for order in ORDERS:
        magnitudes = np.abs(values[order])
        if np.all(magnitudes <= VANISHING * energy_scale):
            exponents[order] = None
            residuals[order] = None
            expected[order] = None
            continue
        coeffs, res, *_ = np.polyfit(log_s, np.log(magnitudes), 1, full=True)
        exponents[order] = float(coeffs[0])
        residuals[order] = float(res[0]) if len(res) else 0.0
    logger.info("zz order scaling (%s): %s", mode.value, exponents)
    return ScalingReport(mode=mode, scales=scales, values=values, exponents=exponents, residuals=residuals,
                         expected=expected)


class ConvergenceReport(BaseModel):
    levels: int
    doubled: int
    total: float
    total_doubled: float
    change: float


def truncation_convergence(modes: Sequence[ModeSpectrum], couplings: CouplingGraph,
                           intermediate_levels: int = DEFAULT_INTERMEDIATE_LEVELS) -> ConvergenceReport:
    """Change of the perturbative total when the intermediate truncation is doubled."""
    base = perturbative_zz(modes, couplings, intermediate_levels)
    doubled = perturbative_zz(modes, couplings, 2 * intermediate_levels)
    return ConvergenceReport(levels=intermediate_levels, doubled=2 * intermediate_levels, total=base.total,
                             total_doubled=doubled.total, change=abs(doubled.total - base.total))
