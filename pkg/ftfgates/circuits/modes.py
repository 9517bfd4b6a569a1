#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Single-mode quantization: fluxonium in the oscillator basis, transmon in the charge basis."""

import logging
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ToolkitError

logger = logging.getLogger(__name__)

DEFAULT_OSC_LEVELS = 150
DEFAULT_CHARGE_CUTOFF = 50
PHASE_CONVENTION = "largest-component-real-positive"
# sqrt(8 E_J E_C) / (2 pi^2 E_L) bounds of the integer and conventional regimes
INTEGER_RATIO = 1.25
CONVENTIONAL_RATIO = 0.75


class ModeError(ToolkitError, ValueError):
    module = "mode_quantization"


class FluxConvention(str, Enum):
    """How the coupler loop flux enters the effective Josephson energy."""

    HALF_LOOP = "half-loop"   # E_J cos(phi_ext / 2), symmetric SQUID
    LITERAL = "literal"       # E_J cos(phi_ext)


class Regime(str, Enum):
    INTEGER_FLUXONIUM = "integer-fluxonium"
    CONVENTIONAL = "conventional"
    BORDERLINE = "borderline"


class FluxoniumParams(BaseModel):
    """Fluxonium energies (GHz) and external flux (rad)."""

    model_config = ConfigDict(frozen=True)

    E_C: float = Field(gt=0)
    E_J: float = Field(ge=0)
    # a fluxonium without inductance has no oscillator basis
    E_L: float = Field(gt=0)
    phi_ext: float = 0.0


class TransmonParams(BaseModel):
    """Flux-tunable transmon energies (GHz) and loop flux (rad)."""

    model_config = ConfigDict(frozen=True)

    E_C: float = Field(gt=0)
    E_J: float = Field(ge=0)
    phi_ext: float = 0.0
    convention: FluxConvention = FluxConvention.HALF_LOOP

    def ej_eff(self, phi: Optional[float] = None) -> float:
        return effective_josephson(self.E_J, self.phi_ext if phi is None else phi, self.convention)

    def ej_eff_derivative(self, phi: Optional[float] = None) -> float:
        return effective_josephson_derivative(self.E_J, self.phi_ext if phi is None else phi, self.convention)


class ModeSpectrum(BaseModel):
    """Lowest eigenpairs of one circuit mode and its operator matrix elements in that eigenbasis."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: str
    energies: np.ndarray
    n_elements: np.ndarray
    cos_phi: Optional[np.ndarray] = None
    phi_elements: Optional[np.ndarray] = None
    ground_energy: float = 0.0
    ground_referenced: bool = True
    phase_convention: str = PHASE_CONVENTION

    @property
    def levels(self) -> int:
        return len(self.energies)

    def transition(self, i: int, j: int) -> float:
        return float(self.energies[j] - self.energies[i])

    def truncated(self, keep: int) -> "ModeSpectrum":
        """The same spectrum restricted to its lowest `keep` levels."""
        if keep > self.levels:
            raise ModeError(f"cannot keep {keep} levels of a {self.levels} level spectrum")
        cut = slice(0, keep)
        return self.model_copy(update={
            "energies": self.energies[cut],
            "n_elements": self.n_elements[cut, cut],
            "cos_phi": None if self.cos_phi is None else self.cos_phi[cut, cut],
            "phi_elements": None if self.phi_elements is None else self.phi_elements[cut, cut],
        })


def effective_josephson(e_j: float, phi: float, convention: FluxConvention = FluxConvention.HALF_LOOP) -> float:
    if FluxConvention(convention) is FluxConvention.HALF_LOOP:
        return e_j * np.cos(phi / 2.0)
    return e_j * np.cos(phi)


def effective_josephson_derivative(e_j: float, phi: float,
                                   convention: FluxConvention = FluxConvention.HALF_LOOP) -> float:
    if FluxConvention(convention) is FluxConvention.HALF_LOOP:
        return -0.5 * e_j * np.sin(phi / 2.0)
    return -e_j * np.sin(phi)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so that its largest-magnitude component is real and positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)[np.newaxis, :]


def _eigh_lowest(hamiltonian: np.ndarray, keep: int, mode: str) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return scipy.linalg.eigh(hamiltonian, subset_by_index=[0, keep - 1])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        diag = np.abs(np.diag(hamiltonian))
        raise ModeError(f"{mode} eigensolver did not converge", {
            "dimension": hamiltonian.shape[0],
            "norm": float(np.linalg.norm(hamiltonian)),
            "diagonal_range": (float(diag.min()), float(diag.max())),
            "cause": str(exc),
        }) from exc


def diagonalize_fluxonium(params: FluxoniumParams, osc_levels: int = DEFAULT_OSC_LEVELS, keep: int = 10,
                          ground_reference: bool = True) -> ModeSpectrum:
    """
    Diagonalize 4E_C n^2 + E_L phi^2/2 - E_J cos(phi - phi_ext) in the oscillator basis of its quadratic part.

    The basis oscillator has length l = (8 E_C / E_L)^(1/4), phi = l (a + a^+)/sqrt(2) and
    n = i (a^+ - a)/(sqrt(2) l). The cosine is evaluated through the eigendecomposition of the
    truncated phase matrix.

    :param params: fluxonium parameters.
    :param osc_levels: oscillator levels of the basis (at least 20).
    :param keep: number of eigenpairs returned.
    :param ground_reference: shift energies so that the ground state sits at 0.
    :raises ModeError: invalid truncation or eigensolver failure.
    :return: the spectrum with charge, phase and cos(phi) free matrix elements.
    """
    if osc_levels < 20:
        raise ModeError(f"osc_levels must be at least 20, got {osc_levels}")
    if keep > osc_levels or keep < 1:
        raise ModeError(f"keep={keep} must lie in [1, osc_levels={osc_levels}]")

    ell = (8.0 * params.E_C / params.E_L) ** 0.25
    plasma = np.sqrt(8.0 * params.E_C * params.E_L)
    a = np.diag(np.sqrt(np.arange(1, osc_levels)), 1)
    phi = ell / np.sqrt(2.0) * (a + a.T)
    # n = i * n_im with n_im real antisymmetric
    n_im = (a.T - a) / (np.sqrt(2.0) * ell)

    x, u = scipy.linalg.eigh(phi)
    cos_term = (u * np.cos(x - params.phi_ext)) @ u.T
    hamiltonian = np.diag(plasma * (np.arange(osc_levels) + 0.5)) - params.E_J * cos_term

    energies, vectors = _eigh_lowest(hamiltonian, keep, "fluxonium")
    vectors = fix_phases(vectors)
    ground = float(energies[0])
    if ground_reference:
        energies = energies - ground

    n_elements = 1j * (vectors.T @ n_im @ vectors)
    phi_elements = vectors.T @ phi @ vectors
    logger.debug("fluxonium E_C=%g E_J=%g E_L=%g: f01=%.6f GHz", params.E_C, params.E_J, params.E_L,
                 energies[1] - energies[0] if keep > 1 else float("nan"))
    return ModeSpectrum(kind="fluxonium", energies=np.asarray(energies), n_elements=n_elements,
                        phi_elements=phi_elements, ground_energy=ground, ground_referenced=ground_reference)


def diagonalize_transmon(params: TransmonParams, charge_cutoff: int = DEFAULT_CHARGE_CUTOFF, keep: int = 4,
                         ground_reference: bool = True) -> ModeSpectrum:
    """
    Diagonalize 4E_C n^2 - E_J,eff cos(phi) in the charge basis {|-N>, ..., |N>}.

    E_J,eff follows the flux convention of `params` and may be negative.

    :param params: transmon parameters.
    :param charge_cutoff: N, the basis holds 2N+1 charge states.
    :param keep: number of eigenpairs returned.
    :param ground_reference: shift energies so that the ground state sits at 0.
    :return: the spectrum with charge and cos(phi) matrix elements.
    """
    dimension = 2 * charge_cutoff + 1
    if keep > dimension or keep < 1:
        raise ModeError(f"keep={keep} must lie in [1, 2*charge_cutoff+1={dimension}]")
    charges = np.arange(-charge_cutoff, charge_cutoff + 1, dtype=float)
    cos_phi = 0.5 * (np.eye(dimension, k=1) + np.eye(dimension, k=-1))
    hamiltonian = np.diag(4.0 * params.E_C * charges ** 2) - params.ej_eff() * cos_phi

    energies, vectors = _eigh_lowest(hamiltonian, keep, "transmon")
    vectors = fix_phases(vectors)
    ground = float(energies[0])
    if ground_reference:
        energies = energies - ground
    n_elements = (vectors.T * charges) @ vectors
    return ModeSpectrum(kind="transmon", energies=np.asarray(energies), n_elements=n_elements.astype(complex),
                        cos_phi=vectors.T @ cos_phi @ vectors, ground_energy=ground,
                        ground_referenced=ground_reference)


class RegimeReport(BaseModel):
    """Both sides of the integer-fluxonium inequality and the resulting class."""

    plasmon_scale: float
    fluxon_scale: float
    ratio: float
    regime: Regime


def classify_regime(params: FluxoniumParams, integer_ratio: float = INTEGER_RATIO,
                    conventional_ratio: float = CONVENTIONAL_RATIO) -> RegimeReport:
    """
    Compare sqrt(8 E_J E_C) with 2 pi^2 E_L.

    :param params: fluxonium parameters.
    :param integer_ratio: ratio at or above which the mode is an integer fluxonium.
    :param conventional_ratio: ratio at or below which the mode is a conventional fluxonium.
    """
    plasmon = float(np.sqrt(8.0 * params.E_J * params.E_C))
    fluxon = float(2.0 * np.pi ** 2 * params.E_L)
    ratio = plasmon / fluxon
    if ratio >= integer_ratio:
        regime = Regime.INTEGER_FLUXONIUM
    elif ratio <= conventional_ratio:
        regime = Regime.CONVENTIONAL
    else:
        regime = Regime.BORDERLINE
    return RegimeReport(plasmon_scale=plasmon, fluxon_scale=fluxon, ratio=float(ratio), regime=regime)
