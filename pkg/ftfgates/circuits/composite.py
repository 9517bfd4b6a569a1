#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Fluxonium-transmon-fluxonium Hamiltonian, dressed-state labeling, ZZ and dressed shifts.

Product states are ordered (fluxonium 1, coupler, fluxonium 2) and written |i j k>.
"""

import logging
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from .modes import (DEFAULT_CHARGE_CUTOFF, DEFAULT_OSC_LEVELS, FluxoniumParams, ModeSpectrum, TransmonParams,
                    diagonalize_fluxonium, diagonalize_transmon, fix_phases)
from ..core.errors import ToolkitError
from ..core.parallel import parallel_map

logger = logging.getLogger(__name__)

Label = Tuple[int, int, int]

HYBRIDIZATION_THRESHOLD = 0.5
COMPUTATIONAL_LABELS: Dict[str, Label] = {"00": (0, 0, 0), "01": (0, 0, 1), "10": (1, 0, 0), "11": (1, 0, 1)}
QUBIT_STATES = ("00", "01", "10", "11")


class CompositeError(ToolkitError, ValueError):
    module = "composite_hamiltonian"


class CouplingGraph(BaseModel):
    """Coefficients (GHz) of the n_1 n_2, n_1 n_c and n_2 n_c terms."""

    model_config = ConfigDict(frozen=True)

    J_12: float = 0.0
    J_1c: float = 0.0
    J_2c: float = 0.0

    def scaled(self, direct: float = 1.0, coupler: float = 1.0) -> "CouplingGraph":
        return CouplingGraph(J_12=self.J_12 * direct, J_1c=self.J_1c * coupler, J_2c=self.J_2c * coupler)


class Truncation(BaseModel):
    """Basis sizes of the single-mode solvers and levels kept in the product space."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    osc_levels: int = Field(DEFAULT_OSC_LEVELS, ge=20)
    charge_cutoff: int = Field(DEFAULT_CHARGE_CUTOFF, ge=1)
    fluxonium_levels: int = Field(10, ge=2)
    coupler_levels: int = Field(4, ge=2)


class FTFCircuit(BaseModel):
    """Circuit parameters of the three-mode Hamiltonian."""

    model_config = ConfigDict(frozen=True)

    fluxonium1: FluxoniumParams
    coupler: TransmonParams
    fluxonium2: FluxoniumParams
    couplings: CouplingGraph = CouplingGraph()
    truncation: Truncation = Truncation()

    def with_coupler_flux(self, phi: float) -> "FTFCircuit":
        return self.model_copy(update={"coupler": self.coupler.model_copy(update={"phi_ext": phi})})

    def with_couplings(self, couplings: CouplingGraph) -> "FTFCircuit":
        return self.model_copy(update={"couplings": couplings})

    def fluxonium_spectra(self) -> Tuple[ModeSpectrum, ModeSpectrum]:
        t = self.truncation
        return (diagonalize_fluxonium(self.fluxonium1, t.osc_levels, t.fluxonium_levels),
                diagonalize_fluxonium(self.fluxonium2, t.osc_levels, t.fluxonium_levels))

    def coupler_spectrum(self, phi: Optional[float] = None) -> ModeSpectrum:
        params = self.coupler if phi is None else self.coupler.model_copy(update={"phi_ext": phi})
        return diagonalize_transmon(params, self.truncation.charge_cutoff, self.truncation.coupler_levels)

    def system(self, phi: Optional[float] = None) -> "CompositeSystem":
        f1, f2 = self.fluxonium_spectra()
        return assemble((f1, self.coupler_spectrum(phi), f2), self.couplings,
                        self.coupler if phi is None else self.coupler.model_copy(update={"phi_ext": phi}))


class CompositeSystem(BaseModel):
    """Diagonalized three-mode Hamiltonian with its dressed-state label map."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    modes: Tuple[ModeSpectrum, ModeSpectrum, ModeSpectrum]
    couplings: CouplingGraph
    coupler: Optional[TransmonParams] = None
    hamiltonian: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    labels: List[Label]
    max_overlaps: np.ndarray
    flagged: np.ndarray

    @property
    def dims(self) -> Tuple[int, int, int]:
        return tuple(mode.levels for mode in self.modes)

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims))

    @cached_property
    def _label_index(self) -> Dict[Label, int]:
        index: Dict[Label, int] = {}
        for k, label in enumerate(self.labels):
            if not self.flagged[k]:
                index[label] = k
        return index

    @cached_property
    def _loose_index(self) -> Dict[Label, List[int]]:
        index: Dict[Label, List[int]] = {}
        for k, label in enumerate(self.labels):
            index.setdefault(label, []).append(k)
        return index

    def bare_index(self, label: Label) -> int:
        i, j, k = label
        d1, dc, d2 = self.dims
        if not (0 <= i < d1 and 0 <= j < dc and 0 <= k < d2):
            raise CompositeError(f"bare state {label} outside the truncated space {self.dims}")
        return (i * dc + j) * d2 + k

    def bare_label(self, index: int) -> Label:
        d1, dc, d2 = self.dims
        return (index // (dc * d2), (index // d2) % dc, index % d2)

    def index(self, label: Label, allow_flagged: bool = False) -> Optional[int]:
        """Dressed index carrying `label`; flagged states only when `allow_flagged` and unambiguous."""
        label = tuple(label)
        if label in self._label_index:
            return self._label_index[label]
        if allow_flagged:
            candidates = self._loose_index.get(label, [])
            if len(candidates) == 1:
                return candidates[0]
        return None

    def is_resolved(self, label: Label) -> bool:
        return self.index(label) is not None

    def energy(self, label: Label, allow_flagged: bool = True) -> float:
        k = self.index(label, allow_flagged)
        return float("nan") if k is None else float(self.energies[k])

    def dressed_vector(self, label: Label) -> np.ndarray:
        k = self.index(label, allow_flagged=True)
        if k is None:
            raise CompositeError(f"no dressed state labeled {label}")
        return self.vectors[:, k]

    def overlap(self, label: Label, bare: Label) -> float:
        """|<label~|bare>|^2"""
        return float(abs(self.dressed_vector(label)[self.bare_index(bare)]) ** 2)

    def bare_weight_sums(self) -> np.ndarray:
        """Total dressed weight of every bare state (1 for a complete basis)."""
        return np.sum(np.abs(self.vectors) ** 2, axis=1)

    def embed(self, operator: np.ndarray, mode: int) -> np.ndarray:
        """Embed a single-mode operator (mode 0, 1, 2) into the product space."""
        factors = [np.eye(d) for d in self.dims]
        factors[mode] = operator
        return np.kron(np.kron(factors[0], factors[1]), factors[2])

    def to_dressed(self, operator: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ operator @ self.vectors

    def coupler_cos(self) -> np.ndarray:
        cos_phi = self.modes[1].cos_phi
        if cos_phi is None:
            raise CompositeError("the coupler spectrum carries no cos(phi) matrix elements")
        return self.embed(cos_phi, 1)

    def hamiltonian_at(self, phi: float) -> np.ndarray:
        """Hamiltonian at coupler flux `phi`, written in the fixed single-mode bases of this system."""
        if self.coupler is None:
            raise CompositeError("the system was assembled without coupler parameters")
        delta = self.coupler.ej_eff(phi) - self.coupler.ej_eff()
        return self.hamiltonian - delta * self.coupler_cos()


def _kron3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.kron(np.kron(a, b), c)


def build_hamiltonian(modes: Sequence[ModeSpectrum], couplings: CouplingGraph) -> np.ndarray:
    f1, c, f2 = modes
    i1, ic, i2 = (np.eye(m.levels) for m in modes)
    hamiltonian = (_kron3(np.diag(f1.energies), ic, i2) + _kron3(i1, np.diag(c.energies), i2)
                   + _kron3(i1, ic, np.diag(f2.energies))).astype(complex)
    if couplings.J_12:
        hamiltonian += couplings.J_12 * _kron3(f1.n_elements, ic, f2.n_elements)
    if couplings.J_1c:
        hamiltonian += couplings.J_1c * _kron3(f1.n_elements, c.n_elements, i2)
    if couplings.J_2c:
        hamiltonian += couplings.J_2c * _kron3(i1, c.n_elements, f2.n_elements)
    return hamiltonian


def label_states(vectors: np.ndarray, dims: Tuple[int, int, int]) -> Tuple[List[Label], np.ndarray, np.ndarray]:
    """
    Label each dressed state by its largest bare overlap.

    A state is flagged when that overlap is below one half. Two states can only share a label
    when both sit below one half, so unflagged labels are unique.
    """
    weights = np.abs(vectors) ** 2
    best = np.argmax(weights, axis=0)
    max_overlaps = weights[best, np.arange(weights.shape[1])]
    d1, dc, d2 = dims
    labels = [(int(b // (dc * d2)), int((b // d2) % dc), int(b % d2)) for b in best]
    flagged = max_overlaps < HYBRIDIZATION_THRESHOLD
    seen: Dict[Label, int] = {}
    for k, label in enumerate(labels):
        if flagged[k]:
            continue
        if label in seen:
            flagged[k] = flagged[seen[label]] = True
        else:
            seen[label] = k
    return labels, max_overlaps, flagged


def assemble(modes: Sequence[ModeSpectrum], couplings: CouplingGraph,
             coupler: Optional[TransmonParams] = None) -> CompositeSystem:
    """
    Build and diagonalize the three-mode Hamiltonian.

    :param modes: fluxonium 1, coupler and fluxonium 2 spectra, each with at least two levels.
    :param couplings: charge coupling coefficients.
    :param coupler: coupler parameters, needed for flux derivatives and re-biased Hamiltonians.
    :raises CompositeError: a mode is missing levels or charge matrix elements of the right shape.
    """
    if len(modes) != 3:
        raise CompositeError(f"expected three mode spectra, got {len(modes)}")
    for position, mode in enumerate(modes):
        if mode.levels < 2:
            raise CompositeError(f"mode {position} keeps {mode.levels} level(s), at least 2 are needed")
        if mode.n_elements.shape != (mode.levels, mode.levels):
            raise CompositeError(f"mode {position}: n_elements shape {mode.n_elements.shape} "
                                 f"does not match {mode.levels} levels")
    hamiltonian = build_hamiltonian(modes, couplings)
    energies, vectors = scipy.linalg.eigh(hamiltonian)
    vectors = fix_phases(vectors)
    dims = tuple(mode.levels for mode in modes)
    labels, max_overlaps, flagged = label_states(vectors, dims)
    if logger.isEnabledFor(logging.DEBUG) and flagged.any():
        logger.debug("%d of %d dressed states flagged as hybridized", int(flagged.sum()), len(flagged))
    return CompositeSystem(modes=tuple(modes), couplings=couplings, coupler=coupler, hamiltonian=hamiltonian,
                           energies=energies, vectors=vectors, labels=labels, max_overlaps=max_overlaps,
                           flagged=flagged)


class ZZReport(BaseModel):
    """Static ZZ from the dressed computational energies."""

    zeta: float
    E_00: float
    E_01: float
    E_10: float
    E_11: float
    valid: bool


def static_zz(system: CompositeSystem) -> ZZReport:
    energies = {key: system.energy(label) for key, label in COMPUTATIONAL_LABELS.items()}
    valid = all(system.is_resolved(label) for label in COMPUTATIONAL_LABELS.values())
    zeta = energies["11"] + energies["00"] - energies["10"] - energies["01"]
    return ZZReport(zeta=zeta, E_00=energies["00"], E_01=energies["01"], E_10=energies["10"],
                    E_11=energies["11"], valid=valid)


class Delocalization(BaseModel):
    epsilon: float
    valid: bool


def delocalization(system: CompositeSystem) -> Delocalization:
    """max(|<100~|001>|^2, |<001~|100>|^2)"""
    valid = system.is_resolved((1, 0, 0)) and system.is_resolved((0, 0, 1))
    if system.index((1, 0, 0), True) is None or system.index((0, 0, 1), True) is None:
        return Delocalization(epsilon=float("nan"), valid=False)
    epsilon = max(system.overlap((1, 0, 0), (0, 0, 1)), system.overlap((0, 0, 1), (1, 0, 0)))
    return Delocalization(epsilon=epsilon, valid=valid)


class Manifold(str, Enum):
    COUPLER_GROUND = "coupler-ground"
    COUPLER_EXCITED = "coupler-excited"


class DressedShiftTable(BaseModel):
    """chi_ij = E(i0j) or chi^c_ij = E(i1j) - E(i0j) for the qubit states ij."""

    manifold: Manifold
    chi: Dict[str, float]
    valid: bool

    def zeta(self) -> float:
        return self.chi["11"] + self.chi["00"] - self.chi["10"] - self.chi["01"]


def dressed_shift_table(system: CompositeSystem,
                        manifold: Manifold | str = Manifold.COUPLER_GROUND) -> DressedShiftTable:
    manifold = Manifold(manifold)
    chi: Dict[str, float] = {}
    valid = True
    for key in QUBIT_STATES:
        i, j = int(key[0]), int(key[1])
        ground = (i, 0, j)
        valid &= system.is_resolved(ground)
        if manifold is Manifold.COUPLER_GROUND:
            chi[key] = system.energy(ground)
        else:
            excited = (i, 1, j)
            valid &= system.is_resolved(excited)
            chi[key] = system.energy(excited) - system.energy(ground)
    return DressedShiftTable(manifold=manifold, chi=chi, valid=bool(valid))


def hamiltonian_flux_derivative(system: CompositeSystem, phi: Optional[float] = None) -> np.ndarray:
    """
    dH/dphi_ext,c in the bare product basis of `system` (GHz/rad).

    The coupler term -E_J,eff(phi) cos(phi_c) is the only flux dependent part, so the derivative is
    -E_J,eff'(phi) times the embedded cos(phi_c).

    :param system: system providing the coupler parameters and basis.
    :param phi: flux at which the derivative is taken, the system's own bias by default.
    """
    if system.coupler is None:
        raise CompositeError("the system was assembled without coupler parameters")
    phi = system.coupler.phi_ext if phi is None else phi
    return -system.coupler.ej_eff_derivative(phi) * system.coupler_cos()


def _coupler_system(task: tuple) -> CompositeSystem:
    f1, f2, coupler, couplings, charge_cutoff, coupler_levels = task
    return assemble((f1, diagonalize_transmon(coupler, charge_cutoff, coupler_levels), f2), couplings, coupler)


def flux_sweep(circuit: FTFCircuit, fluxes: Sequence[float], jobs: int = 1) -> List[CompositeSystem]:
    """Composite systems along a coupler flux grid; fluxonium spectra are computed once."""
    f1, f2 = circuit.fluxonium_spectra()
    t = circuit.truncation
    tasks = [(f1, f2, circuit.coupler.model_copy(update={"phi_ext": float(phi)}), circuit.couplings,
              t.charge_cutoff, t.coupler_levels) for phi in fluxes]
    logger.info("flux sweep over %d points", len(tasks))
    return parallel_map(_coupler_system, tasks, jobs)


class ZZMapPoint(BaseModel):
    J_c: float
    phi: float
    zeta: float
    epsilon: float
    valid: bool


def _zz_map_point(task: tuple) -> ZZMapPoint:
    f1, f2, coupler, couplings, charge_cutoff, coupler_levels, j_c = task
    system = _coupler_system((f1, f2, coupler, couplings, charge_cutoff, coupler_levels))
    zz = static_zz(system)
    eps = delocalization(system)
    return ZZMapPoint(J_c=j_c, phi=coupler.phi_ext, zeta=zz.zeta, epsilon=eps.epsilon, valid=zz.valid and eps.valid)


def zz_map(circuit: FTFCircuit, coupler_couplings: Sequence[float], fluxes: Sequence[float],
           ratio: float = 1.0, jobs: int = 1) -> List[ZZMapPoint]:
    """
    zeta and epsilon over a (J_c, phi_ext,c) grid with J_1c = J_c and J_2c = ratio * J_c.

    Points are returned in row-major grid order (J_c outer, flux inner).
    """
    f1, f2 = circuit.fluxonium_spectra()
    t = circuit.truncation
    tasks = []
    for j_c in coupler_couplings:
        couplings = CouplingGraph(J_12=circuit.couplings.J_12, J_1c=float(j_c), J_2c=float(ratio * j_c))
        for phi in fluxes:
            tasks.append((f1, f2, circuit.coupler.model_copy(update={"phi_ext": float(phi)}), couplings,
                          t.charge_cutoff, t.coupler_levels, float(j_c)))
    logger.info("zz map over %d x %d points", len(coupler_couplings), len(fluxes))
    return parallel_map(_zz_map_point, tasks, jobs)
