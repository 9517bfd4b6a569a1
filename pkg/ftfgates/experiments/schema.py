#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Strict experiment files: every key is declared, every flux carries its unit."""

import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..capnet.network import Capacitances, Gauge, Topology
from ..circuits.composite import CouplingGraph, FTFCircuit, Truncation
from ..circuits.modes import FluxConvention, FluxoniumParams, TransmonParams
from ..core.errors import ToolkitError
from ..core.units import FluxUnit, FluxValue, convert_flux
from ..dynamics.evolution import NoiseConfig
from ..dynamics.pulses import DRIVE_IDLE_PADDING, Envelope
from ..gates.adiabatic import flat_duration_grid
from ..gates.noise import RelaxationChannel

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


class SchemaError(ToolkitError, ValueError):
    """Invalid experiment file; the context names the key path and its position in the file."""

    module = "cli"


class InputFileError(ToolkitError, OSError):
    module = "cli"


class ExperimentKind(str, Enum):
    SPECTRUM = "spectrum"
    ZZ_MAP = "zz-map"
    PERTURBATIVE_ZZ = "perturbative-zz"
    CAPNET = "capnet"
    ADIABATIC_CZ = "adiabatic-cz"
    MW_CZ = "mw-cz"
    NOISE_SWEEP = "noise-sweep"


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class FluxoniumSection(Strict):
    E_C: float = Field(gt=0)
    E_J: float = Field(ge=0)
    E_L: float = Field(gt=0)
    phi_ext: FluxValue

    def params(self) -> FluxoniumParams:
        return FluxoniumParams(E_C=self.E_C, E_J=self.E_J, E_L=self.E_L, phi_ext=self.phi_ext.radians)


class CouplerSection(Strict):
    E_C: float = Field(gt=0)
    E_J: float = Field(ge=0)
    phi_ext: FluxValue
    convention: FluxConvention = FluxConvention.HALF_LOOP

    def params(self) -> TransmonParams:
        return TransmonParams(E_C=self.E_C, E_J=self.E_J, phi_ext=self.phi_ext.radians, convention=self.convention)


class CouplingsSection(Strict):
    J_12: float = 0.0
    J_1c: float = 0.0
    J_2c: float = 0.0

    def graph(self) -> CouplingGraph:
        return CouplingGraph(J_12=self.J_12, J_1c=self.J_1c, J_2c=self.J_2c)


class CircuitSection(Strict):
    fluxonium1: FluxoniumSection
    coupler: CouplerSection
    fluxonium2: FluxoniumSection
    couplings: CouplingsSection = CouplingsSection()


class FluxRange(Strict):
    start: float
    stop: float
    points: int = Field(ge=2)
    unit: FluxUnit

    def radians(self) -> np.ndarray:
        return np.linspace(convert_flux(self.start, self.unit), convert_flux(self.stop, self.unit), self.points)


class LinearRange(Strict):
    start: float
    stop: float
    points: int = Field(ge=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


class StepRange(Strict):
    start: float = Field(ge=0)
    stop: float
    step: float = Field(gt=0)


class SweepSection(Strict):
    flux: Optional[FluxRange] = None
    coupling: Optional[LinearRange] = None  # J_c in GHz
    ratio: float = 1.0                      # J_2c / J_1c on the coupling axis


class PerturbationSection(Strict):
    intermediate_levels: int = Field(8, ge=2)
    scales: List[float] = [0.5, 1.0, 2.0]


class CapnetSection(Strict):
    topology: Topology = Topology.CHAIN_GROUNDED
    gauge: Gauge = Gauge.AS_BUILT
    qubits: int = Field(3, ge=2)
    dangling_coupler: bool = True
    table: bool = False
    network: List[Capacitances] = []

    @model_validator(mode="before")
    @classmethod
    def _single_network(cls, data: Any) -> Any:
        # a single [capnet.network] table is accepted as a one element array
        if isinstance(data, dict) and isinstance(data.get("network"), dict):
            data = {**data, "network": [data["network"]]}
        return data

    @field_validator("topology")
    @classmethod
    def _published_topology(cls, value: Topology) -> Topology:
        if value is Topology.CUSTOM:
            raise ValueError("topology must be chain-grounded, chain-differential or lattice-grounded")
        return value


class AdiabaticSection(Strict):
    flux_range: FluxRange
    phi_limit: Optional[FluxValue] = None
    edge_durations: List[float] = Field(min_length=1)
    flat_durations: Union[StepRange, List[float]]
    target_phase: float = float(np.pi)
    idle_padding: float = Field(6.0, ge=0)
    filter_sigma: float = Field(2.0, ge=0)
    levels: int = Field(60, ge=2)

    def flat_grid(self) -> np.ndarray:
        if isinstance(self.flat_durations, StepRange):
            grid = self.flat_durations
            return flat_duration_grid(grid.start, grid.stop, grid.step)
        return np.asarray(self.flat_durations, dtype=float)


class TargetPair(Strict):
    initial: Tuple[int, int, int]
    final: Tuple[int, int, int]


class MicrowaveSection(Strict):
    gate_times: List[float] = Field(min_length=1)
    sigma_ratio: float = Field(0.25, gt=0, le=1)
    envelope: Envelope = Envelope.ZERO_BASED
    idle_padding: float = Field(DRIVE_IDLE_PADDING, ge=0)
    target: Union[str, TargetPair] = "lower"
    levels: int = Field(50, ge=2)
    drive_elements: Optional[int] = Field(None, ge=1)
    rounds: int = Field(3, ge=1)
    selectivity_threshold: float = Field(1.0, gt=0)
    spectator_shifts: List[float] = []  # GHz

    @model_validator(mode="after")
    def _check_target(self) -> "MicrowaveSection":
        if isinstance(self.target, str) and self.target not in ("lower", "middle", "upper"):
            raise ValueError(f"target must be lower, middle, upper or an initial/final pair, got {self.target!r}")
        return self

    def target_spec(self) -> Union[str, Tuple[Tuple[int, int, int], Tuple[int, int, int]]]:
        if isinstance(self.target, TargetPair):
            return (self.target.initial, self.target.final)
        return self.target


class NoiseSweepSection(Strict):
    gate: str = Field("adiabatic", pattern="^(adiabatic|microwave)$")
    config: NoiseConfig = NoiseConfig()
    amplitudes: List[float] = []           # Phi0/sqrt(Hz)
    quadrature_order: int = Field(9, ge=3)
    monte_carlo_samples: int = Field(0, ge=0)
    t1_values_us: List[float] = []
    channels: List[RelaxationChannel] = [RelaxationChannel.COUPLER, RelaxationChannel.QUBIT]
    levels: int = Field(30, ge=2)


class OutputSection(Strict):
    directory: Optional[str] = None
    seed: Optional[int] = None


class ExperimentSection(Strict):
    name: str = Field(min_length=1)
    kind: ExperimentKind
    description: str = ""


_REQUIRED = {
    ExperimentKind.SPECTRUM: ("circuit",),
    ExperimentKind.ZZ_MAP: ("circuit", "sweep"),
    ExperimentKind.PERTURBATIVE_ZZ: ("circuit",),
    ExperimentKind.CAPNET: ("capnet",),
    ExperimentKind.ADIABATIC_CZ: ("circuit", "adiabatic"),
    ExperimentKind.MW_CZ: ("circuit", "microwave"),
    ExperimentKind.NOISE_SWEEP: ("circuit", "noise"),
}


class ExperimentConfig(Strict):
    """One experiment: what to compute, on which circuit, and where the results go."""

    experiment: ExperimentSection
    circuit: Optional[CircuitSection] = None
    truncation: Truncation = Truncation()
    sweep: Optional[SweepSection] = None
    perturbation: PerturbationSection = PerturbationSection()
    capnet: Optional[CapnetSection] = None
    adiabatic: Optional[AdiabaticSection] = None
    microwave: Optional[MicrowaveSection] = None
    noise: Optional[NoiseSweepSection] = None
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _check_sections(self) -> "ExperimentConfig":
        kind = self.experiment.kind
        for section in _REQUIRED[kind]:
            if getattr(self, section) is None:
                raise ValueError(f"a {kind.value} experiment needs a [{section}] section")
        if kind is ExperimentKind.NOISE_SWEEP:
            needed = "adiabatic" if self.noise.gate == "adiabatic" else "microwave"
            if getattr(self, needed) is None:
                raise ValueError(f"a {self.noise.gate} noise sweep needs a [{needed}] section")
        if kind is ExperimentKind.CAPNET and not self.capnet.table and not self.capnet.network:
            raise ValueError("a capnet experiment needs [[capnet.network]] entries or table = true")
        return self

    def build_circuit(self) -> FTFCircuit:
        c = self.circuit
        return FTFCircuit(fluxonium1=c.fluxonium1.params(), coupler=c.coupler.params(),
                          fluxonium2=c.fluxonium2.params(), couplings=c.couplings.graph(), truncation=self.truncation)

    def canonical(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


_HEADER = re.compile(r"^\s*(\[\[?)\s*([^\]]+?)\s*\]\]?\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-\"'. ]+?)\s*=")
_TOML_POSITION = re.compile(r"line (\d+), column (\d+)")


def _split_key(text: str) -> Tuple[str, ...]:
    return tuple(part.strip().strip("\"'") for part in text.split("."))


def locate_key(text: str, path: Tuple[Union[str, int], ...]) -> Tuple[int, int]:
    """
    1-based (line, column) of the deepest declaration of `path` in a TOML document.

    Array indices in `path` are ignored; an empty path or an unknown key gives (1, 1).
    """
    wanted = tuple(str(p) for p in path if not isinstance(p, int))
    best, best_len = (1, 1), 0
    table: Tuple[str, ...] = ()
    for number, line in enumerate(text.splitlines(), start=1):
        header = _HEADER.match(line)
        if header:
            table = _split_key(header.group(2))
            candidate = table
            column = line.index(header.group(1)) + 1
        else:
            key = _KEY.match(line)
            if not key:
                continue
            candidate = table + _split_key(key.group(1))
            column = line.index(key.group(1).strip()) + 1
        depth = len(candidate)
        if depth > best_len and wanted[:depth] == candidate:
            best, best_len = (number, column), depth
    return best


def parse_toml(text: str, model: Type[M], source: str = "<string>") -> M:
    """
    Validate a TOML document against a strict model.

    :raises SchemaError: TOML syntax error or schema violation, with key path, line and column.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        found = _TOML_POSITION.search(str(err))
        line, column = (int(found.group(1)), int(found.group(2))) if found else (None, None)
        raise SchemaError(f"{source}: invalid TOML: {err}", {"line": line, "column": column}) from None
    try:
        return model.model_validate(data)
    except ValidationError as err:
        first = err.errors()[0]
        loc = tuple(first["loc"])
        line, column = locate_key(text, loc)
        key = ".".join(str(p) for p in loc) or "<root>"
        raise SchemaError(f"{source}: {key}: {first['msg']}",
                          {"key": key, "line": line, "column": column, "errors": err.error_count()}) from None


def parse_experiment(text: str, source: str = "<string>") -> ExperimentConfig:
    return parse_toml(text, ExperimentConfig, source)


def read_text(path: Union[str, Path]) -> str:
    """
    :raises InputFileError: the file cannot be read.
    """
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputFileError(f"cannot read {path}: {err}", {"path": str(path)}) from None


def load_experiment(path: Union[str, Path]) -> ExperimentConfig:
    """
    :raises InputFileError: the file cannot be read.
    :raises SchemaError: see `parse_experiment`.
    """
    path = Path(path)
    experiment = parse_experiment(read_text(path), path.name)
    logger.info("loaded %s experiment %r from %s", experiment.experiment.kind.value, experiment.experiment.name, path)
    return experiment
