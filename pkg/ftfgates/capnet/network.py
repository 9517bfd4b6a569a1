#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

"""Capacitance networks of fluxonium chains and lattice cells, compiled into E_C and J.

Nodes carry the island charges; ground is eliminated. Each fluxonium owns two antenna
nodes (a, b) combined into a sum mode at position a and a difference mode at position b.
Differential coupler pads (p, r) are combined the same way. Mode names: ``q1`` is the
difference (qubit) mode of fluxonium 1, ``q1+`` its sum mode, ``c1`` the first coupler.
"""

import logging
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ToolkitError
from ..core.parallel import parallel_map
from ..core.units import EFF_CHARGE_GHZ_FF

logger = logging.getLogger(__name__)

# J_mn = 4 e^2 C~^-1[m, n] / h = 8 * e^2/(2h) * C~^-1[m, n]
COUPLING_GHZ_FF = 8.0 * EFF_CHARGE_GHZ_FF
SINGULAR_TOLERANCE = 1e-12


class CapnetError(ToolkitError, ValueError):
    module = "capnet"


class Topology(str, Enum):
    CHAIN_GROUNDED = "chain-grounded"
    CHAIN_DIFFERENTIAL = "chain-differential"
    LATTICE_GROUNDED = "lattice-grounded"
    CUSTOM = "custom"


class Gauge(str, Enum):
    AS_BUILT = "as-built"                  # orientation given by the node numbering
    POSITIVE_COUPLER = "positive-coupler"  # qubit modes flipped so that J_1c > 0 and J_2c > 0


class Capacitances(BaseModel):
    """Design capacitances in fF."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    C_f1: float
    C_f2: float
    C_c: float
    C_T: Optional[float] = None
    C_t1: Optional[float] = None
    C_t2: Optional[float] = None

    @property
    def small(self) -> float:
        """Mean of the small design capacitances, C_s."""
        return (self.C_f1 + self.C_f2 + self.C_c) / 3.0


class CapacitanceNetwork(BaseModel):
    """Node capacitance matrix, mode transformation and the transformed inverse."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    topology: Topology
    capacitances: Optional[Capacitances] = None
    node_names: List[str]
    mode_names: List[str]
    sum_modes: List[str] = Field(default_factory=list)
    capacitance: np.ndarray
    transform: np.ndarray
    gauge: Gauge = Gauge.AS_BUILT

    @property
    def nodes(self) -> int:
        return len(self.node_names)

    @property
    def transformed(self) -> np.ndarray:
        """C~ = (M^T)^-1 C M^-1 in fF."""
        m_inv = scipy.linalg.inv(self.transform)
        return m_inv.T @ self.capacitance @ m_inv

    @property
    def transformed_inverse(self) -> np.ndarray:
        """C~^-1 = M C^-1 M^T in 1/fF."""
        _check_invertible(self)
        inverse = scipy.linalg.solve(self.capacitance, np.eye(self.nodes), assume_a="pos")
        return self.transform @ inverse @ self.transform.T

    def mode(self, name: str) -> int:
        try:
            return self.mode_names.index(name)
        except ValueError:
            raise CapnetError(f"unknown mode {name}", {"modes": self.mode_names}) from None

    def inverse_element(self, a: str, b: str) -> float:
        return float(self.transformed_inverse[self.mode(a), self.mode(b)])


def _check_invertible(network: CapacitanceNetwork) -> None:
    values, vectors = scipy.linalg.eigh(network.capacitance)
    if values[0] > SINGULAR_TOLERANCE * max(abs(values[-1]), 1.0):
        return
    null_modes = network.transform @ vectors[:, 0]
    culprit = network.mode_names[int(np.argmax(np.abs(null_modes)))]
    raise CapnetError("capacitance matrix is singular: a mode has no capacitance to ground",
                      {"null_space_mode": culprit, "smallest_eigenvalue": float(values[0])})


def node_matrix(nodes: int, edges: Sequence[Tuple[int, Optional[int], float]]) -> np.ndarray:
    """
    Maxwell capacitance matrix from a list of two-terminal capacitors.

    :param nodes: number of non-ground nodes.
    :param edges: ``(i, j, C)`` with 0-based node indices; ``j = None`` is ground.
    """
    c = np.zeros((nodes, nodes))
    for i, j, value in edges:
        c[i, i] += value
        if j is None:
            continue
        c[j, j] += value
        c[i, j] -= value
        c[j, i] -= value
    return c


def pair_transform(nodes: int, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
    """Identity, except that each pair (a, b) is replaced by a sum row at a and a difference row at b."""
    m = np.eye(nodes)
    for a, b in pairs:
        m[a, a], m[a, b] = 1.0, 1.0
        m[b, a], m[b, b] = 1.0, -1.0
    return m


def network_from_edges(node_names: Sequence[str], edges: Sequence[Tuple[int, Optional[int], float]],
                       pairs: Sequence[Tuple[int, int]] = (), mode_names: Optional[Sequence[str]] = None,
                       topology: Topology = Topology.CUSTOM) -> CapacitanceNetwork:
    """Network of arbitrary topology; modes default to the node names, paired nodes become sum/difference."""
    n = len(node_names)
    for i, j, value in edges:
        if value < 0:
            raise CapnetError("negative capacitance", {"edge": (i, j), "value": value})
    if mode_names is None:
        mode_names = list(node_names)
        for a, b in pairs:
            mode_names[a] = f"{node_names[a]}+"
            mode_names[b] = f"{node_names[a]}-{node_names[b]}"
    sums = [mode_names[a] for a, _ in pairs]
    return CapacitanceNetwork(topology=topology, node_names=list(node_names), mode_names=list(mode_names),
                              sum_modes=sums, capacitance=node_matrix(n, edges), transform=pair_transform(n, pairs))


# node names, mode names, capacitors (i, j or None for ground, fF) and sum/difference node pairs
Layout = Tuple[List[str], List[str], List[Tuple[int, Optional[int], float]], List[Tuple[int, int]]]


def _chain_layout(caps: Capacitances, qubits: int, differential: bool, dangling_coupler: bool) -> Layout:
    names: List[str] = []
    modes: List[str] = []
    edges: List[Tuple[int, Optional[int], float]] = []
    pairs: List[Tuple[int, int]] = []
    qubit_nodes: List[Tuple[int, int]] = []
    coupler_nodes: List[Tuple[int, int]] = []
    couplers = qubits if dangling_coupler else qubits - 1

    for q in range(1, qubits + 1):
        a, b = len(names), len(names) + 1
        names += [f"a{q}", f"b{q}"]
        modes += [f"q{q}+", f"q{q}"]
        qubit_nodes.append((a, b))
        pairs.append((a, b))
        edges += [(a, None, caps.C_f1), (b, None, caps.C_f1), (a, b, caps.C_f2)]
        if q > couplers:
            continue
        if differential:
            p, r = len(names), len(names) + 1
            names += [f"p{q}", f"r{q}"]
            modes += [f"c{q}+", f"c{q}"]
            pairs.append((p, r))
            edges += [(p, None, caps.C_t1), (r, None, caps.C_t1), (p, r, caps.C_t2)]
            coupler_nodes.append((p, r))
        else:
            p = len(names)
            names.append(f"c{q}")
            modes.append(f"c{q}")
            edges.append((p, None, caps.C_T))
            coupler_nodes.append((p, p))

    for q, (left, right) in enumerate(coupler_nodes):
        if caps.C_c == 0:
            continue
        edges.append((left, qubit_nodes[q][1], caps.C_c))
        if q + 1 < qubits:
            edges.append((right, qubit_nodes[q + 1][0], caps.C_c))
    return names, modes, edges, pairs


def _lattice_layout(caps: Capacitances) -> Layout:
    # qubit 1 on nodes 1-2, shared coupler 3 between nodes 2 and 4, qubit 2 on nodes 4-5,
    # coupler 6 on node 2, couplers 7 and 8 on node 1, coupler 9 on node 5
    names = [f"n{k}" for k in range(1, 10)]
    modes = ["q1+", "q1", "c3", "q2+", "q2", "c6", "c7", "c8", "c9"]
    edges: List[Tuple[int, Optional[int], float]] = []
    for a, b in ((0, 1), (3, 4)):
        edges += [(a, None, caps.C_f1), (b, None, caps.C_f1), (a, b, caps.C_f2)]
    for coupler in (2, 5, 6, 7, 8):
        edges.append((coupler, None, caps.C_T))
    if caps.C_c > 0:
        for coupler, node in ((2, 1), (2, 3), (5, 1), (6, 0), (7, 0), (8, 4)):
            edges.append((coupler, node, caps.C_c))
    return names, modes, edges, [(0, 1), (3, 4)]


def build_network(topology: Topology | str, capacitances: Capacitances | Dict[str, float], qubits: int = 3,
                  dangling_coupler: bool = True, gauge: Gauge | str = Gauge.AS_BUILT) -> CapacitanceNetwork:
    """
    Assemble the node capacitance matrix and the mode transformation of a published topology.

    :param topology: ``chain-grounded``, ``chain-differential`` or ``lattice-grounded``.
    :param capacitances: design values in fF; grounded couplers need C_T, differential ones C_t1 and C_t2.
    :param qubits: fluxonia along a chain.
    :param dangling_coupler: give the last fluxonium of a chain its own coupler, as in the published tables.
    :param gauge: sign convention of the qubit modes.
    :raises CapnetError: unsupported topology, missing or non-positive capacitance.
    """
    try:
        topology = Topology(topology)
    except ValueError:
        raise CapnetError(f"unsupported topology {topology}", {"supported": [t.value for t in Topology]}) from None
    if not isinstance(capacitances, Capacitances):
        capacitances = Capacitances(**capacitances)
    _check_capacitances(capacitances)
    if qubits < 2:
        raise CapnetError("a chain needs at least two fluxonia", {"qubits": qubits})

    if topology is Topology.CHAIN_GROUNDED:
        _require(capacitances, "C_T")
        layout = _chain_layout(capacitances, qubits, False, dangling_coupler)
    elif topology is Topology.CHAIN_DIFFERENTIAL:
        _require(capacitances, "C_t1", "C_t2")
        layout = _chain_layout(capacitances, qubits, True, dangling_coupler)
    elif topology is Topology.LATTICE_GROUNDED:
        _require(capacitances, "C_T")
        layout = _lattice_layout(capacitances)
    else:
        raise CapnetError("custom networks are built with network_from_edges")

    names, modes, edges, pairs = layout
    network = network_from_edges(names, edges, pairs, modes, topology)
    network = network.model_copy(update={"capacitances": capacitances})
    logger.debug("%s network: %d nodes, %d capacitors", topology.value, len(names), len(edges))
    return apply_gauge(network, gauge)


def _check_capacitances(capacitances: Capacitances) -> None:
    for name, value in capacitances.model_dump().items():
        if value is None:
            continue
        # only a coupling capacitance may vanish
        if value < 0 or (value == 0 and name != "C_c"):
            raise CapnetError(f"capacitance {name} must be positive", {name: value})


def _require(capacitances: Capacitances, *names: str) -> None:
    missing = [name for name in names if getattr(capacitances, name) is None]
    if missing:
        raise CapnetError("missing capacitance", {"missing": missing})


def apply_gauge(network: CapacitanceNetwork, gauge: Gauge | str) -> CapacitanceNetwork:
    """Flip qubit difference modes so that each couples positively to its reference coupler."""
    gauge = Gauge(gauge)
    if gauge is Gauge.AS_BUILT:
        return network.model_copy(update={"gauge": gauge})
    transform = network.transform.copy()
    inverse = network.transformed_inverse
    reference = "c3" if network.topology is Topology.LATTICE_GROUNDED else None
    for q, name in enumerate(network.mode_names):
        if not (name.startswith("q") and not name.endswith("+")):
            continue
        coupler = reference or _reference_coupler(network, int(name[1:]))
        if coupler is None:
            continue
        if inverse[q, network.mode(coupler)] < 0:
            transform[q, :] *= -1.0
    return network.model_copy(update={"transform": transform, "gauge": gauge})


def _reference_coupler(network: CapacitanceNetwork, qubit: int) -> Optional[str]:
    # fluxonium 1 and 2 refer to the first coupler, further fluxonia to the coupler on their left
    candidate = "c1" if qubit <= 2 else f"c{qubit - 1}"
    return candidate if candidate in network.mode_names else None


CHAIN_COLUMNS: List[Tuple[str, Tuple[str, ...]]] = [
    ("E_C1", ("q1",)), ("E_C2", ("q2",)), ("E_Ctc", ("c1",)),
    ("J_12", ("q1", "q2")), ("J_1c", ("q1", "c1")), ("J_2c", ("q2", "c1")),
    ("J_13", ("q1", "q3")), ("J_1c2", ("q1", "c2")), ("J_cc", ("c1", "c2")), ("J_c1c3", ("c1", "c3")),
]
LATTICE_COLUMNS: List[Tuple[str, Tuple[str, ...]]] = [
    ("E_C1", ("q1",)), ("E_C2", ("q2",)), ("E_Ctc", ("c3",)),
    ("J_12", ("q1", "q2")), ("J_1c", ("q1", "c3")), ("J_2c", ("q2", "c3")),
    ("J_cc", ("c3", "c8")), ("J'_cc", ("c3", "c6")), ("J_c1c3", ("c8", "c9")), ("J'_c1c3", ("c6", "c9")),
]


def table_columns(topology: Topology | str) -> List[Tuple[str, Tuple[str, ...]]]:
    if Topology(topology) is Topology.LATTICE_GROUNDED:
        return LATTICE_COLUMNS
    return CHAIN_COLUMNS


def _pair_key(a: str, b: str) -> str:
    return f"{a}:{b}" if a <= b else f"{b}:{a}"


class ExtractedParams(BaseModel):
    """Charging energies and pairwise couplings (GHz) of the qubit and coupler modes."""

    topology: Topology
    gauge: Gauge
    modes: List[str]
    charging: Dict[str, float]
    couplings: Dict[str, float]

    def charging_energy(self, mode: str) -> float:
        try:
            return self.charging[mode]
        except KeyError:
            raise CapnetError(f"no charging energy for mode {mode}", {"modes": self.modes}) from None

    def coupling(self, a: str, b: str) -> float:
        try:
            return self.couplings[_pair_key(a, b)]
        except KeyError:
            raise CapnetError(f"no coupling between {a} and {b}", {"modes": self.modes}) from None

    def table_row(self) -> List[float]:
        """Published column order, E_C in GHz and J in MHz."""
        row = []
        for _, modes in table_columns(self.topology):
            if len(modes) == 1:
                row.append(self.charging_energy(modes[0]))
            else:
                row.append(1e3 * self.coupling(*modes))
        return row


def extract_params(network: CapacitanceNetwork) -> ExtractedParams:
    """
    E_C,m = e^2 C~^-1[m,m] / 2h and J_mn = 4 e^2 C~^-1[m,n] / h for every non-sum mode.

    :raises CapnetError: singular C~, naming the mode that dominates the null space.
    """
    inverse = network.transformed_inverse
    kept = [k for k, name in enumerate(network.mode_names) if name not in network.sum_modes]
    names = [network.mode_names[k] for k in kept]
    charging = {network.mode_names[k]: float(EFF_CHARGE_GHZ_FF * inverse[k, k]) for k in kept}
    couplings: Dict[str, float] = {}
    for x, k in enumerate(kept):
        for l in kept[x + 1:]:
            couplings[_pair_key(network.mode_names[k], network.mode_names[l])] = float(COUPLING_GHZ_FF * inverse[k, l])
    return ExtractedParams(topology=network.topology, gauge=network.gauge, modes=names, charging=charging,
                           couplings=couplings)


class AsymptoticEntry(BaseModel):
    """One exact C~^-1 element (1/fF) or ratio against its closed form and small-capacitance scaling."""

    name: str
    exact: float
    closed_form: Optional[float] = None
    scaling: Optional[float] = None
    closed_deviation: Optional[float] = None
    scaling_deviation: Optional[float] = None


class AsymptoticReport(BaseModel):
    topology: Topology
    small_capacitance: float
    coupler_capacitance: float
    entries: List[AsymptoticEntry]

    def entry(self, name: str) -> AsymptoticEntry:
        for item in self.entries:
            if item.name == name:
                return item
        raise CapnetError(f"no asymptotic entry {name}", {"entries": [e.name for e in self.entries]})


def _deviation(exact: float, approx: Optional[float]) -> Optional[float]:
    # magnitudes only, some printed forms drop the sign
    if approx is None or exact == 0:
        return None
    return abs(abs(exact) - abs(approx)) / abs(exact)


def _entry(name: str, exact: float, closed: Optional[float], scaling: Optional[float]) -> AsymptoticEntry:
    return AsymptoticEntry(name=name, exact=float(exact), closed_form=closed, scaling=scaling,
                           closed_deviation=_deviation(exact, closed), scaling_deviation=_deviation(exact, scaling))


def asymptotic_report(network: CapacitanceNetwork) -> AsymptoticReport:
    """
    Compare exact inverse-capacitance elements with their approximations for C_f1 ~ C_f2 ~ C_c << C_T.

    Closed forms are evaluated where they are dimensionally consistent; the small-capacitance
    scalings use C_s, the mean of C_f1, C_f2 and C_c. Deviations compare magnitudes.
    Differential chains have no closed forms and report the exact suppression ratios only.
    """
    caps = network.capacitances
    if caps is None or network.topology is Topology.CUSTOM:
        raise CapnetError("asymptotic forms exist only for the published topologies")
    e = network.inverse_element
    cs = caps.small
    cc, cf1, cf2 = caps.C_c, caps.C_f1, caps.C_f2
    cf = cf1 + cf2
    entries: List[AsymptoticEntry] = []

    if network.topology is Topology.LATTICE_GROUNDED:
        ct = caps.C_T
        denom = (4 * cc ** 4 + 12 * cc ** 3 * cf + cc ** 2 * (13 * cf ** 2 - 5 * cf2 ** 2)
                 + (cf ** 2 - cf2 ** 2) ** 2 + 6 * cc * (cf ** 3 - cf * cf2 ** 2))
        entries += [
            _entry("q1,q1", e("q1", "q1"), None, 1.0 / (2.5 * cs)),
            _entry("q1,c3", e("q1", "c3"), -cc / (ct * (2 * cc + cf + cf2)), -cc / (5.0 * ct * cs)),
            _entry("q1,q2", e("q1", "q2"),
                   -cc ** 2 * cf1 / (ct * (2 * cc ** 2 * cf + cf1 * (cf + cf2) ** 2
                                           + cc * (3 * cf ** 2 + cf * cf2 - 2 * cf2 ** 2))),
                   -(cc / cs) ** 2 / (25.0 * ct)),
            _entry("c3,c6", e("c3", "c6"), None, 4.0 * cs / (15.0 * ct ** 2)),
            _entry("c3,c8", e("c3", "c8"), cc ** 2 * cf2 / (ct ** 2 * (4 * cc ** 2 + 4 * cc * cf + cf ** 2 - cf2 ** 2)),
                   cs / (15.0 * ct ** 2)),
            _entry("c8,c9", e("c8", "c9"), cc ** 4 * cf2 ** 2 / (ct ** 3 * denom), cc ** 2 / (120.0 * ct ** 3)),
            _entry("c6,c9", e("c6", "c9"), cc ** 4 * cf2 * (cf + 2 * cc) / (ct ** 3 * denom),
                   cc ** 2 / (30.0 * ct ** 3)),
            _entry("c3,c6/c3,c8", e("c3", "c6") / e("c3", "c8"), None, 4.0),
            _entry("c6,c9/c8,c9", e("c6", "c9") / e("c8", "c9"), None, 4.0),
        ]
        return AsymptoticReport(topology=network.topology, small_capacitance=cs, coupler_capacitance=ct,
                                entries=entries)

    ratios = [("q1,c2/q1,c1", e("q1", "c2") / e("q1", "c1"))]
    if "q3" in network.mode_names:
        ratios.append(("q1,q3/q1,c2", e("q1", "q3") / e("q1", "c2")))
    if network.topology is Topology.CHAIN_DIFFERENTIAL:
        entries = [_entry(name, value, None, None) for name, value in ratios]
        return AsymptoticReport(topology=network.topology, small_capacitance=cs,
                                coupler_capacitance=caps.C_t2 + caps.C_t1 / 2.0, entries=entries)

    ct = caps.C_T
    d1 = cc * cf + cf ** 2 - cf2 ** 2
    d2 = cc ** 2 + 2 * cc * cf + cf ** 2 - cf2 ** 2
    entries += [
        _entry("q1,q1", e("q1", "q1"), (cc + 2 * cf1) / d1, 3.0 / (5.0 * cs)),
        _entry("q2,q2", e("q2", "q2"), 2.0 / (cc + cf + cf2), 1.0 / (2.0 * cs)),
        _entry("q1,c1", e("q1", "c1"), -cc * cf1 / (ct * d1), -cc / (5.0 * ct * cs)),
        _entry("q2,c1", e("q2", "c1"), cc / (ct * (cc + cf + cf2)), cc / (4.0 * ct * cs)),
        _entry("q1,q2", e("q1", "q2"), cc ** 2 * cf1 ** 2 / (ct * d1 ** 2), (cc / cs) ** 2 / (25.0 * ct)),
        _entry("c1,c2", e("c1", "c2"), None, cs / (8.0 * ct ** 2)),
    ]
    if "c3" in network.mode_names:
        entries.append(_entry("c1,c3", e("c1", "c3"), cc ** 4 * cf2 ** 2 / (ct ** 3 * d2 ** 2),
                              cs ** 2 / (64.0 * ct ** 3)))
    closed_ratios = {"q1,c2/q1,c1": (cc ** 2 * cf1 / (ct * d2), cs / (8.0 * ct)),
                     "q1,q3/q1,c2": (cc * cf1 / d1, 0.2)}
    for name, value in ratios:
        closed, scaling = closed_ratios[name]
        entries.append(_entry(name, value, closed, scaling))
    return AsymptoticReport(topology=network.topology, small_capacitance=cs, coupler_capacitance=ct, entries=entries)


class PublishedRow(BaseModel):
    identifier: int
    capacitances: Capacitances


_GROUNDED_ROWS = [(1, 70, 6, 6, 6), (2, 50, 6, 6, 6), (3, 70, 6, 6, 12), (4, 70, 10, 6, 6), (5, 70, 6, 8, 6)]
_DIFFERENTIAL_ROWS = [(6, 20, 60, 6, 6, 6), (7, 40, 50, 6, 6, 6), (8, 80, 30, 6, 6, 6), (9, 20, 60, 6, 6, 12),
                      (10, 40, 50, 6, 6, 12), (11, 80, 30, 6, 6, 12), (12, 80, 30, 10, 6, 12),
                      (13, 60, 30, 10, 6, 12)]


def published_table(topology: Topology | str) -> List[PublishedRow]:
    """Design capacitances of the published parameter tables for `topology`."""
    topology = Topology(topology)
    if topology is Topology.CHAIN_DIFFERENTIAL:
        return [PublishedRow(identifier=k, capacitances=Capacitances(C_t1=t1, C_t2=t2, C_f1=f1, C_f2=f2, C_c=c))
                for k, t1, t2, f1, f2, c in _DIFFERENTIAL_ROWS]
    if topology is Topology.CUSTOM:
        raise CapnetError("no published table for custom networks")
    return [PublishedRow(identifier=k, capacitances=Capacitances(C_T=t, C_f1=f1, C_f2=f2, C_c=c))
            for k, t, f1, f2, c in _GROUNDED_ROWS]


def compile_table(topology: Topology | str, gauge: Gauge | str = Gauge.AS_BUILT,
                  jobs: int = 1) -> List[Tuple[int, ExtractedParams]]:
    """Extract the parameters of every published row of `topology`."""
    rows = published_table(topology)
    results = parallel_map(_compile_row, [(topology, row.capacitances, gauge) for row in rows], jobs)
    return [(row.identifier, result) for row, result in zip(rows, results)]


def _compile_row(item: Tuple[Topology | str, Capacitances, Gauge | str]) -> ExtractedParams:
    topology, capacitances, gauge = item
    return extract_params(build_network(topology, capacitances, gauge=gauge))
