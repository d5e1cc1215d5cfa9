import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import networkx as nx

from ..core.errors import CapacityError, InputError, StructuralError
from ..core.theory import ChannelValue, channel_value, encode_one_hot, eval_gate
from ..core.types import GateKind, Netlist

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 2 ** 16


@dataclass(frozen=True)
class CircuitGraph:
    """
    The directed gate graph of a netlist. Vertices are gate ids carrying ``kind``,
    ``output`` and (after ``levelize``) ``level``; edges carry the mediating ``net``
    and its total capacitance ``c_fF``.
    """
    netlist: Netlist
    graph: nx.DiGraph
    primary_inputs: Tuple[str, ...] = ()
    primary_outputs: Tuple[str, ...] = ()
    levelized: bool = False

    @property
    def levels(self) -> Dict[str, int]:
        return dict(self.graph.nodes(data="level"))

    def level(self, gate_id: str) -> int:
        return self.graph.nodes[gate_id]["level"]

    @property
    def n_c(self) -> int:
        return max(self.levels.values(), default=0) if self.levelized else 0

    def topological_order(self) -> List[str]:
        index = {gate.id: i for i, gate in enumerate(self.netlist.gates)}
        return list(nx.lexicographical_topological_sort(self.graph, key=index.__getitem__))

    def to_dict(self) -> dict:
        return {
            "n_c": self.n_c,
            "vertices": [
                {"id": node, "kind": data["kind"].value, "output": data["output"], "level": data.get("level")}
                for node, data in self.graph.nodes(data=True)
            ],
            "edges": [
                {"source": u, "target": v, "net": data["net"], "c_fF": data["c_fF"]}
                for u, v, data in self.graph.edges(data=True)
            ],
            "primary_inputs": list(self.primary_inputs),
            "primary_outputs": list(self.primary_outputs),
        }


@dataclass(frozen=True)
class SwitchingProfile:
    n_c: int
    n_i: int
    levels: Dict[int, FrozenSet[str]] = field(default_factory=dict)

    def n_ij(self, level: int) -> int:
        return len(self.levels.get(level, ()))

    def signature(self) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
        return self.n_i, tuple(sorted((lvl, len(g)) for lvl, g in self.levels.items()))

    def switching_gates(self) -> List[str]:
        return sorted(g for gates in self.levels.values() for g in gates)

    def to_dict(self) -> dict:
        return {
            "n_c": self.n_c,
            "n_i": self.n_i,
            "levels": {str(lvl): sorted(gates) for lvl, gates in sorted(self.levels.items())},
        }


@dataclass
class BalanceReport:
    balanced: bool
    combinations: int
    n_i_values: List[int] = field(default_factory=list)
    offending_inputs: List[Dict[str, int]] = field(default_factory=list)
    reference: Optional[SwitchingProfile] = None

    @property
    def n_i(self) -> Optional[int]:
        return self.reference.n_i if self.balanced and self.reference else None

    def to_dict(self) -> dict:
        return {
            "balanced": self.balanced,
            "combinations": self.combinations,
            "n_i": self.n_i,
            "n_i_values": sorted(set(self.n_i_values)),
            "reference_profile": self.reference.to_dict() if self.reference else None,
            "offending_inputs": self.offending_inputs,
        }


def build_graph(netlist: Netlist) -> CircuitGraph:
    """
    Builds G(V, E): one vertex per gate, one edge per driver -> sink net connection.
    A MULLER reading its own output is state, not an edge. Any other cycle raises StructuralError.
    """
    graph = nx.DiGraph()
    for gate in netlist.gates:
        graph.add_node(gate.id, kind=gate.kind, output=gate.output)

    drivers = netlist.driver_of
    for gate in netlist.gates:
        for net_id in gate.inputs:
            source = drivers.get(net_id)
            if source is None:
                continue
            if source == gate.id and gate.kind is GateKind.MULLER:
                continue
            graph.add_edge(source, gate.id, net=net_id, c_fF=netlist.net(net_id).total_fF)

    if not nx.is_directed_acyclic_graph(graph):
        cycle = [u for u, _ in nx.find_cycle(graph)]
        raise StructuralError(f"Combinational cycle through gates: {' -> '.join(cycle + cycle[:1])}", cycle)

    logger.debug(f"Built circuit graph: {graph.number_of_nodes()} vertices, {graph.number_of_edges()} edges")
    return CircuitGraph(netlist, graph, tuple(netlist.inputs), tuple(netlist.outputs))


def levelize(circuit: CircuitGraph) -> CircuitGraph:
    """Assigns level(g) = 1 + max(level of predecessors); gates fed only by primary inputs sit at level 1."""
    graph = circuit.graph.copy()
    for node in circuit.topological_order():
        preds = [graph.nodes[p]["level"] for p in graph.predecessors(node)]
        graph.nodes[node]["level"] = 1 + max(preds, default=0)
    return CircuitGraph(circuit.netlist, graph, circuit.primary_inputs, circuit.primary_outputs, levelized=True)


def analyze_netlist(netlist: Netlist) -> CircuitGraph:
    return levelize(build_graph(netlist))


def reset_state(circuit: CircuitGraph) -> Dict[str, int]:
    """
    Quiescent state at cycle start: rails and MULLER outputs low, combinational
    nets settled from there in topological order.
    """
    netlist = circuit.netlist
    state = {net.id: 0 for net in netlist.nets}
    gates = netlist.gate_map
    for gate_id in circuit.topological_order():
        gate = gates[gate_id]
        if gate.kind.is_stateful:
            continue
        state[gate.output] = eval_gate(gate.kind, [state[n] for n in gate.inputs])
    return state


def _apply_inputs(netlist: Netlist, state: Dict[str, int], input_value: Mapping[str, ChannelValue]) -> Dict[str, int]:
    unknown = sorted(set(input_value) - set(netlist.inputs))
    if unknown:
        raise InputError(f"Values given for channels that are not inputs: {', '.join(unknown)}")
    for channel in netlist.input_channels():
        if channel.name not in input_value:
            raise InputError(f"No value given for input channel '{channel.name}'.")
        value = channel_value(channel, input_value[channel.name])
        if value is None:
            raise InputError(f"Input channel '{channel.name}' must carry valid data, not the invalid state.")
        for rail, bit in zip(channel.rails, encode_one_hot(value, channel.n)):
            state[rail] = bit
    return state


def switching_profile(circuit: CircuitGraph, input_value: Mapping[str, ChannelValue]) -> SwitchingProfile:
    """Gates that switch during one evaluation phase for ``input_value``, grouped by level."""
    if not circuit.levelized:
        circuit = levelize(circuit)
    netlist = circuit.netlist
    state = _apply_inputs(netlist, reset_state(circuit), input_value)

    gates = netlist.gate_map
    by_level: Dict[int, set] = {}
    for gate_id in circuit.topological_order():
        gate = gates[gate_id]
        new = eval_gate(gate.kind, [state[n] for n in gate.inputs], state[gate.output])
        if new != state[gate.output]:
            state[gate.output] = new
            by_level.setdefault(circuit.level(gate_id), set()).add(gate_id)

    levels = {lvl: frozenset(g) for lvl, g in sorted(by_level.items())}
    return SwitchingProfile(n_c=circuit.n_c, n_i=sum(len(g) for g in levels.values()), levels=levels)


def input_space(netlist: Netlist) -> List[Dict[str, int]]:
    channels = netlist.input_channels()
    return [
        {channel.name: value for channel, value in zip(channels, values)}
        for values in itertools.product(*(range(channel.n) for channel in channels))
    ]


def verify_balance(circuit: CircuitGraph, cap: int = DEFAULT_ENUMERATION_CAP) -> BalanceReport:
    """
    Enumerates every input codeword combination and checks that N_i and every
    per-level N_ij are identical across them. Offending inputs are those whose
    profile differs from the most common one.
    """
    netlist = circuit.netlist
    combinations = math.prod(channel.n for channel in netlist.input_channels())
    if combinations > cap:
        raise CapacityError(f"{combinations} input combinations exceed the enumeration cap of {cap}.")

    logger.info(f"--- Verifying balance over {combinations} input combination(s) ---")
    profiles = [(assignment, switching_profile(circuit, assignment)) for assignment in input_space(netlist)]

    signatures = Counter(profile.signature() for _, profile in profiles)
    majority = signatures.most_common(1)[0][0]
    offending = [assignment for assignment, profile in profiles if profile.signature() != majority]
    reference = next(profile for _, profile in profiles if profile.signature() == majority)

    report = BalanceReport(
        balanced=not offending,
        combinations=combinations,
        n_i_values=[profile.n_i for _, profile in profiles],
        offending_inputs=offending,
        reference=reference,
    )
    logger.info(f"Balanced: {report.balanced} (N_i values: {sorted(set(report.n_i_values))})")
    return report
