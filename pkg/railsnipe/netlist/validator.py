import logging
import math
from collections import Counter

import networkx as nx

from ..core.errors import (
    ArityError, DuplicateIdError, NetlistError, NetlistReferenceError, StructuralError,
)
from ..core.types import GateKind, Netlist, ValidationReport

logger = logging.getLogger(__name__)


def _check_ids(netlist: Netlist, report: ValidationReport):
    for label, ids in (
        ("gate", [g.id for g in netlist.gates]),
        ("net", [n.id for n in netlist.nets]),
        ("channel", [c.name for c in netlist.channels]),
    ):
        for item, count in Counter(ids).items():
            if count > 1:
                report.add(f"duplicate-{label}-id", f"{label.capitalize()} id '{item}' is declared {count} times.", item)


def _check_references(netlist: Netlist, report: ValidationReport):
    known = netlist.net_map
    for gate in netlist.gates:
        for net_id in list(gate.inputs) + [gate.output]:
            if net_id not in known:
                report.add("undeclared-net", f"Gate '{gate.id}' references undeclared net '{net_id}'.", net_id)
    for channel in netlist.channels:
        for net_id in list(channel.rails) + ([channel.ack] if channel.ack else []):
            if net_id not in known:
                report.add("undeclared-net", f"Channel '{channel.name}' references undeclared net '{net_id}'.", net_id)
    if netlist.reset_net is not None and netlist.reset_net not in known:
        report.add("undeclared-net", f"Reset net '{netlist.reset_net}' is not declared.", netlist.reset_net)
    for role, names in (("input", netlist.inputs), ("output", netlist.outputs)):
        for name in names:
            if name not in netlist.channel_map:
                report.add("undeclared-channel", f"The {role} list names undeclared channel '{name}'.", name)


def _check_gates(netlist: Netlist, report: ValidationReport):
    drivers = Counter(gate.output for gate in netlist.gates)
    for net_id, count in drivers.items():
        if count > 1:
            report.add("multiple-drivers", f"Net '{net_id}' has multiple drivers ({count} gates).", net_id)
    for gate in netlist.gates:
        if not gate.kind.arity_ok(len(gate.inputs)):
            expected = "exactly 1 input" if gate.kind.is_unary else "at least 2 inputs"
            report.add(
                "arity",
                f"Gate '{gate.id}' of kind {gate.kind.value} has {len(gate.inputs)} input(s), expected {expected}.",
                gate.id,
            )
        if gate.has_reset and gate.kind is not GateKind.MULLER:
            report.add("reset-on-combinational", f"Gate '{gate.id}' is {gate.kind.value} but declares a reset.", gate.id)


def _check_nets(netlist: Netlist, report: ValidationReport):
    driven = {gate.output for gate in netlist.gates}
    for net in netlist.nets:
        components = (net.c_load_fF, net.c_par_fF, net.c_sc_fF, net.c_pin_fF)
        if not all(isinstance(c, (int, float)) and math.isfinite(c) for c in components):
            report.add("non-finite-capacitance", f"Net '{net.id}' has a non-finite capacitance.", net.id)
            continue
        if min(components) < 0:
            report.add("negative-capacitance", f"Net '{net.id}' has a negative capacitance component.", net.id)
        elif net.c_pin_fF > net.c_load_fF:
            report.add("pin-exceeds-load", f"Net '{net.id}' declares more pin than load capacitance.", net.id)
        if net.id in driven and net.total_fF <= 0:
            report.add("zero-capacitance", f"Net '{net.id}' is driven by a gate but has zero total capacitance.", net.id)


def _check_channels(netlist: Netlist, report: ValidationReport):
    for channel in netlist.channels:
        if channel.n < 2:
            report.add("too-few-rails", f"Channel '{channel.name}' has {channel.n} rail(s); a 1-of-N channel needs at least 2.", channel.name)
        for net_id, count in Counter(channel.rails).items():
            if count > 1:
                report.add("duplicate-rail", f"Channel '{channel.name}' lists net '{net_id}' as more than one rail.", channel.name)


def find_combinational_cycle(netlist: Netlist):
    """Returns a gate cycle as a list of gate ids, or None. A MULLER reading its own output is state, not a cycle."""
    graph = nx.DiGraph()
    graph.add_nodes_from(gate.id for gate in netlist.gates)
    drivers = netlist.driver_of
    for gate in netlist.gates:
        for net_id in gate.inputs:
            source = drivers.get(net_id)
            if source is None:
                continue
            if source == gate.id and gate.kind is GateKind.MULLER:
                continue
            graph.add_edge(source, gate.id)
    try:
        edges = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return None
    return [u for u, _ in edges]


def _check_cycles(netlist: Netlist, report: ValidationReport):
    cycle = find_combinational_cycle(netlist)
    if cycle:
        report.add("combinational-cycle", f"Combinational cycle through gates: {' -> '.join(cycle + cycle[:1])}.", cycle[0])


def validate(netlist: Netlist) -> ValidationReport:
    """Checks every netlist invariant. Never raises; an empty report means the netlist is valid."""
    report = ValidationReport()
    _check_ids(netlist, report)
    _check_references(netlist, report)
    _check_gates(netlist, report)
    _check_nets(netlist, report)
    _check_channels(netlist, report)
    _check_cycles(netlist, report)
    logger.debug(f"Validation found {len(report.issues)} issue(s).")
    return report


def raise_for_report(report: ValidationReport):
    """Raises the exception matching the first issue of a failed report."""
    if report.ok:
        return
    issue = report.issues[0]
    if issue.code.startswith("duplicate-") and issue.code.endswith("-id"):
        raise DuplicateIdError(issue.message)
    if issue.code in ("undeclared-net", "undeclared-channel"):
        raise NetlistReferenceError(issue.message, issue.subject)
    if issue.code == "arity":
        raise ArityError(issue.message)
    if issue.code == "combinational-cycle":
        raise StructuralError(issue.message)
    raise NetlistError(issue.message)
