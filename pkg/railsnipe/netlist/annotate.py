import logging
import re
from dataclasses import dataclass, replace
from typing import Dict, Mapping, Optional, Tuple, Union

from ..core.errors import DomainError, NetlistReferenceError
from ..core.types import Net, Netlist

logger = logging.getLogger(__name__)

Position = Tuple[int, int]

# (level i, index j) -> output net of the gate at that position in the DIMS XOR.
XOR_POSITIONS: Dict[Position, str] = {
    (1, 1): "m1",
    (1, 2): "m2",
    (1, 3): "m3",
    (1, 4): "m4",
    (2, 1): "o0",
    (2, 2): "o1",
    (3, 1): "c0",
    (3, 2): "c1",
    (4, 1): "ack",
}

_POSITION_NAME = re.compile(r"^c_?l(\d)(\d)$")
_VALUE = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(x|fF|ff)?\s*$")


@dataclass(frozen=True)
class Perturbation:
    """Either a scale applied to a net's routing load or an absolute c_load in fF."""
    scale: Optional[float] = None
    absolute_fF: Optional[float] = None

    def apply(self, net: Net) -> Net:
        if self.scale is not None:
            return replace(net, c_load_fF=net.c_pin_fF + net.routing_fF * self.scale)
        return replace(net, c_load_fF=self.absolute_fF)


def position_net(position: Position, prefix: str = "") -> str:
    if position not in XOR_POSITIONS:
        raise NetlistReferenceError(f"No XOR gate sits at level {position[0]}, index {position[1]}.", str(position))
    return prefix + XOR_POSITIONS[position]


def resolve_target(netlist: Netlist, target: Union[str, Position], prefix: str = "") -> str:
    """Resolves a net id, an 'l31' / 'c_l31' position name or a (level, index) tuple to a net id."""
    if isinstance(target, tuple):
        net_id = position_net(target, prefix)
    else:
        match = _POSITION_NAME.match(target)
        net_id = position_net((int(match.group(1)), int(match.group(2))), prefix) if match else target
    if net_id not in netlist.net_map:
        raise NetlistReferenceError(f"Cannot perturb undeclared net '{net_id}'.", net_id)
    return net_id


def parse_value(text: str) -> Perturbation:
    """'2x' scales the load, '16fF' or '16' sets it."""
    match = _VALUE.match(text)
    if not match:
        raise DomainError(f"Cannot read perturbation value '{text}'. Use e.g. '2x' or '16fF'.")
    number = float(match.group(1))
    if match.group(2) == "x":
        if number <= 0:
            raise DomainError(f"Scale factor must be > 0, got {text}.")
        return Perturbation(scale=number)
    return Perturbation(absolute_fF=number)


def parse_perturbation(text: str) -> Tuple[str, Perturbation]:
    """Reads one CLI perturbation such as 'c_l31=2x' or 'c0=16fF'."""
    target, sep, value = text.partition("=")
    if not sep or not target.strip():
        raise DomainError(f"Perturbation '{text}' must look like <net-or-position>=<value>.")
    return target.strip(), parse_value(value)


def perturb(
    netlist: Netlist,
    changes: Mapping[Union[str, Position], Union[float, str, Perturbation]],
    prefix: str = "",
) -> Netlist:
    """
    Returns a copy of ``netlist`` with some net loads changed.

    Keys are net ids or XOR gate positions; a float value is a scale factor.
    Keys naming the same net compose in order.
    """
    updated: Dict[str, Net] = {}
    for target, value in changes.items():
        if isinstance(value, Perturbation):
            change = value
        elif isinstance(value, str):
            change = parse_value(value)
        else:
            change = Perturbation(scale=float(value))
        net_id = resolve_target(netlist, target, prefix)
        net = updated.get(net_id, netlist.net(net_id))
        updated[net_id] = change.apply(net)
        logger.debug(f"Perturbed net {net_id}: c_load {net.c_load_fF:g} -> {updated[net_id].c_load_fF:g} fF")
    return netlist.with_nets(updated)


def xor_capacitances(netlist: Netlist, prefix: str = "") -> Dict[Position, float]:
    """Total capacitance at every XOR gate position, in the form the analytic signature takes."""
    return {pos: netlist.net(prefix + net_id).total_fF for pos, net_id in XOR_POSITIONS.items()}
