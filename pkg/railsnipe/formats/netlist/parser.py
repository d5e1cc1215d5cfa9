import json
import logging
from typing import Any, Dict, List

from ...core.errors import NetlistSyntaxError, SchemaError
from ...core.types import Channel, Gate, GateKind, Net, Netlist
from ...netlist.validator import raise_for_report, validate

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"gates", "nets", "channels", "inputs", "outputs", "reset_net"}
GATE_KEYS = {"id", "kind", "inputs", "output", "has_reset"}
NET_KEYS = {"id", "c_load_fF", "c_par_fF", "c_sc_fF", "c_pin_fF"}
CHANNEL_KEYS = {"name", "rails", "ack"}


def _check_keys(obj: Any, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object.")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SchemaError(f"Unknown key(s) in {where}: {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        raise SchemaError(f"Missing key(s) in {where}: {', '.join(missing)}")


def _string(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaError(f"{where} must be a non-empty string.")
    return value


def _string_list(value: Any, where: str) -> List[str]:
    if not isinstance(value, list):
        raise SchemaError(f"{where} must be an array of strings.")
    return [_string(item, f"{where}[{i}]") for i, item in enumerate(value)]


def _capacitance(value: Any, where: str) -> float:
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number (fF).")
    return float(value)


class NetlistParser:
    @staticmethod
    def parse(text: str, check: bool = True) -> Netlist:
        """
        Parses a netlist JSON document into a Netlist.

        With ``check`` the result is validated and the first violation is raised
        as its matching NetlistError subclass.
        """
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise NetlistSyntaxError(f"Malformed netlist document: {e.msg}", e.lineno, e.colno)

        _check_keys(document, TOP_LEVEL_KEYS, {"gates", "nets"}, "netlist document")

        gates = [NetlistParser._parse_gate(g, i) for i, g in enumerate(NetlistParser._array(document, "gates"))]
        nets = [NetlistParser._parse_net(n, i) for i, n in enumerate(NetlistParser._array(document, "nets"))]
        channels = [
            NetlistParser._parse_channel(c, i) for i, c in enumerate(NetlistParser._array(document, "channels"))
        ]
        reset_net = document.get("reset_net")
        if reset_net is not None:
            reset_net = _string(reset_net, "reset_net")

        netlist = Netlist(
            gates=gates,
            nets=nets,
            channels=channels,
            inputs=_string_list(document.get("inputs", []), "inputs"),
            outputs=_string_list(document.get("outputs", []), "outputs"),
            reset_net=reset_net,
        )
        logger.debug(f"Parsed netlist: {len(gates)} gates, {len(nets)} nets, {len(channels)} channels")

        if check:
            raise_for_report(validate(netlist))
        return netlist

    @staticmethod
    def _array(document: Dict, key: str) -> List:
        value = document.get(key, [])
        if not isinstance(value, list):
            raise SchemaError(f"'{key}' must be an array.")
        return value

    @staticmethod
    def _parse_gate(obj: Any, index: int) -> Gate:
        where = f"gates[{index}]"
        _check_keys(obj, GATE_KEYS, {"id", "kind", "inputs", "output"}, where)
        kind_name = _string(obj["kind"], f"{where}.kind")
        try:
            kind = GateKind(kind_name)
        except ValueError:
            valid = ", ".join(k.value for k in GateKind)
            raise SchemaError(f"{where}.kind '{kind_name}' is not one of {valid}.")
        has_reset = obj.get("has_reset", False)
        if not isinstance(has_reset, bool):
            raise SchemaError(f"{where}.has_reset must be a boolean.")
        return Gate(
            id=_string(obj["id"], f"{where}.id"),
            kind=kind,
            inputs=tuple(_string_list(obj["inputs"], f"{where}.inputs")),
            output=_string(obj["output"], f"{where}.output"),
            has_reset=has_reset,
        )

    @staticmethod
    def _parse_net(obj: Any, index: int) -> Net:
        where = f"nets[{index}]"
        _check_keys(obj, NET_KEYS, {"id", "c_load_fF"}, where)
        return Net(
            id=_string(obj["id"], f"{where}.id"),
            c_load_fF=_capacitance(obj["c_load_fF"], f"{where}.c_load_fF"),
            c_par_fF=_capacitance(obj.get("c_par_fF", 0.0), f"{where}.c_par_fF"),
            c_sc_fF=_capacitance(obj.get("c_sc_fF", 0.0), f"{where}.c_sc_fF"),
            c_pin_fF=_capacitance(obj.get("c_pin_fF", 0.0), f"{where}.c_pin_fF"),
        )

    @staticmethod
    def _parse_channel(obj: Any, index: int) -> Channel:
        where = f"channels[{index}]"
        _check_keys(obj, CHANNEL_KEYS, {"name", "rails"}, where)
        ack = obj.get("ack")
        return Channel(
            name=_string(obj["name"], f"{where}.name"),
            rails=tuple(_string_list(obj["rails"], f"{where}.rails")),
            ack=_string(ack, f"{where}.ack") if ack is not None else None,
        )


def parse_netlist(text: str) -> Netlist:
    return NetlistParser.parse(text)


def read_netlist(path: str) -> Netlist:
    logger.info(f"--- Reading netlist {path} ---")
    with open(path, "r", encoding="utf-8") as f:
        return NetlistParser.parse(f.read())
