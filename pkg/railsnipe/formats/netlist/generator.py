import json

from ...core.types import Netlist


class NetlistGenerator:
    @staticmethod
    def to_dict(netlist: Netlist) -> dict:
        gates = []
        for gate in netlist.gates:
            entry = {"id": gate.id, "kind": gate.kind.value, "inputs": list(gate.inputs), "output": gate.output}
            if gate.has_reset:
                entry["has_reset"] = True
            gates.append(entry)

        nets = []
        for net in netlist.nets:
            entry = {"id": net.id, "c_load_fF": net.c_load_fF, "c_par_fF": net.c_par_fF, "c_sc_fF": net.c_sc_fF}
            if net.c_pin_fF:
                entry["c_pin_fF"] = net.c_pin_fF
            nets.append(entry)

        channels = []
        for channel in netlist.channels:
            entry = {"name": channel.name, "rails": list(channel.rails)}
            if channel.ack is not None:
                entry["ack"] = channel.ack
            channels.append(entry)

        document = {
            "gates": gates,
            "nets": nets,
            "channels": channels,
            "inputs": list(netlist.inputs),
            "outputs": list(netlist.outputs),
        }
        if netlist.reset_net is not None:
            document["reset_net"] = netlist.reset_net
        return document

    @staticmethod
    def generate(netlist: Netlist) -> str:
        """Serializes a netlist to the JSON document ``NetlistParser.parse`` reads back."""
        return json.dumps(NetlistGenerator.to_dict(netlist), indent=2) + "\n"


def serialize_netlist(netlist: Netlist) -> str:
    return NetlistGenerator.generate(netlist)
