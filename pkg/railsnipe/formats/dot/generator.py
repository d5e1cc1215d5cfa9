from typing import List

from ...analysis.graph import CircuitGraph


def _quote(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


class DotGenerator:
    @staticmethod
    def generate(circuit: CircuitGraph) -> str:
        """
        Renders the annotated gate graph as DOT text. Primary input and output
        channels are dotted boundary nodes; gates of one level share a rank.
        """
        netlist = circuit.netlist
        lines: List[str] = ["digraph circuit {", "  rankdir=LR;", "  node [shape=box];"]

        for node, data in circuit.graph.nodes(data=True):
            level = data.get("level")
            label = f"{node}\\n{data['kind'].value}" + (f" L{level}" if level is not None else "")
            lines.append(f"  {_quote(node)} [label={_quote(label)}];")

        for name in circuit.primary_inputs + circuit.primary_outputs:
            lines.append(f"  {_quote('ch:' + name)} [label={_quote(name)}, shape=ellipse, style=dotted];")

        for u, v, data in circuit.graph.edges(data=True):
            label = f"{data['net']} ({data['c_fF']:g} fF)"
            lines.append(f"  {_quote(u)} -> {_quote(v)} [label={_quote(label)}];")

        sinks = netlist.sinks_of
        for name in circuit.primary_inputs:
            for rail in netlist.channel(name).rails:
                for gate_id in sinks.get(rail, []):
                    lines.append(f"  {_quote('ch:' + name)} -> {_quote(gate_id)} [label={_quote(rail)}, style=dotted];")

        drivers = netlist.driver_of
        for name in circuit.primary_outputs:
            for rail in netlist.channel(name).rails:
                if rail in drivers:
                    lines.append(f"  {_quote(drivers[rail])} -> {_quote('ch:' + name)} [label={_quote(rail)}, style=dotted];")

        if circuit.levelized:
            by_level = {}
            for node, level in circuit.levels.items():
                by_level.setdefault(level, []).append(node)
            for level in sorted(by_level):
                members = " ".join(_quote(n) for n in by_level[level])
                lines.append(f"  {{ rank=same; {members} }}")

        lines.append("}")
        return "\n".join(lines) + "\n"
