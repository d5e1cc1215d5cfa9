"""Reference designs built in code: the DIMS dual-rail XOR and designs derived from it."""
import logging
from typing import List, Tuple

from ..core.types import Channel, Gate, GateKind, Net, Netlist

logger = logging.getLogger(__name__)

DEFAULT_C_LOAD_FF = 8.0
DEFAULT_C_PAR_FF = 1.0
DEFAULT_C_SC_FF = 0.5


def _net(net_id: str, c_load: float, c_par: float, c_sc: float) -> Net:
    return Net(id=net_id, c_load_fF=c_load, c_par_fF=c_par, c_sc_fF=c_sc)


def _dims_xor_slice(prefix: str, extra_c1_stage: bool = False) -> Tuple[List[Gate], List[str]]:
    """
    Gates and net ids of one DIMS XOR slice. Every net id and gate id carries ``prefix``.

    One minterm C-element per input pair and an OR per output rail, then a BUF
    per rail driving the output channel, and an OR over both rails producing the
    active-high acknowledge.
    """
    p = prefix
    gates = [
        Gate(f"{p}M1", GateKind.MULLER, (f"{p}a0", f"{p}b0"), f"{p}m1", has_reset=True),
        Gate(f"{p}M2", GateKind.MULLER, (f"{p}a1", f"{p}b1"), f"{p}m2", has_reset=True),
        Gate(f"{p}M3", GateKind.MULLER, (f"{p}a0", f"{p}b1"), f"{p}m3", has_reset=True),
        Gate(f"{p}M4", GateKind.MULLER, (f"{p}a1", f"{p}b0"), f"{p}m4", has_reset=True),
        Gate(f"{p}OR_o0", GateKind.OR, (f"{p}m1", f"{p}m2"), f"{p}o0"),
    ]
    nets = [f"{p}a0", f"{p}a1", f"{p}b0", f"{p}b1", f"{p}m1", f"{p}m2", f"{p}m3", f"{p}m4", f"{p}o0", f"{p}o1"]
    if extra_c1_stage:
        gates.append(Gate(f"{p}OR_o1", GateKind.OR, (f"{p}m3", f"{p}m4"), f"{p}o1p"))
        gates.append(Gate(f"{p}BUF_o1", GateKind.BUF, (f"{p}o1p",), f"{p}o1"))
        nets.append(f"{p}o1p")
    else:
        gates.append(Gate(f"{p}OR_o1", GateKind.OR, (f"{p}m3", f"{p}m4"), f"{p}o1"))
    gates += [
        Gate(f"{p}BUF_c0", GateKind.BUF, (f"{p}o0",), f"{p}c0"),
        Gate(f"{p}BUF_c1", GateKind.BUF, (f"{p}o1",), f"{p}c1"),
        Gate(f"{p}OR_ack", GateKind.OR, (f"{p}c0", f"{p}c1"), f"{p}ack"),
    ]
    nets += [f"{p}c0", f"{p}c1", f"{p}ack"]
    return gates, nets


def _xor_netlist(extra_c1_stage: bool, c_load: float, c_par: float, c_sc: float) -> Netlist:
    gates, net_ids = _dims_xor_slice("", extra_c1_stage)
    net_ids.append("rst")
    return Netlist(
        gates=gates,
        nets=[_net(n, c_load, c_par, c_sc) for n in net_ids],
        channels=[
            Channel("a", ("a0", "a1"), ack="ack"),
            Channel("b", ("b0", "b1"), ack="ack"),
            Channel("c", ("c0", "c1")),
        ],
        inputs=["a", "b"],
        outputs=["c"],
        reset_net="rst",
    )


def builtin_dims_xor(
    c_load: float = DEFAULT_C_LOAD_FF,
    c_par: float = DEFAULT_C_PAR_FF,
    c_sc: float = DEFAULT_C_SC_FF,
) -> Netlist:
    """
    The canonical dual-rail XOR with four-phase handshake: 4 MULLER + 2 OR + 2 BUF + an OR acknowledge.

    Exactly one gate switches at each of its 4 logical levels per phase.
    """
    return _xor_netlist(False, c_load, c_par, c_sc)


def builtin_unbalanced_xor(
    c_load: float = DEFAULT_C_LOAD_FF,
    c_par: float = DEFAULT_C_PAR_FF,
    c_sc: float = DEFAULT_C_SC_FF,
) -> Netlist:
    """The DIMS XOR with an extra BUF on the rail-1 path: c1 results take one more transition than c0."""
    return _xor_netlist(True, c_load, c_par, c_sc)


def builtin_add_round_key(
    slices: int = 8,
    c_load: float = DEFAULT_C_LOAD_FF,
    c_par: float = DEFAULT_C_PAR_FF,
    c_sc: float = DEFAULT_C_SC_FF,
) -> Netlist:
    """
    A byte-wide AddRoundKey: ``slices`` DIMS XOR slices side by side.

    Slice i XORs plaintext channel ``pt<i>`` with key channel ``k<i>`` into ``ct<i>``
    and acknowledges its own inputs on ``s<i>_ack``. Channel index i is bit i (LSB first).
    """
    if slices < 1:
        raise ValueError(f"An AddRoundKey block needs at least one slice, got {slices}.")
    gates: List[Gate] = []
    nets: List[Net] = []
    channels: List[Channel] = []
    for i in range(slices):
        p = f"s{i}_"
        slice_gates, slice_nets = _dims_xor_slice(p)
        gates += slice_gates
        nets += [_net(n, c_load, c_par, c_sc) for n in slice_nets]
        channels += [
            Channel(f"pt{i}", (f"{p}a0", f"{p}a1"), ack=f"{p}ack"),
            Channel(f"k{i}", (f"{p}b0", f"{p}b1"), ack=f"{p}ack"),
            Channel(f"ct{i}", (f"{p}c0", f"{p}c1")),
        ]
    nets.append(_net("rst", c_load, c_par, c_sc))
    logger.debug(f"Built AddRoundKey demo with {slices} slices, {len(gates)} gates")
    return Netlist(
        gates=gates,
        nets=nets,
        channels=channels,
        inputs=[f"pt{i}" for i in range(slices)] + [f"k{i}" for i in range(slices)],
        outputs=[f"ct{i}" for i in range(slices)],
        reset_net="rst",
    )


BUILTINS = {
    "xor": builtin_dims_xor,
    "unbalanced": builtin_unbalanced_xor,
    "ark": builtin_add_round_key,
}
