import numbers
from typing import Optional, Sequence, Tuple, Union

from .errors import InputError
from .types import Channel, GateKind

# A channel value is either the carried value (0..N-1), None for the invalid
# (all-low) state, or the raw rail bits.
ChannelValue = Union[int, None, Sequence[int]]


def eval_gate(kind: GateKind, inputs: Sequence[int], prev_out: int = 0) -> int:
    """
    Evaluates one gate. MULLER follows z = xy + z(x + y) generalized to n inputs:
    all ones -> 1, all zeros -> 0, anything else holds ``prev_out``.
    """
    if kind is GateKind.MULLER:
        if all(inputs):
            return 1
        if not any(inputs):
            return 0
        return prev_out
    if kind is GateKind.AND:
        return int(all(inputs))
    if kind is GateKind.OR:
        return int(any(inputs))
    if kind is GateKind.NOR:
        return int(not any(inputs))
    if kind is GateKind.INV:
        return int(not inputs[0])
    if kind is GateKind.BUF:
        return int(bool(inputs[0]))
    raise ValueError(f"Unknown gate kind: {kind}")


def encode_one_hot(value: Optional[int], n: int) -> Tuple[int, ...]:
    """1-of-N code of ``value``; None gives the all-low invalid state."""
    if value is None:
        return (0,) * n
    if not 0 <= value < n:
        raise InputError(f"Value {value} does not fit a 1-of-{n} channel.")
    return tuple(int(i == value) for i in range(n))


def encode_dual_rail(bit: Optional[int]) -> Tuple[int, int]:
    """0 -> (1, 0), 1 -> (0, 1), None -> (0, 0). Rail 0 carries the value-0 code."""
    return encode_one_hot(bit, 2)


def decode_one_hot(rails: Sequence[int]) -> Optional[int]:
    """Inverse of ``encode_one_hot``. More than one high rail is an InputError."""
    high = [i for i, bit in enumerate(rails) if bit]
    if len(high) > 1:
        raise InputError(f"Rails {tuple(rails)} hold more than one high rail, which is not a codeword.")
    return high[0] if high else None


def channel_value(channel: Channel, value: ChannelValue) -> Optional[int]:
    """Normalizes a user-supplied channel value to the carried value or None."""
    if value is None:
        return None
    if isinstance(value, numbers.Integral):
        encode_one_hot(int(value), channel.n)
        return int(value)
    rails = tuple(int(bit) for bit in value)
    if len(rails) != channel.n:
        raise InputError(f"Channel '{channel.name}' has {channel.n} rails but {len(rails)} rail values were given.")
    try:
        return decode_one_hot(rails)
    except InputError as e:
        raise InputError(f"Channel '{channel.name}': {e}")


def bit_of(value: int, bit: int) -> int:
    return (value >> bit) & 1
