import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from ..core.errors import DissymmetryError
from ..core.types import Netlist

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def channel_dissymmetry(rail_caps: Sequence[float]) -> float:
    """
    d_A of one channel: |C0 - C1| / min(C0, C1) for dual rail, (max - min) / min
    for wider 1-of-N channels.
    """
    if len(rail_caps) < 2:
        raise DissymmetryError(f"d_A needs at least 2 rails, got {len(rail_caps)}.")
    if any(not math.isfinite(c) or c <= 0 for c in rail_caps):
        raise DissymmetryError(f"Every rail capacitance must be positive, got {list(rail_caps)}.")
    low = min(rail_caps)
    return (max(rail_caps) - low) / low


@dataclass(frozen=True)
class DissymmetryEntry:
    channel: str
    rail_caps: Tuple[float, ...]
    d_a: float


@dataclass
class DissymmetryReport:
    entries: List[DissymmetryEntry] = field(default_factory=list)

    @property
    def max_d_a(self) -> float:
        return max((e.d_a for e in self.entries), default=0.0)

    @property
    def mean_d_a(self) -> float:
        return sum(e.d_a for e in self.entries) / len(self.entries) if self.entries else 0.0

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "summary": {"max_d_A": self.max_d_a, "mean_d_A": self.mean_d_a, "channels": len(self.entries)},
            "entries": [
                {"channel": e.channel, "rail_caps_fF": list(e.rail_caps), "d_A": e.d_a} for e in self.entries
            ],
        }


def report(netlist: Netlist) -> DissymmetryReport:
    """One entry per channel from its rails' total capacitance, most critical first."""
    entries = []
    for channel in netlist.channels:
        caps = tuple(netlist.net(rail).total_fF for rail in channel.rails)
        try:
            d_a = channel_dissymmetry(caps)
        except DissymmetryError as e:
            raise DissymmetryError(f"Channel '{channel.name}': {e}")
        entries.append(DissymmetryEntry(channel.name, caps, d_a))
    # stable: equal d_A keeps declaration order
    entries.sort(key=lambda e: -e.d_a)
    result = DissymmetryReport(entries)
    logger.debug(f"Dissymmetry over {len(entries)} channels: max {result.max_d_a:.4f}")
    return result
