from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np


class GateKind(Enum):
    MULLER = "MULLER"  # C-element, optionally with reset ("Cr")
    NOR = "NOR"
    OR = "OR"
    AND = "AND"
    INV = "INV"
    BUF = "BUF"

    @property
    def is_stateful(self) -> bool:
        return self is GateKind.MULLER

    @property
    def is_unary(self) -> bool:
        return self in (GateKind.INV, GateKind.BUF)

    def arity_ok(self, n_inputs: int) -> bool:
        return n_inputs == 1 if self.is_unary else n_inputs >= 2


class Direction(Enum):
    RISE = "rise"
    FALL = "fall"


class Polarity(Enum):
    CHARGE = "charge"        # output node pulled up
    DISCHARGE = "discharge"  # output node pulled down


@dataclass(frozen=True)
class Gate:
    id: str
    kind: GateKind
    inputs: Tuple[str, ...]
    output: str
    has_reset: bool = False

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))


@dataclass(frozen=True)
class Net:
    """A capacitance-annotated net. All capacitances are in femtofarads.

    ``c_pin_fF`` is the share of ``c_load_fF`` contributed by gate pins; the
    remainder is routing and is what placement redraws.
    """
    id: str
    c_load_fF: float
    c_par_fF: float = 0.0
    c_sc_fF: float = 0.0
    c_pin_fF: float = 0.0

    @property
    def total_fF(self) -> float:
        return self.c_load_fF + self.c_par_fF + self.c_sc_fF

    @property
    def routing_fF(self) -> float:
        return self.c_load_fF - self.c_pin_fF


@dataclass(frozen=True)
class Channel:
    """A 1-of-N channel; ``rails[v]`` is high when the channel carries value v."""
    name: str
    rails: Tuple[str, ...]
    ack: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "rails", tuple(self.rails))

    @property
    def n(self) -> int:
        return len(self.rails)


@dataclass(frozen=True)
class Netlist:
    """An immutable gate-level netlist with dual-rail/1-of-N channel declarations."""
    gates: Tuple[Gate, ...] = ()
    nets: Tuple[Net, ...] = ()
    channels: Tuple[Channel, ...] = ()
    inputs: Tuple[str, ...] = ()
    outputs: Tuple[str, ...] = ()
    reset_net: Optional[str] = None

    def __post_init__(self):
        for name in ("gates", "nets", "channels", "inputs", "outputs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @cached_property
    def net_map(self) -> Dict[str, Net]:
        return {net.id: net for net in self.nets}

    @cached_property
    def gate_map(self) -> Dict[str, Gate]:
        return {gate.id: gate for gate in self.gates}

    @cached_property
    def channel_map(self) -> Dict[str, Channel]:
        return {channel.name: channel for channel in self.channels}

    @cached_property
    def driver_of(self) -> Dict[str, str]:
        """Net id -> id of the (first) gate driving it."""
        drivers: Dict[str, str] = {}
        for gate in self.gates:
            drivers.setdefault(gate.output, gate.id)
        return drivers

    @cached_property
    def sinks_of(self) -> Dict[str, List[str]]:
        """Net id -> ids of the gates reading it, in declaration order, without repeats."""
        sinks: Dict[str, List[str]] = {}
        for gate in self.gates:
            for net_id in dict.fromkeys(gate.inputs):
                sinks.setdefault(net_id, []).append(gate.id)
        return sinks

    def net(self, net_id: str) -> Net:
        return self.net_map[net_id]

    def channel(self, name: str) -> Channel:
        return self.channel_map[name]

    def input_channels(self) -> List[Channel]:
        return [self.channel_map[name] for name in self.inputs]

    def output_channels(self) -> List[Channel]:
        return [self.channel_map[name] for name in self.outputs]

    def with_nets(self, updated: Mapping[str, Net]) -> "Netlist":
        """Returns a copy with the given nets replaced, keeping declaration order."""
        return replace(self, nets=tuple(updated.get(net.id, net) for net in self.nets))


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    subject: Optional[str] = None

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


@dataclass
class ValidationReport:
    issues: List[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, code: str, message: str, subject: Optional[str] = None):
        self.issues.append(ValidationIssue(code, message, subject))

    def codes(self) -> List[str]:
        return [issue.code for issue in self.issues]

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "issues": [{"code": i.code, "message": i.message, "subject": i.subject} for i in self.issues],
        }


@dataclass(frozen=True)
class TransitionEvent:
    time_ps: float
    net: str
    direction: Direction
    gate: Optional[str]
    level: int
    phase: int  # 1 = evaluation wave, 3 = return-to-zero wave


@dataclass(frozen=True)
class CurrentPulse:
    """Triangular supply-current pulse of one gate transition."""
    t_start_ps: float
    width_ps: float
    charge_fC: float
    polarity: Polarity = Polarity.CHARGE

    @property
    def t_end_ps(self) -> float:
        return self.t_start_ps + self.width_ps

    @property
    def peak_uA(self) -> float:
        # fC/ps is mA
        return 2.0 * self.charge_fC / self.width_ps * 1000.0

    def charge_until(self, t_ps: np.ndarray) -> np.ndarray:
        """Charge (fC) delivered by the pulse up to each time in ``t_ps``."""
        t = np.clip(np.asarray(t_ps, dtype=float), self.t_start_ps, self.t_end_ps)
        half = self.width_ps / 2.0
        rising = self.charge_fC * 2.0 * ((t - self.t_start_ps) / self.width_ps) ** 2
        falling = self.charge_fC - self.charge_fC * 2.0 * ((self.t_end_ps - t) / self.width_ps) ** 2
        return np.where(t <= self.t_start_ps + half, rising, falling)


@dataclass(eq=False)
class Waveform:
    """Supply current (µA) on a uniform grid; ``samples[k]`` is the mean over bin k."""
    samples: np.ndarray
    sample_period_ps: float = 1.0
    t0_ps: float = 0.0

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return self.t0_ps + self.sample_period_ps * np.arange(len(self.samples))

    def charge_fC(self, start: int = 0, stop: Optional[int] = None) -> float:
        """Integrated charge over samples[start:stop]; µA·ps is 1e-3 fC."""
        return float(np.sum(self.samples[start:stop]) * self.sample_period_ps / 1000.0)


@dataclass(eq=False)
class TraceMatrix:
    """N runs x T samples; row i was produced by ``plaintexts[i]``."""
    traces: np.ndarray
    plaintexts: Tuple[int, ...]
    sample_period_ps: float = 1.0
    key: Optional[int] = None
    seed: Optional[int] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.plaintexts = tuple(int(p) for p in self.plaintexts)
        if self.traces.ndim != 2 or self.traces.shape[0] != len(self.plaintexts):
            raise ValueError(
                f"Trace matrix shape {self.traces.shape} does not match {len(self.plaintexts)} plaintexts."
            )

    @property
    def n_runs(self) -> int:
        return self.traces.shape[0]

    @property
    def n_samples(self) -> int:
        return self.traces.shape[1]
