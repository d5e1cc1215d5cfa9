import json
import logging
import math
from dataclasses import dataclass, field, fields
from typing import List, Optional

from .errors import DomainError, SchemaError

logger = logging.getLogger(__name__)

PLACEMENT_MODES = ("flat", "hierarchical")
ALGORITHMS = ("aes-xor", "des-sbox1")
PLOT_KINDS = ("waveform", "bias-overlay", "dA-histogram", "peak-vs-guess")


def _require(condition: bool, message: str):
    if not condition:
        raise DomainError(message)


@dataclass(frozen=True)
class ElectricalParams:
    """Supply, delay law and sampling of the behavioral current model."""
    vdd: float = 1.2
    eta: float = 1.0

    # Delta t = tau0 + k * C
    tau0_ps: float = 5.0
    k_ps_per_fF: float = 2.0

    # Fraction of Delta t after which the output crosses the logic threshold
    switch_point: float = 0.5

    sample_period_ps: float = 1.0

    def __post_init__(self):
        _require(math.isfinite(self.vdd) and self.vdd > 0, f"vdd must be > 0, got {self.vdd}")
        _require(0.0 <= self.eta <= 1.0, f"eta must lie in [0, 1], got {self.eta}")
        _require(self.tau0_ps >= 0, f"tau0_ps must be >= 0, got {self.tau0_ps}")
        _require(self.k_ps_per_fF > 0, f"k_ps_per_fF must be > 0, got {self.k_ps_per_fF}")
        _require(0.0 < self.switch_point <= 1.0, f"switch_point must lie in (0, 1], got {self.switch_point}")
        _require(self.sample_period_ps > 0, f"sample_period_ps must be > 0, got {self.sample_period_ps}")

    def delay_ps(self, c_total_fF: float) -> float:
        """Transition time of a net, which is also the width of its current pulse."""
        return self.tau0_ps + self.k_ps_per_fF * c_total_fF

    def propagation_ps(self, c_total_fF: float) -> float:
        """Time from a gate firing until its fanout sees the new value."""
        return self.switch_point * self.delay_ps(c_total_fF)


@dataclass(frozen=True)
class SimConfig:
    # Environment response to the acknowledge, both edges
    ack_delay_ps: float = 10.0
    # Inputs stay valid at least this long after they are presented
    data_hold_ps: float = 100.0

    # Deadlock / livelock guards
    horizon_ps: float = 1.0e6
    max_events: int = 1_000_000

    # Cap for exhaustive input enumeration in balance checks
    enumeration_cap: int = 2 ** 16

    def __post_init__(self):
        _require(self.ack_delay_ps >= 0, f"ack_delay_ps must be >= 0, got {self.ack_delay_ps}")
        _require(self.data_hold_ps >= 0, f"data_hold_ps must be >= 0, got {self.data_hold_ps}")
        _require(self.horizon_ps > 0, f"horizon_ps must be > 0, got {self.horizon_ps}")
        _require(self.max_events > 0, f"max_events must be > 0, got {self.max_events}")
        _require(self.enumeration_cap > 0, f"enumeration_cap must be > 0, got {self.enumeration_cap}")


# mode -> (dispersion, area_overhead)
PLACEMENT_DEFAULTS = {
    "flat": (0.8, 1.0),
    "hierarchical": (0.05, 1.20),
}


@dataclass(frozen=True)
class PlacementParams:
    """Statistical capacitance assignment of one place-and-route flow.

    ``dispersion`` and ``area_overhead`` default per mode when left as None.
    """
    mode: str = "flat"
    base_fF: float = 8.0
    dispersion: Optional[float] = None
    area_overhead: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in PLACEMENT_MODES:
            raise DomainError(f"Unknown placement mode '{self.mode}'. Expected one of {PLACEMENT_MODES}.")
        dispersion, overhead = PLACEMENT_DEFAULTS[self.mode]
        if self.dispersion is None:
            object.__setattr__(self, "dispersion", dispersion)
        if self.area_overhead is None:
            object.__setattr__(self, "area_overhead", overhead)
        _require(self.base_fF > 0, f"base_fF must be > 0, got {self.base_fF}")
        _require(self.dispersion >= 0, f"dispersion must be >= 0, got {self.dispersion}")
        _require(self.area_overhead > 0, f"area_overhead must be > 0, got {self.area_overhead}")


@dataclass(frozen=True)
class AttackSpec:
    algorithm: str = "aes-xor"
    bit: int = 0
    # exhaustive | random:N | file:<path>
    plaintexts: str = "exhaustive"
    key: Optional[int] = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise DomainError(f"Unknown selection algorithm '{self.algorithm}'. Expected one of {ALGORITHMS}.")
        top = 7 if self.algorithm == "aes-xor" else 3
        _require(0 <= self.bit <= top, f"Target bit for {self.algorithm} must be in 0..{top}, got {self.bit}")
        kind = self.plaintexts.split(":", 1)[0]
        if kind not in ("exhaustive", "random", "file"):
            raise DomainError(f"Unknown plaintext source '{self.plaintexts}'.")


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: List[str]
    output: str

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise DomainError(f"Unknown plot kind '{self.kind}'. Expected one of {PLOT_KINDS}.")
        if not self.inputs:
            raise DomainError("A plot needs at least one input file.")


@dataclass
class ExperimentConfig:
    """Everything one CLI run needs. Values here are the file layer; CLI flags override them."""
    netlist: Optional[str] = None
    builtin: Optional[str] = None
    electrical: ElectricalParams = field(default_factory=ElectricalParams)
    sim: SimConfig = field(default_factory=SimConfig)
    placement: PlacementParams = field(default_factory=PlacementParams)
    attack: AttackSpec = field(default_factory=AttackSpec)
    seed: Optional[int] = None
    out: str = "out"

    def require_seed(self) -> int:
        if self.seed is None:
            raise DomainError("This command is randomized: a --seed is required.")
        return self.seed


_SECTIONS = {
    "electrical": ElectricalParams,
    "sim": SimConfig,
    "placement": PlacementParams,
    "attack": AttackSpec,
}


def _build_section(name: str, cls, values) -> object:
    if not isinstance(values, dict):
        raise SchemaError(f"Config section '{name}' must be an object.")
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise SchemaError(f"Unknown key(s) in config section '{name}': {', '.join(unknown)}")
    return cls(**values)


def experiment_config_from_dict(document: dict) -> ExperimentConfig:
    if not isinstance(document, dict):
        raise SchemaError("An experiment config must be a JSON object.")
    allowed = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(document) - allowed)
    if unknown:
        raise SchemaError(f"Unknown top-level config key(s): {', '.join(unknown)}")

    kwargs = {}
    for key, value in document.items():
        if key in _SECTIONS:
            kwargs[key] = _build_section(key, _SECTIONS[key], value)
        else:
            kwargs[key] = value
    return ExperimentConfig(**kwargs)


def load_experiment_config(path: str) -> ExperimentConfig:
    """Reads an experiment JSON file. Unknown keys are rejected."""
    logger.debug(f"Loading experiment config from {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"Config file {path} is not valid JSON: {e.msg} (line {e.lineno}, column {e.colno})")
    return experiment_config_from_dict(document)
