import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import ElectricalParams, SimConfig
from ..core.errors import DomainError, InputError
from ..core.theory import bit_of
from ..core.types import Netlist, TraceMatrix
from .simulator import CycleResult, QdiSimulator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TargetDesign:
    """
    Which input channels of a netlist carry plaintext bits and which carry key bits.
    ``plaintext_channels[i]`` takes bit i of the plaintext (LSB first); the same for the key.
    """
    netlist: Netlist
    plaintext_channels: Tuple[str, ...]
    key_channels: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "plaintext_channels", tuple(self.plaintext_channels))
        object.__setattr__(self, "key_channels", tuple(self.key_channels))
        for name in self.plaintext_channels + self.key_channels:
            if name not in self.netlist.inputs:
                raise InputError(f"Channel '{name}' is not an input channel of the design.")
            if self.netlist.channel(name).n != 2:
                raise InputError(f"Channel '{name}' must be dual-rail to carry one bit.")

    @property
    def plaintext_bits(self) -> int:
        return len(self.plaintext_channels)

    @property
    def key_bits(self) -> int:
        return len(self.key_channels)

    def assignment(self, plaintext: int, key: Optional[int] = None) -> Dict[str, int]:
        if not 0 <= plaintext < 2 ** self.plaintext_bits:
            raise InputError(f"Plaintext {plaintext:#x} does not fit {self.plaintext_bits} bit(s).")
        values = {name: bit_of(plaintext, i) for i, name in enumerate(self.plaintext_channels)}
        if self.key_channels:
            if key is None:
                raise InputError("The design has key channels but no key was given.")
            if not 0 <= key < 2 ** self.key_bits:
                raise InputError(f"Key {key:#x} does not fit {self.key_bits} bit(s).")
            values.update({name: bit_of(key, i) for i, name in enumerate(self.key_channels)})
        return values


def xor_target(netlist: Netlist) -> TargetDesign:
    """The exhaustive XOR experiment: plaintext bit 0 on channel a, bit 1 on channel b."""
    return TargetDesign(netlist, ("a", "b"))


def add_round_key_target(netlist: Netlist, slices: int = 8) -> TargetDesign:
    return TargetDesign(
        netlist,
        tuple(f"pt{i}" for i in range(slices)),
        tuple(f"k{i}" for i in range(slices)),
    )


def run_seed(seed: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, run_index])


def add_trace_noise(matrix: TraceMatrix, sigma: float, seed: int) -> TraceMatrix:
    """
    Returns a copy with zero-mean Gaussian noise of ``sigma`` µA added. Row i draws
    from its own stream seeded by (seed, i), independent of the other rows.
    """
    if sigma < 0:
        raise DomainError(f"noise sigma must be >= 0, got {sigma}")
    traces = matrix.traces.copy()
    if sigma > 0:
        for i in range(matrix.n_runs):
            traces[i] += np.random.default_rng(run_seed(seed, i)).normal(0.0, sigma, matrix.n_samples)
    metadata = dict(matrix.metadata, noise_sigma=sigma)
    return TraceMatrix(traces, matrix.plaintexts, matrix.sample_period_ps, matrix.key, seed, metadata)


def collect_traces(
    target: TargetDesign,
    plaintexts: Sequence[int],
    fixed_key: Optional[int] = None,
    params: Optional[ElectricalParams] = None,
    noise_sigma: float = 0.0,
    seed: Optional[int] = None,
    sim: Optional[SimConfig] = None,
    workers: int = 1,
) -> TraceMatrix:
    """
    One four-phase cycle per plaintext on the key-specialized design.

    Rows share t = 0 at the phase-1 input rise and are zero-padded to the longest
    run. Results do not depend on ``workers``.
    """
    if len(plaintexts) == 0:
        raise InputError("A trace collection needs at least one plaintext.")
    if noise_sigma > 0 and seed is None:
        raise DomainError("A seed is required when noise_sigma > 0.")
    params = params or ElectricalParams()
    simulator = QdiSimulator(target.netlist, params, sim)
    assignments = [target.assignment(int(p), fixed_key) for p in plaintexts]

    logger.info(f"--- Collecting {len(assignments)} trace(s) with {max(1, workers)} worker(s) ---")

    def run(index: int) -> CycleResult:
        return simulator.run(assignments[index])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cycles: List[CycleResult] = list(pool.map(run, range(len(assignments))))
    else:
        cycles = [run(i) for i in range(len(assignments))]
    rows = [cycle.waveform.samples for cycle in cycles]

    length = max(len(row) for row in rows)
    traces = np.zeros((len(rows), length))
    for i, row in enumerate(rows):
        traces[i, : len(row)] = row

    metadata = {
        "plaintext_channels": list(target.plaintext_channels),
        "key_channels": list(target.key_channels),
        "electrical": asdict(params),
        "ack_delay_ps": simulator.sim.ack_delay_ps,
        "data_hold_ps": simulator.sim.data_hold_ps,
        # earliest return-to-zero over the runs
        "rtz_start_ps": min(cycle.phase_times[3] for cycle in cycles),
        "noise_sigma": 0.0,
    }
    matrix = TraceMatrix(traces, tuple(int(p) for p in plaintexts), params.sample_period_ps, fixed_key, seed, metadata)
    if noise_sigma > 0:
        matrix = add_trace_noise(matrix, noise_sigma, seed)
    logger.info(f"Collected a {matrix.n_runs} x {matrix.n_samples} trace matrix.")
    return matrix


def plaintext_source(spec: str, width_bits: int, seed: Optional[int] = None) -> List[int]:
    """
    Expands a plaintext source: ``exhaustive`` (every value of ``width_bits``),
    ``random:N`` (N seeded draws) or ``file:<path>`` (one integer per line, hex with 0x).
    """
    kind, _, arg = spec.partition(":")
    if kind == "exhaustive":
        return list(range(2 ** width_bits))
    if kind == "random":
        if seed is None:
            raise DomainError("Random plaintexts need a --seed.")
        try:
            count = int(arg)
        except ValueError:
            raise DomainError(f"Cannot read plaintext count from '{spec}'.")
        if count < 1:
            raise DomainError(f"Plaintext count must be >= 1, got {count}.")
        rng = np.random.default_rng(seed)
        return [int(v) for v in rng.integers(0, 2 ** width_bits, size=count)]
    if kind == "file":
        values = []
        with open(arg, "r", encoding="utf-8") as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if line:
                    values.append(int(line, 0))
        return values
    raise DomainError(f"Unknown plaintext source '{spec}'.")
