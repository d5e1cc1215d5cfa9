import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..core.errors import DpaError, EmptyPartitionError
from ..core.types import TraceMatrix
from .selection import SelectionFunction

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_THRESHOLD_UA = 1e-9
RANK_RTOL = 1e-9


@dataclass(frozen=True)
class TraceSet:
    """Rows of a trace array selected by index; the samples are gathered only on demand."""
    source: np.ndarray
    rows: np.ndarray

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def samples(self) -> np.ndarray:
        return self.source[self.rows]


def _as_array(traces: Union[TraceMatrix, np.ndarray]) -> np.ndarray:
    return traces.traces if isinstance(traces, TraceMatrix) else np.asarray(traces, dtype=float)


def partition(traces: Union[TraceMatrix, np.ndarray], d_bits) -> Tuple[TraceSet, TraceSet]:
    """Row i goes to the first set iff d_bits[i] == 0."""
    source = _as_array(traces)
    d = np.asarray(d_bits)
    if d.shape != (source.shape[0],):
        raise DpaError(f"Got {d.size} selection bits for {source.shape[0]} traces.")
    return TraceSet(source, np.flatnonzero(d == 0)), TraceSet(source, np.flatnonzero(d != 0))


def average(trace_set: Union[TraceSet, np.ndarray]) -> np.ndarray:
    samples = trace_set.samples if isinstance(trace_set, TraceSet) else np.asarray(trace_set, dtype=float)
    if len(samples) == 0:
        raise EmptyPartitionError("The average of an empty trace set is undefined.")
    return samples.mean(axis=0)


def bias(a0: np.ndarray, a1: np.ndarray) -> np.ndarray:
    a0, a1 = np.asarray(a0, dtype=float), np.asarray(a1, dtype=float)
    if a0.shape != a1.shape:
        raise DpaError(f"Cannot subtract averages of lengths {a0.shape} and {a1.shape}.")
    return a0 - a1


@dataclass
class GuessResult:
    guess: int
    n0: int
    n1: int
    peak: Optional[float] = None  # None when one set is empty
    bias: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def conclusive(self) -> bool:
        return self.peak is not None


@dataclass
class DpaResult:
    selection: SelectionFunction
    results: List[GuessResult]
    n_traces: int
    threshold: float = DEFAULT_THRESHOLD_UA

    @property
    def ranking(self) -> List[GuessResult]:
        """Conclusive guesses by descending peak (ties by ascending guess), then the rest."""
        conclusive = sorted((r for r in self.results if r.conclusive), key=lambda r: (-r.peak, r.guess))
        rest = sorted((r for r in self.results if not r.conclusive), key=lambda r: r.guess)
        return conclusive + rest

    @property
    def inconclusive(self) -> bool:
        peaks = [r.peak for r in self.results if r.conclusive]
        return not peaks or max(peaks) < self.threshold

    def result(self, guess: int) -> GuessResult:
        return self.results[guess]

    def rank_of(self, guess: int) -> int:
        """1 + the number of conclusive guesses with a strictly larger peak. Equal peaks share a rank."""
        target = self.results[guess]
        conclusive = [r.peak for r in self.results if r.conclusive]
        if not target.conclusive:
            return len(conclusive) + 1
        ref = target.peak
        return 1 + sum(1 for p in conclusive if p > ref + RANK_RTOL * max(abs(ref), abs(p)))

    @property
    def tied(self) -> int:
        """How many conclusive guesses share rank 1."""
        conclusive = [r for r in self.results if r.conclusive]
        return sum(1 for r in conclusive if self.rank_of(r.guess) == 1)

    def to_dict(self, key: Optional[int] = None) -> dict:
        document = {
            "schema_version": SCHEMA_VERSION,
            "selection": self.selection.describe(),
            "n_traces": self.n_traces,
            "threshold_uA": self.threshold,
            "inconclusive": self.inconclusive,
            "tied": self.tied,
            "ranking": [
                {
                    "guess_hex": f"0x{r.guess:02X}",
                    "peak": r.peak,
                    "rank": self.rank_of(r.guess),
                    "n0": r.n0,
                    "n1": r.n1,
                }
                for r in self.ranking
            ],
        }
        if key is not None:
            document["key_hex"] = f"0x{key:02X}"
            document["key_rank"] = self.rank_of(key)
        return document


def _evaluate_guess(traces: np.ndarray, plaintexts, selection: SelectionFunction, guess: int) -> GuessResult:
    d = selection.d_bits(plaintexts, guess)
    s0, s1 = partition(traces, d)
    if len(s0) == 0 or len(s1) == 0:
        return GuessResult(guess, len(s0), len(s1))
    t = bias(average(s0), average(s1))
    return GuessResult(guess, len(s0), len(s1), float(np.max(np.abs(t))), t)


def attack(
    traces: TraceMatrix,
    selection: SelectionFunction,
    threshold: float = DEFAULT_THRESHOLD_UA,
    workers: int = 1,
) -> DpaResult:
    """
    Difference-of-means DPA: for every key guess, split the traces with the
    selection function, subtract the set averages and take the peak |T|.
    A guess that leaves one set empty is inconclusive and ranked last.
    """
    logger.info(f"--- DPA over {len(selection.guesses)} guesses, {traces.n_runs} traces, "
                f"{selection.algorithm} bit {selection.bit} ---")
    array = traces.traces
    guesses = list(selection.guesses)

    def run(guess: int) -> GuessResult:
        return _evaluate_guess(array, traces.plaintexts, selection, guess)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, guesses))
    else:
        results = [run(g) for g in guesses]

    for r in results:
        logger.debug(f"guess 0x{r.guess:02X}: n0={r.n0} n1={r.n1} peak={r.peak}")

    result = DpaResult(selection, results, traces.n_runs, threshold)
    best = result.ranking[0]
    if result.inconclusive:
        logger.info("Attack is inconclusive: no guess shows a bias above the threshold.")
    else:
        others = result.tied - 1
        logger.info(f"Top guess 0x{best.guess:02X} with peak {best.peak:.6g} µA, "
                    f"tied with {others} other guess{'' if others == 1 else 'es'}")
    return result


def xor_output_bias(traces: TraceMatrix, mask: int = 0b11) -> np.ndarray:
    """
    Bias of the exhaustive XOR experiment: traces split by the parity of the
    plaintext bits under ``mask``, which is the XOR output.
    """
    d = [bin(p & mask).count("1") & 1 for p in traces.plaintexts]
    s0, s1 = partition(traces, d)
    return bias(average(s0), average(s1))
