import csv
import io
import json
from typing import Optional

from ...core.types import TraceMatrix, Waveform

SCHEMA_VERSION = 1


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


class SignalCsvGenerator:
    @staticmethod
    def generate(waveform: Waveform, value_column: str = "i_uA") -> str:
        """One ``t_ps,<value>`` row per sample."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["t_ps", value_column])
        for t, value in zip(waveform.times(), waveform.samples):
            writer.writerow([_fmt(t), _fmt(value)])
        return out.getvalue()


class TraceCsvGenerator:
    @staticmethod
    def generate(matrix: TraceMatrix) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["run", "plaintext"] + [f"s{j}" for j in range(matrix.n_samples)])
        for i, (plaintext, row) in enumerate(zip(matrix.plaintexts, matrix.traces)):
            writer.writerow([i, f"0x{plaintext:02X}"] + [_fmt(v) for v in row])
        return out.getvalue()

    @staticmethod
    def sidecar(matrix: TraceMatrix, params: Optional[dict] = None) -> str:
        document = {
            "schema_version": SCHEMA_VERSION,
            "sample_period_ps": matrix.sample_period_ps,
            "seed": matrix.seed,
            "key": matrix.key,
            "n_runs": matrix.n_runs,
            "n_samples": matrix.n_samples,
            "params": dict(matrix.metadata, **(params or {})),
        }
        return json.dumps(document, indent=2) + "\n"


