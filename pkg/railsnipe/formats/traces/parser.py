import csv
import io
import logging
from typing import List, Optional, Tuple

import numpy as np

from ...core.errors import TraceSchemaError
from ...core.types import TraceMatrix, Waveform

logger = logging.getLogger(__name__)

SIGNAL_COLUMNS = ("i_uA", "bias_uA")


class SignalCsvParser:
    @staticmethod
    def parse(text: str) -> Tuple[Waveform, str]:
        """Reads a waveform or bias CSV; returns the signal and its value column name."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows:
            raise TraceSchemaError("Signal CSV is empty.")
        header = [h.strip() for h in rows[0]]
        if len(header) != 2 or header[0] != "t_ps":
            raise TraceSchemaError(f"Signal CSV header must be 't_ps,<value>', got {','.join(header)}.", header[0] if header else None)
        if header[1] not in SIGNAL_COLUMNS:
            raise TraceSchemaError(f"Unknown signal column '{header[1]}'. Expected one of {SIGNAL_COLUMNS}.", header[1])
        body = [row for row in rows[1:] if row]
        if not body:
            raise TraceSchemaError("Signal CSV has a header but no samples.")

        times, values = [], []
        for line, row in enumerate(body, start=2):
            if len(row) != 2:
                raise TraceSchemaError(f"Row {line} has {len(row)} fields, expected 2.")
            for name, cell, target in ((header[0], row[0], times), (header[1], row[1], values)):
                try:
                    target.append(float(cell))
                except ValueError:
                    raise TraceSchemaError(f"Row {line}: column '{name}' holds non-numeric value '{cell}'.", name)

        period = times[1] - times[0] if len(times) > 1 else 1.0
        if len(times) > 1 and (period <= 0 or not np.allclose(np.diff(times), period, rtol=1e-9, atol=1e-9)):
            raise TraceSchemaError("Column 't_ps' is not a uniform increasing time grid.", "t_ps")
        return Waveform(np.array(values), period, times[0]), header[1]


class TraceCsvParser:
    @staticmethod
    def parse(text: str, sidecar: Optional[dict] = None) -> TraceMatrix:
        """
        Reads a trace CSV (run, plaintext, samples...). The sidecar, when given,
        supplies the sample period, seed and key.
        """
        rows = [row for row in csv.reader(io.StringIO(text)) if row]
        if not rows:
            raise TraceSchemaError("Trace CSV is empty.")
        header = [h.strip() for h in rows[0]]
        for index, expected in enumerate(("run", "plaintext")):
            if len(header) <= index or header[index] != expected:
                found = header[index] if len(header) > index else "<missing>"
                raise TraceSchemaError(f"Column {index + 1} must be '{expected}', found '{found}'.", expected)
        if len(header) < 3:
            raise TraceSchemaError("Trace CSV has no sample columns.", "samples")
        if len(rows) < 2:
            raise TraceSchemaError("Trace CSV has no runs.")

        plaintexts: List[int] = []
        samples: List[List[float]] = []
        for line, row in enumerate(rows[1:], start=2):
            if len(row) != len(header):
                raise TraceSchemaError(f"Row {line} has {len(row)} fields, expected {len(header)}.")
            try:
                run = int(row[0])
            except ValueError:
                raise TraceSchemaError(f"Row {line}: column 'run' holds '{row[0]}'.", "run")
            if run != line - 2:
                raise TraceSchemaError(f"Row {line}: runs must be numbered 0..N-1 in order, got {run}.", "run")
            try:
                plaintexts.append(int(row[1], 16))
            except ValueError:
                raise TraceSchemaError(f"Row {line}: column 'plaintext' holds '{row[1]}', not hex.", "plaintext")
            values = []
            for name, cell in zip(header[2:], row[2:]):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise TraceSchemaError(f"Row {line}: column '{name}' holds non-numeric value '{cell}'.", name)
            samples.append(values)

        sidecar = sidecar or {}
        matrix = TraceMatrix(
            traces=np.array(samples, dtype=float),
            plaintexts=tuple(plaintexts),
            sample_period_ps=float(sidecar.get("sample_period_ps", 1.0)),
            key=sidecar.get("key"),
            seed=sidecar.get("seed"),
            metadata=dict(sidecar.get("params", {})),
        )
        logger.debug(f"Read {matrix.n_runs} x {matrix.n_samples} traces")
        return matrix
