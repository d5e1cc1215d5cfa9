import json
import logging
import os
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..core.config import PlotSpec  # noqa: E402
from ..core.errors import PlotError, TraceSchemaError  # noqa: E402
from ..formats.traces import SignalCsvParser  # noqa: E402
from ..utils.io import read_text_file  # noqa: E402

logger = logging.getLogger(__name__)


def _read_signal(path: str):
    try:
        return SignalCsvParser.parse(read_text_file(path))
    except TraceSchemaError as e:
        raise PlotError(f"{path}: {e}")


def _read_report(path: str) -> dict:
    try:
        document = json.loads(read_text_file(path))
    except json.JSONDecodeError as e:
        raise PlotError(f"{path} is not a JSON report: {e.msg}")
    if not isinstance(document, dict) or "schema_version" not in document:
        raise PlotError(f"{path} is not a railsnipe report (no schema_version).")
    return document


def _plot_signals(ax, paths: List[str], ylabel: str):
    for path in paths:
        waveform, _ = _read_signal(path)
        ax.plot(waveform.times(), waveform.samples, linewidth=0.9, label=os.path.splitext(os.path.basename(path))[0])
    ax.set_xlabel("time (ps)")
    ax.set_ylabel(ylabel)
    ax.axhline(0.0, color="grey", linewidth=0.5)
    if len(paths) > 1:
        ax.legend()


def _plot_waveform(ax, spec: PlotSpec):
    _plot_signals(ax, spec.inputs, "supply current (µA)")
    ax.set_title("Block current")


def _plot_bias_overlay(ax, spec: PlotSpec):
    _plot_signals(ax, spec.inputs, "bias T (µA)")
    ax.set_title("DPA bias")


def _plot_da_histogram(ax, spec: PlotSpec):
    for path in spec.inputs:
        document = _read_report(path)
        label = os.path.splitext(os.path.basename(path))[0]
        if "entries" in document:
            ax.hist([e["d_A"] for e in document["entries"]], bins=20, alpha=0.6, label=label)
        elif "flat" in document and "hierarchical" in document:
            ax.hist(document["flat"]["max_d_A"], bins=20, alpha=0.6, label=f"{label} flat")
            ax.hist(document["hierarchical"]["max_d_A"], bins=20, alpha=0.6, label=f"{label} hierarchical")
        else:
            raise PlotError(f"{path} holds neither a dissymmetry nor a comparison report.")
    ax.set_xlabel("d_A")
    ax.set_ylabel("count")
    ax.set_title("Channel dissymmetry")
    ax.legend()


def _plot_peak_vs_guess(ax, spec: PlotSpec):
    document = _read_report(spec.inputs[0])
    if "ranking" not in document:
        raise PlotError(f"{spec.inputs[0]} is not a DPA result.")
    rows = [r for r in document["ranking"] if r["peak"] is not None]
    if not rows:
        raise PlotError(f"{spec.inputs[0]} has no conclusive guess to plot.")
    guesses = np.array([int(r["guess_hex"], 16) for r in rows])
    peaks = np.array([r["peak"] for r in rows])
    order = np.argsort(guesses)
    ax.vlines(guesses[order], 0.0, peaks[order], linewidth=0.8)
    top = [int(r["guess_hex"], 16) for r in rows if r.get("rank") == 1]
    ax.plot(top, [peaks[guesses == g][0] for g in top], "o", color="tab:red", label="rank 1")
    ax.set_xlabel("key guess")
    ax.set_ylabel("max |T| (µA)")
    ax.set_title("Peak bias per key guess")
    ax.legend()


_RENDERERS = {
    "waveform": _plot_waveform,
    "bias-overlay": _plot_bias_overlay,
    "dA-histogram": _plot_da_histogram,
    "peak-vs-guess": _plot_peak_vs_guess,
}


def render_plot(spec: PlotSpec, reproducible: bool = False):
    """Renders ``spec`` to an SVG file. Reproducible output carries no date and a fixed hash salt."""
    for path in spec.inputs:
        if not os.path.isfile(path):
            raise PlotError(f"Plot input {path} does not exist.")
    if spec.kind == "bias-overlay" and len(spec.inputs) < 2:
        raise PlotError("A bias overlay needs at least two bias CSV files.")

    logger.info(f"--- Rendering {spec.kind} plot to {spec.output} ---")
    rc = {"svg.hashsalt": "railsnipe"} if reproducible else {}
    metadata = {"Date": None, "Creator": None} if reproducible else None

    with matplotlib.rc_context(rc):
        fig, ax = plt.subplots(figsize=(10, 4))
        try:
            _RENDERERS[spec.kind](ax, spec)
            fig.tight_layout()
            directory = os.path.dirname(spec.output)
            if directory:
                os.makedirs(directory, exist_ok=True)
            fig.savefig(spec.output, format="svg", metadata=metadata)
        finally:
            plt.close(fig)
    logger.info(f"Successfully saved to {spec.output}")
