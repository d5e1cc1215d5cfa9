import json

import numpy as np
import pytest

from railsnipe.core.config import experiment_config_from_dict, load_experiment_config
from railsnipe.core.errors import DomainError, SchemaError, TraceSchemaError
from railsnipe.core.types import TraceMatrix, Waveform
from railsnipe.formats.traces import SignalCsvGenerator, SignalCsvParser, TraceCsvGenerator, TraceCsvParser


def _matrix():
    traces = np.array([[0.0, 1.5, 3.25], [2.0, 0.125, 0.0]])
    return TraceMatrix(traces, (0x00, 0xA7), 1.0, key=0x3C, seed=7, metadata={"noise_sigma": 0.0})


def test_trace_csv_layout():
    text = TraceCsvGenerator.generate(_matrix())
    lines = text.splitlines()
    assert lines[0] == "run,plaintext,s0,s1,s2"
    assert lines[1] == "0,0x00,0,1.5,3.25"
    assert lines[2] == "1,0xA7,2,0.125,0"
    assert text.endswith("\n")


def test_trace_csv_reads_back_with_its_sidecar():
    matrix = _matrix()
    sidecar = json.loads(TraceCsvGenerator.sidecar(matrix, {"design": "ark"}))
    assert sidecar["schema_version"] == 1
    assert sidecar["n_runs"] == 2 and sidecar["n_samples"] == 3
    assert sidecar["params"]["design"] == "ark"
    again = TraceCsvParser.parse(TraceCsvGenerator.generate(matrix), sidecar)
    assert np.array_equal(again.traces, matrix.traces)
    assert again.plaintexts == (0x00, 0xA7)
    assert again.key == 0x3C and again.seed == 7


@pytest.mark.parametrize("text, column", [
    ("index,plaintext,s0\n0,0x00,1\n", "run"),
    ("run,pt,s0\n0,0x00,1\n", "plaintext"),
    ("run,plaintext,s0\n0,0xZZ,1\n", "plaintext"),
    ("run,plaintext,s0,s1\n0,0x00,1,abc\n", "s1"),
    ("run,plaintext,s0\n1,0x00,1\n", "run"),
])
def test_trace_csv_errors_name_the_column(text, column):
    with pytest.raises(TraceSchemaError) as info:
        TraceCsvParser.parse(text)
    assert info.value.column == column
    assert column in str(info.value)


@pytest.mark.parametrize("text", ["", "run,plaintext\n0,0x00\n", "run,plaintext,s0\n", "run,plaintext,s0\n0,0x00\n"])
def test_trace_csv_structural_errors(text):
    with pytest.raises(TraceSchemaError):
        TraceCsvParser.parse(text)


def test_signal_csv():
    waveform = Waveform(np.array([0.0, 475.0, 950.0]), 0.5, 10.0)
    text = SignalCsvGenerator.generate(waveform, "bias_uA")
    assert text.splitlines() == ["t_ps,bias_uA", "10,0", "10.5,475", "11,950"]
    parsed, column = SignalCsvParser.parse(text)
    assert column == "bias_uA"
    assert parsed.sample_period_ps == 0.5
    assert parsed.t0_ps == 10.0
    assert parsed.samples.tolist() == [0.0, 475.0, 950.0]


@pytest.mark.parametrize("text", [
    "",
    "time,i_uA\n0,1\n",
    "t_ps,volts\n0,1\n",
    "t_ps,i_uA\n",
    "t_ps,i_uA\n0,1\n1,2\n3,4\n",
    "t_ps,i_uA\n0,x\n",
])
def test_signal_csv_errors(text):
    with pytest.raises(TraceSchemaError):
        SignalCsvParser.parse(text)


def test_experiment_config_layers(tmp_path):
    config = experiment_config_from_dict({
        "builtin": "ark",
        "seed": 42,
        "electrical": {"vdd": 1.0},
        "placement": {"mode": "hierarchical"},
        "attack": {"bit": 6, "key": 60},
    })
    assert config.electrical.vdd == 1.0
    assert config.electrical.tau0_ps == 5.0
    assert config.placement.dispersion == 0.05
    assert config.attack.bit == 6
    assert config.require_seed() == 42

    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"sim": {"ack_delay_ps": 20}}), encoding="utf-8")
    loaded = load_experiment_config(str(path))
    assert loaded.sim.ack_delay_ps == 20
    with pytest.raises(DomainError):
        loaded.require_seed()


@pytest.mark.parametrize("document", [
    {"colour": "red"},
    {"electrical": {"vdd": 1.2, "temperature": 300}},
    {"sim": []},
    [],
])
def test_experiment_config_rejects_unknown_keys(document):
    with pytest.raises(SchemaError):
        experiment_config_from_dict(document)


def test_experiment_config_checks_values():
    with pytest.raises(DomainError):
        experiment_config_from_dict({"attack": {"algorithm": "des-sbox1", "bit": 5}})
    with pytest.raises(DomainError):
        experiment_config_from_dict({"sim": {"ack_delay_ps": -1}})


def test_experiment_config_file_must_be_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{seed: 1}", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_experiment_config(str(path))
