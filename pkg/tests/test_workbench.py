import json

import pytest

from railsnipe.formats.netlist import serialize_netlist
from railsnipe.formats.traces import SignalCsvParser
from railsnipe.netlist.builtin import builtin_dims_xor
from railsnipe.workbench import main


def _read(path):
    return path.read_text(encoding="utf-8")


@pytest.fixture
def xor_file(tmp_path):
    path = tmp_path / "xor.json"
    path.write_text(serialize_netlist(builtin_dims_xor()), encoding="utf-8")
    return path


def test_check_accepts_a_valid_netlist(xor_file):
    assert main(["check", str(xor_file)]) == 0


def test_check_reports_an_invalid_netlist(tmp_path):
    document = json.loads(serialize_netlist(builtin_dims_xor()))
    document["gates"][0]["inputs"] = ["a0", "x9"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    assert main(["check", str(path)]) == 1


def test_malformed_and_missing_netlists(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"gates": [', encoding="utf-8")
    assert main(["check", str(path)]) == 1
    assert main(["check", str(tmp_path / "absent.json")]) == 2


def test_usage_errors_exit_with_2(xor_file, tmp_path):
    assert main([]) == 2
    assert main(["analyze", "--out", str(tmp_path)]) == 2
    assert main(["analyze", str(xor_file), "--builtin", "xor", "--out", str(tmp_path)]) == 2
    assert main(["plot", "--kind", "sparkline", "--input", "x.csv", "--output", "x.svg"]) == 2


def test_analyze_writes_metrics_and_dot(xor_file, tmp_path):
    out = tmp_path / "out"
    assert main(["analyze", str(xor_file), "--dot", "--out", str(out)]) == 0
    document = json.loads(_read(out / "analysis.json"))
    assert document["n_c"] == 4
    assert document["n_i"] == 4
    assert document["balanced"] is True
    assert document["n_ij"] == {"1": 1, "2": 1, "3": 1, "4": 1}
    assert document["frequency_hz"] == pytest.approx(1.0e8)
    assert document["dynamic_power_W"] > 0.0
    assert _read(out / "graph.dot").startswith("digraph")


def test_analyze_flags_the_unbalanced_xor(tmp_path):
    assert main(["analyze", "--builtin", "unbalanced", "--out", str(tmp_path)]) == 0
    document = json.loads(_read(tmp_path / "analysis.json"))
    assert document["balanced"] is False
    assert len(document["balance"]["offending_inputs"]) == 2


def test_simulate_xor_writes_both_signatures(tmp_path):
    assert main([
        "simulate", "--builtin", "xor", "--perturb", "c_l11=2x", "--dump-run", "0", "--out", str(tmp_path),
    ]) == 0
    for name in ("traces.csv", "traces.json", "run0_waveform.csv", "xor_bias.csv", "analytic_bias.csv"):
        assert (tmp_path / name).is_file()
    simulated, column = SignalCsvParser.parse(_read(tmp_path / "xor_bias.csv"))
    analytic, _ = SignalCsvParser.parse(_read(tmp_path / "analytic_bias.csv"))
    assert column == "bias_uA"
    assert simulated.samples == pytest.approx(analytic.samples, abs=1e-6)
    sidecar = json.loads(_read(tmp_path / "traces.json"))
    assert sidecar["n_runs"] == 4
    assert sidecar["params"]["design"] == "xor"


def test_simulate_xor_summarizes_the_lobes_of_each_phase(tmp_path):
    assert main(["simulate", "--builtin", "xor", "--perturb", "c_l31=2x", "--out", str(tmp_path)]) == 0
    document = json.loads(_read(tmp_path / "signature.json"))
    assert document["rtz_start_ps"] == pytest.approx(100.0)
    for kind in ("simulated", "analytic"):
        assert document[kind]["lobes_per_phase"] == {"evaluation": 1, "return_to_zero": 1}
        assert [lobe["sign"] for lobe in document[kind]["lobes"]] == [1, 1]
    assert document["simulated"]["peak_uA"] == pytest.approx(document["analytic"]["peak_uA"], abs=1e-6)


def test_noisy_simulation_requires_a_seed(tmp_path):
    assert main(["simulate", "--builtin", "xor", "--noise", "5", "--out", str(tmp_path)]) == 1
    assert main(["simulate", "--builtin", "xor", "--noise", "5", "--seed", "3", "--out", str(tmp_path)]) == 0


def test_dump_run_out_of_range(tmp_path):
    assert main(["simulate", "--builtin", "xor", "--dump-run", "9", "--out", str(tmp_path)]) == 1


def test_simulate_attack_and_plot(tmp_path):
    sim_dir, attack_dir = tmp_path / "sim", tmp_path / "attack"
    assert main([
        "simulate", "--builtin", "ark", "--key", "0x3C", "--perturb", "s3_c0=17.5fF",
        "--dump-run", "0", "--out", str(sim_dir),
    ]) == 0
    assert main([
        "attack", "--traces", str(sim_dir / "traces.csv"), "--bit", "3", "--bias-dump", "0x3C",
        "--bias-dump", "0x00", "--out", str(attack_dir),
    ]) == 0
    result = json.loads(_read(attack_dir / "dpa.json"))
    assert result["n_traces"] == 256
    assert result["inconclusive"] is False
    assert result["key_hex"] == "0x3C"
    assert result["key_rank"] == 1
    # an XOR selection on one bit splits the traces the same way for every guess
    assert result["tied"] == 256
    key_row = next(row for row in result["ranking"] if row["guess_hex"] == "0x3C")
    assert key_row["rank"] == 1
    assert (attack_dir / "bias_0x3C.csv").is_file()

    svg = tmp_path / "peaks.svg"
    assert main(["plot", "--kind", "peak-vs-guess", "--input", str(attack_dir / "dpa.json"),
                 "--output", str(svg), "--reproducible"]) == 0
    assert _read(svg).lstrip().startswith("<?xml")

    overlay = tmp_path / "overlay.svg"
    biases = [str(attack_dir / "bias_0x3C.csv"), str(attack_dir / "bias_0x00.csv")]
    args = ["plot", "--kind", "bias-overlay", "--output", str(overlay), "--reproducible"]
    for path in biases:
        args += ["--input", path]
    assert main(args) == 0
    first = _read(overlay)
    assert main(args) == 0
    assert _read(overlay) == first


def test_attack_rejects_a_guess_outside_the_space(tmp_path):
    assert main(["simulate", "--builtin", "xor", "--out", str(tmp_path)]) == 0
    assert main([
        "attack", "--traces", str(tmp_path / "traces.csv"), "--algorithm", "des-sbox1",
        "--bias-dump", "0x40", "--out", str(tmp_path),
    ]) == 1


def test_plot_errors(tmp_path):
    assert main(["plot", "--kind", "waveform", "--input", str(tmp_path / "absent.csv"),
                 "--output", str(tmp_path / "w.svg")]) == 1
    bias = tmp_path / "bias.csv"
    bias.write_text("t_ps,bias_uA\n0,1\n1,2\n", encoding="utf-8")
    assert main(["plot", "--kind", "bias-overlay", "--input", str(bias),
                 "--output", str(tmp_path / "o.svg")]) == 1
    assert main(["plot", "--kind", "waveform", "--input", str(bias),
                 "--output", str(tmp_path / "w.svg")]) == 0


def test_dissym_with_seeded_placement_is_reproducible(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    args = ["dissym", "--builtin", "ark", "--placement", "flat", "--seed", "42", "--top", "5"]
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert _read(first / "dissymmetry.json") == _read(second / "dissymmetry.json")
    document = json.loads(_read(first / "dissymmetry.json"))
    assert document["placement"]["mode"] == "flat"
    assert document["placement"]["seed"] == 42
    assert len(_read(first / "dissymmetry.txt").splitlines()) == 5 + 4

    svg = tmp_path / "hist.svg"
    assert main(["plot", "--kind", "dA-histogram", "--input", str(first / "dissymmetry.json"),
                 "--output", str(svg)]) == 0


def test_dissym_placement_needs_a_seed(tmp_path):
    assert main(["dissym", "--builtin", "ark", "--placement", "flat", "--out", str(tmp_path)]) == 1
    assert main(["dissym", "--builtin", "xor", "--perturb", "c0=16fF", "--out", str(tmp_path)]) == 0
    document = json.loads(_read(tmp_path / "dissymmetry.json"))
    assert document["entries"][0]["channel"] == "c"


def test_pnr_compare(tmp_path):
    assert main(["pnr-compare", "--builtin", "ark", "--seed", "1", "--n-seeds", "5", "--out", str(tmp_path)]) == 0
    document = json.loads(_read(tmp_path / "pnr_compare.json"))
    assert document["n_seeds"] == 5
    assert document["seeds"] == [1, 2, 3, 4, 5]
    assert document["area_ratio"] == pytest.approx(1.2)


def test_config_file_feeds_the_run(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"builtin": "xor", "seed": 4, "out": str(tmp_path / "cfg")}), encoding="utf-8")
    assert main(["analyze", "--params", str(config)]) == 0
    assert (tmp_path / "cfg" / "analysis.json").is_file()

    config.write_text(json.dumps({"builtin": "xor", "colour": "red"}), encoding="utf-8")
    assert main(["analyze", "--params", str(config), "--out", str(tmp_path)]) == 1
