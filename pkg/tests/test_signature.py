import numpy as np
import pytest

from railsnipe.core.config import SimConfig
from railsnipe.core.errors import DomainError
from railsnipe.dpa.attack import xor_output_bias
from railsnipe.netlist.annotate import parse_perturbation, perturb, xor_capacitances
from railsnipe.netlist.builtin import builtin_dims_xor
from railsnipe.power.signature import (
    REQUIRED_POSITIONS, analytic_xor_signature, chain_pulses, find_lobes, integrated_magnitude, lobes_per_window,
    rtz_start, signature_summary,
)
from railsnipe.sim.traces import collect_traces, xor_target

from conftest import NET_FF, PULSE_PEAK_UA

# inputs return to zero at the 100 ps data hold in every run below
RTZ_START = 100


def _symmetric_caps(changes=None):
    caps = {pos: NET_FF for pos in REQUIRED_POSITIONS}
    caps.update(changes or {})
    return caps


def _simulated_and_analytic(netlist, params):
    matrix = collect_traces(xor_target(netlist), [0, 1, 2, 3], params=params)
    simulated = xor_output_bias(matrix)
    analytic = analytic_xor_signature(xor_capacitances(netlist), params, n_samples=matrix.n_samples)
    return simulated, analytic.samples


def _perturbed(xor, *texts):
    return perturb(xor, dict(parse_perturbation(text) for text in texts))


def test_symmetric_xor_has_no_signature(params):
    signature = analytic_xor_signature(_symmetric_caps(), params)
    assert np.max(np.abs(signature.samples)) == 0.0
    assert find_lobes(signature.samples) == []


def test_symmetric_xor_simulation_has_no_bias(xor, params):
    simulated, _ = _simulated_and_analytic(xor, params)
    assert np.max(np.abs(simulated)) == 0.0


@pytest.mark.parametrize("changes", [
    {"c_l11": "2x"},
    {"c_l11": "4x"},
    {"c_l21": "2x"},
    {"c_l22": "16fF"},
    {"c_l31": "2x"},
    {"c_l32": "2x"},
    {"c_l41": "3x"},
    {"c_l13": "2x", "c_l21": "24fF"},
])
def test_simulated_bias_matches_the_closed_form(xor, params, changes):
    simulated, analytic = _simulated_and_analytic(perturb(xor, changes), params)
    assert simulated == pytest.approx(analytic, abs=1e-9)

    sim_lobes, ana_lobes = find_lobes(simulated), find_lobes(analytic)
    assert [lobe.sign for lobe in sim_lobes] == [lobe.sign for lobe in ana_lobes]
    if ana_lobes:
        assert integrated_magnitude(simulated) == pytest.approx(integrated_magnitude(analytic), rel=0.05)


@pytest.mark.parametrize("perturbation, sign", [("c_l31=2x", 1), ("c_l32=2x", -1)])
def test_level3_rail_load_gives_one_lobe_per_phase(xor, params, perturbation, sign):
    simulated, analytic = _simulated_and_analytic(_perturbed(xor, perturbation), params)
    for signal in (simulated, analytic):
        lobes = find_lobes(signal)
        assert lobes_per_window(lobes, RTZ_START) == {"evaluation": 1, "return_to_zero": 1}
        assert [lobe.sign for lobe in lobes] == [sign, sign]
        # the wider level-3 pulse overlaps the ack pulse just as the other set's chain runs out
        assert lobes[0].peak == pytest.approx(393.75 + 8 * PULSE_PEAK_UA / 12, rel=1e-9)


def test_level2_rail_load_gives_two_lobes_per_phase(xor, params):
    simulated, analytic = _simulated_and_analytic(_perturbed(xor, "c_l21=2x"), params)
    for signal in (simulated, analytic):
        lobes = find_lobes(signal)
        assert lobes_per_window(lobes, RTZ_START) == {"evaluation": 2, "return_to_zero": 2}
        assert [lobe.sign for lobe in lobes] == [1, 1, 1, 1]
        # the second lobe of each phase is the shifted end of the chain
        assert lobes[1].peak == pytest.approx(8 * PULSE_PEAK_UA / 12, rel=1e-9)
        assert lobes[0].peak < lobes[1].peak


@pytest.mark.parametrize("targets", [("c_l11",), ("c_l11", "c_l12")])
def test_level1_peak_grows_strictly_from_2x_to_4x(xor, params, targets):
    peaks = []
    for scale in ("1x", "2x", "4x"):
        netlist = _perturbed(xor, *(f"{target}={scale}" for target in targets))
        simulated, analytic = _simulated_and_analytic(netlist, params)
        assert np.max(np.abs(simulated)) == pytest.approx(np.max(np.abs(analytic)), abs=1e-9)
        peaks.append(np.max(np.abs(simulated)))
    assert peaks[0] == 0.0
    assert peaks[1] > 0.0
    assert peaks[2] > 1.5 * peaks[1]


def test_level1_peak_grows_without_parasitics(params):
    bare = builtin_dims_xor(c_par=0.0, c_sc=0.0)
    peaks = [
        np.max(np.abs(_simulated_and_analytic(_perturbed(bare, f"c_l11={scale}"), params)[0]))
        for scale in ("2x", "4x")
    ]
    assert peaks[0] < peaks[1]


def test_bias_starts_at_the_perturbed_level(params):
    # level-2 gates fire at 12 ps, level-3 gates at 24 ps
    level2 = analytic_xor_signature(_symmetric_caps({(2, 1): 2 * NET_FF}), params).samples
    assert np.all(level2[:12] == 0.0)
    assert np.max(np.abs(level2[12:])) > 0.0

    level3 = analytic_xor_signature(_symmetric_caps({(3, 1): 2 * NET_FF}), params).samples
    assert np.all(level3[:24] == 0.0)
    assert np.max(np.abs(level3[24:])) > 0.0


def test_signed_bias_area_is_the_extra_charge_of_the_perturbed_rail(params):
    # Set 0 switches the level-2 rail once per phase, so its average carries 2 * dC * Vdd extra
    for c_load in (8.0, 16.0, 24.0, 32.0):
        signal = analytic_xor_signature(_symmetric_caps({(2, 1): c_load + 1.5}), params).samples
        assert np.sum(signal) / 1000.0 == pytest.approx(2 * (c_load - 8.0) * params.vdd, abs=1e-9)


def test_lobes_fall_into_both_phases(params):
    signal = analytic_xor_signature(_symmetric_caps({(1, 1): 2 * NET_FF}), params).samples
    lobes = find_lobes(signal)
    assert lobes
    assert all(lobe.stop > lobe.start for lobe in lobes)
    assert [lobe.start for lobe in lobes] == sorted(lobe.start for lobe in lobes)
    counts = lobes_per_window(lobes, RTZ_START)
    assert counts["evaluation"] >= 1
    assert counts["return_to_zero"] >= 1
    assert sum(counts.values()) == len(lobes)


def test_return_to_zero_waits_for_the_hold_or_the_acknowledge(params):
    chain = ((1, 1), (2, 1), (3, 1), (4, 1))
    caps = _symmetric_caps()
    assert rtz_start(chain, caps, params, SimConfig()) == pytest.approx(100.0)
    assert rtz_start(chain, caps, params, SimConfig(data_hold_ps=0.0)) == pytest.approx(58.0)
    slow = _symmetric_caps({(2, 1): 137.5})
    # 12 + 140 + 12 + 12 ps to the acknowledge, then the 10 ps response
    assert rtz_start(chain, slow, params, SimConfig()) == pytest.approx(186.0)
    pulses = chain_pulses(chain, caps, params, SimConfig())
    assert [p.t_start_ps for p in pulses] == pytest.approx([0.0, 12.0, 24.0, 36.0, 100.0, 112.0, 124.0, 136.0])


def test_signature_summary_reports_lobes_per_phase(params):
    signal = analytic_xor_signature(_symmetric_caps({(3, 1): 17.5}), params).samples
    summary = signature_summary(signal, RTZ_START)
    assert summary["lobes_per_phase"] == {"evaluation": 1, "return_to_zero": 1}
    assert summary["peak_uA"] == pytest.approx(np.max(np.abs(signal)))
    assert summary["integrated_fC"] == pytest.approx(integrated_magnitude(signal))
    assert [lobe["sign"] for lobe in summary["lobes"]] == [1, 1]
    assert summary["lobes"][0]["stop_ps"] <= RTZ_START <= summary["lobes"][1]["start_ps"]


def test_missing_position_is_a_domain_error(params):
    caps = _symmetric_caps()
    del caps[(2, 2)]
    with pytest.raises(DomainError):
        analytic_xor_signature(caps, params)


def test_find_lobes_on_a_hand_made_signal():
    signal = np.array([0.0, 1.0, 4.0, 1.0, 0.0, -3.0, -3.5, 0.0, 0.5])
    lobes = find_lobes(signal, fraction=0.5)
    assert [(lobe.start, lobe.stop, lobe.sign) for lobe in lobes] == [(2, 3, 1), (5, 7, -1)]
    assert lobes[0].peak == 4.0
    assert lobes[1].charge_fC == pytest.approx(6.5e-3)
