import json

import numpy as np
import pytest

from railsnipe.core.errors import (
    ArityError, DuplicateIdError, NetlistReferenceError, NetlistSyntaxError, SchemaError, StructuralError,
)
from railsnipe.core.types import Channel, Gate, GateKind, Net, Netlist
from railsnipe.formats.netlist import NetlistGenerator, parse_netlist, serialize_netlist
from railsnipe.netlist.annotate import XOR_POSITIONS, parse_perturbation, perturb, xor_capacitances
from railsnipe.netlist.builtin import builtin_add_round_key, builtin_dims_xor, builtin_unbalanced_xor
from railsnipe.netlist.validator import validate

from conftest import random_ark

INV_DOC = {
    "gates": [{"id": "g1", "kind": "INV", "inputs": ["x"], "output": "y"}],
    "nets": [
        {"id": "x", "c_load_fF": 8, "c_par_fF": 0, "c_sc_fF": 0},
        {"id": "y", "c_load_fF": 8, "c_par_fF": 1, "c_sc_fF": 0.5},
    ],
}


def _doc(**changes):
    document = json.loads(json.dumps(INV_DOC))
    document.update(changes)
    return json.dumps(document)


def test_parse_minimal_inverter():
    netlist = parse_netlist(_doc())
    assert len(netlist.gates) == 1
    assert len(netlist.nets) == 2
    assert netlist.gates[0].kind is GateKind.INV
    assert netlist.net("y").total_fF == pytest.approx(9.5)


def test_parse_dims_xor_document_has_nine_gates():
    netlist = parse_netlist(serialize_netlist(builtin_dims_xor()))
    assert len(netlist.gates) == 9
    kinds = [g.kind for g in netlist.gates]
    assert kinds.count(GateKind.MULLER) == 4
    assert kinds.count(GateKind.OR) == 3
    assert kinds.count(GateKind.BUF) == 2
    assert netlist.gate_map["OR_ack"].inputs == ("c0", "c1")


def test_undeclared_net_names_the_missing_id():
    document = json.loads(_doc())
    document["gates"][0]["inputs"] = ["x9"]
    with pytest.raises(NetlistReferenceError) as info:
        parse_netlist(json.dumps(document))
    assert info.value.missing_id == "x9"
    assert "x9" in str(info.value)


def test_syntax_error_reports_position():
    with pytest.raises(NetlistSyntaxError) as info:
        parse_netlist('{\n  "gates": [,]\n}')
    assert info.value.line == 2
    assert info.value.column > 0


def test_duplicate_gate_id_is_rejected():
    document = json.loads(_doc())
    document["nets"].append({"id": "z", "c_load_fF": 8})
    document["gates"].append({"id": "g1", "kind": "BUF", "inputs": ["y"], "output": "z"})
    with pytest.raises(DuplicateIdError):
        parse_netlist(json.dumps(document))


def test_arity_violation_is_rejected():
    document = json.loads(_doc())
    document["gates"][0]["kind"] = "NOR"
    with pytest.raises(ArityError):
        parse_netlist(json.dumps(document))


def test_unknown_keys_are_rejected():
    with pytest.raises(SchemaError):
        parse_netlist(_doc(comment="not allowed"))
    document = json.loads(_doc())
    document["nets"][0]["length_um"] = 3
    with pytest.raises(SchemaError):
        parse_netlist(json.dumps(document))


def test_unknown_gate_kind_is_a_schema_error():
    document = json.loads(_doc())
    document["gates"][0]["kind"] = "XOR"
    with pytest.raises(SchemaError):
        parse_netlist(json.dumps(document))


def test_combinational_loop_fails_parsing():
    document = {
        "gates": [{"id": "g", "kind": "AND", "inputs": ["x", "y"], "output": "y"}],
        "nets": [{"id": "x", "c_load_fF": 1}, {"id": "y", "c_load_fF": 1}],
    }
    with pytest.raises(StructuralError):
        parse_netlist(json.dumps(document))


@pytest.mark.parametrize("factory", [builtin_dims_xor, builtin_unbalanced_xor, builtin_add_round_key])
def test_builtins_validate_clean(factory):
    assert validate(factory()).ok


def test_multiple_drivers_are_reported():
    netlist = Netlist(
        gates=[
            Gate("g1", GateKind.INV, ("x",), "y"),
            Gate("g2", GateKind.BUF, ("x",), "y"),
        ],
        nets=[Net("x", 1.0), Net("y", 1.0)],
    )
    report = validate(netlist)
    assert "multiple-drivers" in report.codes()
    assert any(issue.subject == "y" for issue in report.issues)


def test_duplicate_rail_is_reported():
    netlist = Netlist(nets=[Net("r", 1.0)], channels=[Channel("ch", ("r", "r"))])
    assert "duplicate-rail" in validate(netlist).codes()


def test_single_rail_channel_is_reported():
    netlist = Netlist(nets=[Net("r", 1.0)], channels=[Channel("ch", ("r",))])
    assert "too-few-rails" in validate(netlist).codes()


def test_negative_and_zero_capacitance_are_reported():
    netlist = Netlist(
        gates=[Gate("g", GateKind.INV, ("x",), "y")],
        nets=[Net("x", -1.0), Net("y", 0.0)],
    )
    codes = validate(netlist).codes()
    assert "negative-capacitance" in codes
    assert "zero-capacitance" in codes


def test_reset_on_combinational_gate_is_reported():
    netlist = Netlist(gates=[Gate("g", GateKind.INV, ("x",), "y", has_reset=True)], nets=[Net("x", 1), Net("y", 1)])
    assert "reset-on-combinational" in validate(netlist).codes()


def test_muller_holding_its_own_output_is_not_a_cycle():
    netlist = Netlist(
        gates=[Gate("c", GateKind.MULLER, ("x", "z"), "z")],
        nets=[Net("x", 1.0), Net("z", 1.0)],
    )
    assert validate(netlist).ok


def test_dims_xor_default_capacitances():
    xor = builtin_dims_xor()
    assert {n.c_load_fF for n in xor.nets} == {8.0}
    assert {n.c_par_fF for n in xor.nets} == {1.0}
    assert {n.c_sc_fF for n in xor.nets} == {0.5}
    assert xor.inputs == ("a", "b")
    assert xor.outputs == ("c",)
    assert xor.channel("c").rails == ("c0", "c1")


def test_gate_kind_invariants():
    assert [k for k in GateKind if k.is_stateful] == [GateKind.MULLER]
    assert GateKind.INV.arity_ok(1) and not GateKind.INV.arity_ok(2)
    assert GateKind.BUF.arity_ok(1)
    assert GateKind.NOR.arity_ok(2) and not GateKind.NOR.arity_ok(1)


@pytest.mark.parametrize("factory", [builtin_dims_xor, builtin_unbalanced_xor, builtin_add_round_key])
def test_round_trip_of_builtins(factory):
    netlist = factory()
    assert parse_netlist(serialize_netlist(netlist)) == netlist


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_of_generated_netlists(seed):
    netlist, _, _, _ = random_ark(seed)
    netlist = perturb(netlist, {"rst": 3.0})
    again = parse_netlist(serialize_netlist(netlist))
    assert again == netlist
    assert serialize_netlist(again) == serialize_netlist(netlist)


def test_pin_capacitance_is_written_only_when_set():
    netlist = builtin_dims_xor()
    document = NetlistGenerator.to_dict(netlist)
    assert all("c_pin_fF" not in net for net in document["nets"])
    with_pins = netlist.with_nets({"m1": Net("m1", 8.0, 1.0, 0.5, c_pin_fF=2.0)})
    document = NetlistGenerator.to_dict(with_pins)
    assert [n["c_pin_fF"] for n in document["nets"] if "c_pin_fF" in n] == [2.0]
    assert parse_netlist(serialize_netlist(with_pins)).net("m1").c_pin_fF == 2.0


def test_single_driver_by_construction_on_builtins():
    for netlist in (builtin_dims_xor(), builtin_add_round_key()):
        outputs = [g.output for g in netlist.gates]
        assert len(outputs) == len(set(outputs))


def test_position_map_covers_the_xor():
    xor = builtin_dims_xor()
    assert set(XOR_POSITIONS.values()) <= set(xor.net_map)
    assert len(set(XOR_POSITIONS.values())) == len(XOR_POSITIONS)
    assert XOR_POSITIONS[(3, 1)] == "c0" and XOR_POSITIONS[(3, 2)] == "c1"
    caps = xor_capacitances(xor)
    assert caps[(2, 1)] == pytest.approx(9.5)


def test_perturb_by_position_and_by_net():
    xor = builtin_dims_xor()
    scaled = perturb(xor, {"c_l31": "2x"})
    assert scaled.net("c0").c_load_fF == pytest.approx(16.0)
    assert scaled.net("c0").total_fF == pytest.approx(17.5)
    assert scaled.net("c1").c_load_fF == pytest.approx(8.0)
    # each rail has its own level-3 driver, so C_l31 = 2 * C_l32
    assert scaled.net("c0").c_load_fF == 2 * scaled.net("c1").c_load_fF
    absolute = perturb(xor, {"c0": "16fF"})
    assert absolute.net("c0").c_load_fF == pytest.approx(16.0)
    by_tuple = perturb(xor, {(1, 1): 4.0})
    assert by_tuple.net("m1").c_load_fF == pytest.approx(32.0)
    # the source netlist is untouched
    assert xor.net("c0").c_load_fF == 8.0


def test_perturb_sweep_from_8_to_32_fF():
    xor = builtin_dims_xor()
    loads = [perturb(xor, {"c_l21": f"{c}fF"}).net("o0").c_load_fF for c in (8, 16, 24, 32)]
    assert loads == [8.0, 16.0, 24.0, 32.0]


def test_parse_perturbation_and_unknown_targets():
    target, change = parse_perturbation("c_l31=2x")
    assert target == "c_l31" and change.scale == 2.0
    target, change = parse_perturbation("c0=16fF")
    assert target == "c0" and change.absolute_fF == 16.0
    with pytest.raises(NetlistReferenceError):
        perturb(builtin_dims_xor(), {"nope": 2.0})
    with pytest.raises(ValueError):
        parse_perturbation("c0")


def test_add_round_key_layout():
    ark = builtin_add_round_key()
    assert len(ark.gates) == 72
    assert ark.inputs[:2] == ("pt0", "pt1")
    assert ark.outputs == tuple(f"ct{i}" for i in range(8))
    assert ark.channel("pt3").ack == "s3_ack"
    assert ark.reset_net == "rst"
    assert np.all([n.total_fF == pytest.approx(9.5) for n in ark.nets])
