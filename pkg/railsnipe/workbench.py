import logging
import os
from dataclasses import replace
from typing import List, Optional, Tuple

from .arguments import setup_parser
from .analysis.graph import analyze_netlist, verify_balance, DEFAULT_ENUMERATION_CAP
from .core.config import (
    ExperimentConfig, PlacementParams, PlotSpec, experiment_config_from_dict, load_experiment_config,
)
from .core.errors import DomainError, DpaError, RailsnipeError
from .core.types import Netlist, TraceMatrix, Waveform
from .dpa.attack import SCHEMA_VERSION, attack, xor_output_bias
from .dpa.selection import SelectionFunction
from .formats.dot import DotGenerator
from .formats.netlist import NetlistParser, read_netlist
from .formats.report import DissymmetryTableGenerator
from .formats.traces import SignalCsvGenerator, TraceCsvGenerator, TraceCsvParser
from .netlist.annotate import parse_perturbation, perturb, xor_capacitances
from .netlist.builtin import BUILTINS
from .netlist.validator import validate
from .plot.svg import render_plot
from .pnr.dissymmetry import report as dissymmetry_report
from .pnr.placement import area_proxy, assign_capacitances, compare_flows
from .power.current import dynamic_power_estimate
from .power.signature import analytic_xor_signature, signature_summary
from .sim.traces import TargetDesign, add_round_key_target, collect_traces, plaintext_source, xor_target
from .utils.io import load_json, read_text_file, save_json, save_text_file
from .utils.logger import level_for, setup_logger

logger = logging.getLogger(__name__)


class UsageError(Exception):
    """The command line is inconsistent in a way argparse cannot catch."""


def load_config(args) -> ExperimentConfig:
    """Built-in defaults < --params file < explicit CLI flags."""
    config = load_experiment_config(args.params) if args.params else experiment_config_from_dict({})
    if args.seed is not None:
        config.seed = args.seed
    if args.out is not None:
        config.out = args.out
    if getattr(args, "netlist", None):
        config.netlist = args.netlist
    if getattr(args, "builtin", None):
        config.builtin = args.builtin
    return config


def resolve_design(args, config: ExperimentConfig) -> Tuple[Netlist, str]:
    if config.netlist and config.builtin:
        if getattr(args, "netlist", None) and getattr(args, "builtin", None):
            raise UsageError("Give either a netlist file or --builtin, not both.")
        # a CLI choice wins over the other source coming from the config file
        if getattr(args, "builtin", None):
            config.netlist = None
        else:
            config.builtin = None
    if config.builtin:
        netlist, name = BUILTINS[config.builtin](), config.builtin
    elif config.netlist:
        netlist, name = read_netlist(config.netlist), config.netlist
    else:
        raise UsageError("No design given: pass a netlist file or --builtin.")

    changes = dict(parse_perturbation(text) for text in getattr(args, "perturb", []))
    if changes:
        logger.info(f"Applying {len(changes)} perturbation(s): {', '.join(getattr(args, 'perturb'))}")
        netlist = perturb(netlist, changes)
    return netlist, name


def out_path(config: ExperimentConfig, name: str) -> str:
    return os.path.join(config.out, name)


def cmd_check(args, config: ExperimentConfig) -> int:
    logger.info(f"--- Checking {args.netlist} ---")
    netlist = NetlistParser.parse(read_text_file(args.netlist), check=False)
    result = validate(netlist)
    for issue in result.issues:
        logger.info(str(issue))
    if result.ok:
        logger.info(f"Netlist is valid: {len(netlist.gates)} gates, {len(netlist.nets)} nets, "
                    f"{len(netlist.channels)} channels.")
        return 0
    logger.error(f"Netlist has {len(result.issues)} issue(s).")
    return 1


def cmd_analyze(args, config: ExperimentConfig) -> int:
    netlist, name = resolve_design(args, config)
    logger.info(f"--- Analyzing {name} ---")
    circuit = analyze_netlist(netlist)
    balance = verify_balance(circuit, args.enum_cap or config.sim.enumeration_cap or DEFAULT_ENUMERATION_CAP)
    reference = balance.reference
    power = dynamic_power_estimate(netlist, reference, args.frequency, config.electrical) if reference else None
    document = {
        "schema_version": SCHEMA_VERSION,
        "design": name,
        "n_c": circuit.n_c,
        "n_i": balance.n_i,
        "n_ij": {str(lvl): reference.n_ij(lvl) for lvl in sorted(reference.levels)} if reference else {},
        "balanced": balance.balanced,
        "balance": balance.to_dict(),
        "frequency_hz": args.frequency,
        "dynamic_power_W": power,
        "graph": circuit.to_dict(),
    }
    logger.info(f"N_c = {circuit.n_c}, N_i = {balance.n_i}, balanced = {balance.balanced}")
    save_json(document, out_path(config, "analysis.json"))
    if args.dot:
        save_text_file(DotGenerator.generate(circuit), out_path(config, "graph.dot"))
    return 0


def _target_for(args, netlist: Netlist, name: str) -> TargetDesign:
    def channels(text: Optional[str]) -> List[str]:
        return [c.strip() for c in text.split(",") if c.strip()] if text else []

    if args.plaintext_channels:
        return TargetDesign(netlist, channels(args.plaintext_channels), channels(args.key_channels))
    if name in ("xor", "unbalanced"):
        return xor_target(netlist)
    if name == "ark":
        return add_round_key_target(netlist)
    return TargetDesign(netlist, list(netlist.inputs), channels(args.key_channels))


def cmd_simulate(args, config: ExperimentConfig) -> int:
    netlist, name = resolve_design(args, config)
    attack_spec = config.attack
    if args.plaintexts:
        attack_spec = replace(attack_spec, plaintexts=args.plaintexts)
    if args.key is not None:
        attack_spec = replace(attack_spec, key=args.key)
    sim = config.sim
    if args.ack_delay is not None:
        sim = replace(sim, ack_delay_ps=args.ack_delay)
    if args.data_hold is not None:
        sim = replace(sim, data_hold_ps=args.data_hold)

    target = _target_for(args, netlist, name)
    randomized = args.noise > 0 or attack_spec.plaintexts.startswith("random")
    seed = config.require_seed() if randomized else config.seed
    plaintexts = plaintext_source(attack_spec.plaintexts, target.plaintext_bits, seed)

    matrix = collect_traces(
        target, plaintexts, attack_spec.key, config.electrical, args.noise, seed, sim, workers=args.workers
    )
    save_text_file(TraceCsvGenerator.generate(matrix), out_path(config, "traces.csv"))
    save_text_file(TraceCsvGenerator.sidecar(matrix, {"design": name}), out_path(config, "traces.json"))

    for index in args.dump_run:
        if not 0 <= index < matrix.n_runs:
            raise DomainError(f"--dump-run {index} is outside 0..{matrix.n_runs - 1}.")
        waveform = Waveform(matrix.traces[index], matrix.sample_period_ps)
        save_text_file(SignalCsvGenerator.generate(waveform), out_path(config, f"run{index}_waveform.csv"))

    if target.plaintext_channels == ("a", "b") and {p & 3 for p in matrix.plaintexts} == {0, 1, 2, 3}:
        _write_xor_signatures(matrix, netlist, name, config, sim)
    return 0


def _write_xor_signatures(matrix: TraceMatrix, netlist: Netlist, name: str, config: ExperimentConfig, sim):
    period = matrix.sample_period_ps
    boundary = int(round(matrix.metadata["rtz_start_ps"] / period))
    simulated = Waveform(xor_output_bias(matrix), period)
    save_text_file(SignalCsvGenerator.generate(simulated, "bias_uA"), out_path(config, "xor_bias.csv"))
    document = {
        "schema_version": SCHEMA_VERSION,
        "design": name,
        "rtz_start_ps": matrix.metadata["rtz_start_ps"],
        "simulated": signature_summary(simulated.samples, boundary, period),
    }
    if name == "xor":
        analytic = analytic_xor_signature(xor_capacitances(netlist), config.electrical, sim, n_samples=matrix.n_samples)
        save_text_file(SignalCsvGenerator.generate(analytic, "bias_uA"), out_path(config, "analytic_bias.csv"))
        document["analytic"] = signature_summary(analytic.samples, boundary, period)
    counts = document["simulated"]["lobes_per_phase"]
    logger.info(f"XOR bias: peak {document['simulated']['peak_uA']:.6g} µA, "
                f"{counts['evaluation']} + {counts['return_to_zero']} lobe(s) in evaluation + return-to-zero")
    save_json(document, out_path(config, "signature.json"))


def cmd_attack(args, config: ExperimentConfig) -> int:
    spec = config.attack
    if args.algorithm:
        spec = replace(spec, algorithm=args.algorithm, bit=args.bit if args.bit is not None else 0)
    elif args.bit is not None:
        spec = replace(spec, bit=args.bit)

    sidecar_path = os.path.splitext(args.traces)[0] + ".json"
    sidecar = load_json(sidecar_path) if os.path.isfile(sidecar_path) else None
    matrix = TraceCsvParser.parse(read_text_file(args.traces), sidecar)

    selection = SelectionFunction(spec.algorithm, spec.bit)
    result = attack(matrix, selection, workers=args.workers)
    key = matrix.key if matrix.key is not None and matrix.key in selection.guesses else None
    if key is not None:
        logger.info(f"Embedded key 0x{key:02X} ranks {result.rank_of(key)}; {result.tied} guess(es) share rank 1")
    save_json(result.to_dict(key), out_path(config, "dpa.json"))

    for guess in args.bias_dump:
        if guess not in selection.guesses:
            raise DpaError(f"Guess {guess:#x} is outside the {selection.guess_bits}-bit guess space.")
        signal = result.result(guess).bias
        if signal is None:
            raise DpaError(f"Guess {guess:#04x} left one set empty; it has no bias signal.")
        save_text_file(
            SignalCsvGenerator.generate(Waveform(signal, matrix.sample_period_ps), "bias_uA"),
            out_path(config, f"bias_0x{guess:02X}.csv"),
        )
    return 0


def cmd_dissym(args, config: ExperimentConfig) -> int:
    netlist, name = resolve_design(args, config)
    logger.info(f"--- Dissymmetry of {name} ---")
    issues = validate(netlist)
    if not issues.ok:
        for issue in issues.issues:
            logger.error(str(issue))
        return 1

    placement = None
    if args.placement != "none":
        placement = PlacementParams(
            mode=args.placement,
            base_fF=config.placement.base_fF,
            dispersion=args.dispersion,
            seed=config.require_seed(),
        )
        netlist = assign_capacitances(netlist, placement)

    result = dissymmetry_report(netlist)
    document = result.to_dict()
    document["design"] = name
    if placement is not None:
        document["placement"] = {
            "mode": placement.mode,
            "dispersion": placement.dispersion,
            "seed": placement.seed,
            "area_proxy": area_proxy(netlist, placement),
        }
    table = DissymmetryTableGenerator.generate(result, args.top)
    logger.info(table)
    save_json(document, out_path(config, "dissymmetry.json"))
    save_text_file(table, out_path(config, "dissymmetry.txt"))
    return 0


def cmd_pnr_compare(args, config: ExperimentConfig) -> int:
    netlist, name = resolve_design(args, config)
    seed = config.require_seed()
    base = config.placement.base_fF
    flat = PlacementParams("flat", base, args.flat_dispersion, seed=seed)
    hier = PlacementParams("hierarchical", base, args.hier_dispersion, seed=seed)
    result = compare_flows(netlist, flat, hier, args.n_seeds, workers=args.workers)
    document = result.to_dict()
    document["design"] = name
    save_json(document, out_path(config, "pnr_compare.json"))
    return 0


def cmd_plot(args, config: ExperimentConfig) -> int:
    render_plot(PlotSpec(args.kind, list(args.inputs), args.output), reproducible=args.reproducible)
    return 0


COMMANDS = {
    "check": cmd_check,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "attack": cmd_attack,
    "dissym": cmd_dissym,
    "pnr-compare": cmd_pnr_compare,
    "plot": cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point. Returns 0 on success, 1 on domain or validation failure, 2 on usage or I/O failure."""
    parser = setup_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    setup_logger(level_for(args.debug))
    try:
        config = load_config(args)
        return COMMANDS[args.command](args, config)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return 2
    except RailsnipeError as e:
        logger.error(f"Error: {e}", exc_info=args.debug)
        return 1
    except OSError as e:
        logger.error(f"I/O error: {e}", exc_info=args.debug)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
