from argparse import ArgumentParser


def _int_auto(text: str) -> int:
    """Integers in any base Python understands: 60, 0x3C, 0b111100."""
    return int(text, 0)


def _common_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    group = common.add_argument_group("Common Options")
    group.add_argument('--seed', type=_int_auto, default=None,
                       help="Seed for every random draw. Required by commands that use randomness.")
    group.add_argument('--out', type=str, default=None,
                       help="Output directory for reports and traces (default: 'out', or the config file's value).")
    group.add_argument('--params', type=str, default=None,
                       help="JSON experiment config. CLI flags override its values.")
    group.add_argument('--reproducible', action='store_true',
                       help="Strip dates and fix hash salts so SVG output is byte-identical across runs.")
    group.add_argument('--debug', action='store_true',
                       help="Enable verbose debug logging and tracebacks.")
    return common


def _add_design_source(parser: ArgumentParser, perturb: bool = True):
    group = parser.add_argument_group("Design Options")
    group.add_argument('netlist', nargs='?', default=None, help="Path to a netlist JSON file.")
    group.add_argument('--builtin', choices=['xor', 'unbalanced', 'ark'], default=None,
                       help="Use a built-in design instead of a netlist file.")
    if perturb:
        group.add_argument('--perturb', action='append', default=[], metavar='TARGET=VALUE',
                           help="Change one net load: a net id or XOR position (e.g. c_l31) set to a "
                                "scale ('2x') or an absolute load ('16fF'). Repeatable.")


def setup_parser() -> ArgumentParser:
    """Configures and returns the argument parser for the command-line interface."""
    parser = ArgumentParser(
        prog="railsnipe",
        description="Simulate dual-rail QDI circuits, attack their power traces with DPA "
                    "and measure rail capacitance dissymmetry.",
    )
    common = _common_parser()
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    check = commands.add_parser('check', parents=[common], help="Parse and validate a netlist file.")
    check.add_argument('netlist', help="Path to a netlist JSON file.")

    analyze = commands.add_parser('analyze', parents=[common], help="Graph metrics and data-path balance.")
    _add_design_source(analyze)
    analyze.add_argument('--dot', action='store_true', help="Also write the annotated graph as DOT.")
    analyze.add_argument('--enum-cap', type=int, default=None,
                         help="Maximum number of input combinations to enumerate (default: 65536).")
    analyze.add_argument('--frequency', type=float, default=1.0e8,
                         help="Handshake rate in Hz for the dynamic power estimate (default: 1e8).")

    simulate = commands.add_parser('simulate', parents=[common], help="Collect current traces.")
    _add_design_source(simulate)
    sim_group = simulate.add_argument_group("Simulation Options")
    sim_group.add_argument('--plaintext-channels', type=str, default=None,
                           help="Comma-separated input channels carrying plaintext bits, LSB first.")
    sim_group.add_argument('--key-channels', type=str, default=None,
                           help="Comma-separated input channels carrying key bits, LSB first.")
    sim_group.add_argument('--key', type=_int_auto, default=None, help="Key folded into the key channels.")
    sim_group.add_argument('--plaintexts', type=str, default=None,
                           help="Plaintext source: exhaustive, random:N or file:<path> (default: exhaustive).")
    sim_group.add_argument('--noise', type=float, default=0.0, help="Gaussian noise sigma per sample in µA.")
    sim_group.add_argument('--ack-delay', type=float, default=None,
                           help="Environment response time to the acknowledge in ps (default: 10).")
    sim_group.add_argument('--data-hold', type=float, default=None,
                           help="Minimum time in ps the inputs stay valid before returning to zero (default: 100).")
    sim_group.add_argument('--workers', type=int, default=1, help="Runs simulated concurrently.")
    sim_group.add_argument('--dump-run', type=int, action='append', default=[], metavar='INDEX',
                           help="Also write the waveform of run INDEX as t_ps,i_uA CSV. Repeatable.")

    attack = commands.add_parser('attack', parents=[common], help="DPA over a trace CSV.")
    attack_group = attack.add_argument_group("Attack Options")
    attack_group.add_argument('--traces', required=True, help="Trace CSV written by 'simulate'.")
    attack_group.add_argument('--algorithm', choices=['aes-xor', 'des-sbox1'], default=None,
                              help="Selection function (default: aes-xor).")
    attack_group.add_argument('--bit', type=int, default=None, help="Target bit of the selection function.")
    attack_group.add_argument('--bias-dump', type=_int_auto, action='append', default=[], metavar='GUESS',
                              help="Write the bias signal of GUESS as CSV. Repeatable.")
    attack_group.add_argument('--workers', type=int, default=1, help="Key guesses evaluated concurrently.")

    dissym = commands.add_parser('dissym', parents=[common], help="Per-channel d_A report.")
    _add_design_source(dissym)
    dissym.add_argument('--placement', choices=['none', 'flat', 'hierarchical'], default='none',
                        help="Redraw capacitances with a placement flow first (needs --seed).")
    dissym.add_argument('--dispersion', type=float, default=None, help="Override the flow's dispersion.")
    dissym.add_argument('--top', type=int, default=0, help="Rows in the text table (default: all).")

    compare = commands.add_parser('pnr-compare', parents=[common], help="Flat vs hierarchical placement.")
    _add_design_source(compare, perturb=False)
    compare.add_argument('--n-seeds', type=int, default=100, help="Monte-Carlo seeds per flow.")
    compare.add_argument('--flat-dispersion', type=float, default=None)
    compare.add_argument('--hier-dispersion', type=float, default=None)
    compare.add_argument('--workers', type=int, default=1)

    plot = commands.add_parser('plot', parents=[common], help="Render a CSV or report as SVG.")
    plot.add_argument('--kind', required=True, choices=['waveform', 'bias-overlay', 'dA-histogram', 'peak-vs-guess'])
    plot.add_argument('--input', action='append', required=True, dest='inputs', help="Input file. Repeatable.")
    plot.add_argument('--output', required=True, help="SVG file to write.")

    return parser
