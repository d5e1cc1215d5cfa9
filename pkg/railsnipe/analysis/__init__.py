from .graph import (
    BalanceReport, CircuitGraph, SwitchingProfile, analyze_netlist, build_graph, levelize,
    reset_state, switching_profile, verify_balance,
)
