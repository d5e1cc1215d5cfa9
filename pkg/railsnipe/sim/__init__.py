from .simulator import CycleResult, QdiSimulator, run_cycle
from .traces import (
    TargetDesign, add_round_key_target, add_trace_noise, collect_traces, plaintext_source, xor_target,
)
