import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

from ..analysis.graph import CircuitGraph, analyze_netlist, reset_state
from ..core.config import ElectricalParams, SimConfig
from ..core.errors import DeadlockError, IllegalStateError, InputError
from ..core.theory import ChannelValue, channel_value, encode_one_hot, eval_gate
from ..core.types import (
    CurrentPulse, Direction, Netlist, Polarity, TransitionEvent, Waveform,
)
from ..power.current import block_current, gate_pulse

logger = logging.getLogger(__name__)

EVALUATION, RETURN_TO_ZERO = 1, 3


@dataclass
class CycleResult:
    """One four-phase handshake: the block current, the transition log and the phase boundary times."""
    waveform: Waveform
    events: List[TransitionEvent]
    phase_times: Dict[int, float]
    initial_state: Dict[str, int]
    final_state: Dict[str, int]
    pulses: List[CurrentPulse] = field(default_factory=list)

    @property
    def gate_events(self) -> List[TransitionEvent]:
        return [e for e in self.events if e.gate is not None]

    def events_in_phase(self, phase: int) -> List[TransitionEvent]:
        return [e for e in self.gate_events if e.phase == phase]


@dataclass(order=True)
class _Scheduled:
    time: float
    net: str
    seq: int
    value: int = field(compare=False)
    gate: Optional[str] = field(compare=False)
    phase: int = field(compare=False)


class QdiSimulator:
    """
    Event-driven four-phase simulator of one netlist. The environment drives the
    input channels and answers the block's completion after ``sim.ack_delay_ps``,
    but never returns its data to zero before ``sim.data_hold_ps``.

    A gate that fires at t draws its current pulse over [t, t + Delta t]; its
    fanout sees the new value at t + switch_point * Delta t.

    The instance holds no per-run state, so one simulator may serve many threads.
    """

    def __init__(
        self,
        netlist: Netlist,
        params: Optional[ElectricalParams] = None,
        sim: Optional[SimConfig] = None,
        circuit: Optional[CircuitGraph] = None,
    ):
        self.netlist = netlist
        self.params = params or ElectricalParams()
        self.sim = sim or SimConfig()
        self.circuit = circuit if circuit is not None and circuit.levelized else analyze_netlist(netlist)
        self.initial_state = reset_state(self.circuit)

        ack_nets = [c.ack for c in netlist.input_channels() if c.ack]
        self.ack_nets = tuple(dict.fromkeys(ack_nets))
        if self.ack_nets:
            self.completion = "ack"
        elif netlist.outputs:
            self.completion = "outputs"
        else:
            self.completion = "quiescence"

        # Net delays are fixed per netlist
        self._delay = {gate.id: self.params.propagation_ps(netlist.net(gate.output).total_fF) for gate in netlist.gates}
        self._levels = self.circuit.levels

    def _input_rails(self, input_data: Mapping[str, ChannelValue]) -> Dict[str, int]:
        unknown = sorted(set(input_data) - set(self.netlist.inputs))
        if unknown:
            raise InputError(f"Values given for channels that are not inputs: {', '.join(unknown)}")
        rails = {}
        for channel in self.netlist.input_channels():
            if channel.name not in input_data:
                raise InputError(f"No value given for input channel '{channel.name}'.")
            value = channel_value(channel, input_data[channel.name])
            if value is None:
                raise InputError(f"Input channel '{channel.name}' must carry valid data, not the invalid state.")
            rails.update(zip(channel.rails, encode_one_hot(value, channel.n)))
        return rails

    def _completed(self, state: Dict[str, int], queue_empty: bool, want_high: bool) -> bool:
        if self.completion == "ack":
            return all(state[a] == int(want_high) for a in self.ack_nets)
        if self.completion == "outputs":
            valid = [any(state[r] for r in c.rails) for c in self.netlist.output_channels()]
            return all(valid) if want_high else not any(valid)
        return queue_empty

    def _check_channels(self, state: Dict[str, int], time: float):
        for channel in self.netlist.channels:
            high = [r for r in channel.rails if state[r]]
            if len(high) > 1:
                raise IllegalStateError(
                    f"Channel '{channel.name}' has rails {', '.join(high)} high at {time:g} ps."
                )

    def run(self, input_data: Mapping[str, ChannelValue], noise_sigma: float = 0.0, seed: Optional[int] = None,
            n_samples: Optional[int] = None) -> CycleResult:
        """Simulates all four phases for one input assignment."""
        netlist = self.netlist
        gates = netlist.gate_map
        sinks = netlist.sinks_of
        rails = self._input_rails(input_data)

        state = dict(self.initial_state)
        queue: List[_Scheduled] = []
        seq = itertools.count()
        pending: Dict[str, int] = {}           # gate id -> seq of its scheduled output change
        pulses: Dict[int, CurrentPulse] = {}   # seq -> pulse, dropped when the change is cancelled
        events: List[TransitionEvent] = []

        def drive_inputs(time: float, valid: bool, phase: int):
            for rail, bit in rails.items():
                heapq.heappush(queue, _Scheduled(time, rail, next(seq), bit if valid else 0, None, phase))

        env_phase = EVALUATION
        phase_times = {1: 0.0}
        drive_inputs(0.0, True, EVALUATION)

        n_events = 0
        while queue:
            now = queue[0].time
            if now > self.sim.horizon_ps:
                raise DeadlockError(f"Event horizon of {self.sim.horizon_ps:g} ps exceeded.")

            touched = []
            while queue and queue[0].time == now:
                item = heapq.heappop(queue)
                if item.gate is not None:
                    if pending.get(item.gate) != item.seq:
                        continue
                    del pending[item.gate]
                if state[item.net] == item.value:
                    continue
                state[item.net] = item.value
                n_events += 1
                events.append(TransitionEvent(
                    time_ps=now,
                    net=item.net,
                    direction=Direction.RISE if item.value else Direction.FALL,
                    gate=item.gate,
                    level=self._levels[item.gate] if item.gate is not None else 0,
                    phase=item.phase,
                ))
                touched.append(item.net)
            if n_events > self.sim.max_events:
                raise DeadlockError(f"More than {self.sim.max_events} events: the block does not settle.")

            self._check_channels(state, now)

            for gate_id in dict.fromkeys(g for net_id in touched for g in sinks.get(net_id, [])):
                gate = gates[gate_id]
                new = eval_gate(gate.kind, [state[n] for n in gate.inputs], state[gate.output])
                if gate_id in pending:
                    token = pending[gate_id]
                    if new == state[gate.output]:
                        # inertial cancellation of a change that no longer holds
                        del pending[gate_id]
                        pulses.pop(token, None)
                        logger.debug(f"{now:g} ps: cancelled pending change of {gate.output}")
                    continue
                if new == state[gate.output]:
                    continue
                token = next(seq)
                pending[gate_id] = token
                delay = self._delay[gate_id]
                polarity = Polarity.CHARGE if new else Polarity.DISCHARGE
                pulses[token] = gate_pulse(netlist.net(gate.output).total_fF, now, polarity, self.params)
                wave = env_phase or RETURN_TO_ZERO
                heapq.heappush(queue, _Scheduled(now + delay, gate.output, token, new, gate_id, wave))

            if env_phase == EVALUATION and self._completed(state, not queue, True):
                phase_times[2] = now
                phase_times[3] = max(now + self.sim.ack_delay_ps, self.sim.data_hold_ps)
                env_phase = RETURN_TO_ZERO
                drive_inputs(phase_times[3], False, RETURN_TO_ZERO)
                logger.debug(f"Completion at {now:g} ps; inputs return to zero at {phase_times[3]:g} ps")
            elif env_phase == RETURN_TO_ZERO and now >= phase_times[3] and self._completed(state, not queue, False):
                phase_times[4] = now
                env_phase = 0

        if env_phase != 0:
            stuck = "evaluation" if env_phase == EVALUATION else "return-to-zero"
            raise DeadlockError(f"Event queue drained during the {stuck} wave: the handshake never completed.")

        ordered = [pulses[k] for k in sorted(pulses)]
        waveform = block_current(
            ordered,
            noise_sigma=noise_sigma,
            seed=seed,
            sample_period_ps=self.params.sample_period_ps,
            n_samples=n_samples,
        )
        logger.debug(f"Cycle done: {len(events)} events, {len(ordered)} pulses, completion at {phase_times.get(4):g} ps")
        return CycleResult(waveform, events, phase_times, dict(self.initial_state), state, ordered)


def run_cycle(
    netlist: Netlist,
    input_data: Mapping[str, ChannelValue],
    params: Optional[ElectricalParams] = None,
    noise_sigma: float = 0.0,
    seed: Optional[int] = None,
    sim: Optional[SimConfig] = None,
) -> CycleResult:
    return QdiSimulator(netlist, params, sim).run(input_data, noise_sigma, seed)
