import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ..core.config import ElectricalParams, SimConfig
from ..core.errors import DomainError
from ..core.types import CurrentPulse, Polarity, Waveform
from .current import block_current, gate_pulse

logger = logging.getLogger(__name__)

Position = Tuple[int, int]

# Gate positions switched by each input of the exhaustive XOR experiment, split by
# output value: set 0 holds the (0,0) and (1,1) inputs, set 1 the (0,1) and (1,0) inputs.
SET0_CHAINS: Tuple[Tuple[Position, ...], ...] = (
    ((1, 1), (2, 1), (3, 1), (4, 1)),
    ((1, 2), (2, 1), (3, 1), (4, 1)),
)
SET1_CHAINS: Tuple[Tuple[Position, ...], ...] = (
    ((1, 3), (2, 2), (3, 2), (4, 1)),
    ((1, 4), (2, 2), (3, 2), (4, 1)),
)
REQUIRED_POSITIONS = sorted({pos for chain in SET0_CHAINS + SET1_CHAINS for pos in chain})


def rtz_start(chain: Sequence[Position], caps: Mapping[Position, float], params: ElectricalParams,
              sim: SimConfig) -> float:
    """When the environment returns the inputs of ``chain`` to zero."""
    completion = sum(params.propagation_ps(caps[pos]) for pos in chain)
    return max(completion + sim.ack_delay_ps, sim.data_hold_ps)


def chain_pulses(
    chain: Sequence[Position],
    caps: Mapping[Position, float],
    params: ElectricalParams,
    sim: SimConfig,
) -> List[CurrentPulse]:
    """
    Pulses of one full handshake along ``chain``: the evaluation wave, then the
    return-to-zero wave. Each gate fires when its predecessor's output crosses
    the switching point, so pulses of consecutive gates overlap.
    """
    pulses = []
    for start, polarity in ((0.0, Polarity.CHARGE), (rtz_start(chain, caps, params, sim), Polarity.DISCHARGE)):
        t = start
        for pos in chain:
            pulses.append(gate_pulse(caps[pos], t, polarity, params))
            t += params.propagation_ps(caps[pos])
    return pulses


def analytic_xor_signature(
    caps: Mapping[Position, float],
    params: Optional[ElectricalParams] = None,
    sim: Optional[SimConfig] = None,
    n_samples: Optional[int] = None,
) -> Waveform:
    """
    Closed-form DPA bias of the DIMS XOR for the exhaustive 4-input experiment.

    ``caps`` maps gate positions (level, index) to total capacitance in fF. Each
    set average is the mean of its chains' pulse trains; the result is set 0 minus set 1.
    """
    params = params or ElectricalParams()
    sim = sim or SimConfig()
    missing = [pos for pos in REQUIRED_POSITIONS if pos not in caps]
    if missing:
        raise DomainError(f"Missing capacitance for gate position(s): {', '.join(f'l{i}{j}' for i, j in missing)}")

    trains = {
        chains: [chain_pulses(chain, caps, params, sim) for chain in chains]
        for chains in (SET0_CHAINS, SET1_CHAINS)
    }
    if n_samples is None:
        end = max(p.t_end_ps for pulses in trains.values() for train in pulses for p in train)
        n_samples = max(1, int(np.ceil(end / params.sample_period_ps - 1e-9)))

    averages = []
    for chains in (SET0_CHAINS, SET1_CHAINS):
        waves = [block_current(train, sample_period_ps=params.sample_period_ps, n_samples=n_samples).samples
                 for train in trains[chains]]
        averages.append(np.mean(waves, axis=0))

    return Waveform(samples=averages[0] - averages[1], sample_period_ps=params.sample_period_ps)


@dataclass(frozen=True)
class Lobe:
    start: int
    stop: int  # exclusive
    sign: int
    peak: float
    charge_fC: float


def find_lobes(signal: np.ndarray, fraction: float = 0.5, sample_period_ps: float = 1.0) -> List[Lobe]:
    """
    Contiguous regions where |signal| exceeds ``fraction`` of its global maximum,
    in time order. A region's sign is that of its largest-magnitude sample.
    """
    magnitude = np.abs(np.asarray(signal, dtype=float))
    top = magnitude.max(initial=0.0)
    if top <= 0:
        return []
    labels, count = ndimage.label(magnitude > fraction * top)
    lobes = []
    for region in ndimage.find_objects(labels):
        s = region[0]
        segment = np.asarray(signal[s], dtype=float)
        k = int(np.argmax(np.abs(segment)))
        lobes.append(Lobe(
            start=s.start,
            stop=s.stop,
            sign=int(np.sign(segment[k])),
            peak=float(abs(segment[k])),
            charge_fC=float(np.sum(np.abs(segment)) * sample_period_ps / 1000.0),
        ))
    logger.debug(f"Found {count} lobe(s) above {fraction:.0%} of {top:.6g}")
    return lobes


def lobes_per_window(lobes: Sequence[Lobe], boundary: int) -> Dict[str, int]:
    """Counts lobes starting before and after a sample index (typically the return-to-zero start)."""
    return {
        "evaluation": sum(1 for lobe in lobes if lobe.start < boundary),
        "return_to_zero": sum(1 for lobe in lobes if lobe.start >= boundary),
    }


def integrated_magnitude(signal: np.ndarray, sample_period_ps: float = 1.0) -> float:
    """Integral of |signal| in fC."""
    return float(np.sum(np.abs(signal)) * sample_period_ps / 1000.0)


def signature_summary(signal: np.ndarray, boundary: int, sample_period_ps: float = 1.0,
                      fraction: float = 0.5) -> dict:
    """Lobes, their split around ``boundary`` and the integrated magnitude of one bias signal."""
    lobes = find_lobes(signal, fraction, sample_period_ps)
    return {
        "peak_uA": float(np.max(np.abs(signal), initial=0.0)),
        "integrated_fC": integrated_magnitude(signal, sample_period_ps),
        "lobes_per_phase": lobes_per_window(lobes, boundary),
        "lobes": [
            {
                "start_ps": lobe.start * sample_period_ps,
                "stop_ps": lobe.stop * sample_period_ps,
                "sign": lobe.sign,
                "peak_uA": lobe.peak,
                "charge_fC": lobe.charge_fC,
            }
            for lobe in lobes
        ],
    }
