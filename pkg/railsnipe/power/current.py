import logging
import math
from typing import Iterable, Optional

import numpy as np

from ..core.config import ElectricalParams
from ..core.errors import DomainError
from ..core.types import CurrentPulse, Net, Netlist, Polarity, Waveform

logger = logging.getLogger(__name__)

FF_TO_F = 1e-15


def total_capacitance(net: Net) -> float:
    """C = C_l + C_par + C_sc, in fF."""
    return net.total_fF


def gate_pulse(
    c_total: float,
    t_start: float,
    polarity: Polarity = Polarity.CHARGE,
    params: Optional[ElectricalParams] = None,
) -> CurrentPulse:
    """
    Triangular pulse of one output transition: width tau0 + k*C, area C*Vdd.
    """
    params = params or ElectricalParams()
    if not math.isfinite(c_total) or c_total <= 0:
        raise DomainError(f"A switching net needs a positive capacitance, got {c_total} fF.")
    return CurrentPulse(
        t_start_ps=t_start,
        width_ps=params.delay_ps(c_total),
        charge_fC=c_total * params.vdd,
        polarity=polarity,
    )


def pulse_current(pulse: CurrentPulse, t_ps) -> np.ndarray:
    """Instantaneous current (µA) of the analytic triangle."""
    t = np.asarray(t_ps, dtype=float)
    half = pulse.width_ps / 2.0
    rising = (t - pulse.t_start_ps) / half
    falling = (pulse.t_end_ps - t) / half
    shape = np.clip(np.minimum(rising, falling), 0.0, None)
    return pulse.peak_uA * shape


def _grid_length(pulses, sample_period_ps: float, t0_ps: float) -> int:
    end = max((p.t_end_ps for p in pulses), default=t0_ps)
    return max(1, int(math.ceil((end - t0_ps) / sample_period_ps - 1e-9)))


def sample_pulse(pulse: CurrentPulse, samples: np.ndarray, sample_period_ps: float, t0_ps: float = 0.0):
    """Adds the bin averages of ``pulse`` to ``samples`` in place."""
    n = len(samples)
    first = max(0, int(math.floor((pulse.t_start_ps - t0_ps) / sample_period_ps)))
    last = min(n, int(math.ceil((pulse.t_end_ps - t0_ps) / sample_period_ps)))
    if last <= first:
        return
    edges = t0_ps + sample_period_ps * np.arange(first, last + 1)
    charge = np.diff(pulse.charge_until(edges))
    samples[first:last] += charge / sample_period_ps * 1000.0


def block_current(
    pulses: Iterable[CurrentPulse],
    noise_sigma: float = 0.0,
    seed: Optional[int] = None,
    sample_period_ps: float = 1.0,
    t0_ps: float = 0.0,
    n_samples: Optional[int] = None,
) -> Waveform:
    """
    Superposes pulses on a uniform grid and adds zero-mean Gaussian noise of
    ``noise_sigma`` µA per sample. Each sample is the mean current over its bin,
    so sum(samples) * dt is the delivered charge.
    """
    pulses = sorted(pulses, key=lambda p: p.t_start_ps)
    if noise_sigma < 0:
        raise DomainError(f"noise_sigma must be >= 0, got {noise_sigma}")
    if n_samples is None:
        n_samples = _grid_length(pulses, sample_period_ps, t0_ps)

    samples = np.zeros(n_samples)
    for pulse in pulses:
        sample_pulse(pulse, samples, sample_period_ps, t0_ps)

    if noise_sigma > 0:
        if seed is None:
            raise DomainError("A seed is required when noise_sigma > 0.")
        samples += np.random.default_rng(seed).normal(0.0, noise_sigma, n_samples)

    return Waveform(samples=samples, sample_period_ps=sample_period_ps, t0_ps=t0_ps)


def gate_dynamic_power(c_total_fF: float, f_hz: float, params: Optional[ElectricalParams] = None) -> float:
    """P = eta * f * C * Vdd^2 for one gate, in watts."""
    params = params or ElectricalParams()
    return params.eta * f_hz * c_total_fF * FF_TO_F * params.vdd ** 2


def dynamic_power_estimate(netlist: Netlist, profile, f_a: float, params: Optional[ElectricalParams] = None) -> float:
    """
    Block dynamic power eta * f_a * Vdd^2 * sum(C_i) over the gates switching in
    ``profile``, in watts.
    """
    params = params or ElectricalParams()
    gates = netlist.gate_map
    c_sum = sum(netlist.net(gates[g].output).total_fF for g in profile.switching_gates())
    power = params.eta * f_a * c_sum * FF_TO_F * params.vdd ** 2
    logger.debug(f"Dynamic power: {profile.n_i} transitions, {c_sum:g} fF at {f_a:g} Hz -> {power:.6g} W")
    return power
