import numpy as np
import pytest

from railsnipe.core.config import ElectricalParams, PlacementParams
from railsnipe.netlist.builtin import builtin_add_round_key, builtin_dims_xor, builtin_unbalanced_xor
from railsnipe.pnr.placement import assign_capacitances

# Default builtin net: 8 + 1 + 0.5 fF
NET_FF = 9.5
PULSE_WIDTH_PS = 5.0 + 2.0 * NET_FF
PULSE_CHARGE_FC = NET_FF * 1.2
PULSE_PEAK_UA = 2.0 * PULSE_CHARGE_FC / PULSE_WIDTH_PS * 1000.0

KEY = 0x3C


@pytest.fixture
def params():
    return ElectricalParams()


@pytest.fixture
def xor():
    return builtin_dims_xor()


@pytest.fixture
def unbalanced():
    return builtin_unbalanced_xor()


@pytest.fixture(scope="session")
def ark():
    return builtin_add_round_key()


def random_ark(seed: int):
    """An AddRoundKey block of 1-4 slices with randomly dispersed capacitances."""
    rng = np.random.default_rng(seed)
    slices = int(rng.integers(1, 5))
    netlist = builtin_add_round_key(slices)
    placed = assign_capacitances(netlist, PlacementParams("flat", seed=int(rng.integers(0, 2 ** 31))))
    plaintext = int(rng.integers(0, 2 ** slices))
    key = int(rng.integers(0, 2 ** slices))
    return placed, slices, plaintext, key
