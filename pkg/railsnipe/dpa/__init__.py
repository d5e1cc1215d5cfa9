from .selection import DES_S1, SelectionFunction, d_aes, d_des, sbox1
from .attack import DpaResult, GuessResult, TraceSet, attack, average, bias, partition
