from dataclasses import dataclass

import numpy as np

from ..core.errors import DpaError

# DES S-box S1, rows 0..3 x columns 0..15
DES_S1 = (
    (14, 4, 13, 1, 2, 15, 11, 8, 3, 10, 6, 12, 5, 9, 0, 7),
    (0, 15, 7, 4, 14, 2, 13, 1, 10, 6, 12, 11, 9, 5, 3, 8),
    (4, 1, 14, 8, 13, 6, 2, 11, 15, 12, 9, 7, 3, 10, 5, 0),
    (15, 12, 8, 2, 4, 9, 1, 7, 5, 11, 3, 14, 10, 0, 6, 13),
)


def sbox1(x: int) -> int:
    """S1 lookup of a 6-bit input: row from the outer bits, column from the inner four."""
    row = ((x >> 4) & 0b10) | (x & 1)
    col = (x >> 1) & 0xF
    return DES_S1[row][col]


def d_aes(pti: int, key_guess: int, bit: int) -> int:
    """Bit ``bit`` (0 = LSB) of pti XOR key_guess."""
    if not 0 <= bit <= 7:
        raise DpaError(f"AES-XOR target bit must be in 0..7, got {bit}")
    return ((pti ^ key_guess) >> bit) & 1


def d_des(p6: int, k0: int, bit: int) -> int:
    """Bit ``bit`` of SBOX1(p6 XOR k0); bit 0 is the most significant of the four output bits."""
    if not (0 <= p6 < 64 and 0 <= k0 < 64):
        raise DpaError(f"DES SBOX1 inputs must be 6-bit values, got p6={p6}, k0={k0}")
    if not 0 <= bit <= 3:
        raise DpaError(f"DES SBOX1 target bit must be in 0..3, got {bit}")
    return (sbox1(p6 ^ k0) >> (3 - bit)) & 1


@dataclass(frozen=True)
class SelectionFunction:
    algorithm: str  # "aes-xor" | "des-sbox1"
    bit: int

    def __post_init__(self):
        if self.algorithm not in ("aes-xor", "des-sbox1"):
            raise DpaError(f"Unknown selection algorithm '{self.algorithm}'")
        top = 7 if self.algorithm == "aes-xor" else 3
        if not 0 <= self.bit <= top:
            raise DpaError(f"Target bit for {self.algorithm} must be in 0..{top}, got {self.bit}")

    @property
    def guess_bits(self) -> int:
        return 8 if self.algorithm == "aes-xor" else 6

    @property
    def guesses(self) -> range:
        return range(2 ** self.guess_bits)

    def __call__(self, pti: int, guess: int) -> int:
        if self.algorithm == "aes-xor":
            return d_aes(pti & 0xFF, guess, self.bit)
        # DES attacks the six low plaintext bits
        return d_des(pti & 0x3F, guess, self.bit)

    def d_bits(self, plaintexts, guess: int) -> np.ndarray:
        return np.array([self(int(p), guess) for p in plaintexts], dtype=np.int8)

    def describe(self) -> dict:
        return {"algorithm": self.algorithm, "bit": self.bit, "guess_bits": self.guess_bits}
