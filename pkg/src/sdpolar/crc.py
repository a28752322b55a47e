"""Bit-serial CRC over 0/1 sequences.

The default profile is CRC-32C (Castagnoli): generator 0x1EDC6F41, reflected
input and output, register initialised and finally xored with all ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class CrcConfig:
    width: int = 32
    polynomial: int = 0x1EDC6F41
    init: int = 0xFFFFFFFF
    xorout: int = 0xFFFFFFFF
    reflect_in: bool = True
    reflect_out: bool = True

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("CRC width must be positive")
        top = 1 << self.width
        for name in ("polynomial", "init", "xorout"):
            if not 0 <= getattr(self, name) < top:
                raise ValueError(f"{name} does not fit in {self.width} bits")
        # normal form omits the x^width term, so degree == width always holds
        if self.polynomial & 1 == 0:
            raise ValueError("generator polynomial must have a constant term")


CRC32C = CrcConfig()


def _reflect(value: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def bytes_to_bits(data: bytes, cfg: CrcConfig = CRC32C) -> np.ndarray:
    """Serialise bytes in the order the CRC consumes them (LSB first if reflected)."""
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8),
                         bitorder="little" if cfg.reflect_in else "big")
    return bits


def crc_register(bits, cfg: CrcConfig = CRC32C) -> int:
    """Return the final CRC value of a bit stream as an integer."""
    w = cfg.width
    mask = (1 << w) - 1
    if cfg.reflect_in:
        poly = _reflect(cfg.polynomial, w)
        reg = _reflect(cfg.init, w)
        for b in np.asarray(bits, dtype=np.uint8).tolist():
            reg ^= b
            reg = (reg >> 1) ^ poly if reg & 1 else reg >> 1
        if not cfg.reflect_out:
            reg = _reflect(reg, w)
    else:
        poly = cfg.polynomial
        reg = cfg.init
        top = 1 << (w - 1)
        for b in np.asarray(bits, dtype=np.uint8).tolist():
            reg ^= b << (w - 1)
            reg = ((reg << 1) ^ poly) & mask if reg & top else (reg << 1) & mask
        if cfg.reflect_out:
            reg = _reflect(reg, w)
    return reg ^ cfg.xorout


def crc_bytes(data: bytes, cfg: CrcConfig = CRC32C) -> int:
    return crc_register(bytes_to_bits(data, cfg), cfg)


def crc_bits(bits, cfg: CrcConfig = CRC32C) -> np.ndarray:
    """CRC remainder as ``cfg.width`` bits, least significant bit first."""
    value = crc_register(bits, cfg)
    return np.array([(value >> k) & 1 for k in range(cfg.width)], dtype=np.uint8)


def append_crc(payload, cfg: CrcConfig = CRC32C) -> np.ndarray:
    payload = np.asarray(payload, dtype=np.uint8)
    return np.concatenate([payload, crc_bits(payload, cfg)])


def check_crc(block, cfg: CrcConfig = CRC32C) -> bool:
    block = np.asarray(block, dtype=np.uint8)
    if block.size < cfg.width:
        raise ValueError("block shorter than the CRC")
    split = block.size - cfg.width
    return bool(np.array_equal(crc_bits(block[:split], cfg), block[split:]))


@lru_cache(maxsize=64)
def crc_affine(length: int, cfg: CrcConfig = CRC32C) -> tuple[np.ndarray, np.ndarray]:
    """(A, c) with crc_bits(x) == (x @ A + c) % 2 for any length-``length`` bit vector.

    The CRC of a fixed-length message is affine over GF(2); this form checks
    whole batches of candidate paths at once.
    """
    c = crc_bits(np.zeros(length, dtype=np.uint8), cfg)
    A = np.zeros((length, cfg.width), dtype=np.uint8)
    for i in range(length):
        e = np.zeros(length, dtype=np.uint8)
        e[i] = 1
        A[i] = crc_bits(e, cfg) ^ c
    A.setflags(write=False)
    c.setflags(write=False)
    return A, c


def check_crc_batch(blocks, cfg: CrcConfig = CRC32C) -> np.ndarray:
    """Vectorised :func:`check_crc` over the leading axes of ``blocks``."""
    blocks = np.asarray(blocks, dtype=np.uint8)
    split = blocks.shape[-1] - cfg.width
    A, c = crc_affine(split, cfg)
    expect = (blocks[..., :split].astype(np.int64) @ A + c) % 2
    return np.all(expect == blocks[..., split:], axis=-1)
