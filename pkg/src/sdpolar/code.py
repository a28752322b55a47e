"""Polar code construction, encoding and information-bit placement.

Indices exposed to users (frozen sets, files) are 1-based, as in the usual
description of polar codes; arrays are 0-based internally.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import crc as _crc
from .crc import CrcConfig


def bitrev_indices(n: int) -> np.ndarray:
    """Bit-reversal permutation of ``range(2**n)``."""
    idx = np.arange(1 << n)
    out = np.zeros_like(idx)
    for k in range(n):
        out |= ((idx >> k) & 1) << (n - 1 - k)
    return out


def log2_exact(N: int) -> int:
    if N < 1 or N & (N - 1):
        raise ValueError(f"{N} is not a power of two")
    return N.bit_length() - 1


@dataclass(frozen=True)
class CodeSpec:
    """Static description of an (N, K) polar code, optionally CRC-concatenated.

    ``frozen_set`` holds 1-based indices. ``K`` counts every unfrozen
    position, CRC bits included; the payload is ``K - crc.width`` bits.
    """

    n: int
    K: int
    frozen_set: tuple[int, ...]
    crc: CrcConfig | None = None
    construction: tuple[str, float] = ("bec-bhattacharyya", 0.5)
    frozen_mask: np.ndarray = field(init=False, repr=False, compare=False)
    info_positions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        N = 1 << self.n
        fs = tuple(sorted(int(i) for i in self.frozen_set))
        if len(set(fs)) != len(fs) or (fs and (fs[0] < 1 or fs[-1] > N)):
            raise ValueError("frozen indices must be distinct and in 1..N")
        if len(fs) != N - self.K:
            raise ValueError(f"|frozen_set| = {len(fs)} but N - K = {N - self.K}")
        if self.crc is not None and self.K - self.crc.width < 1:
            raise ValueError("CRC leaves no payload bits")
        object.__setattr__(self, "frozen_set", fs)
        mask = np.zeros(N, dtype=bool)
        mask[np.asarray(fs, dtype=int) - 1] = True
        mask.setflags(write=False)
        info = np.flatnonzero(~mask)
        info.setflags(write=False)
        object.__setattr__(self, "frozen_mask", mask)
        object.__setattr__(self, "info_positions", info)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def payload_len(self) -> int:
        return self.K - (self.crc.width if self.crc else 0)

    def with_crc(self, cfg: CrcConfig | None = _crc.CRC32C) -> "CodeSpec":
        return CodeSpec(self.n, self.K, self.frozen_set, cfg, self.construction)

    def fingerprint(self) -> str:
        return hashlib.sha256(dump_frozen(self).encode()).hexdigest()[:16]


def bhattacharyya(n: int, design_param: float) -> np.ndarray:
    """Bhattacharyya parameters of the 2**n bit-channels of a BEC(design_param)."""
    z = np.array([float(design_param)])
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def construct(n: int, K: int, design_param: float = 0.5,
              crc: CrcConfig | None = None) -> CodeSpec:
    """Freeze the N - K least reliable bit-channels of a BEC design channel.

    Ties in the Bhattacharyya parameter freeze the lower index first, which
    keeps the frozen sets nested in K.
    """
    if not 2 <= n <= 20:
        raise ValueError("n must be in 2..20")
    N = 1 << n
    if not 0 <= K <= N:
        raise ValueError(f"K must be in 0..{N}")
    if not 0.0 < design_param < 1.0:
        raise ValueError("design parameter must be an erasure probability in (0, 1)")
    z = bhattacharyya(n, design_param)
    order = np.lexsort((np.arange(N), -z))  # worst first
    frozen = tuple(sorted(int(i) + 1 for i in order[: N - K]))
    return CodeSpec(n, K, frozen, crc, ("bec-bhattacharyya", float(design_param)))


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """Multiply by F^{(x)n} along the last axis, GF(2)."""
    x = np.array(bits, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    half = 1
    while half < N:
        v = x.reshape(*x.shape[:-1], N // (2 * half), 2, half)
        v[..., 0, :] ^= v[..., 1, :]
        half *= 2
    return x


def encode(spec: CodeSpec, u) -> np.ndarray:
    """x = u B_N F^{(x)n}; accepts a single block or a batch (..., N)."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != spec.N:
        raise ValueError(f"expected length {spec.N}, got {u.shape[-1]}")
    # B_N commutes with F^{(x)n}, so permute after the butterfly
    return polar_transform(u)[..., bitrev_indices(spec.n)]


def place_info(spec: CodeSpec, info) -> np.ndarray:
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != spec.K:
        raise ValueError(f"expected {spec.K} information bits, got {info.shape[-1]}")
    u = np.zeros(info.shape[:-1] + (spec.N,), dtype=np.uint8)
    u[..., spec.info_positions] = info
    return u


def extract_info(spec: CodeSpec, u) -> np.ndarray:
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != spec.N:
        raise ValueError(f"expected length {spec.N}, got {u.shape[-1]}")
    return u[..., spec.info_positions]


def attach_crc(spec: CodeSpec, payload) -> np.ndarray:
    if spec.crc is None:
        raise NotImplementedError("code has no CRC configuration")
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.shape[-1] != spec.payload_len:
        raise ValueError(f"payload must be {spec.payload_len} bits")
    if payload.ndim == 1:
        return _crc.append_crc(payload, spec.crc)
    A, c = _crc.crc_affine(spec.payload_len, spec.crc)
    parity = ((payload.astype(np.int64) @ A + c) % 2).astype(np.uint8)
    return np.concatenate([payload, parity], axis=-1)


def check_crc(spec: CodeSpec, info_with_crc) -> bool:
    if spec.crc is None:
        raise NotImplementedError("code has no CRC configuration")
    block = np.asarray(info_with_crc, dtype=np.uint8)
    if block.shape != (spec.K,):
        raise ValueError(f"expected {spec.K} bits")
    return _crc.check_crc(block, spec.crc)


def generator_matrix(n: int) -> np.ndarray:
    """G_N = B_N F^{(x)n} as a dense 0/1 matrix (small n only)."""
    F = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    G = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        G = np.kron(G, F)
    return G[bitrev_indices(n)] % 2


# -- frozen-set file format ------------------------------------------------

def dump_frozen(spec: CodeSpec) -> str:
    lines = [f"{spec.N} {spec.K}"]
    if spec.frozen_set:
        lines.append(" ".join(str(i) for i in spec.frozen_set))
    return "\n".join(lines) + "\n"


def load_frozen(text: str, crc: CrcConfig | None = None) -> CodeSpec:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("frozen-set file must start with 'N K'")
    N, K = int(tokens[0]), int(tokens[1])
    idx = [int(t) for t in tokens[2:]]
    if idx != sorted(idx):
        raise ValueError("frozen indices must be ascending")
    return CodeSpec(log2_exact(N), K, tuple(idx), crc, ("file", 0.0))


def write_frozen(spec: CodeSpec, path) -> None:
    Path(path).write_text(dump_frozen(spec))


def read_frozen(path, crc: CrcConfig | None = None) -> CodeSpec:
    return load_frozen(Path(path).read_text(), crc)
