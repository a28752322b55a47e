"""Symbol-wise channel transition probabilities and symbol-decision SC.

A symbol distribution of width Phi is an array of 2**Phi LLs indexed by the
Phi-bit value (u_1 ... u_Phi), with u_1 as the most significant bit.

Two independent ways of producing the distribution of symbol j are kept:

* the recursive combination, which pairs two width-Phi/2 distributions with
  a single addition per output entry (used by the decoders), and
* the direct mapping, which maps each candidate symbol through G_M and sums
  M bit-channel LLs evaluated on contiguous blocks of the channel output.
  It is computed by its own natural-order recursion and only serves as a
  cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .code import CodeSpec, bitrev_indices, generator_matrix, log2_exact
from .kernels import APPROX, f_transform, g_transform
from .memory import as_batch, make_memory


class AdditionCounter:
    """Tallies LL additions spent on symbol distributions (per path)."""

    def __init__(self):
        self.total = 0
        self.per_symbol: list[int] = []

    def add(self, k: int) -> None:
        self.total += k

    def close_symbol(self, start: int) -> None:
        self.per_symbol.append(self.total - start)


@dataclass(frozen=True)
class SymbolDist:
    ll: np.ndarray

    @property
    def width(self) -> int:
        return log2_exact(self.ll.shape[-1])

    def argmax(self) -> int:
        """Best symbol value; ties go to the larger value."""
        return symbol_argmax(self.ll)


@dataclass(frozen=True)
class SymbolPlan:
    """Stage layout of the message-flow graph for M-bit symbol decisions."""

    n: int
    m: int

    @property
    def btrans_stages(self) -> tuple[int, ...]:
        return tuple(range(1, self.n - self.m + 1))

    @property
    def scombs_stages(self) -> tuple[int, ...]:
        return tuple(range(self.n - self.m + 1, self.n + 1))

    def scombs_nodes(self, i: int) -> tuple[int, int]:
        """(nodes, messages per node) of the i-th S-COMBS stage counted from the output side."""
        if not 1 <= i <= self.m:
            raise ValueError("S-COMBS stage index out of range")
        M = 1 << self.m
        return 1 << (i - 1), 1 << (M >> (i - 1))


@lru_cache(maxsize=None)
def combine_maps(phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Index maps for one combination step producing width ``phi``.

    For output value u = (u_1 .. u_phi), entry ``ia[u]`` of the first input
    is the value of (u_odd ^ u_even) and ``ib[u]`` of the second is u_even.
    """
    if phi < 2 or phi % 2:
        raise ValueError("combined width must be even")
    half = phi // 2
    u = np.arange(1 << phi)
    bits = (u[:, None] >> (phi - 1 - np.arange(phi))) & 1     # MSB first
    odd, even = bits[:, 0::2], bits[:, 1::2]
    weights = 1 << (half - 1 - np.arange(half))
    ia = ((odd ^ even) * weights).sum(axis=1)
    ib = (even * weights).sum(axis=1)
    ia.setflags(write=False)
    ib.setflags(write=False)
    return ia, ib


def combine(a, b) -> np.ndarray:
    """Width-Phi distribution from two independent width-Phi/2 copies.

    out(u) = a(u_odd ^ u_even) + b(u_even), one addition per entry.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("inputs must have the same width")
    half = log2_exact(a.shape[-1])
    ia, ib = combine_maps(2 * half)
    return a[..., ia] + b[..., ib]


def symbol_scores(leaves, candidates=None, counter: AdditionCounter | None = None) -> np.ndarray:
    """Symbol LLs from the M bit-channel pairs of a leaf node.

    ``leaves`` has shape (..., M, 2) in the butterfly layout produced by
    :class:`~sdpolar.memory.MessageMemory`. ``candidates`` optionally limits
    the final combination step to the listed symbol values; intermediate
    steps are always complete.
    """
    leaves = np.asarray(leaves, dtype=float)
    M = leaves.shape[-2]
    m = log2_exact(M)
    if m == 0:
        out = leaves[..., 0, :]
        return out if candidates is None else out[..., np.asarray(candidates)]
    # block k of the natural-order channel sits at butterfly position bitrev(k)
    dist = leaves[..., bitrev_indices(m), :]
    for step in range(1, m + 1):
        ia, ib = combine_maps(1 << step)
        if step == m and candidates is not None:
            cand = np.asarray(candidates)
            ia, ib = ia[cand], ib[cand]
        dist = dist[..., 0::2, :][..., ia] + dist[..., 1::2, :][..., ib]
        if counter is not None:
            counter.add(dist.shape[-2] * dist.shape[-1])
    return dist[..., 0, :]


def symbol_argmax(scores) -> np.ndarray:
    """Argmax over the last axis with ties resolved toward the larger index."""
    scores = np.asarray(scores)
    last = scores.shape[-1] - 1
    return last - np.argmax(scores[..., ::-1], axis=-1)


def block_masks(spec: CodeSpec, M: int):
    """Per-symbol bit mask of frozen positions (MSB = first bit of the symbol)."""
    frozen = spec.frozen_mask.reshape(-1, M)
    weights = 1 << (M - 1 - np.arange(M))
    return (frozen * weights).sum(axis=1).astype(np.int64)


def info_candidates(frozen_bits: int, M: int) -> np.ndarray:
    """Symbol values allowed by a frozen mask, in dec2bin order of the free bits."""
    free = [p for p in range(M) if not (frozen_bits >> (M - 1 - p)) & 1]
    k = np.arange(1 << len(free))
    vals = np.zeros_like(k)
    for r, p in enumerate(free):
        vals |= ((k >> (len(free) - 1 - r)) & 1) << (M - 1 - p)
    return vals


def value_bits(values, M: int) -> np.ndarray:
    values = np.asarray(values)
    return ((values[..., None] >> (M - 1 - np.arange(M))) & 1).astype(np.uint8)


def _mask_invalid(scores, frozen_bits: int) -> np.ndarray:
    valid = (np.arange(scores.shape[-1]) & frozen_bits) == 0
    return np.where(valid, scores, -np.inf)


# -- distribution of one symbol given a decided prefix -------------------------

def _check_prefix(spec: CodeSpec, prefix, j: int, M: int) -> np.ndarray:
    if spec.N % M:
        raise ValueError("M must divide N")
    prefix = np.asarray(prefix, dtype=np.uint8)
    if prefix.shape != (j * M,):
        raise ValueError(f"symbol {j} needs a decided prefix of {j * M} bits")
    return prefix


def symbol_dist(spec: CodeSpec, llr_in, prefix, j: int, M: int, mode: str = APPROX,
                masked: bool = False, pcms: bool = False,
                counter: AdditionCounter | None = None) -> SymbolDist:
    """Distribution of symbol ``j`` (0-based) by B-TRANS stages plus recursive combination."""
    prefix = _check_prefix(spec, prefix, j, M)
    llr, single = as_batch(llr_in, spec.N)
    if not single:
        raise ValueError("symbol_dist takes a single received word")
    mem = make_memory(llr, spec.n - log2_exact(M), 1, mode, pcms)
    for i in range(j):
        mem.messages(i)
        mem.commit(i, prefix[i * M:(i + 1) * M][None, None])
    scores = symbol_scores(mem.messages(j)[0, 0], counter=counter)
    if masked:
        scores = _mask_invalid(scores, int(block_masks(spec, M)[j]))
    return SymbolDist(scores)


def bit_channel_ll(ch, prefix, i: int, mode: str = APPROX) -> np.ndarray:
    """LL pair of bit-channel i (1-based) of length len(ch), natural order.

    Direct transcription of the odd/even recursion: the first half of the
    channel sees u_odd ^ u_even, the second half sees u_even.
    """
    ch = np.asarray(ch, dtype=float)
    prefix = np.asarray(prefix, dtype=np.uint8)
    size = ch.shape[0]
    if size == 1:
        return ch[0]
    h = size // 2
    k = (i + 1) // 2
    pre = prefix[: 2 * k - 2]
    top = bit_channel_ll(ch[:h], pre[0::2] ^ pre[1::2], k, mode)
    bot = bit_channel_ll(ch[h:], pre[1::2], k, mode)
    if i % 2:
        return f_transform(top, bot, mode)
    return g_transform(top, bot, prefix[i - 2])


def direct_mapping_dist(spec: CodeSpec, llr_in, prefix, j: int, M: int, mode: str = APPROX,
                        masked: bool = False,
                        counter: AdditionCounter | None = None) -> SymbolDist:
    """Distribution of symbol ``j`` by mapping every candidate through G_M.

    The decided prefix is mapped to the M sub-streams w, each sub-stream's
    bit-channel LL is evaluated on its own block of N/M channel outputs, and
    each candidate costs M - 1 additions.
    """
    prefix = _check_prefix(spec, prefix, j, M)
    llr = np.asarray(llr_in, dtype=float)
    if llr.shape != (spec.N, 2):
        raise ValueError("direct mapping takes a single received word")
    m = log2_exact(M)
    G = generator_matrix(m).astype(np.int64)
    w_prefix = (prefix.reshape(j, M).astype(np.int64) @ G) % 2       # (j, M)
    block = spec.N // M
    sub = np.array([bit_channel_ll(llr[k * block:(k + 1) * block], w_prefix[:, k], j + 1, mode)
                    for k in range(M)])                                # (M, 2)
    values = np.arange(1 << M)
    w = (value_bits(values, M).astype(np.int64) @ G) % 2                # (2^M, M)
    picked = sub[np.arange(M), w]                                      # (2^M, M)
    scores = picked[:, 0].copy()
    for k in range(1, M):
        scores += picked[:, k]
    if counter is not None:
        counter.add((1 << M) * (M - 1))
    if masked:
        scores = _mask_invalid(scores, int(block_masks(spec, M)[j]))
    return SymbolDist(scores)


# -- decoder ---------------------------------------------------------------------

def sdsc_decode(spec: CodeSpec, llr_in, M: int, mode: str = APPROX, pcms: bool = False,
                counter: AdditionCounter | None = None) -> np.ndarray:
    """M-bit symbol-decision SC.

    Each symbol maximises its distribution over all 2**M values with frozen
    positions forced to zero (masked to -inf). All-frozen symbols are set to
    zero without evaluating the combination stages.
    """
    if M < 1 or M & (M - 1):
        raise ValueError("M must be a power of two")
    if spec.N % M:
        raise ValueError("M must divide N")
    llr, single = as_batch(llr_in, spec.N)
    m = log2_exact(M)
    mem = make_memory(llr, spec.n - m, 1, mode, pcms)
    masks = block_masks(spec, M)
    full = (1 << M) - 1
    B = llr.shape[0]
    u = np.zeros((B, spec.N), dtype=np.uint8)
    for j in range(spec.N // M):
        leaves = mem.messages(j)[:, 0]
        if masks[j] == full:
            bits = np.zeros((B, M), dtype=np.uint8)
        else:
            start = counter.total if counter is not None else 0
            scores = _mask_invalid(symbol_scores(leaves, counter=counter), int(masks[j]))
            if counter is not None:
                counter.close_symbol(start)
            bits = value_bits(symbol_argmax(scores), M)
        u[:, j * M:(j + 1) * M] = bits
        mem.commit(j, bits[:, None])
    return u[0] if single else u
