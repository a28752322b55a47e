"""Per-path message memory for successive-cancellation style decoders.

Messages are kept in the butterfly ("tree") layout: the channel pairs are
loaded in bit-reversed order, after which stage ``d`` of a path holds the
``N >> d`` LL pairs of the sub-code currently being decoded at that depth.
Stage 0 is the channel; stage ``leaf_depth`` delivers the M = 2**(n - depth)
pairs of one symbol. The arrays carry a leading batch axis so many received
words can be decoded in lock-step, and a path axis for list decoding.
"""

from __future__ import annotations

import numpy as np

from .code import bitrev_indices, log2_exact, polar_transform
from .kernels import APPROX, f_transform, g_transform


def _ctz(j: int) -> int:
    return (j & -j).bit_length() - 1


class MessageMemory:
    """Stage messages and partial sums for a batch of decoding lists.

    Parameters
    ----------
    llr : ndarray, shape (B, N, 2)
        Channel LL pairs in natural order.
    leaf_depth : int
        Depth of the nodes that are decided jointly (``n - log2 M``).
    n_paths : int
        Number of path slots (list size).
    mode : {"approx", "exact"}
        Kernel used for the odd-index transformation.
    """

    def __init__(self, llr, leaf_depth: int, n_paths: int = 1, mode: str = APPROX):
        llr = np.asarray(llr, dtype=float)
        if llr.ndim != 3 or llr.shape[-1] != 2:
            raise ValueError("llr must have shape (B, N, 2)")
        self.B, self.N = llr.shape[:2]
        self.n = log2_exact(self.N)
        if not 0 <= leaf_depth <= self.n:
            raise ValueError("leaf depth out of range")
        self.t = leaf_depth
        self.mode = mode
        self.n_paths = n_paths
        self.live = 1
        self.alpha: list = [None] * (self.t + 1)
        self.alpha[0] = llr[:, None, bitrev_indices(self.n), :]
        self.left: list = [None] * (self.t + 1)
        for d in range(1, self.t + 1):
            size = self.N >> d
            self.alpha[d] = np.zeros((self.B, n_paths, size, 2))
            self.left[d] = np.zeros((self.B, n_paths, size), dtype=np.uint8)
        self.next_symbol = 0

    @property
    def M(self) -> int:
        return 1 << (self.n - self.t)

    # -- stage evaluation ---------------------------------------------------
    def _stage(self, d: int, right: bool) -> None:
        a_live = self.live
        parent = self.alpha[d - 1]
        if parent.shape[1] > 1:
            parent = parent[:, :a_live]
        s = self.N >> d
        a, b = parent[:, :, :s], parent[:, :, s:]
        if right:
            out = g_transform(a, b, self.left[d][:, :a_live])
        else:
            out = f_transform(a, b, self.mode)
        self.alpha[d][:, :a_live] = out

    def messages(self, j: int) -> np.ndarray:
        """Compute and return the leaf pairs of symbol ``j`` for live paths, (B, live, M, 2)."""
        if j != self.next_symbol:
            raise RuntimeError(f"symbol {j} requested but {self.next_symbol} is next")
        if self.t > 0:
            start = 1 if j == 0 else self.t - _ctz(j)
            for d in range(start, self.t + 1):
                self._stage(d, right=(d == start and j != 0))
        leaf = self.alpha[self.t]
        if leaf.shape[1] == 1 and self.live > 1:
            leaf = np.broadcast_to(leaf, (self.B, self.live) + leaf.shape[2:])
        return leaf[:, : self.live]

    # -- path management ----------------------------------------------------
    def select(self, parents) -> None:
        """Copy-on-prune: new path k continues old path ``parents[..., k]``.

        ``parents`` has shape (B, k) or (k,) when shared by the batch.
        """
        parents = np.asarray(parents, dtype=np.intp)
        if parents.ndim == 1:
            parents = np.broadcast_to(parents, (self.B, parents.size))
        k = parents.shape[1]
        if k > self.n_paths:
            raise ValueError("more paths than slots")
        for d in range(1, self.t + 1):
            al = self.alpha[d][:, : self.live]
            self.alpha[d][:, :k] = np.take_along_axis(al, parents[:, :, None, None], axis=1)
            lf = self.left[d][:, : self.live]
            self.left[d][:, :k] = np.take_along_axis(lf, parents[:, :, None], axis=1)
        self.live = k

    def commit(self, j: int, bits) -> None:
        """Record the decided bits (B, live, M) of symbol ``j`` into the partial sums."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape[-1] != self.M:
            raise ValueError("symbol width mismatch")
        code = polar_transform(bits)
        code = np.broadcast_to(code, (self.B, self.live, self.M))
        d, idx = self.t, j
        while d > 0 and idx & 1:
            code = np.concatenate([self.left[d][:, : self.live] ^ code, code], axis=-1)
            d -= 1
            idx >>= 1
        if d > 0:
            self.left[d][:, : self.live] = code
        self.next_symbol = j + 1


class PcmsMemory(MessageMemory):
    """Message memory with pre-computed stage-1 outputs and no channel stage.

    Every stage-1 node can only output one of a few values: two for an
    odd-index (f) node, four for an even-index (g) node indexed by its partial
    sum. Those are computed once from the channel, after which the channel
    messages are discarded and stage 1 becomes a table lookup per path.
    """

    def __init__(self, llr, leaf_depth: int, n_paths: int = 1, mode: str = APPROX):
        super().__init__(llr, leaf_depth, n_paths, mode)
        if self.t == 0:
            return
        ch = self.alpha[0]
        h = self.N // 2
        a, b = ch[:, :, :h], ch[:, :, h:]
        self.pre_f = f_transform(a, b, mode)                          # (B, 1, N/2, 2)
        self.pre_g = np.stack([g_transform(a, b, 0), g_transform(a, b, 1)], axis=-2)
        self.alpha[0] = None

    def _stage(self, d: int, right: bool) -> None:
        if d != 1:
            return super()._stage(d, right)
        a_live = self.live
        if right:
            psum = self.left[1][:, :a_live]
            table = self.pre_g  # (B, 1, N/2, psum, 2)
            out = np.where(psum[..., None].astype(bool), table[..., 1, :], table[..., 0, :])
        else:
            out = self.pre_f
        self.alpha[1][:, :a_live] = out

    def stored_values(self) -> int:
        """Pre-computed stage-1 values: 2 per f node plus 4 per g node."""
        return 2 * (self.N // 2) + 4 * (self.N // 2)


def as_batch(llr, N: int):
    """Normalise decoder input to (B, N, 2); also report whether it was a single word."""
    arr = np.asarray(llr, dtype=float)
    single = arr.ndim == 2
    if single:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (N, 2):
        raise ValueError(f"expected LL pairs of shape (N, 2) or (B, N, 2) with N = {N}")
    return arr, single


def make_memory(llr, leaf_depth: int, n_paths: int = 1, mode: str = APPROX,
                pcms: bool = False) -> MessageMemory:
    cls = PcmsMemory if pcms else MessageMemory
    return cls(llr, leaf_depth, n_paths, mode)
