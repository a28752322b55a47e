"""List decoding: bit-decision SCL, CRC-aided selection, symbol-decision SCL.

Candidate ranking uses one total order everywhere: larger score first, then
lower parent index, then larger candidate (symbol) value. With that order a
list of size one makes the same choice as the plain SC rules, ties included.

Path metrics are the LL of W(y, prefix | last decision) at the most recent
step that branched; steps that only append frozen bits leave them untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .code import CodeSpec, log2_exact
from .crc import check_crc_batch
from .kernels import APPROX
from .memory import as_batch, make_memory
from .symbol import AdditionCounter, block_masks, info_candidates, symbol_scores, value_bits

SORTERS = ("folded", "tree")


@dataclass(frozen=True)
class PruneConfig:
    """Two-stage pruning: keep ``q`` children per parent, then the global top L.

    ``q=None`` disables the first stage. Values of q at or above the number of
    children are equivalent to ``None``.
    """

    q: int | None = None
    sorter: str = "folded"

    def __post_init__(self):
        if self.q is not None and self.q < 1:
            raise ValueError("q must be at least 1")
        if self.sorter not in SORTERS:
            raise ValueError(f"sorter must be one of {SORTERS}")


@dataclass
class DecodeStats:
    path_counts: list[int] = field(default_factory=list)
    adds: AdditionCounter = field(default_factory=AdditionCounter)


# -- sorting networks ------------------------------------------------------------

def _rank(item) -> tuple:
    score, parent, value = item
    return (-score, parent, -value)


_PAD = (-math.inf, math.inf, -math.inf)


def _bitonic(items: list, ascending: bool = True) -> list:
    n = len(items)
    if n <= 1:
        return list(items)
    half = n // 2
    first = _bitonic(items[:half], True)
    second = _bitonic(items[half:], False)
    return _bitonic_merge(first + second, ascending)


def _bitonic_merge(items: list, ascending: bool) -> list:
    n = len(items)
    if n <= 1:
        return items
    half = n // 2
    items = list(items)
    for i in range(half):
        a, b = items[i], items[i + half]
        if (_rank(a) > _rank(b)) == ascending:
            items[i], items[i + half] = b, a
    return _bitonic_merge(items[:half], ascending) + _bitonic_merge(items[half:], ascending)


def bs_sort(items) -> list:
    """BS_L: the L best of exactly 2L ``(score, parent, value)`` items, best first."""
    items = list(items)
    n = len(items)
    if n < 2 or n & (n - 1):
        raise ValueError("BS_L takes 2L items with L a power of two")
    return _bitonic(items)[: n // 2]


def _unit(L: int) -> int:
    # a selector for a non power-of-two L uses the next larger BS unit
    return 1 << max(0, (L - 1).bit_length())


def _pad(items: list, size: int) -> list:
    return items + [_PAD] * (size - len(items))


def tree_select(items, L: int) -> list:
    """Top L of any number of items with a layered tree of BS_L units."""
    items = list(items)
    keep, L = L, _unit(L)
    width = 1 << max(1, math.ceil(math.log2(max(len(items), 2 * L) / L)))
    layer = [_pad(items[k:k + L], L) for k in range(0, width * L, L)]
    while len(layer) > 1:
        layer = [bs_sort(layer[i] + layer[i + 1]) for i in range(0, len(layer), 2)]
    return [it for it in layer[0] if it is not _PAD][:keep]


def folded_select(items, L: int) -> list:
    """Top L with a register-fed BS_L: each pass merges the running best with L new items."""
    items = list(items)
    keep, L = L, _unit(L)
    best = _pad(items[:L], L)
    for k in range(L, max(len(items), 2 * L), L):
        best = bs_sort(best + _pad(items[k:k + L], L))
    return [it for it in best if it is not _PAD][:keep]


def two_stage_prune(candidates, L: int, q: int | None = None, sorter: str = "folded") -> list:
    """Select L survivors from per-parent candidate scores.

    ``candidates[p][c]`` is the score of child c of parent p (``-inf`` for a
    masked child). Stage one keeps the q best children of each parent, stage
    two the L best of what remains. Returns ``(score, parent, child)`` tuples,
    best first.
    """
    if sorter not in SORTERS:
        raise ValueError(f"sorter must be one of {SORTERS}")
    select = tree_select if sorter == "tree" else folded_select
    pool = []
    for p, scores in enumerate(candidates):
        children = [(float(s), p, c) for c, s in enumerate(scores)]
        if q is not None and q < len(children):
            children = select(children, q)
        pool.extend(children)
    if not pool or all(it[0] == -math.inf for it in pool):
        raise RuntimeError("no live candidate to keep")
    return select(pool, L)


def select_top(scores, L: int, q: int | None = None):
    """Vectorised two-stage selection over a batch.

    ``scores`` has shape (B, parents, children). Returns (parents, children)
    index arrays of shape (B, k), best first, ranked like :func:`two_stage_prune`.
    """
    scores = np.asarray(scores, dtype=float)
    B, A, C = scores.shape
    if q is not None and q < C:
        rev = scores[..., ::-1]
        keep = np.argsort(-rev, axis=-1, kind="stable")[..., :q]
        child = np.sort(C - 1 - keep, axis=-1)[..., ::-1]
        sc = np.take_along_axis(scores, child, axis=-1)
    else:
        child = np.broadcast_to(np.arange(C)[::-1], (B, A, C))
        sc = scores[..., ::-1]
    k = child.shape[-1]
    flat = sc.reshape(B, A * k)
    order = np.argsort(-flat, axis=-1, kind="stable")[:, :L]
    parents = order // k
    children = np.take_along_axis(child.reshape(B, A * k), order, axis=-1)
    return parents, children


def _network_top(scores, L: int, q: int | None, sorter: str):
    B = scores.shape[0]
    parents, children = [], []
    for b in range(B):
        kept = two_stage_prune(scores[b], L, q, sorter)
        parents.append([p for _, p, _ in kept])
        children.append([c for _, _, c in kept])
    return np.array(parents), np.array(children)


# -- decoders --------------------------------------------------------------------

def _best_path(metric) -> np.ndarray:
    return np.argmax(metric, axis=-1)  # first maximum: lowest path index


def _finish(paths, metric, single):
    best = _best_path(metric)
    u = np.take_along_axis(paths, best[:, None, None], axis=1)[:, 0]
    return u[0] if single else u


def _finish_crc(spec: CodeSpec, paths, metric, single):
    valid = check_crc_batch(paths[..., spec.info_positions], spec.crc)
    ranked = np.where(valid, metric, -np.inf)
    any_valid = valid.any(axis=1)
    best = np.where(any_valid, _best_path(ranked), _best_path(metric))
    u = np.take_along_axis(paths, best[:, None, None], axis=1)[:, 0]
    if single:
        return u[0], bool(any_valid[0])
    return u, any_valid


def _list_size(L: int) -> None:
    if L < 1 or L & (L - 1):
        raise ValueError("list size must be a power of two")


def _scl_paths(spec, llr, L, mode, pcms):
    B = llr.shape[0]
    mem = make_memory(llr, spec.n, L, mode, pcms)
    paths = np.zeros((B, 1, spec.N), dtype=np.uint8)
    metric = np.zeros((B, 1))
    alpha = 1
    for j in range(spec.N):
        pair = mem.messages(j)[:, :, 0, :]                       # (B, alpha, 2)
        if spec.frozen_mask[j]:
            mem.commit(j, np.zeros((B, alpha, 1), dtype=np.uint8))
            continue
        if 2 * alpha <= L:
            parents = np.broadcast_to(np.tile(np.arange(alpha), 2), (B, 2 * alpha))
            bits = np.broadcast_to(np.repeat(np.arange(2), alpha), (B, 2 * alpha))
        else:
            parents, bits = select_top(pair, L)
        metric = np.take_along_axis(pair, parents[..., None], axis=1)
        metric = np.take_along_axis(metric, bits[..., None], axis=2)[..., 0]
        mem.select(parents)
        paths = np.take_along_axis(paths, parents[..., None], axis=1)
        paths[:, :, j] = bits
        alpha = parents.shape[1]
        mem.commit(j, paths[:, :, j:j + 1])
    return paths, metric


def scl_decode(spec: CodeSpec, llr_in, L: int, mode: str = APPROX, pcms: bool = False):
    """Bit-decision SCL: duplicate while the list has room, else keep the L best of 2L."""
    _list_size(L)
    llr, single = as_batch(llr_in, spec.N)
    paths, metric = _scl_paths(spec, llr, L, mode, pcms)
    return _finish(paths, metric, single)


def ca_scl_decode(spec: CodeSpec, llr_in, L: int, mode: str = APPROX, pcms: bool = False):
    """SCL with CRC-aided final choice; returns ``(u_hat, crc_pass)``.

    The most reliable CRC-valid path wins; if none is valid the plain SCL
    choice is returned with ``crc_pass`` False.
    """
    if spec.crc is None:
        raise NotImplementedError("code has no CRC configuration")
    _list_size(L)
    llr, single = as_batch(llr_in, spec.N)
    paths, metric = _scl_paths(spec, llr, L, mode, pcms)
    return _finish_crc(spec, paths, metric, single)


def _sdscl_paths(spec, llr, L, M, prune: PruneConfig, mode, pcms, network, stats):
    B = llr.shape[0]
    m = log2_exact(M)
    mem = make_memory(llr, spec.n - m, L, mode, pcms)
    masks = block_masks(spec, M)
    full = (1 << M) - 1
    paths = np.zeros((B, 1, spec.N), dtype=np.uint8)
    metric = np.zeros((B, 1))
    alpha = 1
    for j in range(spec.N // M):
        leaves = mem.messages(j)                                  # (B, alpha, M, 2)
        if masks[j] == full:
            mem.commit(j, np.zeros((B, alpha, M), dtype=np.uint8))
            if stats is not None:
                stats.path_counts.append(alpha)
                stats.adds.close_symbol(stats.adds.total)
            continue
        cands = info_candidates(int(masks[j]), M)
        beta = cands.size
        start = stats.adds.total if stats is not None else 0
        scores = symbol_scores(leaves, cands, stats.adds if stats is not None else None)
        if stats is not None:
            stats.adds.close_symbol(start)
        if alpha * beta <= L:
            parents = np.broadcast_to(np.tile(np.arange(alpha), beta), (B, alpha * beta))
            ks = np.broadcast_to(np.repeat(np.arange(beta), alpha), (B, alpha * beta))
        else:
            q = prune.q
            if q is not None:
                # early on alpha < L; stage one must still leave L candidates
                q = max(q, -(-L // alpha))
            if network:
                parents, ks = _network_top(scores, L, q, prune.sorter)
            else:
                parents, ks = select_top(scores, L, q)
        metric = np.take_along_axis(scores, parents[..., None], axis=1)
        metric = np.take_along_axis(metric, ks[..., None], axis=2)[..., 0]
        mem.select(parents)
        paths = np.take_along_axis(paths, parents[..., None], axis=1)
        bits = value_bits(cands[ks], M)
        paths[:, :, j * M:(j + 1) * M] = bits
        alpha = parents.shape[1]
        mem.commit(j, bits)
        if stats is not None:
            stats.path_counts.append(alpha)
    return paths, metric


def sdscl_decode(spec: CodeSpec, llr_in, L: int, M: int, prune: PruneConfig | None = None,
                 mode: str = APPROX, pcms: bool = False, crc_select: bool = False,
                 network: bool = False, stats: DecodeStats | None = None):
    """M-bit symbol-decision SCL.

    All-frozen symbols append zeros to every path. Otherwise each path expands
    into beta = 2**|free bits| children; while alpha * beta fits in the list
    all are kept, else the list is pruned with two-stage selection.

    ``network=True`` routes pruning through the BS_L sorting networks of
    :func:`two_stage_prune` instead of the vectorised selector (same result,
    much slower). ``crc_select`` enables the CRC-aided final choice and makes
    the return value ``(u_hat, crc_pass)``.
    """
    _list_size(L)
    if M < 1 or M & (M - 1) or spec.N % M:
        raise ValueError("M must be a power of two dividing N")
    prune = prune or PruneConfig()
    llr, single = as_batch(llr_in, spec.N)
    paths, metric = _sdscl_paths(spec, llr, L, M, prune, mode, pcms, network, stats)
    if crc_select:
        if spec.crc is None:
            raise NotImplementedError("code has no CRC configuration")
        return _finish_crc(spec, paths, metric, single)
    return _finish(paths, metric, single)
