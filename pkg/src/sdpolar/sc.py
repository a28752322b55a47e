"""Bit-decision successive cancellation decoding."""

from __future__ import annotations

import numpy as np

from .code import CodeSpec
from .kernels import APPROX
from .memory import as_batch, make_memory


def sc_decode(spec: CodeSpec, llr_in, mode: str = APPROX, pcms: bool = False) -> np.ndarray:
    """Decode u_1^N bit by bit.

    Frozen bits are 0. An information bit is 1 when its likelihood ratio
    W(.|1) / W(.|0) is at least one, so exact ties decide 1.
    """
    llr, single = as_batch(llr_in, spec.N)
    mem = make_memory(llr, spec.n, 1, mode, pcms)
    u = np.zeros((llr.shape[0], spec.N), dtype=np.uint8)
    frozen = spec.frozen_mask
    for j in range(spec.N):
        pair = mem.messages(j)[:, 0, 0]
        if not frozen[j]:
            u[:, j] = pair[:, 1] >= pair[:, 0]
        mem.commit(j, u[:, None, j : j + 1])
    return u[0] if single else u
