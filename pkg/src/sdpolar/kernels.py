"""Arikan's single-step channel transformation on LL pairs.

An LL pair is the last axis of size 2: index 0 conditions the output bit on 0,
index 1 on 1. Both kernels drop the -log 2 constants, which only shift every
message of a stage by the same amount.
"""

from __future__ import annotations

import numpy as np

APPROX = "approx"
EXACT = "exact"
MODES = (APPROX, EXACT)


def f_transform(a, b, mode: str = APPROX) -> np.ndarray:
    """Odd-index output: out(u) = max_v [a(u ^ v) + b(v)] (log-sum-exp if exact)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    same = a + b                              # (a0 + b0, a1 + b1)
    cross = a[..., ::-1] + b                  # (a1 + b0, a0 + b1)
    if mode == APPROX:
        out0 = np.maximum(same[..., 0], same[..., 1])
        out1 = np.maximum(cross[..., 0], cross[..., 1])
    elif mode == EXACT:
        out0 = np.logaddexp(same[..., 0], same[..., 1])
        out1 = np.logaddexp(cross[..., 0], cross[..., 1])
    else:
        raise ValueError(f"unknown kernel mode {mode!r}")
    return np.stack([out0, out1], axis=-1)


def g_transform(a, b, psum) -> np.ndarray:
    """Even-index output: out(u) = a(psum ^ u) + b(u). Exact in both modes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    flip = np.asarray(psum, dtype=bool)[..., None]
    return np.where(flip, a[..., ::-1], a) + b
