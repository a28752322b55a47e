"""Closed-form hardware models: LL memory, addition counts, latency, speed gain.

All arithmetic is exact (integers and ``fractions.Fraction``). Latency totals
are rounded up to whole clock cycles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .code import CodeSpec, log2_exact

SERIAL = "serial"
OVERLAPPING = "overlapping"


def _log2_pow2(x: Fraction) -> int:
    """Exact log2 of a (possibly fractional) power of two."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 argument must be positive")
    num, den = x.numerator, x.denominator
    if num & (num - 1) or den & (den - 1):
        raise ValueError(f"{x} is not a power of two")
    return (num.bit_length() - 1) - (den.bit_length() - 1)


# -- memory ---------------------------------------------------------------------

def mem_bits_ll(N: int, L: int, Q_ch: int) -> int:
    """Bits of LL storage for a list decoder without pre-computation."""
    n = log2_exact(N)
    return 2 * (L + 1) * N * Q_ch + 4 * L * (N - n - Q_ch - 1)


def mem_bits_pcms(N: int, L: int, Q_ch: int) -> int:
    """Bits of LL storage when stage-1 outputs are pre-computed and the channel stage dropped."""
    n = log2_exact(N)
    return 3 * N * (Q_ch + 1) + L * N * (Q_ch + 3) - 4 * L * (n + Q_ch + 1)


def pcms_saving(N: int, L: int, Q_ch: int) -> int:
    log2_exact(N)
    return N * (L * Q_ch + L - Q_ch - 3)


def pcms_latency_saving(N: int, L: int, P: int) -> Fraction:
    """Cycles saved by a bit-decision semi-parallel list decoder: NL/P."""
    return Fraction(N * L, P)


# -- additions ------------------------------------------------------------------

RECURSIVE = "recursive"
DIRECT = "direct"


def addition_count(M: int, mode: str, info_bits: int | None = None) -> int:
    """Additions for one symbol distribution with ``info_bits`` unfrozen bits."""
    m = log2_exact(M)
    if m < 1:
        raise ValueError("symbol decisions need M >= 2")
    if info_bits is None:
        info_bits = M
    if not 0 <= info_bits <= M:
        raise ValueError("info_bits must be in 0..M")
    if mode == RECURSIVE:
        return sum((1 << i) * (1 << (M >> i)) for i in range(1, m)) + (1 << info_bits)
    if mode == DIRECT:
        return (1 << info_bits) * (M - 1)
    raise ValueError(f"unknown mode {mode!r}")


# -- latency --------------------------------------------------------------------

@dataclass(frozen=True)
class HwParams:
    N: int
    M: int
    L: int
    P: int
    gamma: float | str | Fraction = 0
    T_S: int | None = None
    T_N: int | None = None
    q: int | None = None
    Q_ch: int = 4
    scheduling: str | None = None
    pcms: bool = True

    def __post_init__(self):
        for name in ("N", "M", "L", "P"):
            log2_exact(getattr(self, name))
        if self.N % self.M:
            raise ValueError("M must divide N")
        if not 0 <= self.gamma_exact <= 1:
            raise ValueError("gamma must be in [0, 1]")
        if self.Q_ch < 1:
            raise ValueError("Q_ch must be positive")
        if self.scheduling not in (None, SERIAL, OVERLAPPING):
            raise ValueError("scheduling must be 'serial' or 'overlapping'")

    @property
    def gamma_exact(self) -> Fraction:
        g = self.gamma
        return g if isinstance(g, Fraction) else Fraction(str(g))

    @property
    def m(self) -> int:
        return log2_exact(self.M)


@dataclass(frozen=True)
class LatencyReport:
    T_B: Fraction
    T_S: int
    T_N: int
    total: int
    scheduling: str
    breakdown: dict = field(default_factory=dict)


def auto_scheduling(h: HwParams) -> str:
    return SERIAL if (1 << h.M) * h.L <= 4 * h.P else OVERLAPPING


def ts_bound(M: int, L: int, P: int) -> int:
    """General upper bound on S-COMBS cycles per symbol."""
    m = log2_exact(M)
    return sum(math.ceil(Fraction((1 << (1 << i)) * L, 4 * P)) for i in range(1, m + 1))


def default_ts(h: HwParams, scheduling: str) -> int:
    """S-COMBS cycles per symbol when the adders of 4P units are reused."""
    width = (1 << h.M) * h.L
    if scheduling == SERIAL:
        if width > 4 * h.P:
            raise ValueError(f"serial scheduling needs 2^M L = {width} <= 4P = {4 * h.P}")
        return h.m
    half = (1 << (h.M // 2)) * h.L
    if width > 4 * h.P >= half:
        return h.m - 1 + math.ceil(Fraction(width, 4 * h.P))
    if width <= 4 * h.P:
        raise ValueError("overlapping scheduling is only used when 2^M L > 4P")
    raise ValueError(f"4P = {4 * h.P} is below 2^(M/2) L = {half}; pass T_S explicitly "
                     f"(bound: {ts_bound(h.M, h.L, h.P)})")


def btrans_cycles(N: int, M: int, L: int, P: int, pcms: bool = True) -> Fraction:
    """B-TRANS cycles: a bit-decision decoder of length N/M with P/M units."""
    load = Fraction(N * L, P)
    t = Fraction(2 * N, M) + load * _log2_pow2(Fraction(N * L, 4 * P))
    return t - load if pcms else t


def latency(h: HwParams) -> LatencyReport:
    sched = h.scheduling or auto_scheduling(h)
    if h.M == 1:
        T_S = 0 if h.T_S is None else h.T_S
        T_N = 0 if h.T_N is None else h.T_N
    else:
        T_S = default_ts(h, sched) if h.T_S is None else h.T_S
        if h.T_N is None:
            raise ValueError("T_N depends on the pruning network; pass it explicitly")
        T_N = h.T_N
        if h.scheduling == SERIAL:
            default_ts(h, SERIAL)  # validates the adder budget
    if T_S < 0 or T_N < 0:
        raise ValueError("cycle counts must be non-negative")
    T_B = btrans_cycles(h.N, h.M, h.L, h.P, h.pcms)
    symbols = (1 - h.gamma_exact) * Fraction(h.N, h.M)
    scombs = symbols * T_S
    prune = symbols * T_N
    total = math.ceil(scombs + prune + T_B)
    return LatencyReport(T_B, T_S, T_N, total, sched,
                         {"btrans": T_B, "scombs": scombs, "prune": prune,
                          "pcms_saving": pcms_latency_saving(h.N, h.L, h.P) if h.pcms else 0})


def conventional_latency(N: int, L: int, P: int) -> Fraction:
    """Bit-decision list decoder with pre-computation: 2N + (NL/P) log2(NL/8P)."""
    return 2 * N + Fraction(N * L, P) * _log2_pow2(Fraction(N * L, 8 * P))


def speed_gain(h: HwParams) -> Fraction:
    """T(1) / T(M), with T(M) the rounded cycle count of :func:`latency`."""
    if h.M == 1 and h.T_S in (None, 0) and h.T_N in (None, 0):
        return Fraction(1)
    return conventional_latency(h.N, h.L, h.P) / latency(h).total


# -- frozen vectors -------------------------------------------------------------

def frozen_vectors(spec: CodeSpec, M: int) -> int:
    if spec.N % M:
        raise ValueError("M must divide N")
    return int(spec.frozen_mask.reshape(-1, M).all(axis=1).sum())


def gamma_of(spec: CodeSpec, M: int) -> Fraction:
    """Fraction of M-bit symbols whose bits are all frozen."""
    return Fraction(frozen_vectors(spec, M), spec.N // M)


# -- sorting network structure ----------------------------------------------------

def sorter_units(M: int, sorter: str) -> dict:
    """BS_L units for selecting L of 2^M L inputs."""
    if sorter == "folded":
        return {"units": max(1, 1 << (M - 1)), "layers": M}
    if sorter == "tree":
        return {"units": (1 << M) - 1, "layers": M}
    raise ValueError(f"unknown sorter {sorter!r}")


# -- presets ----------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    name: str
    params: HwParams
    cycles: int


_BASE = HwParams(N=1024, M=2, L=4, P=64)

TABLE_II = (
    TableRow("SDSCL-2", replace(_BASE, M=2, gamma="0.445", T_S=1, T_N=2, q=4), 2069),
    TableRow("SDSCL-4", replace(_BASE, M=4, gamma="0.395", T_S=2, T_N=4, q=4), 1634),
    TableRow("SDSCL-8", replace(_BASE, M=8, gamma="0.344", T_S=6, T_N=7, q=4), 1540),
    TableRow("SDSCL-8", replace(_BASE, M=8, gamma="0.344", T_S=6, T_N=4, q=2), 1288),
)

TABLE_I = ((2, 4, 4), (4, 24, 48), (8, 304, 1792))
