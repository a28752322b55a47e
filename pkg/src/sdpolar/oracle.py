"""Brute-force references and the named equivalence suites.

The brute-force functions enumerate codewords in the probability domain and
share no code with the decoders beyond the encoder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import hw
from .code import CodeSpec, encode, log2_exact
from .kernels import APPROX, EXACT
from .listdec import PruneConfig, scl_decode, sdscl_decode
from .sc import sc_decode
from .symbol import direct_mapping_dist, sdsc_decode, symbol_dist

SUITES = ("prop1-vs-direct-mapping", "reduction-chain", "pcms-equivalence", "table-exactness")


# -- brute force ------------------------------------------------------------------

def _all_words(k: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8).reshape(1 << k, k)


def codeword_probs(prob, n: int, fixed) -> np.ndarray:
    """Pr(y | x(u)) for every completion u of the ``fixed`` leading bits.

    ``prob`` is (N, 2) with prob[k, b] = W(y_k | b). Returns an array indexed
    by the free tail bits (MSB = first free bit).
    """
    fixed = np.asarray(fixed, dtype=np.uint8)
    N = 1 << n
    tails = _all_words(N - fixed.size)
    u = np.concatenate([np.broadcast_to(fixed, (tails.shape[0], fixed.size)), tails], axis=1)
    x = encode_n(u, n)
    return np.prod(prob[np.arange(N), x], axis=1)


def encode_n(u, n: int) -> np.ndarray:
    spec = CodeSpec(n, 1 << n, ())
    return encode(spec, u)


def bit_channel_prob(prob, prefix, bit: int) -> float:
    """W_N^{(i)}(y, u_1^{i-1} | u_i), i = len(prefix) + 1."""
    prob = np.asarray(prob, dtype=float)
    N = prob.shape[0]
    n = log2_exact(N)
    fixed = np.concatenate([np.asarray(prefix, dtype=np.uint8), [bit]]).astype(np.uint8)
    return float(codeword_probs(prob, n, fixed).sum() / 2 ** (N - 1))


def symbol_channel_prob(prob, prefix, symbol) -> float:
    """W_{N,Phi}(y, u_1^{j Phi} | symbol) with the symbol's bits following ``prefix``."""
    prob = np.asarray(prob, dtype=float)
    N = prob.shape[0]
    n = log2_exact(N)
    symbol = np.asarray(symbol, dtype=np.uint8)
    fixed = np.concatenate([np.asarray(prefix, dtype=np.uint8), symbol]).astype(np.uint8)
    return float(codeword_probs(prob, n, fixed).sum() / 2 ** (N - symbol.size))


def ml_decode(spec: CodeSpec, llr) -> np.ndarray:
    """Exhaustive ML over the codebook; ties go to the larger information word."""
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (spec.N, 2):
        raise ValueError("ml_decode takes a single received word")
    info = _all_words(spec.K)
    u = np.zeros((info.shape[0], spec.N), dtype=np.uint8)
    u[:, spec.info_positions] = info
    x = encode(spec, u)
    score = llr[np.arange(spec.N), x].sum(axis=1)
    best = score.size - 1 - int(np.argmax(score[::-1]))
    return u[best]


def random_code(rng, n: int, K: int | None = None) -> CodeSpec:
    N = 1 << n
    if K is None:
        K = int(rng.integers(1, N + 1))
    frozen = rng.choice(np.arange(1, N + 1), N - K, replace=False)
    return CodeSpec(n, K, tuple(int(i) for i in frozen))


def random_llr(rng, shape, integer: bool = False) -> np.ndarray:
    y = rng.normal(0.6, 1.0, shape)
    ll = np.stack([2 * y, -2 * y], axis=-1)
    return np.round(ll) if integer else ll


# -- suites -----------------------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, {self.failures} failures"


def _argmax_set(scores, tol: float = 1e-9) -> frozenset:
    s = np.asarray(scores)
    return frozenset(np.flatnonzero(s >= s.max() - tol).tolist())


def suite_prop1(cases: int = 1000, seed: int = 0, tol: float = 1e-9) -> SuiteResult:
    """Recursive combination vs direct mapping: equal up to a constant (exact), same argmax (approx)."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("prop1-vs-direct-mapping")
    for _ in range(cases):
        n = int(rng.integers(3, 6))
        M = int(rng.choice([m for m in (2, 4, 8) if m <= 1 << n]))
        code = CodeSpec(n, 1 << n, ())
        llr = random_llr(rng, (code.N,))
        j = int(rng.integers(0, code.N // M))
        prefix = rng.integers(0, 2, j * M, dtype=np.uint8)
        a = symbol_dist(code, llr, prefix, j, M, EXACT).ll
        b = direct_mapping_dist(code, llr, prefix, j, M, EXACT).ll
        ok = np.ptp(a - b) <= tol
        a = symbol_dist(code, llr, prefix, j, M, APPROX).ll
        b = direct_mapping_dist(code, llr, prefix, j, M, APPROX).ll
        ok &= _argmax_set(a) == _argmax_set(b)
        res.cases += 1
        res.failures += int(not ok)
    return res


def _draw_block(rng, batch: int):
    n = int(rng.integers(2, 6))
    code = random_code(rng, n)
    llr = random_llr(rng, (batch, code.N), integer=bool(rng.integers(0, 2)))
    return code, llr


def suite_reduction(cases: int = 1000, seed: int = 0, batch: int = 50) -> SuiteResult:
    """sdscl(M=1) == scl, scl(L=1) == sc, sdsc(M=1) == sc, sdscl(L=1) == sdsc."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("reduction-chain")
    while res.cases < cases:
        code, llr = _draw_block(rng, min(batch, cases - res.cases))
        L = int(rng.choice([1, 2, 4, 8]))
        M = int(rng.choice([m for m in (2, 4, 8) if m <= code.N]))
        sc = sc_decode(code, llr)
        checks = [
            (sdscl_decode(code, llr, L, 1, PruneConfig(L)), scl_decode(code, llr, L)),
            (scl_decode(code, llr, 1), sc),
            (sdsc_decode(code, llr, 1), sc),
            (sdscl_decode(code, llr, 1, M), sdsc_decode(code, llr, M)),
        ]
        bad = np.zeros(llr.shape[0], dtype=bool)
        for a, b in checks:
            bad |= np.any(a != b, axis=-1)
        res.cases += llr.shape[0]
        res.failures += int(bad.sum())
    return res


def suite_pcms(cases: int = 1000, seed: int = 0, batch: int = 50) -> SuiteResult:
    """Every decoder gives identical output with and without pre-computed stage-1 tables."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("pcms-equivalence")
    while res.cases < cases:
        code, llr = _draw_block(rng, min(batch, cases - res.cases))
        L = int(rng.choice([2, 4]))
        M = int(rng.choice([m for m in (1, 2, 4) if m < code.N]))
        mode = EXACT if rng.integers(0, 2) else APPROX
        bad = np.zeros(llr.shape[0], dtype=bool)
        for fn in (lambda p: sc_decode(code, llr, mode, pcms=p),
                   lambda p: sdsc_decode(code, llr, M, mode, pcms=p),
                   lambda p: scl_decode(code, llr, L, mode, pcms=p),
                   lambda p: sdscl_decode(code, llr, L, M, PruneConfig(2), mode, pcms=p)):
            bad |= np.any(fn(True) != fn(False), axis=-1)
        res.cases += llr.shape[0]
        res.failures += int(bad.sum())
    return res


def suite_tables(cases: int = 0, seed: int = 0) -> SuiteResult:
    """Table values with zero tolerance."""
    res = SuiteResult("table-exactness")

    def check(got, want, what):
        res.cases += 1
        if got != want:
            res.failures += 1
            res.notes.append(f"{what}: got {got}, expected {want}")

    for M, rec, direct in hw.TABLE_I:
        check(hw.addition_count(M, hw.RECURSIVE), rec, f"additions recursive M={M}")
        check(hw.addition_count(M, hw.DIRECT), direct, f"additions direct M={M}")
    for row in hw.TABLE_II:
        check(hw.latency(row.params).total, row.cycles, f"latency {row.name} q={row.params.q}")
    check(hw.mem_bits_ll(1024, 4, 4), 57104, "LL memory bits")
    check(hw.mem_bits_pcms(1024, 4, 4), 43792, "PCMS memory bits")
    check(hw.pcms_saving(1024, 4, 4), 13312, "PCMS saving")
    return res


_RUNNERS = {
    "prop1-vs-direct-mapping": suite_prop1,
    "reduction-chain": suite_reduction,
    "pcms-equivalence": suite_pcms,
    "table-exactness": suite_tables,
}


def run_oracle(suite: str, cases: int = 1000, seed: int = 0) -> SuiteResult:
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    return _RUNNERS[suite](cases=cases, seed=seed)
