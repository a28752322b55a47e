import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdpolar import hw
from sdpolar.channel import channel_ll
from sdpolar.code import CodeSpec, construct, encode
from sdpolar.kernels import APPROX, EXACT
from sdpolar.listdec import DecodeStats, sdscl_decode
from sdpolar.oracle import bit_channel_prob, ml_decode, random_code, symbol_channel_prob
from sdpolar.sc import sc_decode
from sdpolar.symbol import (AdditionCounter, SymbolDist, SymbolPlan, block_masks, combine,
                            direct_mapping_dist, info_candidates, sdsc_decode, symbol_argmax,
                            symbol_dist, value_bits)


def test_combine_phi2():
    a, b = np.array([1.0, 10.0]), np.array([100.0, 1000.0])
    out = combine(a, b)
    # out(u1 u2) = a(u1 ^ u2) + b(u2), index = 2 u1 + u2
    assert out.tolist() == [a[0] + b[0], a[1] + b[1], a[1] + b[0], a[0] + b[1]]
    assert not combine(np.zeros(4), np.zeros(4)).any()
    with pytest.raises(ValueError):
        combine(np.zeros(2), np.zeros(4))


@given(st.integers(0, 10_000))
def test_combine_phi4_brute(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=4), rng.normal(size=4)
    out = combine(a, b)
    for u in range(16):
        bits = [(u >> (3 - k)) & 1 for k in range(4)]
        odd, even = bits[0::2], bits[1::2]
        ia = ((odd[0] ^ even[0]) << 1) | (odd[1] ^ even[1])
        ib = (even[0] << 1) | even[1]
        assert out[u] == a[ia] + b[ib]


def _prob(rng, N):
    return np.exp(rng.normal(0, 1.0, (N, 2)))


@pytest.mark.parametrize("phi", [2, 4])
def test_symbol_channel_normalisation(phi, rng):
    """W_{N,Phi}(.|symbol) = 2^(Phi-1) W_N^{(last)}(., first Phi-1 symbol bits | last bit)."""
    N = 8
    for _ in range(5):
        prob = _prob(rng, N)
        j = int(rng.integers(0, N // phi))
        prefix = rng.integers(0, 2, j * phi, dtype=np.uint8)
        for sym in range(1 << phi):
            bits = value_bits(sym, phi)
            lhs = symbol_channel_prob(prob, prefix, bits)
            rhs = 2 ** (phi - 1) * bit_channel_prob(prob, np.concatenate([prefix, bits[:-1]]), bits[-1])
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_one_combination_step_has_no_constant(rng):
    """W_{2Lambda,Phi} = W_{Lambda,Phi/2}(first half) * W_{Lambda,Phi/2}(second half), exactly."""
    N, phi = 8, 4
    for _ in range(5):
        prob = _prob(rng, N)
        prefix = rng.integers(0, 2, phi, dtype=np.uint8)
        po, pe = prefix[0::2], prefix[1::2]
        for sym in range(1 << phi):
            bits = value_bits(sym, phi)
            so, se = bits[0::2], bits[1::2]
            lhs = symbol_channel_prob(prob, prefix, bits)
            rhs = (symbol_channel_prob(prob[:4], po ^ pe, so ^ se)
                   * symbol_channel_prob(prob[4:], pe, se))
            assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("M", [2, 4, 8])
def test_exact_dist_proportional_to_brute_force(M, rng):
    spec = CodeSpec(3, 8, ())
    ll = rng.normal(0, 1.0, (8, 2))
    j = int(rng.integers(0, 8 // M))
    prefix = rng.integers(0, 2, j * M, dtype=np.uint8)
    got = symbol_dist(spec, ll, prefix, j, M, EXACT).ll
    ref = np.log([symbol_channel_prob(np.exp(ll), prefix, value_bits(s, M)) for s in range(1 << M)])
    assert np.ptp(got - ref) < 1e-9


@given(st.sampled_from([3, 4, 5]), st.sampled_from([2, 4, 8]), st.integers(0, 10_000),
       st.sampled_from([APPROX, EXACT]))
def test_recursive_equals_direct_up_to_constant(n, M, seed, mode):
    rng = np.random.default_rng(seed)
    spec = CodeSpec(n, 1 << n, ())
    ll = rng.normal(0, 2.0, (spec.N, 2))
    j = int(rng.integers(0, spec.N // M))
    prefix = rng.integers(0, 2, j * M, dtype=np.uint8)
    a = symbol_dist(spec, ll, prefix, j, M, mode).ll
    b = direct_mapping_dist(spec, ll, prefix, j, M, mode).ll
    assert np.ptp(a - b) < 1e-9


def test_m1_bridge(rng):
    spec = construct(4, 8)
    ll = rng.normal(size=(16, 2))
    prefix = rng.integers(0, 2, 5, dtype=np.uint8)
    a = symbol_dist(spec, ll, prefix, 5, 1).ll
    b = direct_mapping_dist(spec, ll, prefix, 5, 1).ll
    assert np.allclose(a, b)


def test_direct_mapping_cost():
    c = AdditionCounter()
    direct_mapping_dist(CodeSpec(3, 8, ()), np.zeros((8, 2)), np.zeros(4), 1, 4, counter=c)
    assert c.total == 48


def test_prefix_length_checked():
    with pytest.raises(ValueError):
        symbol_dist(CodeSpec(3, 8, ()), np.zeros((8, 2)), np.zeros(3), 1, 4)
    with pytest.raises(ValueError):
        symbol_dist(CodeSpec(3, 8, ()), np.zeros((8, 2)), np.zeros(0), 0, 3)


@pytest.mark.parametrize("M,expect", [(2, 4), (4, 24), (8, 304)])
def test_decoder_counters_table(M, expect, rng):
    spec = CodeSpec(4, 16, ())
    c = AdditionCounter()
    sdsc_decode(spec, rng.normal(size=(16, 2)), M, counter=c)
    assert c.per_symbol == [expect] * (16 // M)
    assert expect == hw.addition_count(M, hw.RECURSIVE)


@pytest.mark.parametrize("M", [2, 4, 8])
def test_list_counters_follow_formula(M, rng):
    spec = construct(5, 14)
    stats = DecodeStats()
    sdscl_decode(spec, rng.normal(size=(32, 2)), 4, M, stats=stats)
    masks = block_masks(spec, M)
    want = [0 if mk == (1 << M) - 1 else hw.addition_count(M, hw.RECURSIVE, M - bin(int(mk)).count("1"))
            for mk in masks]
    assert stats.adds.per_symbol == want


def test_symbol_plan():
    plan = SymbolPlan(10, 3)
    assert plan.btrans_stages == tuple(range(1, 8))
    assert plan.scombs_stages == (8, 9, 10)
    assert [plan.scombs_nodes(i) for i in (1, 2, 3)] == [(1, 256), (2, 16), (4, 4)]
    with pytest.raises(ValueError):
        plan.scombs_nodes(4)


def test_helpers():
    assert symbol_argmax([1.0, 3.0, 3.0, 0.0]) == 2
    assert SymbolDist(np.array([0.0, 2.0, 1.0, 2.0])).argmax() == 3
    assert SymbolDist(np.zeros(8)).width == 3
    assert info_candidates(0b1010, 4).tolist() == [0, 1, 4, 5]
    assert value_bits(np.array([5]), 4).tolist() == [[0, 1, 0, 1]]


def test_sdsc_m1_equals_sc(rng):
    for _ in range(20):
        spec = random_code(rng, int(rng.integers(2, 7)))
        ll = np.round(rng.normal(0.5, 2, (30, spec.N, 2)))
        assert np.array_equal(sdsc_decode(spec, ll, 1), sc_decode(spec, ll))


def test_sdsc_all_frozen_and_errors():
    spec = construct(4, 4)
    out = sdsc_decode(spec, np.random.default_rng(1).normal(size=(16, 2)), 4)
    assert not out[spec.frozen_mask].any()
    with pytest.raises(ValueError):
        sdsc_decode(spec, np.zeros((16, 2)), 3)
    with pytest.raises(ValueError):
        sdsc_decode(spec, np.zeros((16, 2)), 32)


def test_sdsc_full_block_noiseless(rng):
    spec = CodeSpec(4, 16, ())
    u = rng.integers(0, 2, (1000, 16), dtype=np.uint8)
    ll = channel_ll(1.0 - 2.0 * encode(spec, u), 0.5)
    for k in range(0, 1000, 100):
        assert np.array_equal(sdsc_decode(spec, ll[k:k + 100], 16), u[k:k + 100])


@pytest.mark.parametrize("n", [2, 3])
def test_sdsc_full_block_is_ml(n, rng):
    for _ in range(30):
        spec = random_code(rng, n)
        ll = rng.normal(0.3, 1.5, (spec.N, 2))
        assert np.array_equal(sdsc_decode(spec, ll, spec.N, EXACT), ml_decode(spec, ll))
