import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdpolar.channel import channel_ll
from sdpolar.code import CodeSpec, construct, encode, place_info, polar_transform
from sdpolar.kernels import APPROX, EXACT, f_transform, g_transform
from sdpolar.memory import MessageMemory, PcmsMemory, as_batch, make_memory
from sdpolar.oracle import bit_channel_prob, random_code
from sdpolar.sc import sc_decode
from sdpolar.symbol import symbol_dist

pairs = st.tuples(st.floats(-20, 20), st.floats(-20, 20))


def test_f_examples():
    assert f_transform([0, 0], [0, 0]).tolist() == [0, 0]
    assert f_transform([5, 0], [3, 0]).tolist() == [8, 5]


@given(pairs, pairs)
def test_f_symmetric_and_exact_bound(a, b):
    for mode in (APPROX, EXACT):
        assert np.allclose(f_transform(a, b, mode), f_transform(b, a, mode))
    approx, exact = f_transform(a, b, APPROX), f_transform(a, b, EXACT)
    assert np.all(exact >= approx - 1e-12) and np.all(exact <= approx + np.log(2) + 1e-12)


def test_g_examples():
    assert g_transform([5, 0], [3, 0], 0).tolist() == [8, 0]
    assert g_transform([5, 0], [3, 0], 1).tolist() == [3, 5]
    assert g_transform([0, 0], [2, 7], 1).tolist() == [2, 7]


def test_unknown_mode():
    with pytest.raises(ValueError):
        f_transform([0, 0], [0, 0], "bogus")


def test_sc_noiseless_zero():
    spec = construct(6, 32)
    ll = channel_ll(np.ones(64), 0.5)
    assert not sc_decode(spec, ll).any()


def test_sc_noiseless_rate_one_exhaustive():
    spec = CodeSpec(3, 8, ())
    u = np.array(list(itertools.product((0, 1), repeat=8)), dtype=np.uint8)
    ll = channel_ll(1.0 - 2.0 * encode(spec, u), 0.5)
    assert np.array_equal(sc_decode(spec, ll), u)


def test_sc_n2_example():
    spec = CodeSpec(1, 1, (1,))
    # y favouring x = (1, 1): u2 = 1 since x = (u1 ^ u2, u2) with u1 frozen
    ll = channel_ll(np.array([-0.9, -1.1]), 0.5)
    assert sc_decode(spec, ll).tolist() == [0, 1]


def test_sc_tie_decides_one():
    spec = CodeSpec(1, 2, ())
    assert sc_decode(spec, np.zeros((2, 2))).tolist() == [1, 1]


def test_sc_batch_matches_single(rng):
    spec = construct(5, 16)
    ll = rng.normal(0, 2, (6, 32, 2))
    out = sc_decode(spec, ll)
    for b in range(6):
        assert np.array_equal(out[b], sc_decode(spec, ll[b]))


def test_input_validation():
    spec = construct(3, 4)
    with pytest.raises(ValueError):
        sc_decode(spec, np.zeros((4, 2)))
    with pytest.raises(ValueError):
        MessageMemory(np.zeros((8, 2)), 3)
    with pytest.raises(ValueError):
        MessageMemory(np.zeros((1, 8, 2)), 4)


def test_memory_order_enforced():
    mem = MessageMemory(np.zeros((1, 8, 2)), 3)
    mem.messages(0)
    with pytest.raises(RuntimeError):
        mem.messages(2)
    with pytest.raises(ValueError):
        mem.commit(0, np.zeros((1, 1, 2)))


@given(st.integers(1, 6), st.integers(0, 10_000))
def test_partial_sums_match_reencoding(n, seed):
    rng = np.random.default_rng(seed)
    N = 1 << n
    u = rng.integers(0, 2, N, dtype=np.uint8)
    mem = MessageMemory(rng.normal(size=(1, N, 2)), n)
    for j in range(N):
        mem.messages(j)
        mem.commit(j, u[None, None, j:j + 1])
        for d in range(1, n + 1):
            size = N >> d
            k = j // size
            if k % 2 == 1 or (j + 1) % size == 0:
                ks = k - (k % 2)
                assert np.array_equal(mem.left[d][0, 0], polar_transform(u[ks * size:(ks + 1) * size]))


def test_pcms_stored_values():
    assert PcmsMemory(np.zeros((1, 8, 2)), 3).stored_values() == 24
    assert isinstance(make_memory(np.zeros((1, 8, 2)), 3, pcms=True), PcmsMemory)
    arr, single = as_batch(np.zeros((8, 2)), 8)
    assert single and arr.shape == (1, 8, 2)


@given(st.integers(0, 10_000), st.sampled_from([APPROX, EXACT]))
def test_pcms_equivalence(seed, mode):
    rng = np.random.default_rng(seed)
    spec = random_code(rng, int(rng.integers(1, 7)))
    ll = rng.normal(0.5, 2.0, (20, spec.N, 2))
    assert np.array_equal(sc_decode(spec, ll, mode, pcms=True), sc_decode(spec, ll, mode))


@pytest.mark.parametrize("n", [2, 3])
def test_exact_mode_matches_brute_force(n, rng):
    spec = CodeSpec(n, 1 << n, ())
    for _ in range(10):
        ll = rng.normal(0, 1.5, (spec.N, 2))
        prob = np.exp(ll)
        for j in range(spec.N):
            prefix = rng.integers(0, 2, j, dtype=np.uint8)
            got = symbol_dist(spec, ll, prefix, j, 1, EXACT).ll
            p0 = bit_channel_prob(prob, prefix, 0)
            p1 = bit_channel_prob(prob, prefix, 1)
            assert got[0] - got[1] == pytest.approx(np.log(p0 / p1), abs=1e-9)
