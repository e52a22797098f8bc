import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

import philox_ref
from qdfiber.errors import DomainError
from qdfiber.numerics import rng
from qdfiber.numerics.rng import RandomStream

U64 = st.integers(0, 2**64 - 1)

# Known-answer vectors of the Philox4x32-10 reference distribution.
KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
]


@pytest.mark.parametrize("ctr,key,expected", KAT)
def test_philox_known_answers(ctr, key, expected):
    got = tuple(int(w) for w in rng.philox4x32(ctr, key))
    assert got == expected
    assert philox_ref.philox4x32_10(ctr, key) == expected


@given(U64, U64, st.integers(0, 2**63))
def test_vectorised_matches_scalar_reference(seed, stream, draw):
    assert int(rng.random_bits(seed, stream, draw)) == philox_ref.bits64(seed, stream, draw)
    assert float(rng.uniform(seed, stream, draw)) == philox_ref.uniform(seed, stream, draw)


def test_frozen_first_uniforms():
    # frozen from the scalar reference at seed 42, stream 0
    u = rng.uniform(42, 0, np.arange(4))
    ref = [philox_ref.uniform(42, 0, d) for d in range(4)]
    assert u.tolist() == ref
    assert np.all((u >= 0) & (u < 1))


def test_uniform_resolution_is_53_bits():
    u = rng.uniform(7, np.arange(1000), 0)
    assert np.all(u * 2.0**53 == np.floor(u * 2.0**53))


def test_broadcasting_equals_scalar_calls():
    streams = np.arange(5, dtype=np.uint64)[:, None]
    draws = np.arange(3, dtype=np.uint64)[None, :]
    grid = rng.uniform(11, streams, draws)
    for i in range(5):
        for j in range(3):
            assert grid[i, j] == float(rng.uniform(11, i, j))


def test_stream_replay_and_fork():
    a = RandomStream(42, 7)
    seq = [a.draw("uniform"), a.draw("exponential", 700.0), a.draw("poisson", 3.0),
           a.draw("lorentzian", 0.0, 1.0)]
    b = RandomStream(42, 7)
    assert [b.uniform(), b.exponential(700.0), b.poisson(3.0), b.lorentzian(0.0, 1.0)] == seq
    c = RandomStream(42, 7, counter=1)
    d = c.fork()
    assert c.exponential(5.0) == d.exponential(5.0)
    assert c.counter == d.counter == 2


def test_draw_rejects_bad_laws():
    s = RandomStream(1, 1)
    with pytest.raises(DomainError):
        s.draw("gamma", 1.0)
    with pytest.raises(DomainError):
        s.exponential(0.0)
    with pytest.raises(DomainError):
        s.exponential(math.inf)
    with pytest.raises(DomainError):
        s.lorentzian(0.0, -1.0)
    with pytest.raises(DomainError):
        s.poisson(-0.1)


def test_exponential_mean_700ps():
    x = rng.exponential(42, np.arange(1_000_000), 0, 700.0)
    assert abs(x.mean() - 700.0) <= 3 * 700.0 / 1000.0


@pytest.mark.parametrize("mean", [0.03144, 2.5, 9.9, 10.0, 37.0, 1e4])
def test_poisson_mean_and_variance(mean):
    n = 10_000_000 if mean < 1 else 400_000
    x, _ = rng.poisson(42, np.arange(n), 0, mean)
    assert abs(x.mean() - mean) <= 3 * math.sqrt(mean / n)
    # variance of the sample variance for a Poisson law: (mu + 2 mu^2 (n/(n-1))) / n
    sd_var = math.sqrt((mean + 2 * mean * mean) / n)
    assert abs(x.var() - mean) <= 4 * sd_var


@pytest.mark.parametrize("mean", [0.5, 4.0, 25.0])
def test_poisson_distribution_chi2(mean):
    n = 200_000
    x, _ = rng.poisson(3, np.arange(n), 0, mean)
    hi = int(stats.poisson.ppf(0.999, mean))
    k = np.arange(hi + 1)
    obs = np.array([np.count_nonzero(x == v) for v in k] + [np.count_nonzero(x > hi)])
    p = np.append(stats.poisson.pmf(k, mean), stats.poisson.sf(hi, mean))
    keep = p * n >= 5
    exp = p * n
    obs_c, exp_c = obs[keep], exp[keep]
    if not keep.all():
        obs_c = np.append(obs_c, obs[~keep].sum())
        exp_c = np.append(exp_c, exp[~keep].sum())
    stat = np.sum((obs_c - exp_c) ** 2 / exp_c)
    assert stats.chi2.sf(stat, obs_c.size - 1) > 1e-3


def test_lorentzian_median_of_abs():
    n = 1_000_000
    gamma = 2.5
    x = rng.lorentzian(42, np.arange(n), 0, 0.0, gamma)
    # order-statistic bound on the median of |X|: density of |X| at gamma is 1/(pi gamma)
    sd = 1.0 / (2.0 * math.sqrt(n) * (1.0 / (math.pi * gamma)))
    assert abs(np.median(np.abs(x)) - gamma) <= 3 * sd
    assert np.max(np.abs(x)) <= rng.LORENTZ_CLIP * gamma


def test_stream_independence_chi2():
    n = 100_000
    i = np.arange(n, dtype=np.uint64)
    a = rng.uniform(42, 2 * i, 0)
    b = rng.uniform(42, 2 * i + 1, 0)
    table, _, _ = np.histogram2d(a, b, bins=10, range=[[0, 1], [0, 1]])
    _, p, _, _ = stats.chi2_contingency(table)
    assert p > 1e-3


def test_draws_within_a_stream_are_uniform():
    u = rng.uniform(9, 0, np.arange(200_000))
    assert stats.kstest(u, "uniform").pvalue > 1e-3
