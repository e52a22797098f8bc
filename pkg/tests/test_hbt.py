import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdfiber.emitter import Emitter
from qdfiber.errors import ConfigError, DomainError, EstimatorError
from qdfiber.photonstats import hbt, source
from qdfiber.photonstats.histogram import CoincidenceHistogram, make_bins

PERIOD = 12_500.0
MU_006 = 0.031421246258793407  # background_for_g2(0.06), frozen


def _run(mu, n, t1=700.0, seed=42, threads=4, **kw):
    return hbt.simulate_hbt(source.PulseTrain(80.0, n, seed), source.SourceNoise(mu_bg=mu),
                            Emitter(1237.0, t1=t1), threads=threads, **kw)


def test_g2_analytic_examples():
    assert hbt.g2_zero_analytic(0.0) == 0.0
    assert hbt.g2_zero_analytic(MU_006) == pytest.approx(0.06, abs=1e-15)
    assert hbt.g2_zero_analytic(0.03144) == pytest.approx(0.0600, abs=5e-5)
    assert hbt.g2_zero_analytic(200.0) > 0.99
    assert hbt.g2_zero_analytic(1.0) == 0.75
    with pytest.raises(DomainError):
        hbt.g2_zero_analytic(-0.1)


def test_background_for_g2_examples():
    assert hbt.background_for_g2(0.0) == 0.0
    mu = hbt.background_for_g2(0.06)
    assert mu == pytest.approx(MU_006, rel=1e-14)
    # the quoted 0.03144 is g2 = 0.060034; the exact inverse is 0.0314212
    assert mu == pytest.approx(0.03144, abs=5e-5)
    assert hbt.g2_zero_analytic(hbt.background_for_g2(0.5)) == pytest.approx(0.5, abs=1e-12)
    for bad in (-0.01, 1.0, 1.5):
        with pytest.raises(DomainError):
            hbt.background_for_g2(bad)


@given(st.floats(0.0, 0.999))
def test_background_roundtrip(g):
    assert abs(hbt.g2_zero_analytic(hbt.background_for_g2(g)) - g) <= 1e-12


def test_g2_expected_leakage_term():
    assert hbt.g2_zero_expected(0.0, 700.0, PERIOD) == pytest.approx(math.exp(-PERIOD / 1400.0), rel=1e-15)
    assert hbt.g2_zero_expected(0.0, 70.0, PERIOD) < 1e-30
    assert hbt.g2_zero_expected(MU_006, 700.0, PERIOD) - 0.06 == pytest.approx(1.24e-4, abs=5e-6)


def _synthetic(zero, side, n_side=5, bw=500.0):
    centers = make_bins(5.5 * PERIOD, bw)
    counts = np.zeros(centers.size, dtype=np.int64)
    for m in range(-n_side, n_side + 1):
        i = int(np.argmin(np.abs(centers - m * PERIOD)))
        counts[i] = zero if m == 0 else side
    return CoincidenceHistogram(bw, centers, counts)


def test_estimator_arithmetic():
    est = hbt.g2_zero_from_histogram(_synthetic(6, 100), PERIOD)
    assert est.value == pytest.approx(0.06, rel=1e-15)
    assert est.zero_area == 6
    assert est.side_areas == (100,) * 10
    assert est.stderr == pytest.approx(0.06 * math.sqrt(1 / 6 + 1 / 1000), rel=1e-14)


def test_estimator_zero_peak_empty():
    est = hbt.g2_zero_from_histogram(_synthetic(0, 100), PERIOD)
    assert est.value == 0.0
    assert est.stderr > 0


def test_estimator_errors():
    with pytest.raises(EstimatorError):
        hbt.g2_zero_from_histogram(_synthetic(5, 0), PERIOD)
    short = CoincidenceHistogram(500.0, make_bins(2.5 * PERIOD, 500.0),
                                 np.ones(make_bins(2.5 * PERIOD, 500.0).size, dtype=np.int64))
    with pytest.raises(EstimatorError):
        hbt.g2_zero_from_histogram(short, PERIOD)


def test_span_shorter_than_three_periods_is_config_error():
    with pytest.raises(ConfigError):
        _run(0.0, 1000, span_periods=2.5)


def test_single_photons_never_coincide_with_themselves():
    # with a short lifetime the neighbouring peaks cannot leak into the zero window
    h = _run(0.0, 1_000_000, t1=70.0)
    assert h.area(0.0, PERIOD) == 0
    est = hbt.g2_zero_from_histogram(h, PERIOD)
    assert est.value == 0.0


def test_central_region_empty_without_background():
    h = _run(0.0, 1_000_000)
    assert h.counts[np.abs(h.centers) <= 1000.0].sum() == 0


def test_histogram_spans_five_periods_each_side():
    h = _run(0.1, 20_000)
    assert h.centers[0] <= -5 * PERIOD and h.centers[-1] >= 5 * PERIOD
    assert h.total_starts > 0


def test_thread_count_does_not_change_histogram():
    n = 3 * hbt.BATCH_PULSES + 1234
    ref = _run(0.2, n, threads=1)
    for threads in (2, 4, 16):
        h = _run(0.2, n, threads=threads)
        assert np.array_equal(h.counts, ref.counts)
        assert h.total_starts == ref.total_starts
        assert h.to_csv() == ref.to_csv()


def test_seed_changes_histogram():
    assert not np.array_equal(_run(0.2, 50_000, seed=1).counts, _run(0.2, 50_000, seed=2).counts)


def test_side_peaks_statistically_equal():
    est = hbt.g2_zero_from_histogram(_run(MU_006, 2_000_000), PERIOD)
    stat, p = hbt.side_peak_chi2(est.side_areas)
    assert p > 1e-3


def test_side_peak_chi2_flags_unequal_areas():
    stat, p = hbt.side_peak_chi2([1000, 1000, 1000, 1500])
    assert p < 1e-3


MU_GRID = [0.0, 0.01, MU_006, 0.1, 1.0]


@pytest.mark.slow
@pytest.mark.parametrize("mu", MU_GRID)
def test_monte_carlo_matches_windowed_oracle(mu):
    """Reference timing (T1 = 700 ps, 12.5 ns): analytic g2 plus the closed-form window leakage."""
    h = _run(mu, 10_000_000, threads=8)
    est = hbt.g2_zero_from_histogram(h, PERIOD)
    oracle = hbt.g2_zero_expected(mu, 700.0, PERIOD)
    assert abs(est.value - oracle) <= 3 * est.stderr


@pytest.mark.parametrize("mu", MU_GRID)
def test_monte_carlo_matches_analytic_oracle_without_leakage(mu):
    h = _run(mu, 2_000_000, t1=70.0, threads=8)
    est = hbt.g2_zero_from_histogram(h, PERIOD)
    assert abs(est.value - hbt.g2_zero_analytic(mu)) <= 3 * est.stderr
