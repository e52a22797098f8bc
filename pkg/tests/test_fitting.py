import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdfiber.errors import DomainError, FitError
from qdfiber.photonstats import fitting

TAU = np.linspace(-1000.0, 1000.0, 201)


def test_noiseless_recovery():
    v = 0.66 * np.exp(-np.abs(TAU) / 151.0)
    fit = fitting.fit_exponential_decay(TAU, v, np.full(TAU.size, 0.01))
    assert fit.converged
    assert fit.v0 == pytest.approx(0.66, rel=1e-6)
    assert fit.tau_c == pytest.approx(151.0, rel=1e-6)
    assert fit.n_samples == 201


@given(st.floats(0.05, 1.0), st.floats(20.0, 800.0))
def test_noiseless_recovery_property(v0, tau_c):
    v = v0 * np.exp(-np.abs(TAU) / tau_c)
    fit = fitting.fit_exponential_decay(TAU, v, np.full(TAU.size, 0.01))
    assert fit.v0 == pytest.approx(v0, rel=1e-6)
    assert fit.tau_c == pytest.approx(tau_c, rel=1e-6)


def test_constant_samples_give_infinite_sentinel():
    v = np.full(20, 0.42)
    fit = fitting.fit_exponential_decay(np.linspace(0, 500, 20), v, np.full(20, 0.01))
    assert math.isinf(fit.tau_c)
    assert fit.v0 == pytest.approx(0.42, rel=1e-15)
    assert math.isinf(fit.tau_c_err)
    assert fit.v0_err == pytest.approx(0.01 / math.sqrt(20), rel=1e-12)


def test_rising_samples_give_infinite_sentinel():
    x = np.linspace(0, 500, 20)
    fit = fitting.fit_exponential_decay(x, 0.1 + 1e-4 * x, np.full(20, 0.01))
    assert math.isinf(fit.tau_c)


def test_masked_samples_are_dropped():
    v = 0.66 * np.exp(-np.abs(TAU) / 151.0)
    v[::3] = np.nan
    fit = fitting.fit_exponential_decay(TAU, v, np.full(TAU.size, 0.01))
    assert fit.n_samples == TAU.size - len(TAU[::3])
    assert fit.tau_c == pytest.approx(151.0, rel=1e-6)


def test_input_errors():
    with pytest.raises(DomainError, match="masked"):
        fitting.fit_exponential_decay(TAU, np.full(TAU.size, np.nan), np.ones(TAU.size))
    with pytest.raises(DomainError):
        fitting.fit_exponential_decay(TAU[:4], np.ones(4), np.ones(4))
    with pytest.raises(DomainError):
        fitting.fit_exponential_decay(TAU, np.ones(TAU.size), np.zeros(TAU.size))
    with pytest.raises(DomainError):
        fitting.fit_exponential_decay(TAU, np.ones(3), np.ones(3))
    with pytest.raises(DomainError):
        fitting.fit_exponential_decay(TAU, np.ones(TAU.size), np.ones(TAU.size), tau_c=-1.0)


def test_fixed_decay_constant_is_linear_fit():
    v = 0.5 * np.exp(-np.abs(TAU) / 151.0)
    fit = fitting.fit_exponential_decay(TAU, v, np.full(TAU.size, 0.02), tau_c=151.0)
    assert fit.v0 == pytest.approx(0.5, rel=1e-14)
    assert fit.tau_c == 151.0
    assert fit.covariance[1, 1] == 0.0


def test_non_convergence_reports_last_iterate():
    rs = np.random.default_rng(3)
    v = 0.66 * np.exp(-np.abs(TAU) / 151.0) + rs.normal(0, 0.05, TAU.size)
    with pytest.raises(FitError) as info:
        fitting.fit_exponential_decay(TAU, v, np.full(TAU.size, 0.05), max_iter=1)
    assert len(info.value.last) == 2


def test_noisy_fit_errors_are_calibrated():
    rs = np.random.default_rng(11)
    z = []
    for _ in range(200):
        v = 0.66 * np.exp(-np.abs(TAU) / 151.0) + rs.normal(0, 0.02, TAU.size)
        fit = fitting.fit_exponential_decay(TAU, v, np.full(TAU.size, 0.02))
        z.append(((fit.v0 - 0.66) / fit.v0_err, (fit.tau_c - 151.0) / fit.tau_c_err))
    z = np.array(z)
    assert np.mean(np.all(np.abs(z) <= 3, axis=1)) >= 0.95
    assert np.all(np.abs(z.std(axis=0) - 1.0) <= 0.2)
