"""Single-exponential fit ``V(tau) = V0 exp(-|tau|/tau_c)`` of visibility samples."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..numerics import gauss_newton_fit

MIN_SAMPLES = 5


@dataclass(frozen=True)
class DecayFit:
    """Fitted ``V0`` and ``tau_c`` (ps) with their 2x2 covariance.

    ``tau_c`` is ``inf`` when the samples show no decay; ``V0`` is then the
    weighted mean and only its variance is meaningful.
    """

    v0: float
    tau_c: float
    covariance: np.ndarray
    iterations: int
    converged: bool
    chi2: float
    n_samples: int

    @property
    def v0_err(self):
        return math.sqrt(self.covariance[0, 0])

    @property
    def tau_c_err(self):
        return math.sqrt(self.covariance[1, 1]) if math.isfinite(self.tau_c) else math.inf


def _clean(tau, v, sigma):
    tau = np.abs(np.asarray(tau, dtype=float))
    v = np.asarray(v, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if not tau.shape == v.shape == sigma.shape or tau.ndim != 1:
        raise DomainError("tau, V and sigma must be 1-D arrays of equal length")
    keep = np.isfinite(tau) & np.isfinite(v) & np.isfinite(sigma)
    if not keep.any():
        raise DomainError("all samples are masked")
    tau, v, sigma = tau[keep], v[keep], sigma[keep]
    if tau.size < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} unmasked samples, got {tau.size}")
    if np.any(sigma <= 0):
        raise DomainError("sigma must be > 0")
    return tau, v, sigma


def _flat(v, w):
    mean = float(np.sum(w * v) / np.sum(w))
    chi2 = float(np.sum(w * (v - mean) ** 2))
    cov = np.array([[1.0 / float(np.sum(w)), 0.0], [0.0, math.inf]])
    return mean, chi2, cov


def _model(x, p):
    e = np.exp(-p[1] * x)
    return p[0] * e, np.column_stack([e, -p[0] * x * e])


def fit_exponential_decay(tau, v, sigma, *, tau_c=None, rtol=1e-10, max_iter=100):
    """Weighted least-squares fit of ``V0 exp(-|tau|/tau_c)``.

    A weighted straight-line fit of ``log V`` (positive samples, weights
    ``(V/sigma)^2``) seeds Gauss-Newton on ``(V0, k = 1/tau_c)``. Masked
    (non-finite) samples are dropped. With ``tau_c`` given, only ``V0`` is
    fitted (linear, closed form).

    Returns
    -------
    DecayFit

    Raises
    ------
    DomainError
        Fewer than five usable samples or non-positive ``sigma``.
    FitError
        Gauss-Newton does not converge; ``err.last`` holds ``(V0, 1/tau_c)``.
    """
    x, y, s = _clean(tau, v, sigma)
    w = 1.0 / s**2
    n = x.size
    if tau_c is not None:
        if not tau_c > 0:
            raise DomainError(f"tau_c must be > 0, got {tau_c!r}")
        e = np.exp(-x / tau_c)
        v0 = float(np.sum(w * e * y) / np.sum(w * e * e))
        cov = np.array([[1.0 / float(np.sum(w * e * e)), 0.0], [0.0, 0.0]])
        chi2 = float(np.sum(w * (y - v0 * e) ** 2))
        return DecayFit(v0, float(tau_c), cov, 0, True, chi2, n)

    if np.ptp(y) == 0.0 or np.ptp(x) == 0.0:
        mean, chi2, cov = _flat(y, w)
        return DecayFit(mean, math.inf, cov, 0, True, chi2, n)

    pos = y > 0
    if np.count_nonzero(pos) >= 2 and np.ptp(x[pos]) > 0:
        lw = (y[pos] / s[pos]) ** 2
        slope, icpt = np.polyfit(x[pos], np.log(y[pos]), 1, w=np.sqrt(lw))
    else:
        slope, icpt = 0.0, 0.0
    if not slope < 0:
        mean, chi2, cov = _flat(y, w)
        return DecayFit(mean, math.inf, cov, 0, True, chi2, n)

    res = gauss_newton_fit(_model, x, y, w, [math.exp(icpt), -slope], rtol=rtol, max_iter=max_iter)
    v0, k = (float(q) for q in res.params)
    if not k > 0:
        mean, chi2, cov = _flat(y, w)
        return DecayFit(mean, math.inf, cov, res.iterations, True, chi2, n)
    # delta method: tau_c = 1/k, d tau_c / dk = -1/k^2
    jac = np.diag([1.0, -1.0 / k**2])
    cov = jac @ res.covariance @ jac.T
    return DecayFit(v0, 1.0 / k, cov, res.iterations, res.converged, res.chi2, n)
