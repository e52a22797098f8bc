"""Weighted Gauss-Newton least squares."""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, FitError

#: smallest accepted singular-value ratio of the weighted Jacobian
SINGULAR_RCOND = 1e-12
#: relative chi-square increase still treated as no change
CHI2_ROUNDOFF = 1e-12


@dataclass(frozen=True)
class FitResult:
    params: np.ndarray
    covariance: np.ndarray
    iterations: int
    converged: bool
    chi2: float

    @property
    def stderr(self):
        return np.sqrt(np.diag(self.covariance))


def _chi2(r):
    return float(np.dot(r, r))


def gauss_newton_fit(model, x, y, weights, init, *, rtol=1e-10, max_iter=100):
    """Minimise ``sum(weights * (y - f(x, p))**2)`` by Gauss-Newton.

    Parameters
    ----------
    model : callable
        ``model(x, p) -> (f, J)`` with ``f`` of shape ``(n,)`` and Jacobian
        ``J`` of shape ``(n, m)``.
    x, y : array_like
        Abscissae and observations.
    weights : array_like
        Inverse variances ``1/sigma**2``; the covariance is reported on
        that absolute scale (not rescaled by reduced chi-square).
    init : array_like
        Starting parameters.

    Each step is the least-squares solution of the linearised problem; if
    it does not lower chi-square it is halved (up to 40 times); increases of chi-square at round-off level
    (relative ``1e-12``) do not count. Converged
    once ``max|dp| <= rtol * max|p|``.

    Raises
    ------
    FitError
        Singular normal equations, or no convergence within ``max_iter``
        (``err.last`` carries the last iterate).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(weights, dtype=float)
    p = np.array(init, dtype=float)
    if y.shape != x.shape[:1] or w.shape != y.shape:
        raise DomainError("x, y and weights must have matching lengths")
    if y.size < p.size:
        raise DomainError(f"need at least {p.size} data points, got {y.size}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DomainError("weights must be finite and non-negative")
    sw = np.sqrt(w)

    def linearise(params):
        f, jac = model(x, params)
        return sw * (y - f), sw[:, None] * np.asarray(jac, dtype=float)

    r, a = linearise(p)
    chi2 = _chi2(r)
    for it in range(1, max_iter + 1):
        sv = np.linalg.svd(a, compute_uv=False)
        if sv.size < p.size or sv[0] == 0 or sv[-1] / sv[0] < SINGULAR_RCOND:
            raise FitError("singular normal equations", last=p, iterations=it)
        step = np.linalg.lstsq(a, r, rcond=None)[0]
        scale = max(float(np.max(np.abs(p))), np.finfo(float).tiny)
        if np.max(np.abs(step)) <= rtol * scale:
            p = p + step
            r, a = linearise(p)
            return _result(p, a, it, _chi2(r))
        lam = 1.0
        for _ in range(40):
            trial = p + lam * step
            r_t, a_t = linearise(trial)
            chi2_t = _chi2(r_t)
            # tolerate round-off in chi2 so that the final tiny steps are taken
            if np.isfinite(chi2_t) and chi2_t <= chi2 * (1.0 + CHI2_ROUNDOFF):
                break
            lam *= 0.5
        else:
            # no descent along the GN direction: we sit on the chi2 floor
            if np.max(np.abs(step)) <= 1e3 * rtol * scale:
                return _result(p, a, it, chi2)
            raise FitError("line search failed", last=p, iterations=it)
        p, r, a, chi2 = trial, r_t, a_t, chi2_t
    raise FitError(f"no convergence in {max_iter} iterations", last=p, iterations=max_iter)


def _result(p, a, iterations, chi2):
    cov = np.linalg.pinv(a.T @ a)
    cov = 0.5 * (cov + cov.T)
    return FitResult(p, cov, iterations, True, chi2)
