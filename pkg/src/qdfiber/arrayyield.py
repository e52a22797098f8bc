"""Yield statistics for matching pre-characterised QD devices to target channels."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .errors import DomainError
from .numerics import log_binomial_tail
from .numerics.rng import uniform


@dataclass(frozen=True)
class EnsembleDistribution:
    """Spectral distribution of the QD ensemble.

    ``shape`` is ``"uniform"`` over ``support`` or ``"tabulated"``, in which
    case ``grid``/``density`` give a piecewise-linear density that is
    renormalised on construction.
    """

    support: tuple = (1200.0, 1400.0)
    shape: str = "uniform"
    grid: tuple = ()
    density: tuple = ()
    _cdf: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise DomainError(f"support must satisfy min < max, got {self.support!r}")
        if self.shape == "uniform":
            return
        if self.shape != "tabulated":
            raise DomainError(f"unknown distribution shape {self.shape!r}")
        x = np.asarray(self.grid, dtype=float)
        y = np.asarray(self.density, dtype=float)
        if x.size < 2 or x.shape != y.shape or np.any(np.diff(x) <= 0):
            raise DomainError("tabulated grid must be increasing and match density length")
        if np.any(y < 0):
            raise DomainError("tabulated density must be non-negative")
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))])
        if cdf[-1] <= 0:
            raise DomainError("tabulated density integrates to zero")
        object.__setattr__(self, "_cdf", tuple(cdf / cdf[-1]))

    def mass(self, a, b):
        """Probability mass in ``[a, b]``."""
        lo, hi = self.support
        a, b = max(a, lo), min(b, hi)
        if b <= a:
            return 0.0
        if self.shape == "uniform":
            return (b - a) / (hi - lo)
        return self._tab_cdf(b) - self._tab_cdf(a)

    def _tab_cdf(self, t):
        # exact CDF of the piecewise-linear density
        x = np.asarray(self.grid, dtype=float)
        y = np.asarray(self.density, dtype=float)
        if t <= x[0]:
            return 0.0
        if t >= x[-1]:
            return 1.0
        i = int(np.searchsorted(x, t, side="right")) - 1
        total = float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))
        h = t - x[i]
        slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i])
        return self._cdf[i] + (y[i] * h + 0.5 * slope * h * h) / total


@dataclass(frozen=True)
class ChannelPlan:
    targets: tuple  # nm
    window: float = 1.0  # +- nm

    def __post_init__(self):
        if not self.window > 0:
            raise DomainError(f"window must be > 0 nm, got {self.window!r}")
        if len(self.targets) == 0:
            raise DomainError("a channel plan needs at least one target")

    def check_support(self, dist):
        lo, hi = dist.support
        bad = [t for t in self.targets if not lo <= t <= hi]
        if bad:
            raise DomainError(f"targets {bad} fall outside the distribution support {dist.support}")


def per_device_match_probability(dist, target, window, capture_bandwidth, occupancy):
    """Chance that a cavity device holds at least one QD in the target window.

    Poisson occupancy: ``1 - exp(-occupancy * P_window)`` with the window
    ``min(2 window, capture_bandwidth)`` centred on ``target``.
    """
    if not capture_bandwidth > 0:
        raise DomainError(f"capture_bandwidth must be > 0 nm, got {capture_bandwidth!r}")
    if not occupancy >= 0:
        raise DomainError(f"occupancy must be >= 0, got {occupancy!r}")
    if not window > 0:
        raise DomainError(f"window must be > 0 nm, got {window!r}")
    width = min(2.0 * window, capture_bandwidth)
    mass = dist.mass(target - width / 2.0, target + width / 2.0)
    return -math.expm1(-occupancy * mass)


def calibrate_occupancy(p_target, window_mass):
    """Occupancy giving ``p_target`` for a window of probability ``window_mass``."""
    if not 0 <= p_target < 1:
        raise DomainError(f"target probability must lie in [0, 1), got {p_target!r}")
    if not window_mass > 0:
        raise DomainError("window mass must be > 0")
    return -math.log1p(-p_target) / window_mass


def expected_devices_per_channel(p):
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    return 1.0 / p


def prob_at_least_k(p, n, k):
    """``P[at least k matches among n scanned devices]``."""
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")
    return log_binomial_tail(p, n, k)


def devices_needed(p, k, confidence):
    """Smallest ``n`` with ``prob_at_least_k(p, n, k) >= confidence``."""
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    if not 0 < confidence < 1:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence!r}")
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    if p == 1:
        return k
    lo = k
    hi = k
    while log_binomial_tail(p, hi, k) < confidence:
        lo = hi + 1
        hi *= 2
    # smallest n in [lo, hi] meeting the target; the tail is monotone in n
    while lo < hi:
        mid = (lo + hi) // 2
        if log_binomial_tail(p, mid, k) >= confidence:
            hi = mid
        else:
            lo = mid + 1
    return lo


def mc_prob_at_least_k(p, n, k, trials, seed, chunk=50_000):
    """Monte Carlo estimate of :func:`prob_at_least_k` and its standard error.

    Trial ``t`` scans ``n`` devices using stream ``t``, draw ``i`` for device ``i``.
    """
    hits = 0
    dev = np.arange(n, dtype=np.uint64)
    for start in range(0, trials, chunk):
        t = np.arange(start, min(start + chunk, trials), dtype=np.uint64)
        u = uniform(seed, t[:, None], dev[None, :])
        hits += int(np.count_nonzero((u < p).sum(axis=1) >= k))
    est = hits / trials
    return est, math.sqrt(max(est * (1 - est), 1.0 / trials) / trials)


@dataclass(frozen=True)
class ChannelMatch:
    target: float
    wavelength: float
    residual_nm: float
    residual_ghz: float
    devices_scanned: int


# draw layout inside a channel stream: device i uses draw 2i for the match test;
# the accepted device's residual uses draw 2i + 1
def sample_array(plan, dist, p, seed, residual="uniform", transfer_offset=0.0, max_scan=1_000_000):
    """Sample one matched device per channel.

    Devices are scanned until one matches (probability ``p`` each); its
    residual detuning is drawn uniformly (or triangular, ``residual="triangular"``)
    inside ``+-plan.window``. ``transfer_offset`` (nm) is added afterwards to
    model a fixed post-transfer shift.
    """
    plan.check_support(dist)
    if not 0 < p <= 1:
        raise DomainError(f"p must lie in (0, 1], got {p!r}")
    if residual not in ("uniform", "triangular"):
        raise DomainError(f"unknown residual distribution {residual!r}")
    out = []
    for ch, target in enumerate(plan.targets):
        scanned = 0
        block = 64
        found = None
        while found is None:
            idx = np.arange(scanned, scanned + block, dtype=np.uint64)
            u = uniform(seed, ch, 2 * idx)
            hit = np.flatnonzero(u < p)
            if hit.size:
                found = scanned + int(hit[0])
            scanned += block
            if scanned > max_scan and found is None:
                raise DomainError(f"no match within {max_scan} devices for channel {ch}")
        if residual == "uniform":
            v = float(uniform(seed, ch, 2 * found + 1))
            r = plan.window * (2.0 * v - 1.0)
        else:
            v = float(uniform(seed, ch, 2 * found + 1))
            # inverse CDF of the symmetric triangle on [-1, 1]
            z = math.sqrt(2 * v) - 1 if v < 0.5 else 1 - math.sqrt(2 * (1 - v))
            r = plan.window * z
        r += transfer_offset
        lam = target + r
        out.append(ChannelMatch(target, lam, r, units.linewidth_nm_to_ghz(r, target), found + 1))
    return out


def pairwise_detuning_stats(wavelengths):
    """Detuning matrix ``D[i, j] = nu(lam_i) - nu(lam_j)`` in GHz, plus summary.

    Each entry uses ``c (lam_j - lam_i) / lam_mid**2`` with ``lam_mid`` the
    pair midpoint, which keeps the matrix exactly antisymmetric.
    """
    lam = np.asarray(wavelengths, dtype=float)
    if lam.ndim != 1 or lam.size < 2:
        raise DomainError("need at least two wavelengths")
    dl = lam[None, :] - lam[:, None]
    mid = 0.5 * (lam[None, :] + lam[:, None])
    d = units.linewidth_nm_to_ghz(dl, mid)
    iu = np.triu_indices(lam.size, 1)
    mags = np.abs(d[iu])
    return {"matrix_ghz": d, "max_ghz": float(mags.max()), "mean_ghz": float(mags.mean())}
