"""Two-photon (Hong-Ou-Mandel) interference in an unbalanced fiber Mach-Zehnder.

Photons from consecutive pulses are overlapped on a 50:50 splitter by the
delay line. Indistinguishable co-polarised pairs bunch, suppressing
coincidences near zero detection-time separation; cross-polarised pairs do
not interfere and set the reference level.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..errors import ConfigError, DomainError
from ..numerics.rng import exponential, lorentzian, uniform
from .hbt import g2_zero_analytic
from .histogram import CoincidenceHistogram, accumulate, bin_index, make_bins
from .source import delay_of

#: pair events per Monte Carlo batch
BATCH_PAIRS = 1 << 16
#: default HOM bin width (ps); a bin edge sits on zero delay
HOM_BIN_WIDTH = 10.0


def intensity_factor(ratio):
    """Visibility penalty ``2 sqrt(r) / (1 + r)`` of unequal arm intensities."""
    if not (ratio > 0 and math.isfinite(ratio)):
        raise DomainError(f"intensity ratio must be > 0, got {ratio!r}")
    return 2.0 * math.sqrt(ratio) / (1.0 + ratio)


def hom_visibility_model(g2, pol_angle, intensity_ratio, overlap):
    """Zero-delay HOM visibility of an imperfect source.

    ``V0 = max(0, 1 - 2 g2) cos^2(pol) * 2 sqrt(r)/(1 + r) * M``, a
    leading-order multiplicative composition of the independent penalties.
    """
    if not 0.0 <= g2 <= 1.0:
        raise DomainError(f"g2 must lie in [0, 1], got {g2!r}")
    if not 0.0 <= pol_angle <= 90.0:
        raise DomainError(f"pol_angle must lie in [0, 90] degrees, got {pol_angle!r}")
    if not 0.0 <= overlap <= 1.0:
        raise DomainError(f"overlap must lie in [0, 1], got {overlap!r}")
    pol = math.cos(math.radians(pol_angle)) ** 2
    return max(0.0, 1.0 - 2.0 * g2) * pol * intensity_factor(intensity_ratio) * overlap


def hom_ratio_expected(tau, v0, tau_c):
    """Ensemble-averaged ``co / cross`` coincidence ratio ``1 - V0 exp(-|tau|/tau_c)``."""
    return 1.0 - v0 * np.exp(-np.abs(np.asarray(tau, dtype=float)) / tau_c)


def jitter_hwhm(tau_c):
    """Per-photon Lorentzian frequency-jitter HWHM (rad/ps) for a visibility decay ``tau_c``.

    The difference of two independent Lorentzians of HWHM ``g`` is Lorentzian
    with HWHM ``2g`` and ``E[cos(dw tau)] = exp(-2 g |tau|)``; ``g = 1/(2 tau_c)``
    therefore makes ``tau_c`` the 1/e constant of the visibility itself.
    """
    return 1.0 / (2.0 * tau_c)


# Draw layout, pair event e (photons from pulses 2e and 2e+1):
#   stream 2e:   draw 0 delay of photon a, draw 1 jitter of a,
#                draw 2 background contamination, draw 3 coincidence test
#   stream 2e+1: draw 0 delay of photon b, draw 1 jitter of b
def _hom_batch(seed, start, stop, t1, gamma, p_contam, v_amp, cross, centers, bin_width):
    e = np.arange(start, stop, dtype=np.uint64)
    sa = 2 * e
    sb = sa + np.uint64(1)
    ta = exponential(seed, sa, 0, t1)
    tb = exponential(seed, sb, 0, t1)
    tau = tb - ta
    u = uniform(seed, sa, 3)
    if cross:
        accept = u < 0.5
    else:
        dw = lorentzian(seed, sa, 1, 0.0, gamma) - lorentzian(seed, sb, 1, 0.0, gamma)
        clean = uniform(seed, sa, 2) >= p_contam
        p = np.where(clean, 0.5 * (1.0 - v_amp * np.cos(dw * tau)), 0.5)
        accept = u < p
    counts = np.zeros(centers.size, dtype=np.int64)
    accumulate(counts, bin_index(tau[accept], centers, bin_width))
    return counts


def simulate_hom(train, noise, em, delay, pol="co", *, overlap=1.0,
                 bin_width=HOM_BIN_WIDTH, threads=1):
    """Virtual HOM measurement; returns the zero-delay coincidence histogram.

    ``train.n_pulses // 2`` pair events are simulated. Each photon is
    detected ``Exponential(em.t1)`` after its pulse and carries a static
    Lorentzian frequency offset (see :func:`jitter_hwhm`). A pair is spoiled
    by background with probability ``2 g2(mu_bg)``; spoiled pairs and all
    cross-polarised pairs coincide with probability 1/2. Clean co-polarised
    pairs coincide with probability ``(1 - V cos(dw tau)) / 2`` where ``V``
    holds the polarisation, intensity and overlap penalties. The histogram
    covers one repetition period centred on zero with a bin edge at zero.

    Parameters
    ----------
    pol : {"co", "cross"}
    overlap : float
        Mean wavepacket overlap ``M`` of otherwise ideal photons.
    """
    period = train.period_ps
    if delay_of(delay) * 1e3 >= period:
        raise ConfigError(
            f"delay line ({delay_of(delay):.4g} ns) must be shorter than the "
            f"repetition period ({period / 1e3:.4g} ns)"
        )
    if pol not in ("co", "cross"):
        raise DomainError(f"pol must be 'co' or 'cross', got {pol!r}")
    n_pairs = int(train.n_pulses) // 2
    if n_pairs < 1:
        raise DomainError("HOM needs at least two pulses")
    p_contam = min(1.0, 2.0 * g2_zero_analytic(noise.mu_bg))
    v_amp = hom_visibility_model(0.0, noise.pol_angle, noise.intensity_ratio, overlap)
    gamma = jitter_hwhm(noise.tau_c)
    centers = make_bins(period / 2, bin_width, align="edge")

    def run(start):
        return _hom_batch(
            train.seed, start, min(start + BATCH_PAIRS, n_pairs), em.t1, gamma,
            p_contam, v_amp, pol == "cross", centers, bin_width,
        )

    counts = np.zeros(centers.size, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        for c in pool.map(run, range(0, n_pairs, BATCH_PAIRS)):
            counts += c
    return CoincidenceHistogram(bin_width, centers, counts, n_pairs)


def visibility_curve(h_co, h_cross):
    """Pointwise ``V = 1 - co/cross`` with Poisson errors.

    Returns ``(tau, v, sigma)``; bins without cross counts hold NaN.
    """
    if not h_co.same_binning(h_cross):
        raise DomainError("co and cross histograms must share binning")
    c = h_co.counts.astype(float)
    x = h_cross.counts.astype(float)
    ok = x > 0
    v = np.full(c.shape, np.nan)
    sigma = np.full(c.shape, np.nan)
    ratio = c[ok] / x[ok]
    v[ok] = 1.0 - ratio
    sigma[ok] = np.maximum(ratio, 1.0 / x[ok]) * np.sqrt(1.0 / np.maximum(c[ok], 1.0) + 1.0 / x[ok])
    return h_co.centers.copy(), v, sigma
