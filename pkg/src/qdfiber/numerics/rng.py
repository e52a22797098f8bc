"""Counter-based random streams (Philox4x32-10).

Every variate is a pure function of ``(seed, stream, draw)``:

* ``seed``   -- 64-bit key, split into the two 32-bit Philox key words;
* ``stream`` -- 64-bit stream index (one stream per laser pulse in the
  simulators), occupies counter words 0-1;
* ``draw``   -- 64-bit draw index inside the stream. Draws ``2b`` and
  ``2b + 1`` share Philox block ``b`` (counter words 2-3) and use its low
  and high 64-bit halves respectively.

Uniforms are the top 53 bits of a 64-bit word scaled by ``2**-53``, so the
whole pipeline is integer arithmetic up to the last multiplication and
reproduces bit-for-bit on any IEEE-754 platform. Because nothing is
sequential, pulse ``i`` can be simulated without touching pulses ``0..i-1``,
which is what makes batch and thread decomposition irrelevant to results.
"""

import math

import numpy as np
from scipy.special import gammaln

from ..errors import DomainError

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_M53 = 2.0 ** -53

#: clip for Lorentzian variates, in units of the HWHM
LORENTZ_CLIP = 1000.0
#: Poisson means below this use CDF inversion, above it PTRS
POISSON_INVERSION_MAX = 10.0


def _u64(x):
    return np.asarray(x, dtype=np.uint64)


def philox4x32(counter, key, rounds=10):
    """Philox4x32 block function.

    ``counter`` is a sequence of four arrays (or ints) of 32-bit words and
    ``key`` a pair of 32-bit words; all broadcast together. Returns four
    ``uint64`` arrays holding the 32-bit output words.
    """
    c0, c1, c2, c3 = (_u64(c) & _MASK32 for c in counter)
    k0, k1 = (_u64(k) & _MASK32 for k in key)
    with np.errstate(over="ignore"):
        for r in range(rounds):
            if r:
                k0 = (k0 + _W0) & _MASK32
                k1 = (k1 + _W1) & _MASK32
            p0 = _M0 * c0
            p1 = _M1 * c2
            c0, c1, c2, c3 = (
                (p1 >> _SHIFT32) ^ c1 ^ k0,
                p1 & _MASK32,
                (p0 >> _SHIFT32) ^ c3 ^ k1,
                p0 & _MASK32,
            )
    return c0, c1, c2, c3


def random_bits(seed, stream, draw):
    """64 random bits for each ``(stream, draw)``; arrays broadcast."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    stream = _u64(stream)
    draw = _u64(draw)
    block = draw >> _ONE
    half = (draw & _ONE).astype(bool)
    x0, x1, x2, x3 = philox4x32(
        (stream & _MASK32, stream >> _SHIFT32, block & _MASK32, block >> _SHIFT32),
        (seed & 0xFFFFFFFF, seed >> 32),
    )
    lo = (x0 << _SHIFT32) | x1
    hi = (x2 << _SHIFT32) | x3
    return np.where(half, hi, lo)


def uniform(seed, stream, draw):
    """Uniform variates on [0, 1) with 53-bit resolution."""
    bits = random_bits(seed, stream, draw)
    return (bits >> _SHIFT11).astype(np.float64) * _TWO_M53


def exponential(seed, stream, draw, mean):
    """Exponential variates by inverse CDF."""
    if not (mean > 0 and math.isfinite(mean)):
        raise DomainError(f"exponential mean must be positive and finite, got {mean!r}")
    u = uniform(seed, stream, draw)
    return -mean * np.log1p(-u)


def lorentzian(seed, stream, draw, center, hwhm):
    """Cauchy variates by tangent inverse CDF, clipped at ``LORENTZ_CLIP`` HWHM."""
    if not (hwhm >= 0 and math.isfinite(hwhm)):
        raise DomainError(f"lorentzian hwhm must be finite and >= 0, got {hwhm!r}")
    u = uniform(seed, stream, draw)
    z = np.clip(np.tan(np.pi * (u - 0.5)), -LORENTZ_CLIP, LORENTZ_CLIP)
    return center + hwhm * z


def _poisson_cdf_table(mean):
    p = math.exp(-mean)
    cdf = [p]
    k = 0
    while True:
        k += 1
        p *= mean / k
        nxt = cdf[-1] + p
        if nxt == cdf[-1] and k > mean:
            break
        cdf.append(nxt)
    return np.array(cdf)


def poisson(seed, stream, draw0, mean):
    """Poisson variates; returns ``(values, draws_used)``.

    For ``mean < 10`` a single uniform at ``draw0`` is inverted through the
    CDF. Otherwise Hormann's PTRS transformed rejection is used; attempt
    ``t`` consumes draws ``draw0 + 2t`` and ``draw0 + 2t + 1``. Callers must
    reserve a draw range wide enough for the rejection loop (the simulators
    give Poisson draws their own 2**32-wide slot).
    """
    if not (mean >= 0 and math.isfinite(mean)):
        raise DomainError(f"poisson mean must be finite and >= 0, got {mean!r}")
    stream, draw0 = np.broadcast_arrays(_u64(stream), _u64(draw0))
    if mean == 0:
        return np.zeros(stream.shape, dtype=np.int64), np.zeros(stream.shape, dtype=np.int64)
    if mean < POISSON_INVERSION_MAX:
        u = uniform(seed, stream, draw0)
        cdf = _poisson_cdf_table(mean)
        k = np.searchsorted(cdf, u, side="right")
        return k.astype(np.int64), np.ones(stream.shape, dtype=np.int64)
    return _poisson_ptrs(seed, stream, draw0, mean)


def _poisson_ptrs(seed, stream, draw0, lam):
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2)

    out = np.full(stream.shape, -1, dtype=np.int64)
    used = np.zeros(stream.shape, dtype=np.int64)
    todo = np.flatnonzero(np.ones(stream.shape, dtype=bool).ravel())
    flat_stream = stream.ravel()
    flat_draw = draw0.ravel()
    flat_out = out.ravel()
    flat_used = used.ravel()
    attempt = 0
    while todo.size:
        off = np.uint64(2 * attempt)
        s = flat_stream[todo]
        d = flat_draw[todo] + off
        uu = uniform(seed, s, d) - 0.5
        vv = uniform(seed, s, d + _ONE)
        us = 0.5 - np.abs(uu)
        with np.errstate(divide="ignore", invalid="ignore"):
            k = np.floor((2 * a / us + b) * uu + lam + 0.43)
            fast = (us >= 0.07) & (vv <= vr)
            reject = (k < 0) | ((us < 0.013) & (vv > us))
            slow = (~fast) & (~reject)
            lhs = np.log(vv) + math.log(invalpha) - np.log(a / (us * us) + b)
            rhs = -lam + k * loglam - gammaln(k + 1)
            ok = fast | (slow & (lhs <= rhs))
        flat_out[todo[ok]] = k[ok].astype(np.int64)
        flat_used[todo[ok]] = 2 * attempt + 2
        todo = todo[~ok]
        attempt += 1
    return flat_out.reshape(stream.shape), flat_used.reshape(stream.shape)


class RandomStream:
    """One addressable stream ``(seed, index)`` with a local draw counter.

    Drawing only advances ``counter``; copies made with :meth:`fork` or by
    constructing a new stream with the same arguments replay identically.
    """

    def __init__(self, seed, index, counter=0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.index = int(index) & 0xFFFFFFFFFFFFFFFF
        self.counter = int(counter)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, index={self.index}, counter={self.counter})"

    def fork(self):
        return RandomStream(self.seed, self.index, self.counter)

    def _take(self, n=1):
        c = self.counter
        self.counter += n
        return c

    def uniform(self):
        return float(uniform(self.seed, self.index, self._take()))

    def exponential(self, mean):
        return float(exponential(self.seed, self.index, self._take(), mean))

    def lorentzian(self, center, hwhm):
        return float(lorentzian(self.seed, self.index, self._take(), center, hwhm))

    def poisson(self, mean):
        value, used = poisson(self.seed, self.index, self.counter, mean)
        self.counter += int(used)
        return int(value)

    def draw(self, law, *params):
        """Dispatch by law name: ``uniform``, ``exponential``, ``poisson``, ``lorentzian``."""
        try:
            fn = {
                "uniform": self.uniform,
                "exponential": self.exponential,
                "poisson": self.poisson,
                "lorentzian": self.lorentzian,
            }[law]
        except KeyError:
            raise DomainError(f"unknown law {law!r}") from None
        return fn(*params)
