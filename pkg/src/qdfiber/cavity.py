"""Lorentzian cavity mode: linewidth, detuned Purcell factor and spectra."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import units
from .errors import DomainError


@dataclass(frozen=True)
class CavityMode:
    lambda_c: float  # nm
    q: float
    f_max: float = 0.0

    def __post_init__(self):
        if not (self.lambda_c > 0 and math.isfinite(self.lambda_c)):
            raise DomainError(f"lambda_c must be > 0 nm, got {self.lambda_c!r}")
        if not (self.q > 0 and math.isfinite(self.q)):
            raise DomainError(f"q must be > 0, got {self.q!r}")
        if not (self.f_max >= 0 and math.isfinite(self.f_max)):
            raise DomainError(f"f_max must be >= 0, got {self.f_max!r}")


@dataclass(frozen=True)
class HcbgGeometry:
    """Hole-CBG design parameters, in nm. Carried for reporting only."""

    radial_period: float = 467.0
    center_disk_radius: float = 618.0
    hole_size: float = 135.0
    axial_period: float = 210.0
    membrane_thickness: float = 300.0
    membrane_index: float = 3.2

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise DomainError(f"geometry.{name} must be > 0, got {value!r}")


def fwhm(mode):
    """Mode FWHM in nm, ``lambda_c / Q``."""
    return mode.lambda_c / mode.q


def purcell(mode, lam_em):
    """Lorentzian Purcell factor ``f_max / (1 + (2 delta / fwhm)**2)``."""
    lam_em = np.asarray(lam_em, dtype=float)
    if not np.all(np.isfinite(lam_em)):
        raise DomainError("emission wavelength must be finite")
    return purcell_detuned(mode, lam_em - mode.lambda_c)


def purcell_detuned(mode, delta):
    """Purcell factor at detuning ``delta`` (nm) from the mode centre.

    Taking the detuning directly avoids the rounding of ``lambda_c + delta``;
    ``purcell_detuned(mode, fwhm(mode) / 2)`` is exactly ``f_max / 2``.
    """
    delta = np.asarray(delta, dtype=float)
    if not np.all(np.isfinite(delta)):
        raise DomainError("detuning must be finite")
    x = 2.0 * delta / fwhm(mode)
    out = mode.f_max / (1.0 + x * x)
    return float(out) if out.ndim == 0 else out


def enhanced_lifetime(t1_bulk, mode, lam_em):
    """Cavity-modified lifetime: the Purcell rate adds to the unit bulk rate."""
    if not (t1_bulk > 0 and math.isfinite(t1_bulk)):
        raise DomainError(f"t1_bulk must be > 0 ps, got {t1_bulk!r}")
    return t1_bulk / (1.0 + purcell(mode, lam_em))


def lifetime_for_purcell(t1_bulk, f_p):
    """Same rate addition as :func:`enhanced_lifetime`, for a given ``F_P``."""
    if not (t1_bulk > 0 and math.isfinite(t1_bulk)):
        raise DomainError(f"t1_bulk must be > 0 ps, got {t1_bulk!r}")
    if not f_p >= 0:
        raise DomainError(f"Purcell factor must be >= 0, got {f_p!r}")
    return t1_bulk / (1.0 + f_p)


def beta_factor(f_p, leak_rate=1.0):
    """Fraction of emission into the cavity mode, ``F / (F + leak)``."""
    if not leak_rate > 0:
        raise DomainError(f"leak_rate must be > 0, got {leak_rate!r}")
    if not f_p >= 0:
        raise DomainError(f"Purcell factor must be >= 0, got {f_p!r}")
    return f_p / (f_p + leak_rate)


def emission_spectrum(em, mode, grid):
    """Normalised PL spectrum on a wavelength grid (nm).

    Filter picture: the emitter Lorentzian (centre ``em.lambda0``, FWHM from
    ``em.linewidth``) times the cavity Lorentzian envelope, scaled so the
    maximum is 1. A zero-linewidth emitter gives a single 1 at the grid point
    nearest ``lambda0``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be finite and strictly increasing")
    if em.linewidth == 0:
        out = np.zeros_like(grid)
        out[int(np.argmin(np.abs(grid - em.lambda0)))] = 1.0
        return out
    g_em = units.ghz_to_nm(em.linewidth, em.lambda0)
    x_em = 2.0 * (grid - em.lambda0) / g_em
    x_cav = 2.0 * (grid - mode.lambda_c) / fwhm(mode)
    spec = 1.0 / ((1.0 + x_em * x_em) * (1.0 + x_cav * x_cav))
    return spec / spec.max()


def spectrum_fwhm(grid, spec):
    """FWHM (nm) of a single-peaked sampled spectrum by linear interpolation."""
    grid = np.asarray(grid, dtype=float)
    spec = np.asarray(spec, dtype=float)
    i = int(np.argmax(spec))
    half = spec[i] / 2.0
    left = np.flatnonzero(spec[:i] < half)
    right = np.flatnonzero(spec[i:] < half)
    if left.size == 0 or right.size == 0:
        raise DomainError("spectrum does not fall below half maximum on both sides")
    l0 = left[-1]
    r0 = i + right[0]
    xl = np.interp(half, [spec[l0], spec[l0 + 1]], [grid[l0], grid[l0 + 1]])
    xr = np.interp(half, [spec[r0], spec[r0 - 1]], [grid[r0], grid[r0 - 1]])
    return float(xr - xl)
