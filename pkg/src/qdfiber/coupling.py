"""Gaussian-beam model of cavity far field coupled into a step-index fiber.

Lengths: fiber and beam radii in um, wavelengths in nm, electrode gap in nm.
Angles in degrees unless a name says otherwise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RangeError

#: LP11 cutoff of a step-index fiber
SINGLE_MODE_CUTOFF = 2.405
#: validity range of the Marcuse LP01 approximation
MARCUSE_V_RANGE = (0.8, 2.5)
#: paraxial limit for waist_from_divergence, degrees
PARAXIAL_MAX_DEG = 30.0


@dataclass(frozen=True)
class FiberSpec:
    core_radius: float  # um
    n_core: float
    n_clad: float

    def __post_init__(self):
        if not self.core_radius > 0:
            raise DomainError(f"core_radius must be > 0 um, got {self.core_radius!r}")
        if not self.n_clad > 0:
            raise DomainError(f"n_clad must be > 0, got {self.n_clad!r}")
        if not self.n_core > self.n_clad:
            raise DomainError(f"n_core ({self.n_core}) must exceed n_clad ({self.n_clad})")


#: Corning SMF-28 with the indices used for the misalignment study
SMF28 = FiberSpec(core_radius=8.14 / 2, n_core=1.452, n_clad=1.447)


@dataclass(frozen=True)
class FarField:
    theta0: float  # 1/e^2 half-angle, degrees
    wavelength: float  # nm

    def __post_init__(self):
        if not 0 < self.theta0 < 90:
            raise DomainError(f"theta0 must lie in (0, 90) degrees, got {self.theta0!r}")
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be > 0 nm, got {self.wavelength!r}")


@dataclass(frozen=True)
class EtalonConfig:
    gap: float  # nm
    reflect_amp: float = 0.0
    phase_offset: float = 0.0  # rad

    def __post_init__(self):
        if not self.gap > 0:
            raise DomainError(f"etalon gap must be > 0 nm, got {self.gap!r}")
        if not 0 <= self.reflect_amp < 1:
            raise DomainError(f"reflect_amp must lie in [0, 1), got {self.reflect_amp!r}")
        if not math.isfinite(self.phase_offset):
            raise DomainError("phase_offset must be finite")


@dataclass(frozen=True)
class VNumber:
    value: float
    multimode_warning: bool

    def __float__(self):
        return self.value


def numerical_aperture(f):
    if not f.n_core > f.n_clad:
        raise DomainError(f"n_core ({f.n_core}) must exceed n_clad ({f.n_clad})")
    return math.sqrt(f.n_core**2 - f.n_clad**2)


def acceptance_half_angle(f):
    """Fiber acceptance half-angle ``asin(NA)`` in degrees."""
    return math.degrees(math.asin(numerical_aperture(f)))


def v_number(f, lam_nm):
    """Normalised frequency ``2 pi a NA / lambda``, flagged when above LP11 cutoff."""
    if not lam_nm > 0:
        raise DomainError(f"wavelength must be > 0 nm, got {lam_nm!r}")
    v = 2.0 * math.pi * f.core_radius * numerical_aperture(f) / (lam_nm * 1e-3)
    return VNumber(v, v > SINGLE_MODE_CUTOFF)


def marcuse_ratio(v):
    """``w / a`` of the LP01 mode from the Marcuse polynomial."""
    return 0.65 + 1.619 * v**-1.5 + 2.879 * v**-6


def mode_field_radius(f, lam_nm):
    """1/e^2 intensity radius (um) of the LP01 mode (Marcuse)."""
    v = v_number(f, lam_nm).value
    lo, hi = MARCUSE_V_RANGE
    if not lo <= v <= hi:
        raise RangeError(f"Marcuse approximation needs {lo} <= V <= {hi}; got V = {v:.4f}")
    return f.core_radius * marcuse_ratio(v)


def divergence_from_enclosed_fraction(fraction, theta):
    """1/e^2 half-angle of a Gaussian far field with ``fraction`` inside ``theta``."""
    if not 0 < fraction < 1:
        raise DomainError(f"fraction must lie in (0, 1), got {fraction!r}")
    if not 0 < theta < 90:
        raise DomainError(f"theta must lie in (0, 90) degrees, got {theta!r}")
    return theta * math.sqrt(-2.0 / math.log1p(-fraction))


def enclosed_power_fraction(theta0, theta):
    """Power fraction of a Gaussian far field within half-angle ``theta``."""
    if not 0 < theta0 < 90:
        raise DomainError(f"theta0 must lie in (0, 90) degrees, got {theta0!r}")
    if not 0 < theta < 90:
        raise DomainError(f"theta must lie in (0, 90) degrees, got {theta!r}")
    return -math.expm1(-2.0 * theta * theta / (theta0 * theta0))


def waist_from_divergence(theta0, lam_nm):
    """Gaussian waist (um) from the small-angle relation ``w0 = lambda / (pi theta0)``."""
    if not 0 < theta0 < PARAXIAL_MAX_DEG:
        raise RangeError(
            f"theta0 must lie in (0, {PARAXIAL_MAX_DEG}) degrees for the paraxial "
            f"relation, got {theta0!r}"
        )
    if not lam_nm > 0:
        raise DomainError(f"wavelength must be > 0 nm, got {lam_nm!r}")
    return lam_nm * 1e-3 / (math.pi * math.radians(theta0))


def gaussian_overlap(w1, w2, d=0.0):
    """Power coupling between two Gaussian modes with waists w1, w2 and lateral offset d.

    ``eta = (2 w1 w2 / (w1**2 + w2**2))**2 * exp(-2 d**2 / (w1**2 + w2**2))``
    """
    if not (w1 > 0 and w2 > 0):
        raise DomainError(f"waists must be > 0, got {w1!r}, {w2!r}")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise DomainError("offset must be finite and >= 0")
    s = w1 * w1 + w2 * w2
    eta = (2.0 * w1 * w2 / s) ** 2 * np.exp(-2.0 * d * d / s)
    return float(eta) if eta.ndim == 0 else eta


def half_coupling_offset(w1, w2):
    """Lateral offset at which the overlap drops to half its aligned value."""
    return math.sqrt((w1 * w1 + w2 * w2) * math.log(2.0) / 2.0)


def _check_grid(offsets):
    offsets = np.asarray(offsets, dtype=float)
    if offsets.ndim != 1 or offsets.size == 0:
        raise DomainError("offset grid must be a non-empty 1-D array")
    if not np.all(np.isfinite(offsets)) or np.any(np.diff(offsets) <= 0):
        raise DomainError("offset grid must be finite and strictly increasing")
    return offsets


def coupling_vs_cavity_offset(w_beam, w_fiber, offsets):
    """``(offsets, eta)`` for a lateral cavity-to-core misalignment scan (signed grid ok)."""
    offsets = _check_grid(offsets)
    return offsets, gaussian_overlap(w_beam, w_fiber, np.abs(offsets))


def coupling_vs_dipole_offset(w_mode, offsets):
    """``(offsets, relative eta)`` for a dipole displaced inside the cavity mode.

    The dipole samples the normalised mode intensity ``exp(-2 dx**2 / w**2)``.
    """
    if not w_mode > 0:
        raise DomainError(f"mode radius must be > 0 um, got {w_mode!r}")
    offsets = _check_grid(offsets)
    return offsets, np.exp(-2.0 * offsets**2 / w_mode**2)


def default_phase_offset(gap_nm=800.0, lam_nm=1237.0):
    """Phase putting an etalon maximum at ``gap_nm``, wrapped to [-pi, pi)."""
    phi = -4.0 * math.pi * gap_nm / lam_nm
    return (phi + math.pi) % (2.0 * math.pi) - math.pi


def electrode_etalon_factor(cfg, lam_nm, gap=None):
    """Two-beam modulation ``(1 + r cos(4 pi g / lambda + phi)) / (1 + r)``.

    ``gap`` (nm, scalar or array) overrides ``cfg.gap`` for scans.
    """
    g = cfg.gap if gap is None else np.asarray(gap, dtype=float)
    r = cfg.reflect_amp
    m = (1.0 + r * np.cos(4.0 * np.pi * g / lam_nm + cfg.phase_offset)) / (1.0 + r)
    return float(m) if np.ndim(m) == 0 else m
