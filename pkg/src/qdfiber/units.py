"""Unit conversions between wavelength, frequency, linewidth and photon energy.

Conventions: wavelengths in nm, absolute frequencies in THz, frequency
shifts/linewidths in GHz, photon energies in meV.
"""

import numpy as np

from .errors import DomainError

#: speed of light, m/s (exact)
C_M_PER_S = 299_792_458.0
#: speed of light expressed in nm * GHz
C_NM_GHZ = C_M_PER_S  # 1 m/s = 1e9 nm / 1e9 ns -> nm*GHz
#: h*c in eV*nm
HC_EV_NM = 1239.8420


def _finite(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return arr


def _positive_wavelength(lam):
    arr = _finite("wavelength", lam)
    if np.any(arr <= 0):
        raise DomainError(f"wavelength must be > 0 nm, got {lam!r}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def wavelength_to_frequency(lam_nm):
    """Optical frequency in THz for a vacuum wavelength in nm."""
    lam = _positive_wavelength(lam_nm)
    # c [nm*GHz] / lam [nm] = GHz
    return _out(C_NM_GHZ / lam / 1e3)


def frequency_to_wavelength(nu_thz):
    nu = _finite("frequency", nu_thz)
    if np.any(nu <= 0):
        raise DomainError(f"frequency must be > 0 THz, got {nu_thz!r}")
    return _out(C_NM_GHZ / (nu * 1e3))


def linewidth_nm_to_ghz(dlam_nm, lam_nm):
    """Convert a wavelength interval to a frequency interval, ``c*dlam/lam**2``.

    The sign of ``dlam_nm`` is preserved (no red/blue flip is applied).
    """
    dlam = _finite("wavelength shift", dlam_nm)
    lam = _positive_wavelength(lam_nm)
    return _out(C_NM_GHZ * dlam / (lam * lam))


def ghz_to_nm(dnu_ghz, lam_nm):
    """Inverse of :func:`linewidth_nm_to_ghz`."""
    dnu = _finite("frequency shift", dnu_ghz)
    lam = _positive_wavelength(lam_nm)
    return _out(dnu * (lam * lam) / C_NM_GHZ)


def energy_shift_to_wavelength_shift(de_mev, lam_nm):
    """Wavelength interval (nm) matching an energy interval (meV) at ``lam_nm``.

    Magnitude conversion ``lam**2 * dE / (h c)``; the sign of ``de_mev`` is
    carried through unchanged. Callers that need the red-shift-positive
    convention negate the energy shift themselves (see ``emitter.stark_shift``).
    """
    de = _finite("energy shift", de_mev)
    lam = _positive_wavelength(lam_nm)
    return _out(lam * lam * (de * 1e-3) / HC_EV_NM)


def wavelength_shift_to_energy_shift(dlam_nm, lam_nm):
    dlam = _finite("wavelength shift", dlam_nm)
    lam = _positive_wavelength(lam_nm)
    return _out(dlam * HC_EV_NM / (lam * lam) * 1e3)


def photon_energy_mev(lam_nm):
    lam = _positive_wavelength(lam_nm)
    return _out(HC_EV_NM / lam * 1e3)

