"""Quantum-dot emitter: spectral line, lifetime, coherence and DC-Stark tuning."""

import math
import warnings
from dataclasses import dataclass

from . import units
from .errors import DomainError, NoSolutionError
from .numerics import solve_quadratic_stable


class LinewidthWarning(UserWarning):
    """Measured linewidth is narrower than the lifetime limit."""


def lifetime_limited_linewidth(t1_ps):
    """Transform-limited FWHM in GHz, ``1 / (2 pi T1)``."""
    if not (t1_ps > 0 and math.isfinite(t1_ps)):
        raise DomainError(f"t1 must be > 0 ps, got {t1_ps!r}")
    return 1.0 / (2.0 * math.pi * t1_ps * 1e-3)  # ps -> ns gives GHz


@dataclass(frozen=True)
class Emitter:
    """Two-level emitter.

    ``stark_p`` is in meV/(kV/cm) and ``stark_beta`` in meV/(kV/cm)**2.
    ``linewidth`` (GHz) is the measured spectral FWHM and is kept independent
    of ``tau_c`` (the visibility coherence time).
    """

    lambda0: float
    t1: float = 700.0
    tau_c: float = 151.0
    linewidth: float = 12.0
    eta_int: float = 1.0
    stark_p: float = 0.0
    stark_beta: float = 0.0

    def __post_init__(self):
        if not (self.lambda0 > 0 and math.isfinite(self.lambda0)):
            raise DomainError(f"lambda0 must be > 0 nm, got {self.lambda0!r}")
        if not self.t1 > 0:
            raise DomainError(f"t1 must be > 0 ps, got {self.t1!r}")
        if not self.tau_c > 0:
            raise DomainError(f"tau_c must be > 0 ps, got {self.tau_c!r}")
        if not 0.0 <= self.eta_int <= 1.0:
            raise DomainError(f"eta_int must lie in [0, 1], got {self.eta_int!r}")
        if not (self.linewidth >= 0 and math.isfinite(self.linewidth)):
            raise DomainError(f"linewidth must be finite and >= 0, got {self.linewidth!r}")
        if not (math.isfinite(self.stark_p) and math.isfinite(self.stark_beta)):
            raise DomainError("Stark coefficients must be finite")
        if self.below_lifetime_limit():
            warnings.warn(
                f"linewidth {self.linewidth} GHz is below the lifetime limit "
                f"{lifetime_limited_linewidth(self.t1):.4g} GHz for T1 = {self.t1} ps",
                LinewidthWarning,
                stacklevel=3,
            )

    def below_lifetime_limit(self):
        return self.linewidth < lifetime_limited_linewidth(self.t1)


@dataclass(frozen=True)
class ElectrodePair:
    voltage: float  # V
    gap: float  # um

    def __post_init__(self):
        if not (self.gap > 0 and math.isfinite(self.gap)):
            raise DomainError(f"electrode gap must be > 0 um, got {self.gap!r}")
        if not math.isfinite(self.voltage):
            raise DomainError("electrode voltage must be finite")


def stark_field(e):
    """Parallel-plate field in kV/cm (1 V/um = 10 kV/cm)."""
    if not e.gap > 0:
        raise DomainError(f"electrode gap must be > 0 um, got {e.gap!r}")
    return e.voltage / e.gap * 10.0


def stark_shift(em, field):
    """Energy and wavelength shift at ``field`` kV/cm.

    ``dE = -p F - beta F**2`` in meV. The wavelength shift is reported with
    red shift positive, so a lowered transition energy gives ``dlam > 0``.
    """
    if not math.isfinite(field):
        raise DomainError(f"field must be finite, got {field!r}")
    de = -em.stark_p * field - em.stark_beta * field * field
    dlam = units.energy_shift_to_wavelength_shift(-de, em.lambda0)
    return de + 0.0, dlam + 0.0


def required_field_for_shift(em, de_target):
    """Smallest field ``F >= 0`` with ``p F + beta F**2 = |de_target|``."""
    if not math.isfinite(de_target):
        raise DomainError(f"target shift must be finite, got {de_target!r}")
    p, beta = em.stark_p, em.stark_beta
    if p == 0.0 and beta == 0.0:
        raise NoSolutionError("emitter has no Stark response (p = beta = 0)")
    target = abs(de_target)
    if target == 0.0:
        return 0.0
    roots = [r for r in solve_quadratic_stable(beta, p, -target) if r >= 0.0]
    if not roots:
        raise NoSolutionError(
            f"no non-negative field reaches |dE| = {target} meV with p={p}, beta={beta}"
        )
    return min(roots)
