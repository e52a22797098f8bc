"""Excitation, noise and delay-line descriptions shared by the virtual experiments."""

import math
from dataclasses import dataclass

from ..errors import DomainError
from ..units import C_M_PER_S


@dataclass(frozen=True)
class PulseTrain:
    rep_rate: float = 80.0  # MHz
    n_pulses: int = 1
    seed: int = 42

    def __post_init__(self):
        if not (self.rep_rate > 0 and math.isfinite(self.rep_rate)):
            raise DomainError(f"rep_rate must be > 0 MHz, got {self.rep_rate!r}")
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 1:
            raise DomainError(f"n_pulses must be a positive integer, got {self.n_pulses!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def period_ps(self):
        return 1e6 / self.rep_rate


@dataclass(frozen=True)
class SourceNoise:
    """Imperfections of the source and interferometer.

    ``tau_c`` is the 1/e decay constant of the HOM visibility versus
    detection-time separation, the quantity a single-exponential fit returns.
    """

    mu_bg: float = 0.0
    tau_c: float = 151.0  # ps
    pol_angle: float = 0.0  # degrees
    intensity_ratio: float = 1.0

    def __post_init__(self):
        if not (self.mu_bg >= 0 and math.isfinite(self.mu_bg)):
            raise DomainError(f"mu_bg must be finite and >= 0, got {self.mu_bg!r}")
        if not self.tau_c > 0:
            raise DomainError(f"tau_c must be > 0 ps, got {self.tau_c!r}")
        if not 0 <= self.pol_angle <= 90:
            raise DomainError(f"pol_angle must lie in [0, 90] degrees, got {self.pol_angle!r}")
        if not (self.intensity_ratio > 0 and math.isfinite(self.intensity_ratio)):
            raise DomainError(f"intensity_ratio must be > 0, got {self.intensity_ratio!r}")


@dataclass(frozen=True)
class DelayLine:
    length: float  # m
    group_index: float = 1.468

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"delay length must be > 0 m, got {self.length!r}")
        if not self.group_index > 0:
            raise DomainError(f"group_index must be > 0, got {self.group_index!r}")


def delay_of(d):
    """Propagation delay of the line in ns."""
    return d.length * d.group_index / C_M_PER_S * 1e9
