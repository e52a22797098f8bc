"""Transmission-chain accounting and the count-rate / coupling inversion.

The detected rate obeys ``gamma = rep_rate * eta_int * eta_coupling * eta_sys``
(rates in MHz).
"""

import math
from dataclasses import dataclass, field

from .errors import DomainError, InconsistencyError

UNKNOWN = None


@dataclass(frozen=True)
class Component:
    name: str
    transmission: float | None  # None marks the single unknown entry


@dataclass
class ComponentChain:
    components: list = field(default_factory=list)

    def __post_init__(self):
        self.components = [
            c if isinstance(c, Component) else Component(*c) for c in self.components
        ]
        unknown = 0
        for c in self.components:
            if c.transmission is None:
                unknown += 1
            elif not 0.0 <= c.transmission <= 1.0:
                raise DomainError(
                    f"transmission of {c.name!r} must lie in [0, 1], got {c.transmission!r}"
                )
        if unknown > 1:
            raise DomainError("a chain may contain at most one unknown transmission")

    @property
    def unknowns(self):
        return [c for c in self.components if c.transmission is None]

    def known_product(self):
        return math.prod(c.transmission for c in self.components if c.transmission is not None)

    def table(self):
        return [(c.name, c.transmission) for c in self.components]


def system_efficiency(chain):
    if chain.unknowns:
        raise DomainError(
            f"chain has an unknown entry ({chain.unknowns[0].name!r}); use solve_unknown"
        )
    return chain.known_product()


def solve_unknown(chain, target_total):
    """Transmission the unknown entry needs for the chain to total ``target_total``."""
    if not 0.0 <= target_total <= 1.0:
        raise DomainError(f"target total must lie in [0, 1], got {target_total!r}")
    if len(chain.unknowns) != 1:
        raise DomainError(f"need exactly one unknown entry, found {len(chain.unknowns)}")
    known = chain.known_product()
    if known == 0.0:
        raise DomainError("product of known transmissions is zero")
    t = target_total / known
    if t > 1.0:
        raise InconsistencyError(
            f"unknown {chain.unknowns[0].name!r} would need transmission {t:.4g} > 1"
        )
    return t


def _check_eff(name, value):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class RateModel:
    rep_rate: float  # MHz
    eta_int: float = 1.0
    eta_coupling: float = 0.0
    eta_sys: float = 1.0

    def __post_init__(self):
        if not self.rep_rate >= 0:
            raise DomainError(f"rep_rate must be >= 0 MHz, got {self.rep_rate!r}")
        _check_eff("eta_int", self.eta_int)
        _check_eff("eta_coupling", self.eta_coupling)
        _check_eff("eta_sys", self.eta_sys)


def countrate(m):
    """Detected photon rate in MHz."""
    return m.rep_rate * m.eta_int * m.eta_coupling * m.eta_sys


def coupling_from_countrate(rep_rate, eta_int, eta_sys, gamma):
    """First-fiber coupling efficiency implied by a measured count rate."""
    if not gamma >= 0:
        raise DomainError(f"count rate must be >= 0, got {gamma!r}")
    denom = rep_rate * eta_int * eta_sys
    if not denom > 0:
        raise DomainError(
            f"rep_rate * eta_int * eta_sys must be > 0 "
            f"(rep_rate={rep_rate}, eta_int={eta_int}, eta_sys={eta_sys})"
        )
    eta = gamma / denom
    if eta > 1.0:
        raise InconsistencyError(
            f"implied coupling {eta:.4g} > 1: gamma={gamma} MHz exceeds "
            f"rep_rate*eta_int*eta_sys = {denom:.4g} MHz"
        )
    return eta
