"""Parameter sweeps of scalar metrics over one scenario entry."""

import copy
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import arrayyield, budget, cavity, coupling, emitter, scenario
from .errors import ConfigError
from .photonstats import hbt, hom


def _etalon_factor(cfg):
    return coupling.electrode_etalon_factor(scenario.build_etalon(cfg), cfg["emitter"]["lambda0"])


def _beam_waist(cfg):
    ff = cfg["farfield"]
    theta0 = coupling.divergence_from_enclosed_fraction(ff["fraction"], ff["theta"])
    return coupling.waist_from_divergence(theta0, cfg["emitter"]["lambda0"])


def _overlap(cfg):
    lam = cfg["emitter"]["lambda0"]
    w_fiber = coupling.mode_field_radius(scenario.build_fiber(cfg), lam)
    return coupling.gaussian_overlap(_beam_waist(cfg), w_fiber, 0.0)


def _eta_coupling(cfg):
    chain = scenario.build_chain(cfg)
    return budget.coupling_from_countrate(
        cfg["train"]["rep_rate"], cfg["emitter"]["eta_int"],
        budget.system_efficiency(chain), cfg["budget"]["gamma"],
    )


def _stark_shift_nm(cfg):
    field = emitter.stark_field(scenario.build_electrodes(cfg))
    return emitter.stark_shift(scenario.build_emitter(cfg), field)[1]


def _hom_v0(cfg):
    n = cfg["noise"]
    g2 = hbt.g2_zero_analytic(scenario.mu_background(cfg))
    return hom.hom_visibility_model(g2, n["pol_angle"], n["intensity_ratio"], n["overlap"])


def _prob_at_least_k(cfg):
    p = cfg["plan"]
    return arrayyield.prob_at_least_k(scenario.match_probability(cfg), p["scans"], p["k"])


def _devices_needed(cfg):
    p = cfg["plan"]
    return float(arrayyield.devices_needed(scenario.match_probability(cfg), p["k"], p["confidence"]))


def _purcell(cfg):
    return cavity.purcell(scenario.build_cavity(cfg), cfg["emitter"]["lambda0"])


#: metric name -> (function of a validated scenario, unit)
METRICS = {
    "etalon_factor": (_etalon_factor, ""),
    "mode_overlap": (_overlap, ""),
    "coupling_efficiency": (lambda c: _overlap(c) * _etalon_factor(c), ""),
    "beam_waist": (_beam_waist, "um"),
    "mode_field_radius": (
        lambda c: coupling.mode_field_radius(scenario.build_fiber(c), c["emitter"]["lambda0"]), "um"),
    "v_number": (
        lambda c: coupling.v_number(scenario.build_fiber(c), c["emitter"]["lambda0"]).value, ""),
    "purcell": (_purcell, ""),
    "enhanced_lifetime": (
        lambda c: cavity.enhanced_lifetime(
            c["emitter"]["t1"], scenario.build_cavity(c), c["emitter"]["lambda0"]), "ps"),
    "beta_factor": (lambda c: cavity.beta_factor(_purcell(c), c["cavity"]["leak_rate"]), ""),
    "stark_field": (lambda c: emitter.stark_field(scenario.build_electrodes(c)), "kV/cm"),
    "stark_shift_nm": (_stark_shift_nm, "nm"),
    "system_efficiency": (lambda c: budget.system_efficiency(scenario.build_chain(c)), ""),
    "eta_coupling": (_eta_coupling, ""),
    "g2_analytic": (lambda c: hbt.g2_zero_analytic(scenario.mu_background(c)), ""),
    "hom_v0_model": (_hom_v0, ""),
    "p_match": (scenario.match_probability, ""),
    "prob_at_least_k": (_prob_at_least_k, ""),
    "devices_needed": (_devices_needed, "devices"),
}


@dataclass(frozen=True)
class SweepSpec:
    path: str
    start: float
    stop: float
    count: int
    scale: str = "linear"
    metric: str = "etalon_factor"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError(f"sweep.count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ConfigError("sweep.start must be below sweep.stop")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"sweep.scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and not self.start > 0:
            raise ConfigError("a log sweep needs sweep.start > 0")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown sweep metric {self.metric!r}")

    @classmethod
    def from_scenario(cls, cfg):
        s = cfg["sweep"]
        return cls(s["path"], s["start"], s["stop"], int(s["count"]), s["scale"], s["metric"])

    def grid(self):
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


def _evaluate(cfg, spec, value):
    point = copy.deepcopy(cfg)
    scenario.set_path(point, spec.path, float(value))
    problems = scenario.validate(point)
    if problems:
        raise ConfigError(f"sweep point {spec.path}={value!r} is invalid: {problems[0]}")
    return float(METRICS[spec.metric][0](point))


def run_sweep(cfg, spec, threads=1):
    """Metric at every grid point, as ``(grid, values)``; order is the grid order."""
    scenario.get_path(cfg, spec.path)
    grid = spec.grid()
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        values = list(pool.map(lambda v: _evaluate(cfg, spec, v), grid))
    return grid, np.array(values)


def local_maxima(grid, values):
    """Interior local maxima, refined by a parabola through three points.

    The refinement assumes locally uniform grid spacing.
    """
    out = []
    for i in range(1, len(values) - 1):
        a, b, c = values[i - 1], values[i], values[i + 1]
        if b > a and b >= c:
            den = a - 2 * b + c
            shift = 0.5 * (a - c) / den if den != 0 else 0.0
            out.append(float(grid[i] + shift * (grid[i + 1] - grid[i])))
    return out


def maxima_spacing(grid, values):
    """Spacings between consecutive local maxima (empty if fewer than two)."""
    m = local_maxima(grid, values)
    return [b - a for a, b in zip(m, m[1:])] if len(m) > 1 else []
