"""Headline-number reproduction suite, shared by ``paper-check`` and the tests.

Each criterion fixes its own physical inputs. The scenario only supplies the
seed, Monte Carlo sizes, timing and binning, so a shrunken scenario gives a
faster (and possibly failing) check rather than a different question.
"""

import copy
import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arrayyield, budget, cavity, coupling, emitter, units
from .photonstats import hbt, hom, source
from .runs import hom_analysis


@dataclass
class Check:
    label: str
    value: object
    target: str
    ok: bool


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return bool(self.checks) and all(c.ok for c in self.checks)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        failed = [c.label for c in self.checks if not c.ok]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        return f"{status} [{self.number:2d}] {self.title}{tail}"

    def add(self, label, value, target, ok):
        self.checks.append(Check(label, value, target, bool(ok)))


def _near(value, target, tol):
    return abs(value - target) <= tol


def crit_efficiency(cfg):
    r = CriterionResult(1, "efficiency chain: count rate <-> fiber coupling")
    eta = budget.coupling_from_countrate(80.0, 1.0, 0.356, 2.57)
    r.add("eta_coupling", eta, "0.0902 +- 0.0005", _near(eta, 0.0902, 5e-4))
    gamma = budget.countrate(budget.RateModel(80.0, 1.0, 0.0902, 0.356))
    r.add("gamma_forward_mhz", gamma, "2.57 +- 0.01", _near(gamma, 2.57, 0.01))
    return r


def crit_stark(cfg):
    r = CriterionResult(2, "electrode field and 1 meV planning shift")
    f = emitter.stark_field(emitter.ElectrodePair(160.0, 7.7))
    r.add("field_kv_per_cm", f, "207.8 +- 0.1", _near(f, 207.8, 0.1))
    dl = units.energy_shift_to_wavelength_shift(1.0, 1237.0)
    r.add("shift_nm_for_1mev", dl, "1.234 +- 0.001", _near(dl, 1.234, 1e-3))
    return r


def crit_hbt(cfg, threads=1):
    r = CriterionResult(3, "HBT Monte Carlo g2(0) against the oracle")
    mu = hbt.background_for_g2(0.06)
    back = hbt.g2_zero_analytic(mu)
    r.add("mu_bg_roundtrip", back, "g2(mu) = 0.06 +- 1e-12", _near(back, 0.06, 1e-12))
    train = source.PulseTrain(cfg["train"]["rep_rate"], int(cfg["train"]["hbt_pulses"]), cfg["seed"])
    em = emitter.Emitter(cfg["emitter"]["lambda0"], t1=cfg["emitter"]["t1"])
    h = hbt.simulate_hbt(train, source.SourceNoise(mu_bg=mu), em,
                         bin_width=cfg["hbt"]["bin_width"],
                         span_periods=cfg["hbt"]["span_periods"], threads=threads)
    est = hbt.g2_zero_from_histogram(h, train.period_ps, int(cfg["hbt"]["n_side"]))
    r.add("n_pulses", train.n_pulses, ">= 1e7", train.n_pulses >= 10_000_000)
    r.add("g2_within_3sigma", est.value, f"0.0600 +- 3 x {est.stderr:.2g}",
          _near(est.value, 0.06, 3 * est.stderr))
    r.add("g2_within_band", est.value, "0.06 +- 0.02", _near(est.value, 0.06, 0.02))
    return r


def crit_hom(cfg, threads=1):
    r = CriterionResult(4, "HOM visibility and coherence time recovery")
    mu = hbt.background_for_g2(0.06)
    g2 = hbt.g2_zero_analytic(mu)
    overlap = 0.66 / (1.0 - 2.0 * g2)
    v0 = hom.hom_visibility_model(g2, 0.0, 1.0, overlap)
    r.add("v0_model", v0, "0.66 +- 1e-12", _near(v0, 0.66, 1e-12))
    noise = source.SourceNoise(mu_bg=mu, tau_c=151.0)
    em = emitter.Emitter(cfg["emitter"]["lambda0"], t1=cfg["emitter"]["t1"], tau_c=151.0)
    delay = source.DelayLine(cfg["delay"]["length"], cfg["delay"]["group_index"])
    n = int(cfg["train"]["hom_pulses"])
    hists = []
    for offset, pol in ((0, "co"), (1, "cross"), (2, "cross")):
        train = source.PulseTrain(cfg["train"]["rep_rate"], n, (cfg["seed"] + offset) % 2**64)
        hists.append(hom.simulate_hom(train, noise, em, delay, pol, overlap=overlap,
                                      bin_width=cfg["hom"]["bin_width"], threads=threads))
    interfering = hists[0].total_starts * (1.0 - min(1.0, 2.0 * g2))
    r.add("interfering_pairs", interfering, ">= 1e6", interfering >= 1e6)
    fit, control, _ = hom_analysis(*hists, cfg["hom"]["fit_span"])
    r.add("v0_fit", fit.v0, "0.66 +- 0.02", _near(fit.v0, 0.66, 0.02))
    r.add("tau_c_fit_ps", fit.tau_c, "151 +- 7", _near(fit.tau_c, 151.0, 7.0))
    r.add("cross_control_v", control.v0, "0 +- 0.01", _near(control.v0, 0.0, 0.01))
    return r


def crit_coupling(cfg):
    r = CriterionResult(5, "Gaussian fiber-coupling bracket")
    theta0 = coupling.divergence_from_enclosed_fraction(0.60, 7.0)
    w_beam = coupling.waist_from_divergence(theta0, 1237.0)
    w_fiber = coupling.mode_field_radius(coupling.SMF28, 1237.0)
    r.add("beam_waist_um", w_beam, "2.18 +- 0.005", _near(w_beam, 2.18, 5e-3))
    r.add("fiber_mode_radius_um", w_fiber, "4.38 +- 0.01", _near(w_fiber, 4.38, 1e-2))
    eta = coupling.gaussian_overlap(w_beam, w_fiber, 0.0)
    r.add("eta_bracket", eta, "[0.50, 0.72]", 0.50 <= eta <= 0.72)
    one = coupling.gaussian_overlap(3.0, 3.0, 0.0)
    r.add("equal_waists", one, "1 +- 1e-12", _near(one, 1.0, 1e-12))
    e1 = coupling.gaussian_overlap(3.0, 3.0, 3.0)
    r.add("offset_equals_waist", e1, "exp(-1)", _near(e1, math.exp(-1.0), 1e-15))
    return r


def crit_fiber(cfg):
    r = CriterionResult(6, "fiber NA and acceptance angle")
    na = coupling.numerical_aperture(coupling.FiberSpec(4.07, 1.452, 1.447))
    r.add("numerical_aperture", na, "0.1204 +- 0.0001", _near(na, 0.1204, 1e-4))
    ang = math.degrees(math.asin(na))
    r.add("acceptance_half_angle_deg", ang, "7 +- 0.15", _near(ang, 7.0, 0.15))
    return r


def crit_yield(cfg):
    r = CriterionResult(7, "yield planning at 4% per device")
    p = 0.04
    e = arrayyield.expected_devices_per_channel(p)
    r.add("devices_per_channel", e, "25 exactly", e == 25.0)
    pa = arrayyield.prob_at_least_k(p, 60, 1)
    r.add("p_at_least_1_in_60", pa, "0.9136 +- 1e-4", _near(pa, 0.9136, 1e-4))
    trials = int(cfg["plan"]["mc_trials"])
    mc, se = arrayyield.mc_prob_at_least_k(p, 60, 1, trials, cfg["seed"])
    r.add("mc_trials", trials, ">= 1e6", trials >= 1_000_000)
    r.add("mc_within_3sigma", mc, f"{pa:.5f} +- 3 x {se:.2g}", _near(mc, pa, 3 * se))
    return r


def crit_detuning(cfg):
    r = CriterionResult(8, "wavelength detuning to frequency")
    d1 = units.linewidth_nm_to_ghz(0.024, 1237.0)
    r.add("ghz_for_0.024nm", d1, "4.70 +- 0.01", _near(d1, 4.70, 0.01))
    d2 = units.linewidth_nm_to_ghz(0.144, 1237.0)
    r.add("ghz_for_0.144nm", d2, "28.2 +- 0.1", _near(d2, 28.2, 0.1))
    worst = 0.0
    for dl in (0.024, 0.144, 1e-6, 3.7):
        back = units.ghz_to_nm(units.linewidth_nm_to_ghz(dl, 1237.0), 1237.0)
        worst = max(worst, abs(back - dl) / dl)
    r.add("roundtrip_rel_error", worst, "<= 1e-12", worst <= 1e-12)
    return r


def crit_purcell(cfg):
    r = CriterionResult(9, "Purcell factor, cavity linewidth and lifetime")
    mode = cavity.CavityMode(1249.0, 4000.0, 120.0)
    f0 = cavity.purcell(mode, 1249.0)
    r.add("purcell_on_resonance", f0, "120 exactly", f0 == 120.0)
    w = cavity.fwhm(mode)
    # quoted to four decimals: half a unit in the last place
    r.add("fwhm_nm", w, "0.3123 +- 5e-5", _near(w, 0.3123, 5e-5 + 1e-12))
    fh = cavity.purcell_detuned(mode, w / 2.0)
    r.add("purcell_half_fwhm", fh, "60 exactly", fh == 60.0)
    t = cavity.enhanced_lifetime(700.0, mode, 1249.0)
    r.add("enhanced_lifetime_ps", t, "5.79 +- 0.01", _near(t, 5.79, 0.01))
    return r


def crit_determinism(cfg):
    from .cli import main  # local: the CLI imports this module

    r = CriterionResult(10, "hbt/hom artifacts identical for 1, 4 and 16 threads")
    n = int(cfg["acceptance"]["determinism_pulses"])
    small = copy.deepcopy(cfg)
    small["train"]["hbt_pulses"] = n
    small["train"]["hom_pulses"] = n
    with tempfile.TemporaryDirectory() as tmp:
        scen = Path(tmp) / "scenario.json"
        from .reporting import write_json

        write_json(scen, small)
        for cmd in ("hbt", "hom"):
            blobs = []
            for threads in (1, 4, 16):
                out = Path(tmp) / f"{cmd}-{threads}"
                code = main([cmd, "--scenario", str(scen), "--threads", str(threads),
                             "--out", str(out), "--quiet"])
                if code != 0:
                    r.add(f"{cmd}_threads_{threads}_exit", code, "0", False)
                    blobs.append(None)
                    continue
                blobs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
            same = blobs[0] is not None and all(b == blobs[0] for b in blobs[1:])
            files = len(blobs[0]) if blobs[0] else 0
            r.add(f"{cmd}_identical", f"{files} files", "byte-identical", same)
    return r


def crit_etalon(cfg):
    r = CriterionResult(11, "electrode etalon multiplier")
    lam = 1237.0
    phase = coupling.default_phase_offset(800.0, lam)
    worst_period = 0.0
    bounds_ok = True
    max_ok = True
    for refl in (cfg["etalon"]["reflect_amp"], 0.5, 0.9):
        et = coupling.EtalonConfig(800.0, refl, phase)
        g = np.linspace(100.0, 2000.0, 19001)
        m = coupling.electrode_etalon_factor(et, lam, gap=g)
        m2 = coupling.electrode_etalon_factor(et, lam, gap=g + lam / 2.0)
        worst_period = max(worst_period, float(np.max(np.abs(m2 - m) / np.abs(m))))
        lo = (1.0 - refl) / (1.0 + refl)
        bounds_ok &= bool(np.all(m >= lo - 1e-12) and np.all(m <= 1.0 + 1e-12))
        at = coupling.electrode_etalon_factor(et, lam, gap=800.0)
        side = coupling.electrode_etalon_factor(et, lam, gap=np.array([799.9, 800.1]))
        max_ok &= bool(abs(at - 1.0) <= 1e-12 and np.all(side < at))
    r.add("period_rel_error", worst_period, "<= 1e-9", worst_period <= 1e-9)
    r.add("maximum_at_800nm", max_ok, "true", max_ok)
    r.add("bounded", bounds_ok, "[(1-r)/(1+r), 1]", bounds_ok)
    return r


CRITERIA = (
    crit_efficiency, crit_stark, crit_hbt, crit_hom, crit_coupling, crit_fiber,
    crit_yield, crit_detuning, crit_purcell, crit_determinism, crit_etalon,
)
_THREADED = {crit_hbt, crit_hom}


def run_criterion(fn, cfg, threads=1):
    t0 = time.perf_counter()
    res = fn(cfg, threads) if fn in _THREADED else fn(cfg)
    res.seconds = time.perf_counter() - t0
    return res


def run_all(cfg, threads=1, echo=None):
    """Run every criterion; ``echo`` (if given) receives each PASS/FAIL line."""
    out = []
    for fn in CRITERIA:
        res = run_criterion(fn, cfg, threads)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
