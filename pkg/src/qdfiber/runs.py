"""Computations behind each CLI subcommand.

Every ``run_*`` function takes a validated scenario and returns a
:class:`RunOutput`: the numbers for ``report.json``, plot-ready tables and
coincidence histograms. Writing them to disk is the CLI's job.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import arrayyield, budget, cavity, coupling, emitter, scenario, units
from .errors import DomainError, NoSolutionError
from .photonstats import fitting, hbt, hom, source
from .sweep import SweepSpec, local_maxima, maxima_spacing, run_sweep


@dataclass
class RunOutput:
    results: dict
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    histograms: dict = field(default_factory=dict)  # name -> (histogram, sidecar dict)


def run_budget(cfg):
    """Chain total, the count-rate inversion to coupling, and per-port rates.

    A chain with one unknown entry is completed from ``budget.eta_sys_target``.
    """
    chain = scenario.build_chain(cfg)
    rep = cfg["train"]["rep_rate"]
    eta_int = cfg["emitter"]["eta_int"]
    gamma = cfg["budget"]["gamma"]
    results = {}
    rows = [(name, t) for name, t in chain.table()]
    if chain.unknowns:
        target = cfg["budget"]["eta_sys_target"]
        if target is None:
            raise DomainError("chain has an unknown entry but budget.eta_sys_target is null")
        solved = budget.solve_unknown(chain, target)
        results["solved_component"] = {"name": chain.unknowns[0].name, "transmission": solved}
        rows = [(name, solved if t is None else t) for name, t in rows]
        eta_sys = target
    else:
        eta_sys = budget.system_efficiency(chain)
    eta_c = budget.coupling_from_countrate(rep, eta_int, eta_sys, gamma)
    forward = budget.countrate(budget.RateModel(rep, eta_int, eta_c, eta_sys))
    ports = [
        (i, eta, budget.countrate(budget.RateModel(rep, eta_int, eta, eta_sys)))
        for i, eta in enumerate(cfg["budget"]["port_couplings"], start=1)
    ]
    results.update({
        "rep_rate_mhz": rep,
        "eta_int": eta_int,
        "eta_sys": eta_sys,
        "gamma_mhz": gamma,
        "eta_coupling": eta_c,
        "gamma_forward_mhz": forward,
        "ports": [{"port": i, "eta_coupling": e, "countrate_mhz": r} for i, e, r in ports],
    })
    tables = {
        "budget_chain": (["component", "transmission"], rows + [("total", eta_sys)]),
        "budget_ports": (["port", "eta_coupling", "countrate_mhz"], ports),
    }
    return RunOutput(results, tables)


def run_stark(cfg):
    em = scenario.build_emitter(cfg)
    el = scenario.build_electrodes(cfg)
    steps = int(cfg["stark"]["voltage_steps"])
    rows = []
    for v in np.linspace(0.0, el.voltage, steps):
        f = emitter.stark_field(emitter.ElectrodePair(float(v), el.gap))
        de, dl = emitter.stark_shift(em, f)
        rows.append((float(v), f, de, dl))
    field_max = emitter.stark_field(el)
    de, dl = emitter.stark_shift(em, field_max)
    plan_shift = cfg["stark"]["planning_shift"]
    results = {
        "voltage_v": el.voltage,
        "gap_um": el.gap,
        "field_kv_per_cm": field_max,
        "shift_mev": de,
        "shift_nm": dl,
        "sign_convention": "dE = -p F - beta F^2; dlambda > 0 is a red shift",
        "planning_shift_mev": plan_shift,
        "planning_shift_nm": units.energy_shift_to_wavelength_shift(plan_shift, em.lambda0),
        "lifetime_limited_linewidth_ghz": emitter.lifetime_limited_linewidth(em.t1),
        "linewidth_below_lifetime_limit": em.below_lifetime_limit(),
    }
    if em.stark_p != 0.0 or em.stark_beta != 0.0:
        try:
            results["planning_field_kv_per_cm"] = emitter.required_field_for_shift(em, plan_shift)
        except NoSolutionError as exc:
            results["planning_field_kv_per_cm"] = None
            results["planning_field_note"] = str(exc)
    header = ["voltage_v", "field_kv_per_cm", "shift_mev", "shift_nm_red_positive"]
    return RunOutput(results, {"stark_tuning": (header, rows)})


def run_coupling(cfg):
    lam = cfg["emitter"]["lambda0"]
    fib = scenario.build_fiber(cfg)
    ff = cfg["farfield"]
    vn = coupling.v_number(fib, lam)
    w_fiber = coupling.mode_field_radius(fib, lam)
    theta0 = coupling.divergence_from_enclosed_fraction(ff["fraction"], ff["theta"])
    w_beam = coupling.waist_from_divergence(theta0, lam)
    eta = coupling.gaussian_overlap(w_beam, w_fiber, 0.0)
    et = scenario.build_etalon(cfg)
    m_gap = coupling.electrode_etalon_factor(et, lam)
    co = cfg["coupling"]
    offsets = np.linspace(0.0, co["offset_max"], int(co["offset_count"]))
    _, eta_cav = coupling.coupling_vs_cavity_offset(w_beam, w_fiber, offsets)
    _, rel_dip = coupling.coupling_vs_dipole_offset(co["mode_radius"], offsets)
    e = cfg["etalon"]
    gaps = np.linspace(e["scan_start"], e["scan_stop"], int(e["scan_count"]))
    mult = coupling.electrode_etalon_factor(et, lam, gap=gaps)
    cav = scenario.build_cavity(cfg)
    em = scenario.build_emitter(cfg)
    f_p = cavity.purcell(cav, lam)
    results = {
        "wavelength_nm": lam,
        "numerical_aperture": coupling.numerical_aperture(fib),
        "acceptance_half_angle_deg": coupling.acceptance_half_angle(fib),
        "v_number": vn.value,
        "multimode_warning": vn.multimode_warning,
        "fiber_mode_radius_um": w_fiber,
        "farfield_theta0_deg": theta0,
        "beam_waist_um": w_beam,
        "mode_overlap": eta,
        "half_coupling_offset_um": coupling.half_coupling_offset(w_beam, w_fiber),
        "etalon_gap_nm": et.gap,
        "etalon_phase_offset_rad": et.phase_offset,
        "etalon_factor": m_gap,
        "coupling_with_etalon": eta * m_gap,
        "etalon_maxima_nm": local_maxima(gaps, mult),
        "cavity_fwhm_nm": cavity.fwhm(cav),
        "purcell_at_emitter": f_p,
        "enhanced_lifetime_ps": cavity.enhanced_lifetime(em.t1, cav, lam),
        "beta_factor": cavity.beta_factor(f_p, cfg["cavity"]["leak_rate"]),
        "geometry": dict(cfg["cavity"]["geometry"]),
    }
    tables = {
        "coupling_cavity_offset": (["offset_um", "eta"], list(zip(offsets, eta_cav))),
        "coupling_dipole_offset": (["offset_um", "relative_eta"], list(zip(offsets, rel_dip))),
        "etalon_scan": (["gap_nm", "multiplier"], list(zip(gaps, mult))),
    }
    return RunOutput(results, tables)


def run_hbt(cfg, threads=1, seed=None):
    train = scenario.build_train(cfg, "hbt", seed)
    noise = scenario.build_noise(cfg)
    em = scenario.build_emitter(cfg)
    h = hbt.simulate_hbt(
        train, noise, em, bin_width=cfg["hbt"]["bin_width"],
        span_periods=cfg["hbt"]["span_periods"], threads=threads,
    )
    est = hbt.g2_zero_from_histogram(h, train.period_ps, int(cfg["hbt"]["n_side"]))
    stat, p = hbt.side_peak_chi2(est.side_areas)
    analytic = hbt.g2_zero_analytic(noise.mu_bg)
    results = {
        "n_pulses": train.n_pulses,
        "mu_bg": noise.mu_bg,
        "g2_zero": est.value,
        "g2_zero_stderr": est.stderr,
        "g2_zero_analytic": analytic,
        "g2_zero_expected_windowed": hbt.g2_zero_expected(noise.mu_bg, em.t1, train.period_ps),
        "z_score": (est.value - analytic) / est.stderr if est.stderr > 0 else None,
        "zero_peak_area": est.zero_area,
        "side_peak_areas": list(est.side_areas),
        "side_peak_chi2": stat,
        "side_peak_chi2_p": p,
    }
    sidecar = {"seed": train.seed, "n_pulses": train.n_pulses, "g2_zero": est.value,
               "g2_zero_stderr": est.stderr}
    return RunOutput(results, histograms={"hbt_histogram": (h, sidecar)})


def hom_analysis(h_co, h_cross, h_ref, fit_span):
    """Visibility curve, decay fit and cross-polarised control from three histograms."""
    tau, v, s = hom.visibility_curve(h_co, h_cross)
    sel = np.abs(tau) <= fit_span
    fit = fitting.fit_exponential_decay(tau[sel], v[sel], s[sel])
    _, vc, sc = hom.visibility_curve(h_ref, h_cross)
    ctrl_tau_c = fit.tau_c if math.isfinite(fit.tau_c) else None
    if ctrl_tau_c is None:
        control = fitting.fit_exponential_decay(tau[sel], vc[sel], sc[sel])
    else:
        control = fitting.fit_exponential_decay(tau[sel], vc[sel], sc[sel], tau_c=ctrl_tau_c)
    rows = list(zip(tau, h_co.counts, h_cross.counts, v, s))
    return fit, control, rows


def run_hom(cfg, threads=1, seed=None):
    """Co-polarised run at ``seed``, cross-polarised reference at ``seed + 1``
    and an independent cross-polarised control at ``seed + 2``."""
    base = cfg["seed"] if seed is None else seed
    noise = scenario.build_noise(cfg)
    em = scenario.build_emitter(cfg)
    delay = scenario.build_delay(cfg)
    kw = dict(overlap=cfg["noise"]["overlap"], bin_width=cfg["hom"]["bin_width"], threads=threads)
    hists = {}
    for name, pol, offset in (("hom_co", "co", 0), ("hom_cross", "cross", 1),
                              ("hom_cross_control", "cross", 2)):
        train = scenario.build_train(cfg, "hom", (base + offset) % 2**64)
        hists[name] = hom.simulate_hom(train, noise, em, delay, pol, **kw)
    fit, control, rows = hom_analysis(hists["hom_co"], hists["hom_cross"],
                                      hists["hom_cross_control"], cfg["hom"]["fit_span"])
    g2 = hbt.g2_zero_analytic(noise.mu_bg)
    results = {
        "n_pairs": hists["hom_co"].total_starts,
        "v0_model": hom.hom_visibility_model(g2, noise.pol_angle, noise.intensity_ratio,
                                             cfg["noise"]["overlap"]),
        "tau_c_configured_ps": noise.tau_c,
        "v0_fit": fit.v0,
        "v0_stderr": fit.v0_err,
        "tau_c_fit_ps": fit.tau_c,
        "tau_c_stderr_ps": fit.tau_c_err,
        "fit_chi2_per_dof": fit.chi2 / max(fit.n_samples - 2, 1),
        "fit_iterations": fit.iterations,
        "control_v0": control.v0,
        "control_v0_stderr": control.v0_err,
        "delay_ns": source.delay_of(delay),
        "seeds": {"co": base, "cross": (base + 1) % 2**64, "control": (base + 2) % 2**64},
    }
    header = ["tau_ps", "counts_co", "counts_cross", "visibility", "visibility_err"]
    hist_out = {name: (h, {"seed": results["seeds"][key], "pol": pol})
                for (name, h), key, pol in zip(hists.items(), ("co", "cross", "control"),
                                               ("co", "cross", "cross"))}
    return RunOutput(results, {"hom_visibility": (header, rows)}, hist_out)


def run_yield(cfg, seed=None):
    seed = cfg["seed"] if seed is None else seed
    p_cfg = cfg["plan"]
    dist = scenario.build_distribution(cfg)
    plan = scenario.build_plan(cfg)
    plan.check_support(dist)
    occ = scenario.plan_occupancy(cfg)
    p = scenario.match_probability(cfg)
    n, k = int(p_cfg["scans"]), int(p_cfg["k"])
    analytic = arrayyield.prob_at_least_k(p, n, k)
    mc, se = arrayyield.mc_prob_at_least_k(p, n, k, int(p_cfg["mc_trials"]), seed)
    matches = arrayyield.sample_array(plan, dist, p, seed, p_cfg["residual"],
                                      p_cfg["transfer_offset"])
    lams = [m.wavelength for m in matches]
    results = {
        "occupancy": occ,
        "p_match": p,
        "expected_devices_per_channel": arrayyield.expected_devices_per_channel(p),
        "scans": n,
        "k": k,
        "prob_at_least_k": analytic,
        "prob_at_least_k_mc": mc,
        "prob_at_least_k_mc_stderr": se,
        "devices_needed": arrayyield.devices_needed(p, k, p_cfg["confidence"]),
        "confidence": p_cfg["confidence"],
    }
    rows = [(i, m.target, m.wavelength, m.residual_nm, m.residual_ghz, m.devices_scanned)
            for i, m in enumerate(matches)]
    tables = {"yield_array": (
        ["channel", "target_nm", "wavelength_nm", "residual_nm", "residual_ghz", "devices_scanned"],
        rows)}
    if len(lams) >= 2:
        st = arrayyield.pairwise_detuning_stats(lams)
        results["detuning_max_ghz"] = st["max_ghz"]
        results["detuning_mean_ghz"] = st["mean_ghz"]
        mat = st["matrix_ghz"]
        tables["yield_detuning_ghz"] = (
            ["channel"] + [f"ch{j}" for j in range(len(lams))],
            [[i] + list(mat[i]) for i in range(len(lams))])
    return RunOutput(results, tables)


def run_sweep_cmd(cfg, threads=1):
    spec = SweepSpec.from_scenario(cfg)
    grid, values = run_sweep(cfg, spec, threads)
    maxima = local_maxima(grid, values)
    results = {
        "path": spec.path,
        "metric": spec.metric,
        "grid": {"start": spec.start, "stop": spec.stop, "count": spec.count, "scale": spec.scale},
        "min": float(values.min()),
        "max": float(values.max()),
        "local_maxima": maxima,
        "maxima_spacing": maxima_spacing(grid, values),
    }
    return RunOutput(results, {"sweep": ([spec.path, spec.metric], list(zip(grid, values)))})
