"""Scenario files: loading, ``--set`` overrides, validation and object builders.

A scenario is a JSON object. User files are merged key by key onto the
packaged default scenario, so a file only needs the entries it changes.
Paths name entries with dots and list indices, e.g. ``electrode.gap`` or
``chain[0].transmission``.
"""

import copy
import json
import math
import re
from importlib import resources
from pathlib import Path

from . import arrayyield, budget, cavity, coupling, emitter
from .errors import ConfigError, DomainError
from .photonstats import hbt, source

_TOKEN = re.compile(r"([^.\[\]]+)|\[(\d+)\]")


def default_scenario():
    text = resources.files("qdfiber").joinpath("data/default_scenario.json").read_text()
    return json.loads(text)


def parse_json(text, name="<scenario>"):
    """Parse JSON, reporting syntax errors with line and column."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{name}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _merge(base, over, path=""):
    for key, value in over.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"{where}: unknown scenario entry")
        if isinstance(base[key], dict) and isinstance(value, dict):
            _merge(base[key], value, where)
        else:
            base[key] = value
    return base


def load_scenario(path=None):
    """Default scenario, optionally overlaid with the JSON file at ``path``."""
    cfg = default_scenario()
    if path is None:
        return cfg
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc.strerror}") from None
    user = parse_json(text, str(path))
    if not isinstance(user, dict):
        raise ConfigError(f"{path}: scenario must be a JSON object")
    return _merge(cfg, user)


def split_path(path):
    tokens = []
    pos = 0
    for m in _TOKEN.finditer(path):
        if m.start() != pos and path[pos:m.start()] != ".":
            raise ConfigError(f"malformed path {path!r}")
        tokens.append(m.group(1) if m.group(1) is not None else int(m.group(2)))
        pos = m.end()
    if not tokens or pos != len(path):
        raise ConfigError(f"malformed path {path!r}")
    return tokens


def _walk(cfg, tokens, path):
    node = cfg
    for tok in tokens:
        try:
            node = node[tok]
        except (KeyError, IndexError, TypeError):
            raise ConfigError(f"{path}: no such scenario entry") from None
    return node


def get_path(cfg, path):
    return _walk(cfg, split_path(path), path)


def set_path(cfg, path, value):
    """Replace an existing entry; new entries cannot be created this way."""
    tokens = split_path(path)
    node = _walk(cfg, tokens[:-1], path)
    _walk(node, tokens[-1:], path)
    node[tokens[-1]] = value


def apply_overrides(cfg, assignments):
    """Apply ``PATH=VALUE`` strings; values are JSON, falling back to plain strings."""
    cfg = copy.deepcopy(cfg)
    for item in assignments:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like PATH=VALUE")
        path, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        set_path(cfg, path.strip(), value)
    return cfg


# --- validation -------------------------------------------------------------

def _num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check(pred, text):
    def run(v):
        if not _num(v):
            return "must be a finite number"
        return None if pred(v) else text
    return run


def _int_check(lo):
    def run(v):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
            return "must be an integer"
        return None if v >= lo else f"must be >= {lo}"
    return run


def _nullable(check):
    return lambda v: None if v is None else check(v)


def _choice(*options):
    return lambda v: None if v in options else f"must be one of {', '.join(options)}"


POSITIVE = _check(lambda v: v > 0, "must be > 0")
NONNEG = _check(lambda v: v >= 0, "must be >= 0")
FINITE = _check(lambda v: True, "")
UNIT = _check(lambda v: 0 <= v <= 1, "must lie in [0, 1]")
UNIT_OPEN = _check(lambda v: 0 < v < 1, "must lie in (0, 1)")
UNIT_HALF_OPEN = _check(lambda v: 0 <= v < 1, "must lie in [0, 1)")
ANGLE = _check(lambda v: 0 <= v <= 90, "must lie in [0, 90] degrees")
ANGLE_OPEN = _check(lambda v: 0 < v < 90, "must lie in (0, 90) degrees")


def _seed(v):
    if isinstance(v, bool) or not isinstance(v, int):
        return "must be an integer"
    return None if 0 <= v < 2**64 else "must be an unsigned 64-bit integer"


FIELDS = {
    "seed": _seed,
    "output": lambda v: None if isinstance(v, str) and v else "must be a non-empty string",
    "emitter.lambda0": POSITIVE,
    "emitter.t1": POSITIVE,
    "emitter.tau_c": POSITIVE,
    "emitter.linewidth": NONNEG,
    "emitter.eta_int": UNIT,
    "emitter.stark_p": FINITE,
    "emitter.stark_beta": FINITE,
    "electrode.voltage": FINITE,
    "electrode.gap": POSITIVE,
    "stark.voltage_steps": _int_check(2),
    "stark.planning_shift": FINITE,
    "cavity.lambda_c": POSITIVE,
    "cavity.q": POSITIVE,
    "cavity.f_max": NONNEG,
    "cavity.leak_rate": POSITIVE,
    "cavity.geometry.radial_period": POSITIVE,
    "cavity.geometry.center_disk_radius": POSITIVE,
    "cavity.geometry.hole_size": POSITIVE,
    "cavity.geometry.axial_period": POSITIVE,
    "cavity.geometry.membrane_thickness": POSITIVE,
    "cavity.geometry.membrane_index": POSITIVE,
    "fiber.core_radius": POSITIVE,
    "fiber.n_core": POSITIVE,
    "fiber.n_clad": POSITIVE,
    "farfield.fraction": UNIT_OPEN,
    "farfield.theta": ANGLE_OPEN,
    "etalon.gap": POSITIVE,
    "etalon.reflect_amp": UNIT_HALF_OPEN,
    "etalon.phase_offset": _nullable(FINITE),
    "etalon.scan_start": POSITIVE,
    "etalon.scan_stop": POSITIVE,
    "etalon.scan_count": _int_check(2),
    "coupling.offset_max": POSITIVE,
    "coupling.offset_count": _int_check(2),
    "coupling.mode_radius": POSITIVE,
    "train.rep_rate": POSITIVE,
    "train.hbt_pulses": _int_check(1),
    "train.hom_pulses": _int_check(2),
    "noise.mu_bg": _nullable(NONNEG),
    "noise.g2_target": UNIT_HALF_OPEN,
    "noise.pol_angle": ANGLE,
    "noise.intensity_ratio": POSITIVE,
    "noise.overlap": UNIT,
    "hbt.bin_width": POSITIVE,
    "hbt.span_periods": _check(lambda v: v >= 3, "must be >= 3 repetition periods"),
    "hbt.n_side": _int_check(3),
    "hom.bin_width": POSITIVE,
    "hom.fit_span": POSITIVE,
    "delay.length": POSITIVE,
    "delay.group_index": POSITIVE,
    "budget.gamma": NONNEG,
    "budget.eta_sys_target": _nullable(UNIT),
    "plan.window": POSITIVE,
    "plan.shape": _choice("uniform", "tabulated"),
    "plan.capture_bandwidth": POSITIVE,
    "plan.occupancy": _nullable(NONNEG),
    "plan.p_target": UNIT_HALF_OPEN,
    "plan.scans": _int_check(1),
    "plan.k": _int_check(1),
    "plan.confidence": UNIT_OPEN,
    "plan.mc_trials": _int_check(1),
    "plan.residual": _choice("uniform", "triangular"),
    "plan.transfer_offset": FINITE,
    "sweep.start": FINITE,
    "sweep.stop": FINITE,
    "sweep.count": _int_check(2),
    "sweep.scale": _choice("linear", "log"),
    "acceptance.determinism_pulses": _int_check(2),
}


def _list_of_numbers(cfg, path, check, out, min_len=0):
    try:
        values = get_path(cfg, path)
    except ConfigError as exc:
        out.append(str(exc))
        return None
    if not isinstance(values, list):
        out.append(f"{path}: must be a list")
        return None
    if len(values) < min_len:
        out.append(f"{path}: needs at least {min_len} entries")
    ok = True
    for i, v in enumerate(values):
        msg = check(v)
        if msg:
            out.append(f"{path}[{i}]: {msg}")
            ok = False
    return values if ok else None


def validate(cfg):
    """Every violated invariant as ``"path: message"``; empty when valid."""
    out = []
    for path, check in FIELDS.items():
        try:
            value = get_path(cfg, path)
        except ConfigError as exc:
            out.append(str(exc))
            continue
        msg = check(value)
        if msg:
            out.append(f"{path}: {msg}")
    bad = set(m.split(":", 1)[0] for m in out)

    if not bad & {"fiber.n_core", "fiber.n_clad"}:
        if not cfg["fiber"]["n_core"] > cfg["fiber"]["n_clad"]:
            out.append("fiber.n_core: must exceed fiber.n_clad")
    if not bad & {"etalon.scan_start", "etalon.scan_stop"}:
        if not cfg["etalon"]["scan_start"] < cfg["etalon"]["scan_stop"]:
            out.append("etalon.scan_stop: must exceed etalon.scan_start")
    if not bad & {"plan.k", "plan.scans"} and cfg["plan"]["k"] > cfg["plan"]["scans"]:
        out.append("plan.k: must not exceed plan.scans")

    # transmission chain: at most one unknown (null) entry
    chain = cfg.get("chain")
    if not isinstance(chain, list):
        out.append("chain: must be a list of {name, transmission} entries")
    else:
        unknown = 0
        for i, item in enumerate(chain):
            if not isinstance(item, dict) or set(item) != {"name", "transmission"}:
                out.append(f"chain[{i}]: must have exactly the keys name and transmission")
                continue
            t = item["transmission"]
            if t is None:
                unknown += 1
            else:
                msg = UNIT(t)
                if msg:
                    out.append(f"chain[{i}].transmission: {msg} (entry {item['name']!r})")
        if unknown > 1:
            out.append("chain: at most one entry may have an unknown (null) transmission")

    _list_of_numbers(cfg, "budget.port_couplings", UNIT, out)
    support = _list_of_numbers(cfg, "plan.support", FINITE, out)
    if support is not None:
        if len(support) != 2 or not support[0] < support[1]:
            out.append("plan.support: must be [min, max] with min < max")
            support = None
    targets = _list_of_numbers(cfg, "plan.targets", POSITIVE, out, min_len=1)
    if targets and support:
        for i, t in enumerate(targets):
            if not support[0] <= t <= support[1]:
                out.append(f"plan.targets[{i}]: {t} nm lies outside plan.support")
    if "plan.shape" not in bad and cfg["plan"]["shape"] == "tabulated":
        grid = _list_of_numbers(cfg, "plan.grid", FINITE, out, min_len=2)
        dens = _list_of_numbers(cfg, "plan.density", NONNEG, out, min_len=2)
        if grid is not None and dens is not None:
            if len(grid) != len(dens) or any(b <= a for a, b in zip(grid, grid[1:])):
                out.append("plan.grid: must be increasing and match plan.density in length")

    sw = cfg.get("sweep", {})
    if isinstance(sw, dict):
        try:
            target = get_path(cfg, sw.get("path", ""))
            if not _num(target):
                out.append(f"sweep.path: {sw.get('path')!r} does not name a numeric entry")
        except ConfigError:
            out.append(f"sweep.path: {sw.get('path')!r} does not resolve")
        if "sweep.start" not in bad and "sweep.stop" not in bad:
            if not sw["start"] < sw["stop"]:
                out.append("sweep.stop: must exceed sweep.start")
            elif sw.get("scale") == "log" and not sw["start"] > 0:
                out.append("sweep.start: must be > 0 on a log grid")
        from .sweep import METRICS  # local: sweep builds on this module

        if sw.get("metric") not in METRICS:
            out.append(f"sweep.metric: unknown metric {sw.get('metric')!r}")
    return out


def require_valid(cfg):
    problems = validate(cfg)
    if problems:
        raise ConfigError("invalid scenario:\n  " + "\n  ".join(problems))
    return cfg


# --- builders ---------------------------------------------------------------

def build_emitter(cfg):
    return emitter.Emitter(**cfg["emitter"])


def build_electrodes(cfg):
    return emitter.ElectrodePair(**cfg["electrode"])


def build_cavity(cfg):
    c = cfg["cavity"]
    return cavity.CavityMode(c["lambda_c"], c["q"], c["f_max"])


def build_geometry(cfg):
    return cavity.HcbgGeometry(**cfg["cavity"]["geometry"])


def build_fiber(cfg):
    return coupling.FiberSpec(**cfg["fiber"])


def build_etalon(cfg):
    e = cfg["etalon"]
    phase = e["phase_offset"]
    if phase is None:
        phase = coupling.default_phase_offset(800.0, cfg["emitter"]["lambda0"])
    return coupling.EtalonConfig(e["gap"], e["reflect_amp"], phase)


def mu_background(cfg):
    n = cfg["noise"]
    return n["mu_bg"] if n["mu_bg"] is not None else hbt.background_for_g2(n["g2_target"])


def build_noise(cfg):
    n = cfg["noise"]
    return source.SourceNoise(mu_background(cfg), cfg["emitter"]["tau_c"],
                              n["pol_angle"], n["intensity_ratio"])


def build_train(cfg, kind, seed=None):
    t = cfg["train"]
    n = t["hbt_pulses"] if kind == "hbt" else t["hom_pulses"]
    return source.PulseTrain(t["rep_rate"], int(n), cfg["seed"] if seed is None else seed)


def build_delay(cfg):
    return source.DelayLine(**cfg["delay"])


def build_chain(cfg):
    return budget.ComponentChain(
        [budget.Component(c["name"], c["transmission"]) for c in cfg["chain"]]
    )


def build_distribution(cfg):
    p = cfg["plan"]
    return arrayyield.EnsembleDistribution(
        tuple(p["support"]), p["shape"], tuple(p["grid"]), tuple(p["density"])
    )


def build_plan(cfg):
    p = cfg["plan"]
    return arrayyield.ChannelPlan(tuple(p["targets"]), p["window"])


def plan_occupancy(cfg):
    """Configured occupancy, or the one calibrated to ``plan.p_target``."""
    p = cfg["plan"]
    if p["occupancy"] is not None:
        return p["occupancy"]
    dist = build_distribution(cfg)
    width = min(2.0 * p["window"], p["capture_bandwidth"])
    t = p["targets"][0]
    mass = dist.mass(t - width / 2.0, t + width / 2.0)
    if mass <= 0:
        raise DomainError("target window holds no ensemble probability mass")
    return arrayyield.calibrate_occupancy(p["p_target"], mass)


def match_probability(cfg):
    p = cfg["plan"]
    return arrayyield.per_device_match_probability(
        build_distribution(cfg), p["targets"][0], p["window"], p["capture_bandwidth"],
        plan_occupancy(cfg),
    )
