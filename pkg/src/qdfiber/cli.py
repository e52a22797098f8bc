"""Command-line front end: ``qdfiber <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 runtime error,
4 acceptance failure (``paper-check`` only).
"""

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__, acceptance, runs, scenario
from .errors import ConfigError, QdfiberError
from .photonstats.histogram import write_histogram
from .reporting import config_hash, write_csv, write_json

log = logging.getLogger("qdfiber")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_ACCEPTANCE = 0, 2, 3, 4

COMMANDS = {
    "budget": "efficiency chain and count-rate inversion to fiber coupling",
    "stark": "electrode field and Stark tuning tables",
    "coupling": "fiber overlap, misalignment curves and electrode etalon scan",
    "hbt": "pulsed HBT Monte Carlo and g2(0) extraction",
    "hom": "HOM Monte Carlo, visibility curve and decay fit",
    "yield": "device-matching yield planning and array sampling",
    "sweep": "sweep one scenario entry and record a scalar metric",
    "paper-check": "run the headline-number acceptance suite",
    "validate": "check a scenario and list every violation",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qdfiber",
        description="Fiber-integrated quantum-dot single-photon source modelling toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, text in COMMANDS.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--scenario", metavar="FILE", help="scenario JSON (merged onto defaults)")
        p.add_argument("--seed", type=int, help="64-bit seed (default: scenario seed, 42)")
        p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
        p.add_argument("--out", metavar="DIR", help="artifact directory (default: <output>/<command>)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE",
                       help="override a scenario entry, e.g. --set electrode.gap=5.0 (repeatable)")
        p.add_argument("--quiet", action="store_true", help="only print errors")
    return parser


def _load(args):
    cfg = scenario.load_scenario(args.scenario)
    cfg = scenario.apply_overrides(cfg, args.overrides)
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _write(out_dir, command, cfg, output):
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in output.tables.items():
        write_csv(out_dir / f"{name}.csv", header, rows)
        files.append(f"{name}.csv")
    for name, (hist, sidecar) in output.histograms.items():
        write_histogram(hist, out_dir / f"{name}.csv", sidecar)
        files += [f"{name}.csv", f"{name}.json"]
    report = {
        "command": command,
        "version": __version__,
        "config_hash": config_hash(cfg),
        "seed": cfg["seed"],
        "config": cfg,
        "results": output.results,
        "artifacts": sorted(files),
    }
    write_json(out_dir / "report.json", report)
    return report


def _summary(results, say):
    for key, value in results.items():
        if isinstance(value, (int, float, str, bool)) or value is None:
            say(f"  {key} = {value}")


def _dispatch(args, cfg, say):
    cmd = args.command
    threads = max(1, args.threads)
    if cmd == "budget":
        return runs.run_budget(cfg)
    if cmd == "stark":
        return runs.run_stark(cfg)
    if cmd == "coupling":
        return runs.run_coupling(cfg)
    if cmd == "hbt":
        return runs.run_hbt(cfg, threads)
    if cmd == "hom":
        return runs.run_hom(cfg, threads)
    if cmd == "yield":
        return runs.run_yield(cfg)
    if cmd == "sweep":
        return runs.run_sweep_cmd(cfg, threads)
    if cmd == "paper-check":
        results = acceptance.run_all(cfg, threads, echo=print)
        rows = [(r.number, c.label, c.value, c.target, c.ok) for r in results for c in r.checks]
        out = runs.RunOutput(
            {
                "passed": all(r.passed for r in results),
                "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                              "checks": [{"label": c.label, "value": c.value,
                                          "target": c.target, "ok": c.ok} for c in r.checks]}
                             for r in results],
            },
            {"acceptance": (["criterion", "check", "value", "target", "ok"], rows)},
        )
        for r in results:
            log.info("criterion %d took %.1f s", r.number, r.seconds)
        return out
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.quiet else logging.INFO
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(level)
    log.propagate = False
    say = (lambda s: None) if args.quiet else print

    try:
        cfg = _load(args)
        problems = scenario.validate(cfg)
        if args.command == "validate":
            if problems:
                for p in problems:
                    print(p)
                return EXIT_CONFIG
            print("scenario is valid")
            return EXIT_OK
        if problems:
            for p in problems:
                print(f"config error: {p}", file=sys.stderr)
            return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    t0 = time.perf_counter()
    try:
        output = _dispatch(args, cfg, say)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QdfiberError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out_dir = Path(args.out) if args.out else Path(cfg["output"]) / args.command
    report = _write(out_dir, args.command, cfg, output)
    log.info("%s finished in %.2f s; artifacts in %s", args.command, time.perf_counter() - t0, out_dir)
    if args.command == "paper-check":
        return EXIT_OK if output.results["passed"] else EXIT_ACCEPTANCE
    say(f"{args.command}: seed {cfg['seed']}, config {report['config_hash'][:12]}")
    _summary(output.results, say)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
