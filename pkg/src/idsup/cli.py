"""Command-line runner: scenario suites, partition builds, the divergence sweep.

Reports are JSON-lines by default (CSV on request), append-only per run, and
always start with a manifest echo so a report file identifies the run that
produced it.  Exit codes: 0 all checks passed, 1 at least one check failed
or a tree invariant was violated, 2 configuration error (bad file, bad flag,
unknown check, invalid measure).
"""

import argparse
import csv
import dataclasses
import json
import os
import sys

import numpy as np

from .checks import CHECKS, PURPOSE, DegenerateScenarioError, check_example_ex, run_scenario_checks
from .mc import estimate_esup
from .measures import MeasureOnT, find_mu0, label_profile, uniform_measure
from .metrics import PhiFamily
from .partitions import beta_functional, build_partition_tree, validate_tree
from .scenario import ScenarioError, load_scenario, make_example_ex, random_scenario

__all__ = ["main", "cmd_run", "cmd_partition", "cmd_sweep"]

SEED_ENV = "IDSUP_SEED"

CHECK_FIELDS = [
    "name",
    "lhs",
    "rhs",
    "slack_or_constant",
    "passed",
    "std_errors_used",
    "replications",
]


class ConfigError(ValueError):
    pass


def _parse_kv(spec, defaults, converters, what):
    out = dict(defaults)
    if spec:
        for part in spec.split(","):
            if not part:
                continue
            if "=" not in part:
                raise ConfigError(f"{what}: expected key=value, got {part!r}")
            key, value = part.split("=", 1)
            if key not in converters:
                raise ConfigError(f"{what}: unknown key {key!r}")
            try:
                out[key] = converters[key](value)
            except ValueError as exc:
                raise ConfigError(f"{what}: bad value for {key!r}: {exc}") from exc
    return out


def generate_scenario(spec):
    """specs: random:seed=7,atoms=6,points=5,scale=1.0
    or       example:x_min=0.05,x_max=2.0,atoms=2000,seed=0,reps=10000"""
    kind, _, rest = spec.partition(":")
    if kind == "random":
        kv = _parse_kv(
            rest,
            {"seed": 0, "atoms": 6, "points": 5, "scale": 1.0},
            {"seed": int, "atoms": int, "points": int, "scale": float},
            spec,
        )
        return random_scenario(kv["seed"], kv["atoms"], kv["points"], kv["scale"])
    if kind == "example":
        kv = _parse_kv(
            rest,
            {"x_min": 0.05, "x_max": 2.0, "atoms": 2000, "seed": 0, "reps": 10_000},
            {"x_min": float, "x_max": float, "atoms": int, "seed": int, "reps": int},
            spec,
        )
        return make_example_ex(kv["x_min"], kv["x_max"], kv["atoms"], seed=kv["seed"], replications=kv["reps"])
    raise ConfigError(f"unknown generator kind {kind!r} (want random: or example:)")


def _resolve_seed(flag_seed):
    """Precedence: explicit --seed, then the environment, then the scenario."""
    if flag_seed is not None:
        return int(flag_seed)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return None


def _json_line(record):
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


class ReportWriter:
    """Append-only report stream; one manifest echo, then records."""

    def __init__(self, path, fmt):
        self.fmt = fmt
        self._own = path is not None
        self._fh = open(path, "a", encoding="utf-8", newline="") if path else sys.stdout
        self._csv = csv.writer(self._fh) if fmt == "csv" else None

    def manifest(self, manifest):
        if self.fmt == "csv":
            self._fh.write("# manifest " + _json_line(manifest) + "\n")
            self._csv.writerow(["record", "scenario"] + CHECK_FIELDS)
        else:
            self._fh.write(_json_line({"record": "manifest", **manifest}) + "\n")

    def check(self, scenario_label, result):
        row = dataclasses.asdict(result)
        if self.fmt == "csv":
            self._csv.writerow(["check", scenario_label] + [row[k] for k in CHECK_FIELDS])
        else:
            self._fh.write(_json_line({"record": "check", "scenario": scenario_label, **row}) + "\n")

    def record(self, kind, scenario_label, payload):
        if self.fmt == "csv":
            self._csv.writerow([kind, scenario_label, _json_line(payload)])
        else:
            self._fh.write(_json_line({"record": kind, "scenario": scenario_label, **payload}) + "\n")

    def close(self):
        self._fh.flush()
        if self._own:
            self._fh.close()


def _sandwich_payload(report):
    return {
        "esup_mean": report.esup_mc.mean,
        "esup_std_error": report.esup_mc.std_error,
        "replications": report.esup_mc.replications,
        "upper_parts": report.upper_parts,
        "lower_chain": report.lower_chain,
        "decomposition": report.decomposition,
        "measured_ratio_up": report.measured_ratio_up,
        "measured_ratio_down": report.measured_ratio_down,
    }


def cmd_run(args):
    sources = [("path", p) for p in args.scenario] + [("spec", g) for g in args.generate]
    if not sources:
        raise ConfigError("need at least one --scenario or --generate")
    if args.checks == "all":
        names = list(CHECKS)
    else:
        names = [n for n in args.checks.split(",") if n]
        for n in names:
            if n not in CHECKS:
                raise ConfigError(f"unknown check {n!r}; known: {', '.join(CHECKS)}")
    seed = _resolve_seed(args.seed)
    manifest = {
        "command": "run",
        "scenarios": [label for _, label in sources],
        "checks": names,
        "seed": seed,
        "replications": args.reps,
        "out": args.out,
        "format": args.format,
    }
    writer = ReportWriter(args.out, args.format)
    writer.manifest(manifest)
    all_passed = True
    try:
        for kind, label in sources:
            scenario = load_scenario(label) if kind == "path" else generate_scenario(label)
            results, reports = run_scenario_checks(scenario, names, reps=args.reps, seed=seed)
            for res in results:
                all_passed &= res.passed
                writer.check(label, res)
            for rep in reports:
                writer.record("sandwich", label, _sandwich_payload(rep))
    finally:
        writer.close()
    return 0 if all_passed else 1


def _parse_mu(spec, n_points, phi):
    if spec == "uniform":
        return uniform_measure(n_points)
    if spec == "mu0":
        return find_mu0(phi, 4)[0]
    if spec.startswith("point:"):
        idx = int(spec.split(":", 1)[1])
        if not 0 <= idx < n_points:
            raise ConfigError(f"point index {idx} out of range")
        w = np.full(n_points, 1e-12)
        w[idx] = 1.0
        return MeasureOnT(w / w.sum())
    try:
        weights = np.array([float(x) for x in spec.split(",")], dtype=np.float64)
    except ValueError as exc:
        raise ConfigError(f"bad mu spec {spec!r}") from exc
    if weights.size != n_points:
        raise ConfigError(f"mu has {weights.size} weights but the scenario has {n_points} points")
    return MeasureOnT(weights)


def cmd_partition(args):
    scenario = load_scenario(args.scenario)
    phi = PhiFamily(scenario)
    mu = _parse_mu(args.mu, phi.n_points, phi)
    profile = label_profile(phi, mu, 5)
    tree = build_partition_tree(phi, profile)
    violations = validate_tree(tree, phi)
    manifest = {
        "command": "partition",
        "scenario": args.scenario,
        "mu": args.mu,
        "out": args.out,
    }
    writer = ReportWriter(args.out, "jsonl")
    writer.manifest(manifest)
    try:
        ids = scenario.family.point_ids
        payload = {
            "r": tree.r,
            "mu_weights": [float(w) for w in mu.weights],
            "levels": [
                [
                    {
                        "label": cell.label,
                        "members": [ids[t] for t in cell.members],
                    }
                    for cell in level
                ]
                for level in tree.levels
            ],
            "beta": beta_functional(phi, tree, validate=False),
            "violations": violations,
        }
        writer.record("partition", args.scenario, payload)
    finally:
        writer.close()
    return 1 if violations else 0


def cmd_sweep(args):
    x_mins = [float(x) for x in args.x_mins.split(",") if x]
    if not x_mins:
        raise ConfigError("need at least one x_min")
    seed = _resolve_seed(args.seed)
    seed = 0 if seed is None else seed
    manifest = {
        "command": "sweep",
        "x_mins": x_mins,
        "x_max": args.x_max,
        "atoms": args.atoms,
        "seed": seed,
        "replications": args.reps,
        "out": args.out,
        "format": args.format,
    }
    writer = ReportWriter(args.out, args.format)
    writer.manifest(manifest)
    try:
        for x_min in x_mins:
            scen = make_example_ex(x_min, args.x_max, args.atoms, seed=seed, replications=args.reps)
            est = estimate_esup(scen, "signed", args.reps, seed, PURPOSE["example_ex"])
            writer.record(
                "sweep_point",
                f"example:x_min={x_min:g}",
                {"x_min": x_min, "esup_mean": est.mean, "esup_std_error": est.std_error},
            )
        for res in check_example_ex(None, reps=args.reps, seed=seed, full=False):
            writer.check("example", res)
    finally:
        writer.close()
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="idsup",
        description="Inequality checks, partition builds, and sweeps for suprema "
        "of infinitely divisible processes on finite atomic measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run checks on scenarios and write a report")
    run.add_argument("--scenario", action="append", default=[], help="scenario JSON path (repeatable)")
    run.add_argument("--generate", action="append", default=[], help="generator spec (repeatable)")
    run.add_argument("--checks", default="all", help="comma list of check names, or 'all'")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--reps", type=int, default=None)
    run.add_argument("--out", default=None, help="report path (append); stdout if omitted")
    run.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    run.set_defaults(func=cmd_run)

    part = sub.add_parser("partition", help="build and validate one labeled partition tree")
    part.add_argument("--scenario", required=True)
    part.add_argument("--mu", default="uniform", help="uniform | mu0 | point:<idx> | w1,w2,...")
    part.add_argument("--out", default=None)
    part.set_defaults(func=cmd_partition)

    sweep = sub.add_parser("sweep", help="divergence sweep for the inverse-square family")
    sweep.add_argument("--x-mins", default="0.2,0.1,0.05,0.02,0.01")
    sweep.add_argument("--x-max", type=float, default=2.0)
    sweep.add_argument("--atoms", type=int, default=4000)
    sweep.add_argument("--reps", type=int, default=20_000)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, ScenarioError, DegenerateScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
