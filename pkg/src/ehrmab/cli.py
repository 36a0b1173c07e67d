"""Command-line front end: simulate / upper-bound / verify / sweep.

Experiments are described by a versioned YAML config with a ``system``
section (the network model) and an ``experiment`` section (policies,
repetitions, seeding, optional sweep axis).  All commands emit CSV with a
fixed column order and floats printed at 9 significant digits, so output is
byte-stable for a fixed config and seed.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 model
mismatch (a config that parses but combines fields a variant does not
support).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import os
import sys

import yaml

from .core import EhChainParams, SystemConfig, Variant
from .lp import default_l_max, upper_bound_with_stability
from .policies import POLICY_KINDS
from .sim import ExperimentSummary, run_experiment
from .verify import run_checks

SCHEMA_VERSION = 1
SWEEP_AXES = ("n_nodes", "battery_cap", "p11")
STABILITY_WARN = 1e-6


class ConfigError(Exception):
    """Config file missing, unparsable, or semantically invalid (exit 2)."""


class ModelMismatchError(Exception):
    """Config parses but a field combination is unsupported by the chosen
    model variant (exit 3)."""


@dataclasses.dataclass
class ExperimentConfig:
    system: SystemConfig
    policies: list[str]
    repetitions: int
    base_seed: int
    sweep_axis: str | None = None
    sweep_values: list | None = None
    lmax: int | None = None
    output: str | None = None

    def sweep_points(self) -> list:
        """Sweep values, or [None] for an unswept single point."""
        return list(self.sweep_values) if self.sweep_axis else [None]

    def system_at(self, value) -> SystemConfig:
        """SystemConfig with the sweep axis substituted (value=None: as-is)."""
        if value is None:
            return self.system
        try:
            if self.sweep_axis == "p11":
                chain = dataclasses.replace(self.system.chain, p11=float(value))
                return dataclasses.replace(self.system, chain=chain)
            return dataclasses.replace(self.system, **{self.sweep_axis: int(value)})
        except ValueError as exc:
            raise ModelMismatchError(
                f"sweep {self.sweep_axis}={value}: {exc}"
            ) from exc


def _fmt(x) -> str:
    """One CSV cell; floats at 9 significant digits."""
    if x is None:
        return ""
    if isinstance(x, float):
        return "%.9g" % x
    return str(x)


def _require(mapping, key, section):
    if key not in mapping:
        raise ConfigError(f"missing key {key!r} in {section!r} section")
    return mapping[key]


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path!r}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )

    sysraw = _require(raw, "system", "config")
    if not isinstance(sysraw, dict):
        raise ConfigError("system section must be a mapping")
    chainraw = _require(sysraw, "chain", "system")
    try:
        chain = EhChainParams(
            p01=float(_require(chainraw, "p01", "chain")),
            p11=float(_require(chainraw, "p11", "chain")),
            e0=float(chainraw.get("e0", 0.5)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid chain parameters: {exc}") from exc
    variant_name = str(sysraw.get("variant", "general"))
    try:
        variant = Variant(variant_name)
    except ValueError:
        names = ", ".join(v.value for v in Variant)
        raise ConfigError(
            f"unknown variant {variant_name!r} (expected one of: {names})"
        ) from None
    try:
        system = SystemConfig(
            n_nodes=int(_require(sysraw, "n_nodes", "system")),
            n_channels=int(_require(sysraw, "n_channels", "system")),
            battery_cap=int(_require(sysraw, "battery_cap", "system")),
            p_operative=float(_require(sysraw, "p_operative", "system")),
            chain=chain,
            beta=float(sysraw.get("beta", 1.0)),
            horizon=int(sysraw.get("horizon", 1000)),
            variant=variant,
        )
    except ValueError as exc:
        # field combinations the variant rejects are a model mismatch, not
        # a parse failure
        if "variant" in str(exc):
            raise ModelMismatchError(str(exc)) from exc
        raise ConfigError(f"invalid system section: {exc}") from exc

    expraw = raw.get("experiment", {})
    if not isinstance(expraw, dict):
        raise ConfigError("experiment section must be a mapping")
    policies = list(expraw.get("policies", ["myopic"]))
    if not policies:
        raise ConfigError("policies must be non-empty")
    for kind in policies:
        if kind not in POLICY_KINDS:
            raise ConfigError(
                f"unknown policy {kind!r} (expected one of: {', '.join(POLICY_KINDS)})"
            )
    repetitions = int(expraw.get("repetitions", 1))
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")

    sweep_axis = None
    sweep_values = None
    sweepraw = expraw.get("sweep")
    if sweepraw is not None:
        if not isinstance(sweepraw, dict):
            raise ConfigError("sweep section must be a mapping")
        sweep_axis = str(_require(sweepraw, "axis", "sweep"))
        if sweep_axis not in SWEEP_AXES:
            raise ConfigError(
                f"sweep axis must be one of {', '.join(SWEEP_AXES)}"
            )
        sweep_values = list(_require(sweepraw, "values", "sweep"))
        if not sweep_values or any(float(v) <= 0 for v in sweep_values):
            raise ConfigError("sweep values must be a non-empty positive list")

    lmax = expraw.get("lmax")
    if lmax is not None:
        lmax = int(lmax)
        if lmax < 1:
            raise ConfigError("lmax must be >= 1")

    cfg = ExperimentConfig(
        system=system,
        policies=policies,
        repetitions=repetitions,
        base_seed=int(expraw.get("base_seed", 0)),
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        lmax=lmax,
        output=expraw.get("output"),
    )
    for value in cfg.sweep_points():  # surface mismatches before any work
        cfg.system_at(value)
    return cfg


def _n_jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("EHRMAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"EHRMAB_JOBS={env!r} is not an integer") from exc
    return 1


def _map_ordered(fn, tasks, jobs: int) -> list:
    """Apply fn to tasks, optionally on a process pool; results keep the
    task order regardless of completion order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _write_rows(header: list[str], rows: list[list], out: str | None) -> None:
    text = "\n".join(
        [",".join(header)] + [",".join(_fmt(c) for c in row) for row in rows]
    ) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _sim_task(task) -> ExperimentSummary:
    system, policy, repetitions, base_seed = task
    return run_experiment(system, policy, repetitions, base_seed)


def _simulate_rows(cfg: ExperimentConfig, jobs: int) -> list[list]:
    points = cfg.sweep_points()
    tasks = [
        (cfg.system_at(v), kind, cfg.repetitions, cfg.base_seed)
        for kind in cfg.policies
        for v in points
    ]
    summaries = _map_ordered(_sim_task, tasks, jobs)
    rows = []
    for (system, kind, _, _), s in zip(tasks, summaries):
        value = getattr(system, cfg.sweep_axis, None) if cfg.sweep_axis else None
        if cfg.sweep_axis == "p11":
            value = system.chain.p11
        rows.append(
            [kind, cfg.sweep_axis or "", value,
             s.mean_per_ts, s.std, s.ci95, s.overflow_rate]
        )
    return rows


SIM_HEADER = ["policy", "sweep_axis", "sweep_value",
              "mean_per_ts", "std", "ci95", "overflow_rate"]
UB_HEADER = ["sweep_axis", "sweep_value", "upper_bound", "l_max",
             "stability_delta"]


def _ub_task(task):
    system, lmax = task
    return upper_bound_with_stability(system, lmax)


def _ub_rows(cfg: ExperimentConfig, lmax: int | None, jobs: int) -> list[list]:
    points = cfg.sweep_points()
    tasks = [(cfg.system_at(v), lmax) for v in points]
    results = _map_ordered(_ub_task, tasks, jobs)
    rows = []
    for (system, _), (ub, used_lmax, delta) in zip(tasks, results):
        value = getattr(system, cfg.sweep_axis, None) if cfg.sweep_axis else None
        if cfg.sweep_axis == "p11":
            value = system.chain.p11
        if delta > STABILITY_WARN:
            print(
                f"warning: upper bound moved by {delta:.3g} (relative) when "
                f"L_max doubled from {used_lmax}",
                file=sys.stderr,
            )
        rows.append([cfg.sweep_axis or "", value, ub, used_lmax, delta])
    return rows


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.base_seed = args.seed
    rows = _simulate_rows(cfg, _n_jobs(args))
    _write_rows(SIM_HEADER, rows, args.out or cfg.output)
    return 0


def cmd_upper_bound(args) -> int:
    cfg = load_config(args.config)
    lmax = args.lmax if args.lmax is not None else cfg.lmax
    rows = _ub_rows(cfg, lmax, _n_jobs(args))
    _write_rows(UB_HEADER, rows, args.out or cfg.output)
    return 0


def cmd_sweep(args) -> int:
    """Simulated means and the LP upper bound on one combined grid; every
    row carries the upper bound of its sweep point in the last column."""
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.base_seed = args.seed
    jobs = _n_jobs(args)
    lmax = args.lmax if args.lmax is not None else cfg.lmax
    sim_rows = _simulate_rows(cfg, jobs)
    ub_rows = _ub_rows(cfg, lmax, jobs)
    ub_by_value = {row[1]: row[2] for row in ub_rows}
    rows = [row + [ub_by_value[row[2]]] for row in sim_rows]
    _write_rows(SIM_HEADER + ["upper_bound"], rows, args.out or cfg.output)
    return 0


def cmd_verify(args) -> int:
    reports = run_checks(args.scope, samples=args.samples)
    width = max(len(r.lemma) for r in reports)
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        print(
            f"{r.lemma:<{width}}  samples={r.samples:<6d} "
            f"max_violation={r.max_violation:.3e}  {status}"
        )
    if args.out:
        rows = [
            [r.lemma, r.samples, r.max_violation, str(r.passed).lower()]
            for r in reports
        ]
        _write_rows(["check", "samples", "max_violation", "pass"], rows, args.out)
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehrmab",
        description="Simulate, bound, and verify scheduling policies for "
        "energy-harvesting multi-access networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        if config_required:
            p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--lmax", type=int, help="belief-space truncation")
        p.add_argument(
            "--jobs", type=int,
            help="worker processes (default: $EHRMAB_JOBS or 1)",
        )

    p = sub.add_parser("simulate", help="Monte Carlo policy throughput")
    common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("upper-bound", help="LP-relaxation throughput bound")
    common(p)
    p.set_defaults(fn=cmd_upper_bound)

    p = sub.add_parser("sweep", help="simulate and bound on one grid")
    common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="built-in optimality and lemma checks")
    p.add_argument(
        "scope", choices=("case1", "case2", "lemmas", "property1", "all")
    )
    p.add_argument("--samples", type=int, default=1000,
                   help="samples per lemma check")
    common(p, config_required=False)
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ModelMismatchError as exc:
        print(f"model mismatch: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
