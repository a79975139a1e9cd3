"""Command-line driver: ``zn-thomae run`` and ``zn-thomae example hutchinson``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .curve import CurveSpec
from .errors import ConfigInvalid, CurveInvalid, ZnThomaeError
from .periods import period_matrix
from .report import RunReport, emit_report
from .suites import DEFAULT_TOLERANCES, SUITE_NAMES, SuiteContext, run_suite
from .thomae import hutchinson_reference, hutchinson_spec

EXIT_OK, EXIT_TOL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class RunConfig:
    N: int
    m: int
    branch_points: tuple
    suites: list
    tolerances: dict
    seed: int = 0
    output: str | None = None
    workers: int = 4
    samples: int = 5

    def echo(self) -> dict:
        return {
            "curve": {"N": self.N, "m": self.m, "branch_points": list(self.branch_points)},
            "samples": self.samples,
            "seed": self.seed,
            "suites": list(self.suites),
            "tolerances": dict(self.tolerances),
            "workers": self.workers,
        }


def _number(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigInvalid(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Decimal(value.strip()))  # one correctly rounded conversion
        except InvalidOperation:
            raise ConfigInvalid(f"{where}: {value!r} is not a decimal number") from None
    raise ConfigInvalid(f"{where}: expected a number or decimal string")


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(f"{where}: expected an integer")
    return value


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    curve = data.get("curve", data)
    for key in ("N", "m", "branch_points"):
        if key not in curve:
            raise ConfigInvalid(f"missing curve field {key!r}")
    N, m = _int(curve["N"], "N"), _int(curve["m"], "m")
    if N < 2 or m < 1:
        raise ConfigInvalid("need N >= 2 and m >= 1")
    raw = curve["branch_points"]
    if not isinstance(raw, list):
        raise ConfigInvalid("branch_points must be a list")
    bp = tuple(_number(v, f"branch_points[{i}]") for i, v in enumerate(raw))
    if len(bp) != 2 * m + 1:
        raise ConfigInvalid(f"expected {2 * m + 1} branch points, got {len(bp)}")
    for i in range(1, len(bp)):
        if not bp[i] > bp[i - 1]:
            raise ConfigInvalid(f"branch points must be strictly increasing; violation at index {i}")
    suites = data.get("suites", list(SUITE_NAMES))
    if not isinstance(suites, list):
        raise ConfigInvalid("suites must be a list")
    for name in suites:
        if name not in SUITE_NAMES:
            raise ConfigInvalid(f"unknown suite {name!r}; known: {', '.join(SUITE_NAMES)}")
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigInvalid("tolerances must be an object")
    for key, val in tolerances.items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigInvalid(f"unknown tolerance {key!r}")
        tolerances[key] = _number(val, f"tolerances.{key}")
    workers = _int(data.get("workers", 4), "workers")
    samples = _int(data.get("samples", 5), "samples")
    if workers < 1 or samples < 1:
        raise ConfigInvalid("workers and samples must be positive")
    return RunConfig(N, m, bp, sorted(set(suites)), tolerances, _int(data.get("seed", 0), "seed"),
                     data.get("output"), workers, samples)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from None
    return parse_config(data)


def run(config: RunConfig, tol_scale: float = 1.0, plots_dir=None) -> RunReport:
    spec = CurveSpec(config.N, config.m, config.branch_points)
    ctx = SuiteContext(spec, config.seed, tol_scale, config.tolerances, config.samples)
    names = sorted(config.suites)
    if names:
        with ThreadPoolExecutor(max_workers=min(config.workers, len(names))) as pool:
            results = list(pool.map(lambda n: run_suite(n, ctx), names))
    else:
        results = []
    report = RunReport(config.echo(), results, config.seed)
    report.config["tol_scale"] = tol_scale
    if plots_dir is not None and results:
        from .plotting import write_plots
        report.plots = write_plots(spec, results, plots_dir)
    return report


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        if args.suite:
            bad = [s for s in args.suite if s not in SUITE_NAMES]
            if bad:
                raise ConfigInvalid(f"unknown suite {bad[0]!r}")
            config.suites = sorted(set(args.suite))
        if args.seed is not None:
            config.seed = args.seed
        if args.tol_scale <= 0:
            raise ConfigInvalid("--tol-scale must be positive")
        report = run(config, args.tol_scale, args.plots)
    except (ConfigInvalid, CurveInvalid) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZnThomaeError as exc:
        print(f"numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    payload = emit_report(report, args.format)
    out = args.out or config.output
    if out:
        Path(out).write_bytes(payload)
    else:
        sys.stdout.write(payload.decode())
    return report.exit_code


def _cmd_example(args) -> int:
    try:
        ref = hutchinson_reference(args.t)
        pd = period_matrix(hutchinson_spec(args.t))
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZnThomaeError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    Pi = pd.pi_matrix
    err = float(np.max(np.abs(Pi - ref.Pi_closed) / np.abs(ref.Pi_closed)))
    a1 = pd.blocks.a_blocks[0][0, 0]
    print(f"curve mu^3 = (l - 0)(l - {args.t})^2 (l - 1)")
    print(f"T (closed form) = {ref.T.real:.15g} {ref.T.imag:+.15g}i")
    for i in range(2):
        for j in range(2):
            c, n = ref.Pi_closed[i, j], Pi[i, j]
            print(f"Pi[{i}{j}] closed {c.real:+.15f} {c.imag:+.15f}i  computed {n.real:+.15f} {n.imag:+.15f}i")
    print(f"A1 closed {ref.A1.real:+.15f} {ref.A1.imag:+.15f}i  computed {a1.real:+.15f} {a1.imag:+.15f}i")
    print(f"max relative error {err:.3e}")
    return EXIT_OK if err <= 1e-6 else EXIT_TOL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zn-thomae", description="Numerical checks for Z_N curve theta constants.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run verification suites from a JSON config")
    r.add_argument("config")
    r.add_argument("--suite", action="append", help="suite to run (repeatable)")
    r.add_argument("--out")
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--seed", type=int)
    r.add_argument("--tol-scale", type=float, default=1.0)
    r.add_argument("--plots", metavar="DIR", help="write residual and contour figures here")
    r.set_defaults(func=_cmd_run)
    e = sub.add_parser("example", help="worked examples")
    e.add_argument("name", choices=("hutchinson",))
    e.add_argument("--t", type=float, default=0.3)
    e.set_defaults(func=_cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
