"""Run reports and their deterministic serialization."""

from __future__ import annotations

import json
import math
import platform
import sys
from dataclasses import dataclass, field
from numbers import Integral, Real

import numpy as np

from . import __version__
from .suites import SuiteResult


@dataclass
class RunReport:
    config: dict
    suites: list
    seed: int
    version: str = __version__
    environment: dict = field(default_factory=dict)
    plots: list = field(default_factory=list)

    def __post_init__(self):
        if not self.environment:
            self.environment = environment_fingerprint()

    @property
    def exit_code(self) -> int:
        statuses = {s.status for s in self.suites}
        if "error" in statuses:
            return 3
        if "fail" in statuses:
            return 1
        return 0

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "environment": self.environment,
            "exit_code": self.exit_code,
            "plots": list(self.plots),
            "seed": self.seed,
            "suites": {s.name: suite_dict(s) for s in self.suites},
            "version": self.version,
        }


def environment_fingerprint() -> dict:
    fi = np.finfo(float)
    return {
        "float_eps": float(fi.eps),
        "machine": platform.machine(),
        "numpy": np.__version__,
        "platform": platform.system(),
        "python": platform.python_version(),
        "byteorder": sys.byteorder,
    }


def suite_dict(s: SuiteResult) -> dict:
    return {
        "checks": [
            {"gating": c.gating, "info": c.info, "name": c.name, "passed": c.passed,
             "residual": c.residual, "tol": c.tol}
            for c in s.checks
        ],
        "draws": s.draws,
        "elapsed_s": s.elapsed,
        "max_residual": s.max_residual,
        "message": s.message,
        "status": s.status,
    }


def _float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    text = f"{x:.17g}"
    if all(ch not in text for ch in ".eE"):
        text += ".0"
    return text


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, Integral):
        return str(int(obj))
    if isinstance(obj, Real):
        return _float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": float(obj.real), "im": float(obj.imag)})
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{_encode(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_report(report: RunReport | dict, fmt: str = "json") -> bytes:
    """JSON with sorted keys and 17 significant digits, or one text line per suite."""
    data = report.as_dict() if isinstance(report, RunReport) else report
    if fmt == "json":
        return (_encode(data) + "\n").encode()
    if fmt == "text":
        lines = []
        for name in sorted(data["suites"]):
            s = data["suites"][name]
            lines.append(f"{name} {s['status']} {_float(float(s['max_residual']))}")
        return ("\n".join(lines) + ("\n" if lines else "")).encode()
    raise ValueError(f"unknown format {fmt!r}")
