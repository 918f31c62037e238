"""Verification reports as JSON or flat CSV, byte-stable for identical inputs."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np
import scipy

from .stats import TestResult, _plain

CSV_COLUMNS = ("name", "theorem", "statistic", "threshold", "passed", "sample_size", "provenance")


def fingerprint(seed: int | None = None) -> dict:
    from importlib import metadata

    from ..kernels import backend_name

    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:  # running from a source tree
        version = "unknown"
    return {"package": version, "numpy": np.__version__, "scipy": scipy.__version__,
            "backend": backend_name(), "seed": seed}


@dataclass
class VerifyReport:
    results: list[TestResult] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    fingerprint: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        body = [r.to_dict() for r in self.results]
        digest = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
        return {"passed": self.passed, "failures": self.failures, "results": body,
                "config": _plain(self.config), "fingerprint": dict(self.fingerprint, results_sha256=digest)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.results:
            writer.writerow([r.name, r.theorem or "", repr(float(r.statistic)),
                             repr(float(r.threshold)), int(r.passed), r.sample_size, r.provenance])
        return buf.getvalue()


def assemble_report(results, config: dict | None = None, seed: int | None = None) -> VerifyReport:
    return VerifyReport(list(results), dict(config or {}), fingerprint(seed))
