"""Structured check records and JSON report serialization."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Mapping, Sequence


@dataclass(frozen=True)
class CheckRecord:
    """One verification outcome: a measured scalar against a threshold.

    For most checks passed means residual <= tolerance; growth/contrast
    checks document their comparison direction in the check name.
    """

    check: str
    params: Mapping[str, object]
    residual: float
    tolerance: float
    passed: bool
    wall_ms: float = 0.0


def _json_number(value: float):
    """Finite float, or None for +-inf/nan (JSON has no such literals)."""
    value = float(value)
    return value if math.isfinite(value) else None


def record_dict(record: CheckRecord) -> dict:
    params = {}
    for key, value in record.params.items():
        if isinstance(value, complex):
            params[key + "_re"] = value.real
            params[key + "_im"] = value.imag
        else:
            params[key] = value
    return {
        "check": record.check,
        "params": params,
        "residual": _json_number(record.residual),
        "tolerance": _json_number(record.tolerance),
        "pass": bool(record.passed),
        "wall_ms": float(record.wall_ms),
    }


def sort_records(records: Sequence[CheckRecord]) -> list[CheckRecord]:
    """Deterministic order regardless of concurrent evaluation."""
    return sorted(records, key=lambda r: (r.check, json.dumps(record_dict(r)["params"], sort_keys=True)))


def write_report(path, manifest: Mapping[str, object], records: Sequence[CheckRecord]) -> None:
    payload = {
        "manifest": dict(manifest),
        "results": [record_dict(r) for r in sort_records(records)],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


class timed:
    """Context manager measuring wall time in milliseconds."""

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.wall_ms = (time.perf_counter() - self._start) * 1000.0
        return False
