"""Claim reports and their canonical JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

PASS = "pass"
FAIL = "fail"
ASSUMED = "assumed-by-paper"
STATUSES = (PASS, FAIL, ASSUMED)


@dataclass
class ClaimReport:
    claim_id: str
    status: str
    certificate: dict = field(default_factory=dict)
    elapsed_ms: float | None = None
    title: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self, timings: bool = False) -> dict:
        return {
            "id": self.claim_id,
            "status": self.status,
            "certificate": canonical(self.certificate),
            "elapsed_ms": round(self.elapsed_ms, 3) if timings and self.elapsed_ms is not None else None,
        }


def report_dict(scenario: str, reports: list[ClaimReport], version: str, timings: bool = False) -> dict:
    return {
        "scenario": scenario,
        "claims": [r.to_dict(timings) for r in reports],
        "tool_version": version,
    }


def verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def canonical(obj: Any) -> Any:
    """JSON-ready copy: Fractions become "p/q" strings, tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in certificates")
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return canonical(obj.to_dict())
    if hasattr(obj, "as_strings"):
        return obj.as_strings()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_report(reports: list[ClaimReport], path, scenario: str = "", timings: bool = False) -> str:
    """Write the canonical report to ``path`` (or return it when path is None)."""
    from k3cone import __version__

    text = dumps(report_dict(scenario, reports, __version__, timings))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
