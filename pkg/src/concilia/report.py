"""Structured verdicts returned by every checker."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1


@dataclass
class Report:
    """Outcome of a check.

    ``counterexamples`` hold plain JSON-ready dicts whose sets are already
    rendered as name-sorted point lists, so a report can be printed or
    serialized without access to the space it came from.
    """

    name: str
    checked: int = 0
    counterexamples: list[dict[str, Any]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    timing: float = 0.0
    max_counterexamples: int = 50
    # counterexamples found beyond max_counterexamples are counted, not stored
    suppressed: int = 0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def fail(self, **witness: Any) -> None:
        if len(self.counterexamples) < self.max_counterexamples:
            self.counterexamples.append(witness)
        else:
            self.suppressed += 1

    def merge(self, other: Report, prefix: str | None = None) -> None:
        self.checked += other.checked
        for cx in other.counterexamples:
            if prefix is not None:
                cx = {"check": prefix, **cx}
            self.fail(**cx)
        self.suppressed += other.suppressed
        self.warnings.extend(other.warnings)
        self.notes.extend(other.notes)

    @contextmanager
    def timed(self):
        start = time.perf_counter()
        try:
            yield self
        finally:
            self.timing += time.perf_counter() - start

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "verdict": self.verdict,
            "check": self.name,
            "checked": self.checked,
            "counterexamples": [_stable(cx) for cx in self.counterexamples],
            "suppressed": self.suppressed,
            "warnings": list(self.warnings),
            "notes": list(self.notes),
            "data": _stable(self.data),
        }
        if include_timing:
            out["timing"] = round(self.timing, 6)
        return out

    def render_text(self) -> str:
        lines = [f"{self.name}: {self.verdict.upper()} ({self.checked} checked)"]
        for key, value in _stable(self.data).items():
            lines.append(f"  {key}: {_text(value)}")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        for cx in self.counterexamples:
            body = ", ".join(f"{k}={_text(v)}" for k, v in _stable(cx).items())
            lines.append(f"  counterexample: {body}")
        if self.suppressed:
            lines.append(f"  ... {self.suppressed} further counterexamples suppressed")
        return "\n".join(lines)


def emit_json(report: Report, include_timing: bool = False) -> str:
    """Serialize a report deterministically (byte-stable for equal reports)."""
    return json.dumps(report.to_dict(include_timing), ensure_ascii=False, separators=(",", ":"))


def _stable(value: Any) -> Any:
    # dict keys sorted, tuples/sets turned into lists; sets sorted
    if isinstance(value, dict):
        return {str(k): _stable(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (list, tuple)):
        return [_stable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_stable(v) for v in value)
    return value


def _text(value: Any) -> str:
    if isinstance(value, list):
        if all(isinstance(v, str) for v in value):
            return "{" + " ".join(value) + "}"
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text(v)}" for k, v in value.items()) + "}"
    return str(value)
