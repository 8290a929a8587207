"""Structured pass/fail records for verification suites."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    id: str
    status: str  # "pass" or "fail"
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out: dict[str, Any] = {"id": self.id, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    suite: str
    config: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    decisions: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def add(self, check_id: str, ok: bool, witness=None) -> Check:
        if any(c.id == check_id for c in self.checks):
            raise ValueError(f"duplicate check id {check_id}")
        c = Check(check_id, "pass" if ok else "fail", witness)
        self.checks.append(c)
        return c

    def finish(self) -> VerificationReport:
        self.elapsed_ms = round((time.perf_counter() - self._started) * 1000, 3)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, check_id: str) -> Check:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    def extend(self, other: VerificationReport, prefix: str = "") -> None:
        for c in other.checks:
            self.add(prefix + c.id, c.passed, c.witness)
        self.decisions.update(other.decisions)

    def to_json(self, include_timing: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
            "decisions": self.decisions,
        }
        if include_timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out

    def dumps(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json(include_timing), indent=2, sort_keys=True)

    def summary_lines(self) -> list[str]:
        lines = [f"{c.status.upper():4} {c.id}" for c in self.checks]
        n_pass = sum(c.passed for c in self.checks)
        lines.append(f"{self.suite}: {n_pass}/{len(self.checks)} checks passed")
        return lines
