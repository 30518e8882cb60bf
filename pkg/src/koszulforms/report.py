"""Run configuration, check records, and deterministic report emission.

Reports are a pure function of the configuration: JSON output is
byte-stable (sorted keys, fixed separators) and markdown renders one
section per check.  Exit-code contract: 0 all pass, 1 any failure,
2 inconclusive or empty, 64 usage error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64


@dataclass
class RunConfig:
    command: str
    r_values: list
    field_spec: str
    ell: object = None
    m: object = None
    seed: int = 0
    trials: int = 100
    prime: int = 1000003
    count: int = 200
    fmt: str = "json"
    split_spec: object = None

    def to_json_dict(self):
        return {
            "command": self.command,
            "r": self.r_values,
            "field": self.field_spec,
            "ell": self.ell,
            "m": self.m,
            "seed": self.seed,
            "trials": self.trials,
            "prime": self.prime,
            "count": self.count,
            "format": self.fmt,
            "split_spec": self.split_spec,
        }


@dataclass
class CheckRecord:
    name: str
    claim: str  # the precise statement this check decides
    status: str  # pass | fail | inconclusive
    evidence: dict = dc_field(default_factory=dict)

    def to_json_dict(self):
        return {
            "name": self.name,
            "claim": self.claim,
            "status": self.status,
            "evidence": self.evidence,
        }


@dataclass
class Report:
    config: RunConfig
    records: list

    def sorted_records(self):
        return sorted(self.records, key=lambda rec: rec.name)

    def summary(self):
        counts = {"pass": 0, "fail": 0, "inconclusive": 0}
        for rec in self.records:
            counts[rec.status] = counts.get(rec.status, 0) + 1
        return counts

    def exit_code(self):
        counts = self.summary()
        if counts.get("fail"):
            return EXIT_FAIL
        if not self.records or counts.get("inconclusive"):
            return EXIT_INCONCLUSIVE
        return EXIT_PASS

    def to_json_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "config": self.config.to_json_dict(),
            "records": [rec.to_json_dict() for rec in self.sorted_records()],
            "summary": self.summary(),
        }


def _json_default(obj):
    if hasattr(obj, "to_json_dict"):
        return obj.to_json_dict()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError("cannot serialize %r" % (obj,))


def emit(report, fmt="json"):
    """Canonical bytes for a report; identical configs give identical bytes."""
    if fmt == "json":
        text = json.dumps(
            report.to_json_dict(), sort_keys=True, separators=(",", ":"),
            default=_json_default,
        )
        return (text + "\n").encode()
    if fmt == "md":
        lines = ["# verification report", ""]
        cfg = report.config.to_json_dict()
        lines.append("command: `%s`" % cfg["command"])
        lines.append("")
        lines.append(
            "config: "
            + ", ".join("%s=%s" % (k, cfg[k]) for k in sorted(cfg) if cfg[k] is not None)
        )
        lines.append("")
        for rec in report.sorted_records():
            mark = {"pass": "PASS", "fail": "FAIL", "inconclusive": "INCONCLUSIVE"}[rec.status]
            lines.append("## %s [%s]" % (rec.name, mark))
            lines.append("")
            lines.append(rec.claim)
            lines.append("")
            if rec.evidence:
                lines.append("```json")
                lines.append(
                    json.dumps(rec.evidence, sort_keys=True, indent=2, default=_json_default)
                )
                lines.append("```")
                lines.append("")
        counts = report.summary()
        lines.append(
            "summary: %d pass, %d fail, %d inconclusive"
            % (counts.get("pass", 0), counts.get("fail", 0), counts.get("inconclusive", 0))
        )
        lines.append("")
        return "\n".join(lines).encode()
    raise ValueError("unknown format %r" % fmt)
