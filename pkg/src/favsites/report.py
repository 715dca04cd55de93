"""Audit results, run manifests and their JSON/CSV serialization."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

METHODS = ("exact-dp", "enumeration", "monte-carlo", "exact")
VERDICTS = ("pass", "fail", "inconclusive", "diagnostic")
CSV_COLUMNS = ("audit_id", "method", "params", "statistic", "p_or_slack", "pass")


def _clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "tolist"):
        return _clean(v.tolist())
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        if math.isfinite(v):
            return v
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return str(v)


@dataclass
class AuditPoint:
    """One parameter point of an audit: a single statistic and its verdict."""

    params: dict
    statistic: float | None
    p_or_slack: float | None
    passed: bool | None


@dataclass
class AuditReport:
    audit_id: str
    method: str
    params: dict = field(default_factory=dict)
    statistic: float | None = None
    p_value: float | None = None
    slack: float | None = None
    fitted: dict = field(default_factory=dict)
    verdict: str = "pass"
    hard: bool = True
    n_samples: int = 0
    standard_error: float | None = None
    censored_mass: float = 0.0
    points: list[AuditPoint] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    notes: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "diagnostic":
            self.hard = False

    @property
    def passed(self) -> bool:
        return self.verdict in ("pass", "diagnostic")

    def to_dict(self) -> dict:
        return _clean(asdict(self))

    @classmethod
    def from_dict(cls, d: dict) -> "AuditReport":
        d = dict(d)
        d["points"] = [AuditPoint(**p) for p in d.get("points", [])]
        for key in ("statistic", "p_value", "slack", "standard_error", "censored_mass"):
            if isinstance(d.get(key), str):
                d[key] = float(d[key])
        return cls(**d)

    def csv_rows(self) -> list[dict]:
        if not self.points:
            return [{
                "audit_id": self.audit_id,
                "method": self.method,
                "params": json.dumps(_clean(self.params), sort_keys=True),
                "statistic": self.statistic,
                "p_or_slack": self.p_value if self.p_value is not None else self.slack,
                "pass": self.verdict,
            }]
        return [{
            "audit_id": self.audit_id,
            "method": self.method,
            "params": json.dumps(_clean(p.params), sort_keys=True),
            "statistic": p.statistic,
            "p_or_slack": p.p_or_slack,
            "pass": p.passed,
        } for p in self.points]


def combine_verdicts(reports: list[AuditReport]) -> str:
    """Overall verdict of a set of audits; diagnostics never count."""
    hard = [r for r in reports if r.hard]
    if any(r.verdict == "fail" for r in hard):
        return "fail"
    if any(r.verdict == "inconclusive" for r in hard):
        return "inconclusive"
    return "pass"


EXIT_CODES = {"pass": 0, "fail": 1, "inconclusive": 2, "config": 3}


@dataclass
class RunManifest:
    config_hash: str
    version: str
    wall_time: float
    audits: dict[str, str]
    exit_code: int

    def to_dict(self) -> dict:
        return asdict(self)


def config_hash(config: dict) -> str:
    blob = json.dumps(_clean(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def reports_to_json(reports: list[AuditReport], manifest: RunManifest | None = None) -> str:
    doc = {"audits": [r.to_dict() for r in reports]}
    if manifest is not None:
        doc["manifest"] = manifest.to_dict()
    return json.dumps(doc, indent=2, sort_keys=True)


def reports_from_json(text: str) -> list[AuditReport]:
    return [AuditReport.from_dict(d) for d in json.loads(text)["audits"]]


def reports_to_csv(reports: list[AuditReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerows(r.csv_rows())
    return buf.getvalue()


def counts_digest(reports: list[AuditReport]) -> str:
    """Canonical text of the integer aggregates of every audit, for
    byte-level comparison between runs."""
    return json.dumps({r.audit_id: _clean(r.counts) for r in reports},
                      sort_keys=True, separators=(",", ":"))


def emit_report(reports: list[AuditReport], out_dir: str | Path, fmt: str = "json",
                manifest: RunManifest | None = None, stem: str = "report") -> list[Path]:
    """Write ``stem.json`` and/or ``stem.csv`` (``fmt`` in json, csv, both)."""
    if fmt not in ("json", "csv", "both"):
        raise ValueError(f"unknown report format {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        p = out / f"{stem}.json"
        p.write_text(reports_to_json(reports, manifest))
        written.append(p)
    if fmt in ("csv", "both"):
        p = out / f"{stem}.csv"
        p.write_text(reports_to_csv(reports))
        written.append(p)
    if manifest is not None:
        p = out / "manifest.json"
        p.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True))
        written.append(p)
    return written
