"""Experiment configuration: a JSON file plus command-line overrides.

Layout::

    {
      "experiment": "audit",
      "seed": 12345,
      "workers": 4,
      "block": 65536,
      "out": "results",
      "format": "json",
      "lemma": "overshoot",
      "params": {"overshoot": {"h_max": 20}}
    }

``block`` is the replica block size (scheduling only; results do not
depend on it or on ``workers``).  ``params`` maps audit ids to keyword arguments of the audit function.
Unknown top-level fields, unknown audit ids and unknown keywords are all
rejected, as are non-positive budgets and caps.
"""
from __future__ import annotations

import inspect
import json
import re
from dataclasses import asdict, dataclass, field, fields

EXPERIMENTS = ("simulate-walk", "simulate-chain", "verify-rk", "audit", "enumerate",
               "f4-report", "all")
FORMATS = ("json", "csv", "both")
SEED_LIMIT = 1 << 64

# keyword names that hold budgets, caps or scan limits
_POSITIVE = re.compile(r"^(n_\w+|\w*cap|t_max|h_\w+|checkpoint|[ijlvu]_max|u_extra|exact_h|p_max|dps|mc_\w+)$")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is the 1-based line in the source
    text when known."""

    def __init__(self, message: str, field_name: str | None = None, line: int | None = None):
        self.field_name = field_name
        self.line = line
        where = f"line {line}: " if line else ""
        what = f"field {field_name!r}: " if field_name else ""
        super().__init__(f"{where}{what}{message}")


@dataclass
class ExperimentConfig:
    experiment: str = "all"
    seed: int = 0
    workers: int = 1
    block: int = 1 << 16
    out: str = "results"
    format: str = "json"
    lemma: str | None = None
    params: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _check_positive(name: str, value, text, audit: str):
    vals = value if isinstance(value, (list, tuple)) else [value]
    for v in vals:
        if isinstance(v, bool):
            continue
        if isinstance(v, (int, float)) and v <= 0:
            raise ConfigError(f"must be positive (got {v}) in params of {audit!r}",
                              name, _line_of(text, name))


def validate(cfg: ExperimentConfig, text: str | None = None, registry=None) -> ExperimentConfig:
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; expected one of {EXPERIMENTS}",
                          "experiment", _line_of(text, "experiment"))
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or not 0 <= cfg.seed < SEED_LIMIT:
        raise ConfigError("must be an unsigned 64-bit integer", "seed", _line_of(text, "seed"))
    if isinstance(cfg.workers, bool) or not isinstance(cfg.workers, int) or cfg.workers < 1:
        raise ConfigError("must be a positive integer", "workers", _line_of(text, "workers"))
    if isinstance(cfg.block, bool) or not isinstance(cfg.block, int) or cfg.block < 1:
        raise ConfigError("must be a positive integer", "block", _line_of(text, "block"))
    if cfg.format not in FORMATS:
        raise ConfigError(f"must be one of {FORMATS}", "format", _line_of(text, "format"))
    if not isinstance(cfg.params, dict):
        raise ConfigError("must be an object", "params", _line_of(text, "params"))
    for audit, kw in cfg.params.items():
        if not isinstance(kw, dict):
            raise ConfigError("must be an object of keyword arguments", audit, _line_of(text, audit))
        if registry is not None:
            if audit not in registry:
                raise ConfigError("unknown audit id in params", audit, _line_of(text, audit))
            sig = inspect.signature(registry[audit])
            for name in kw:
                if name not in sig.parameters or name in ("seed", "workers"):
                    raise ConfigError(f"unknown parameter for audit {audit!r}", name,
                                      _line_of(text, name))
        for name, value in kw.items():
            if _POSITIVE.match(name):
                _check_positive(name, value, text, audit)
    return cfg


def parse_config(text: str, registry=None) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", None, e.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", None, 1)
    known = {f.name for f in fields(ExperimentConfig)}
    for key in raw:
        if key not in known:
            raise ConfigError("unknown field", key, _line_of(text, key))
    return validate(ExperimentConfig(**raw), text, registry)


def load_config(path, registry=None) -> ExperimentConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, registry)
