"""Command line entry point.

    favsites <subcommand> [--config FILE] [--seed N] [--workers N]
                          [--out DIR] [--format json|csv|both] [--lemma ID]

Exit status: 0 when every hard audit passes, 1 on a failure, 2 when a hard
audit is inconclusive, 3 on a configuration or output-path error.
Diagnostics never change the exit status.  ``FAVSITES_OUT`` overrides the
output directory of the config file (an explicit ``--out`` wins).
"""
from __future__ import annotations

import argparse
import inspect
import os
import sys
import time
from functools import partial
from pathlib import Path

from . import __version__, parallel
from .config import EXPERIMENTS, FORMATS, ConfigError, ExperimentConfig, load_config, validate
from .report import (EXIT_CODES, AuditReport, RunManifest, combine_verdicts, config_hash,
                     emit_report)
from .verify import audits as A

OUT_ENV = "FAVSITES_OUT"

REGISTRY = {
    "crossing_identities": A.identity_suite_audit,
    "kernel_rows": A.kernel_rows_audit,
    "sampler_fit": A.sampler_gof_audit,
    "first_passage_values": A.first_passage_audit,
    "oracle_equivalence": A.oracle_equivalence_audit,
    "ray_knight_origin_enumeration": A.origin_local_time_audit,
    "ray_knight": A.ray_knight_audit,
    **A.BOUND_AUDITS,
    **{f"martingale_{m}": partial(A.martingale_audit, m) for m in A.MARTINGALES},
    "multi_hit": A.multi_hit_audit,
    "f4_longrun": A.f4_longrun_report,
}

LEMMA_AUDITS = list(A.BOUND_AUDITS) + [f"martingale_{m}" for m in A.MARTINGALES] + ["multi_hit"]

SUBCOMMANDS = {
    "simulate-walk": ["crossing_identities"],
    "simulate-chain": ["kernel_rows", "sampler_fit", "first_passage_values"],
    "verify-rk": ["ray_knight"],
    "enumerate": ["oracle_equivalence", "ray_knight_origin_enumeration"],
    "f4-report": ["f4_longrun"],
}


def audits_for(cfg: ExperimentConfig) -> list[str]:
    if cfg.experiment == "audit":
        if cfg.lemma in (None, "all"):
            return list(LEMMA_AUDITS)
        if cfg.lemma == "martingale":
            return [f"martingale_{m}" for m in A.MARTINGALES]
        if cfg.lemma not in LEMMA_AUDITS:
            raise ConfigError(f"unknown lemma audit; expected one of {LEMMA_AUDITS}", "lemma")
        return [cfg.lemma]
    if cfg.experiment == "all":
        out = []
        for name in ("simulate-walk", "simulate-chain", "enumerate", "verify-rk"):
            out += [a for a in SUBCOMMANDS[name] if a not in out]
        # ray_knight already reports the origin enumeration
        out.remove("ray_knight_origin_enumeration")
        return out + LEMMA_AUDITS + SUBCOMMANDS["f4-report"]
    return list(SUBCOMMANDS[cfg.experiment])


def run_audit(audit_id: str, cfg: ExperimentConfig) -> list[AuditReport]:
    fn = REGISTRY[audit_id]
    kw = dict(cfg.params.get(audit_id, {}))
    sig = inspect.signature(fn)
    if "seed" in sig.parameters:
        kw["seed"] = cfg.seed
    if "workers" in sig.parameters:
        kw["workers"] = cfg.workers
    res = fn(**kw)
    return res if isinstance(res, list) else [res]


def _export_enumeration(cfg: ExperimentConfig, out: Path) -> None:
    """Golden files of the enumerated feature laws."""
    from .exact_oracle import enumerate_feature_laws

    t_max = cfg.params.get("oracle_equivalence", {}).get("t_max", 12)
    gold = out / "oracle"
    gold.mkdir(parents=True, exist_ok=True)
    for t, laws in enumerate_feature_laws(t_max).items():
        for name, dist in laws.items():
            (gold / f"t{t:02d}_{name}.json").write_text(dist.to_json())


def run_experiment(cfg: ExperimentConfig, log=print) -> tuple[RunManifest, list[AuditReport]]:
    start = time.time()
    parallel.set_block_size(cfg.block)
    reports: list[AuditReport] = []
    for audit_id in audits_for(cfg):
        t0 = time.time()
        got = run_audit(audit_id, cfg)
        for r in got:
            log(f"{r.audit_id}: {r.verdict} ({time.time() - t0:.1f}s)")
        reports += got
    verdict = combine_verdicts(reports)
    manifest = RunManifest(config_hash(cfg.to_dict()), __version__, time.time() - start,
                           {r.audit_id: r.verdict for r in reports}, EXIT_CODES[verdict])
    return manifest, reports


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="favsites", description="Favourite-site simulations and audits.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON experiment configuration")
        s.add_argument("--seed", type=int)
        s.add_argument("--workers", type=int)
        s.add_argument("--out")
        s.add_argument("--format", choices=FORMATS)
        if name == "audit":
            s.add_argument("--lemma", help="audit id, 'martingale' or 'all'")
    return p


def resolve(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config, REGISTRY) if args.config else ExperimentConfig()
    cfg.experiment = args.experiment
    env_out = os.environ.get(OUT_ENV)
    if env_out:
        cfg.out = env_out
    for key in ("seed", "workers", "out", "format"):
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    if getattr(args, "lemma", None) is not None:
        cfg.lemma = args.lemma
    return validate(cfg, registry=REGISTRY)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        audits_for(cfg)
    except (ConfigError, OSError, TypeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CODES["config"]
    manifest, reports = run_experiment(cfg)
    out = Path(cfg.out)
    try:
        emit_report(reports, out, cfg.format, manifest, stem=cfg.experiment)
        if cfg.experiment in ("enumerate", "all"):
            _export_enumeration(cfg, out)
    except OSError as e:
        print(f"cannot write reports to {out}: {e}", file=sys.stderr)
        return EXIT_CODES["config"]
    print(f"overall: {combine_verdicts(reports)} -> {out}")
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
