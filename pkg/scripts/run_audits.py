"""Run a configuration and print a verdict table.

    python scripts/run_audits.py configs/quick.json [--workers 4]
"""
import argparse
import sys

from favsites import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--seed", type=int)
    a = ap.parse_args()
    cfg = cli.load_config(a.config, cli.REGISTRY)
    if a.workers:
        cfg.workers = a.workers
    if a.seed is not None:
        cfg.seed = a.seed
    manifest, reports = cli.run_experiment(cfg, log=lambda *_: None)
    width = max(len(r.audit_id) for r in reports)
    for r in reports:
        kind = "hard" if r.hard else "diag"
        print(f"{r.audit_id:<{width}}  {kind}  {r.verdict}")
    print(f"exit code {manifest.exit_code}, {manifest.wall_time:.1f}s")
    return manifest.exit_code


if __name__ == "__main__":
    sys.exit(main())
