import json

import pytest

from favsites import cli
from favsites.config import ConfigError, ExperimentConfig, parse_config
from favsites.report import counts_digest, reports_from_json


def write_config(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc, indent=2))
    return str(p)


def test_minimal_walk_run(tmp_path):
    cfg = write_config(tmp_path, {"seed": 1, "params": {
        "crossing_identities": {"n_paths": 100, "n_steps": 1000}}})
    out = tmp_path / "out"
    assert cli.main(["simulate-walk", "--config", cfg, "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert list(manifest["audits"]) == ["crossing_identities"]
    assert manifest["exit_code"] == 0
    reps = reports_from_json((out / "simulate-walk.json").read_text())
    assert reps[0].n_samples == 100


def test_negative_budget_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path, {"params": {"crossing_identities": {"n_paths": -5}}})
    assert cli.main(["simulate-walk", "--config", cfg, "--out", str(tmp_path)]) == 3
    err = capsys.readouterr().err
    assert "n_paths" in err and "line" in err


def test_unknown_field_reports_line():
    text = '{\n  "seed": 1,\n  "bogus": 2\n}'
    with pytest.raises(ConfigError) as e:
        parse_config(text, cli.REGISTRY)
    assert e.value.line == 3 and e.value.field_name == "bogus"


def test_unknown_audit_parameter():
    text = json.dumps({"params": {"kernel_rows": {"j_max": 4}}})
    with pytest.raises(ConfigError):
        parse_config(text, cli.REGISTRY)


def test_malformed_json_has_line():
    with pytest.raises(ConfigError) as e:
        parse_config('{\n "seed": 1,\n "workers": }', cli.REGISTRY)
    assert e.value.line == 3


def test_seed_and_workers_validated():
    for doc in ({"seed": -1}, {"seed": 1 << 64}, {"workers": 0}, {"format": "xml"},
                {"block": 0}):
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc), cli.REGISTRY)


def test_flags_override_config_and_env(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, {"seed": 5, "out": "from_file"})
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "from_env"))
    args = cli.build_parser().parse_args(["simulate-chain", "--config", cfg, "--seed", "9"])
    c = cli.resolve(args)
    assert c.seed == 9 and c.out == str(tmp_path / "from_env")
    args = cli.build_parser().parse_args(["simulate-chain", "--config", cfg, "--out", "flag"])
    assert cli.resolve(args).out == "flag"


def test_env_directs_output(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
    cfg = write_config(tmp_path, {"params": {"kernel_rows": {"i_max": 4},
                                             "sampler_fit": {"n_samples": 2000},
                                             "first_passage_values": {"n_samples": 2000}}})
    assert cli.main(["simulate-chain", "--config", cfg, "--format", "both"]) == 0
    assert (tmp_path / "envout" / "simulate-chain.csv").exists()
    assert (tmp_path / "envout" / "simulate-chain.json").exists()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = write_config(tmp_path, {"params": {"crossing_identities": {"n_paths": 10, "n_steps": 10}}})
    assert cli.main(["simulate-walk", "--config", cfg, "--out", str(blocker / "sub")]) != 0


def test_lemma_selection():
    c = ExperimentConfig(experiment="audit", lemma="martingale")
    assert cli.audits_for(c) == [f"martingale_{m}" for m in cli.A.MARTINGALES]
    assert cli.audits_for(ExperimentConfig(experiment="audit", lemma="overshoot")) == ["overshoot"]
    with pytest.raises(ConfigError):
        cli.audits_for(ExperimentConfig(experiment="audit", lemma="nope"))
    everything = cli.audits_for(ExperimentConfig(experiment="all"))
    assert len(everything) == len(set(everything))
    assert "f4_longrun" in everything and "ray_knight" in everything
    assert "ray_knight_origin_enumeration" not in everything


def test_failing_hard_audit_gives_exit_one(tmp_path):
    # the origin enumeration at a short cap leaves censored mass above tolerance
    cfg = write_config(tmp_path, {"params": {"ray_knight_origin_enumeration": {"t_cap": 8},
                                             "oracle_equivalence": {"t_max": 4, "n_samples": 2000}}})
    assert cli.main(["enumerate", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert (tmp_path / "o" / "oracle" / "t04_n_fav.json").exists()


def test_diagnostic_only_run_exits_zero(tmp_path):
    cfg = write_config(tmp_path, {"params": {"f4_longrun": {"n_walks": 2, "n_steps": 1000}}})
    assert cli.main(["f4-report", "--config", cfg, "--out", str(tmp_path / "f4")]) == 0


def test_worker_count_does_not_change_counts(tmp_path):
    doc = {"seed": 77, "block": 500, "params": {
        "crossing_identities": {"n_paths": 2000, "n_steps": 300},
        "sampler_fit": {"n_samples": 3000}}}
    digests = []
    for w in (1, 3):
        c = parse_config(json.dumps(dict(doc, workers=w)), cli.REGISTRY)
        c.experiment = "simulate-walk"
        _, a = cli.run_experiment(c, log=lambda *_: None)
        c.experiment = "simulate-chain"
        _, b = cli.run_experiment(c, log=lambda *_: None)
        digests.append(counts_digest(a + b))
    assert digests[0] == digests[1]
