import json

import pytest

from steklov.verify import REGISTRY, ExperimentConfig, run_suite
from steklov.verify.report import format_summary, load_manifest

FAST = ("C02", "C07")


def test_registry_has_twelve_checks():
    assert sorted(REGISTRY) == [f"C{i:02d}" for i in range(1, 13)]
    for cid, chk in REGISTRY.items():
        assert chk.claim and chk.title


def test_suite_records_every_id_and_is_deterministic(tmp_path):
    cfg = ExperimentConfig(dim=1, checks=FAST)
    r1 = run_suite(cfg, out_dir=tmp_path / "a")
    r2 = run_suite(cfg, out_dir=tmp_path / "b")
    assert r1.registry_complete()
    st = r1.statuses()
    assert st["C02"] == "pass" and st["C07"] == "pass"
    assert all(st[c] == "skipped" for c in REGISTRY if c not in FAST)
    for cid in FAST:
        a = (tmp_path / "a" / f"{cid}.csv").read_text()
        assert a == (tmp_path / "b" / f"{cid}.csv").read_text()
        assert a.startswith(f"# check={cid} config_hash={cfg.config_hash()}")
    assert r1.manifest(include_timing=False) == r2.manifest(include_timing=False)
    man = load_manifest(tmp_path / "a")
    assert man["config_hash"] == cfg.config_hash()
    assert (tmp_path / "a" / "summary.txt").read_text() == format_summary(man)
    json.dumps(man, allow_nan=False)


def test_errors_are_isolated():
    rep = run_suite(ExperimentConfig(dim=1, max_degree=8, checks=("C02", "C07")))
    st = rep.statuses()
    assert st["C02"] == "errored"
    assert rep.results["C02"].notes.startswith("InsufficientTruncation")
    assert len(st) == 12


def test_unknown_check_id():
    with pytest.raises(ValueError):
        run_suite(ExperimentConfig(checks=("C99",)))
