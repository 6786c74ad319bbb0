import json

import pytest

from steklov.verify.cli import build_parser, main, resolve_config


def test_flags_override_config(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text("dim = 2\nseed = 4\n[heat]\npicard_t = 0.125\n")
    args = build_parser().parse_args(["solve", "--config", str(f), "--dim", "1", "--p", "2,inf"])
    cfg = resolve_config(args)
    assert cfg.dim == 1 and cfg.seed == 4 and cfg.heat.picard_t == 0.125
    assert cfg.p == (2.0, float("inf"))


def test_unknown_config_key_exits_2(tmp_path):
    f = tmp_path / "c.toml"
    f.write_text("bogus = 1\n")
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--config", str(f)])
    assert exc.value.code == 2


def test_bad_potential_exits_2(tmp_path, capsys):
    assert main(["solve", "--dim", "1", "--potential", "gaussian", "--out", str(tmp_path)]) == 2


def test_solve_writes_csv(tmp_path, capsys):
    assert main(["solve", "--dim", "1", "--max-degree", "16", "--potential", "constant:1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert lines[1] == "index,lambda,residual,tail_energy"
    assert float(lines[2].split(",")[1]) == pytest.approx(1.0)


def test_nodal_and_norms(tmp_path, capsys):
    assert main(["nodal", "--dim", "1", "--max-degree", "40", "--out", str(tmp_path)]) == 0
    assert main(["norms", "--dim", "2", "--max-degree", "24", "--p", "4", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "nodal.csv").exists() and (tmp_path / "norms.csv").exists()
    assert "slope" in capsys.readouterr().out


def test_verify_and_report(tmp_path, capsys):
    code = main(["verify", "--dim", "1", "--checks", "C02,C07", "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "C02 PASS" in out and "C07 PASS" in out
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert len(man["checks"]) == 12
    assert main(["report", "--out", str(tmp_path)]) == 0
    assert "totals" in capsys.readouterr().out


def test_verify_exit_1_on_error(tmp_path, capsys):
    assert main(["verify", "--dim", "1", "--max-degree", "8", "--checks", "C02", "--out", str(tmp_path)]) == 1


def test_report_without_manifest(tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path / "none")]) == 2
