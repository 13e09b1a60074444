import json

from fourlat.cli import main


def write(tmp_path, cfg):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_identity_exit_zero(tmp_path, capsys):
    assert main(["identity", "--config", write(tmp_path, {"kind": "identity-suite"})]) == 0
    assert "PASS" in capsys.readouterr().out


def test_config_error_exit_two(tmp_path):
    assert main(["rate", "--config", write(tmp_path, {"kind": "bogus"})]) == 2
    assert main(["rate", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["eigen", "--config", write(tmp_path, {"kind": "identity-suite"})]) == 2


def test_failing_verdict_exit_one(tmp_path):
    cfg = {"kind": "rate-free", "symbol": {"symbol": "laplacian"}, "gamma": 1.0}
    assert main(["rate", "--config", write(tmp_path, cfg)]) == 1


def test_rate_overrides_and_csv(tmp_path):
    out = tmp_path / "r.csv"
    cfg = {"kind": "rate-free", "symbol": {"symbol": "pseudorel", "m": 1.0}}
    code = main(["rate", "--config", write(tmp_path, cfg), "--h-min", "0.0078125",
                 "--h-count", "5", "--csv", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 1 + 5 + 1
