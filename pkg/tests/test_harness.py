import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourlat.errors import ConfigError, DegenerateDataError, ExperimentError
from fourlat.harness import (CSV_COLUMNS, ExperimentConfig, ExperimentReport, RateReport, emit,
                             fit_rate, identity_suite, ingest, load_config, rate_report, run,
                             worker_count)

HS = [2.0 ** -k for k in range(2, 8)]


def test_fit_exact_power_law():
    slope, intercept, r2 = fit_rate([(h, h ** 2) for h in HS], drop_largest=0)
    assert slope == pytest.approx(2.0) and r2 == pytest.approx(1.0)
    slope, intercept, _ = fit_rate([(h, 3 * h ** 1.5) for h in HS])
    assert slope == pytest.approx(1.5) and intercept == pytest.approx(math.log(3))


def test_fit_noisy():
    rng = np.random.default_rng(7)
    pts = [(h, h ** 1.2 * (1 + 0.05 * rng.standard_normal())) for h in HS]
    assert fit_rate(pts)[0] == pytest.approx(1.2, abs=0.1)


def test_fit_degenerate():
    with pytest.raises(DegenerateDataError):
        fit_rate([(h, 0.0) for h in HS])
    with pytest.raises(DegenerateDataError):
        fit_rate([(0.5, 1.0), (0.25, 0.5), (0.125, 0.25)], drop_largest=1)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-6, 1e6), st.floats(0.1, 3.0))
def test_fit_scale_equivariant(c, g):
    pts = [(h, h ** g * (1 + 0.1 * math.sin(7 * h))) for h in HS]
    s1 = fit_rate(pts)[0]
    s2 = fit_rate([(h, c * e) for h, e in pts])[0]
    assert abs(s1 - s2) < 1e-10


def test_verdict_needs_r2():
    rep = RateReport([], 2.0, 0.0, 0.9, 2.0, 0.15)
    assert not rep.verdict
    assert RateReport([], 2.1, 0.0, 0.99, 2.0, 0.15).verdict


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="rate-free", h_list=[0.1, 0.2, 0.05, 0.01])
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="rate-free", h_list=[0.5, 0.25, 0.125])
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="rate-free", grid={"r": 2})


def test_h_range_override():
    cfg = ExperimentConfig(kind="rate-free").with_h_range(2e-3, 6)
    assert cfg.h_list[0] == 0.25 and cfg.h_list[-1] == pytest.approx(2e-3)
    assert len(cfg.h_list) == 6


def test_load_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"kind": "rate-free", "seed": 3}))
    assert load_config(p, {"seed": 5}).seed == 5
    p.write_text(json.dumps({"kind": "rate-free", "bogus": 1}))
    with pytest.raises(ConfigError):
        load_config(p)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("FOURLAT_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("FOURLAT_THREADS", "x")
    with pytest.raises(ConfigError):
        worker_count()


def test_emit_empty_csv(tmp_path):
    p = tmp_path / "e.csv"
    emit(ExperimentReport("e", "rate-free", "laplacian"), "csv", p)
    assert p.read_text().strip() == ",".join(CSV_COLUMNS)


def _rate_report():
    rep = ExperimentReport("r", "rate-free", "laplacian", rows=[(h, h ** 2) for h in HS])
    rep.rate = rate_report(rep.rows, 2.0, 0.15)
    return rep


def test_emit_rows_and_summary(tmp_path):
    p = tmp_path / "r.csv"
    emit(_rate_report(), "csv", p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 6 + 1
    assert lines[-1].endswith(",pass")


def test_json_round_trip(tmp_path):
    p = tmp_path / "r.json"
    rep = _rate_report()
    rep.checks = {"x": [True, 1e-12]}
    emit(rep, "json", p)
    back = ingest(p)
    assert back == rep


def test_run_deterministic(tmp_path):
    cfgs = []
    for i in range(2):
        out = tmp_path / f"out{i}.csv"
        cfg = ExperimentConfig(kind="rate-free", symbol={"symbol": "fraclap", "s": 1.5},
                               output={"csv": str(out)}, probe={"z": [-1.0, 0.0]})
        run(cfg)
        cfgs.append(out.read_bytes())
    assert cfgs[0] == cfgs[1]


def test_run_rate_free_fraclap():
    rep = run(ExperimentConfig(kind="rate-free", symbol={"symbol": "fraclap", "s": 1.5}))
    assert rep.rate.slope == pytest.approx(1.5, abs=0.15)
    assert rep.verdict


def test_run_propagates_context():
    cfg = ExperimentConfig(kind="rate-free", probe={"z": [1.0, 0.0]})
    with pytest.raises(ExperimentError) as info:
        run(cfg)
    assert "h=" in str(info.value) and "stage=rate-free" in str(info.value)


def test_failed_check_fails_report():
    rep = _rate_report()
    rep.checks["broken"] = [False, 1.0]
    assert not rep.verdict


def test_identity_suite(pair):
    checks = identity_suite(pair)
    assert all(ok for ok, _ in checks.values())
