import csv
import io
import json
import math

import pytest

from maglab.asymptotics import Case, Limit, RegimeReport
from maglab.experiments import (
    CSV_FIELDS,
    ResourceLimitExceeded,
    SweepConfig,
    SweepRow,
    brute_force,
    oracle_grid,
    rows_to_csv,
    rows_to_json,
    run_sweep,
    verify_identities,
    verify_oracle,
)
from maglab.model import MagParams


def _config(**kw):
    base = dict(mu1=0.5, q=(0.8, 0.5, 0.2), rho_list=[0.5, 2.0], n_list=[16, 64],
                replications=200, seed=7)
    base.update(kw)
    return SweepConfig(**base)


class TestBruteForce:
    def test_two_nodes_by_hand(self, config_a):
        o = brute_force(config_a(2, 1))
        assert o.p_zero_exact == pytest.approx(0.5, abs=1e-15)
        assert o.e_I_exact == pytest.approx(1.0, abs=1e-15)
        assert o.e_I_sq_exact == pytest.approx(2.0, abs=1e-15)
        assert list(o.per_level_exact) == pytest.approx([0.65, 0.35], abs=1e-15)

    def test_cap(self, config_a):
        with pytest.raises(ValueError):
            brute_force(config_a(6, 1))


def test_oracle_grid_passes():
    grid = list(oracle_grid())
    assert len(grid) == 24
    for p in grid:
        assert verify_oracle(p).passed


def test_identities_pass_and_catch_mutation():
    p = MagParams.build(10, 3, 0.5, (0.8, 0.5, 0.2))
    good = verify_identities(p, [0.2, 0.5, 0.7])
    assert good.passed and len(good.checks) == 8
    bad = verify_identities(p, [0.2, 0.5, 0.7], gamma_scale=1.01)
    assert not bad.passed
    assert any(line.startswith("FAIL") and "reconstructs" in line for line in bad.lines())


class TestSweepConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            _config(n_list=[64, 16])
        with pytest.raises(ValueError):
            _config(mode="fast")
        with pytest.raises(ValueError):
            _config(replications=0)

    def test_low_replication_warns(self):
        with pytest.warns(UserWarning, match="recommended"):
            _config(replications=10)


def test_sweep_rows_and_formats():
    cfg = _config()
    rows = run_sweep(cfg)
    assert [(r.rho, r.n) for r in rows] == [(0.5, 16), (0.5, 64), (2.0, 16), (2.0, 64)]
    for r in rows:
        assert r.L == max(1, math.floor(r.rho * math.log(r.n) + 0.5))
        assert 0 <= r.p_lower <= r.p_upper <= 1
        assert r.bracket_consistent()
    text = rows_to_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert tuple(parsed[0].keys()) == CSV_FIELDS
    assert parsed[2]["case"] == "CaseTwo" and parsed[2]["predicted"] == "Zero"
    doc = json.loads(rows_to_json(rows, cfg))
    assert doc["seed"] == 7 and len(doc["rows"]) == 4
    assert run_sweep(cfg) == rows
    assert rows_to_csv(run_sweep(cfg)) == text


def test_full_graph_mode_matches_census():
    a = run_sweep(_config(n_list=[32], rho_list=[1.0], replications=100))
    b = run_sweep(_config(n_list=[32], rho_list=[1.0], replications=100, mode="full-graph"))
    assert a[0].p_hat == b[0].p_hat


def test_resource_caps():
    with pytest.raises(ResourceLimitExceeded):
        run_sweep(_config(max_rows=3))
    with pytest.raises(ResourceLimitExceeded):
        run_sweep(_config(max_seconds=0.0))


def test_bracket_consistency_at_degenerate_estimate():
    regime = RegimeReport(0.5, Case.CASE_ONE, 0.6, 0.5, Limit.ONE)
    row = SweepRow(8192, 5, 0.5, 0.55, 1.0, 0.0, 1e-4, 1.1e-4, 0.9999, 0.99995, regime, 2000)
    assert row.bracket_consistent()
    far = SweepRow(8192, 5, 0.5, 0.55, 1.0, 0.0, 0.5, 0.6, 0.5, 0.58, regime, 2000)
    assert not far.bracket_consistent()
