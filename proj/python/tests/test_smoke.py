import json
import math
from pathlib import Path

import pytest

import ordelic

DATA = Path(__file__).resolve().parents[2] / "data"


def spec(name):
    return json.loads((DATA / name).read_text())


@pytest.fixture(scope="module")
def normals():
    surrogate, details = ordelic.construct(spec("three_outcome_boundaries.json"), "normals", seed=1)
    assert details["max_normal_error"] < 1e-8
    return surrogate


def test_normals_fixture(normals):
    assert normals.kind == "normals"
    assert normals.thresholds == [0.0, 1.0]
    lo, hi = normals.range
    assert lo == pytest.approx(-1 / math.sqrt(14))
    assert hi == pytest.approx(1 + 3 / math.sqrt(14))
    assert normals.lipschitz() == pytest.approx(18.70828693386987, rel=1e-9)
    assert normals.gamma([0.7, 0.1, 0.2]) == pytest.approx(0.0, abs=1e-12)
    assert normals.link(0.5) == 2


def test_embedding_fixture():
    surrogate, details = ordelic.construct(spec("three_outcome_cost.json"), "embedding")
    assert details["interpolation"] == [0, 0.5, 1, 2, 3]
    assert surrogate.thresholds == [0.5, 2.0]
    assert surrogate.gamma([1, 0, 0]) == pytest.approx(0.0)
    assert surrogate.gamma([0, 0, 1]) == pytest.approx(3.0)
    checked, passed = ordelic.refinement_check(surrogate, 5000, seed=3)
    assert checked == passed > 4900


def test_json_round_trip(normals):
    back = ordelic.Surrogate.from_json(normals.to_json())
    for p in ([0.2, 0.3, 0.5], [0.9, 0.05, 0.05], [0.1, 0.8, 0.1]):
        assert back.gamma(p) == pytest.approx(normals.gamma(p), abs=1e-12)
        assert back.discrete(p) == normals.discrete(p)


def test_level_sets(normals):
    rows = ordelic.level_set_grid(normals, 2)
    assert len(rows) == 6
    for p, discrete, value in rows:
        assert sum(p) == pytest.approx(1.0)
        assert normals.link(value) in discrete


def test_audit_steep_region(normals):
    scenario = spec("steep_region_star.json")
    _, predictor = ordelic.simulate(scenario, 10, seed=1)
    report = ordelic.audit(normals, predictor, scenario=scenario)
    by_notion = {r["notion"]: r for r in report["reports"]}
    assert by_notion["distribution"]["epsilon_plot"] == pytest.approx(0.04, abs=1e-6)
    assert by_notion["surrogate"]["epsilon_hat"] == pytest.approx(0.43, abs=0.02)
    assert report["all_satisfied"]


def test_audit_on_rows(normals):
    scenario = {
        "n": 3,
        "features": [{"x_id": "a", "weight": 1.0, "conditional": [0.2, 0.3, 0.5]}],
        "predictor": {"type": "bayes"},
    }
    rows, predictor = ordelic.simulate(scenario, 2000, seed=4)
    assert len(rows) == 2000 and all(1 <= y <= 3 for _, y in rows)
    report = ordelic.audit(normals, predictor, rows=rows)
    assert report["reports"][0]["epsilon_hat"] < 0.05


def test_counterexample(normals):
    found = ordelic.counterexample(normals, 5.0, seed=2)
    assert found["found"]
    dist, surr = found["audits"]
    assert surr["epsilon_hat"] > 5 * dist["epsilon_hat"]
    ratio, p, q = ordelic.lipschitz_estimate(normals, samples=5000, seed=1)
    assert 0 < ratio <= normals.lipschitz() + 1e-6


def test_errors_raise():
    with pytest.raises(ordelic.OrdelicError):
        ordelic.construct({"n": 3, "cost_matrix": [[0, 1, 2]]}, "normals")
    with pytest.raises(ValueError):
        ordelic.construct(spec("three_outcome_boundaries.json"), "embedding")
