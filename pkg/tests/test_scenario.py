from __future__ import annotations

import json
from fractions import Fraction

import pytest

from relindet import engine
from relindet.engine import clock, run
from relindet.errors import ScenarioError
from relindet.scenario import (
    BUILTINS,
    builtin_text,
    dump_scenario,
    load_builtin,
    parse_scenario,
)


def entries(report):
    return report.document["queries"]


def by_label(report, label):
    return next(e for e in entries(report) if e["label"] == label)


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_round_trip(name):
    s = load_builtin(name)
    assert parse_scenario(dump_scenario(s)) == s


@pytest.mark.parametrize("name", BUILTINS)
def test_builtin_runs_without_query_errors(name):
    report = run(load_builtin(name))
    assert all("error" not in e for e in entries(report))


def test_fig1_shape():
    s = load_builtin("fig1")
    assert len(s.observers) == 4 and len(s.trngs) == 1
    assert s.frame("moving").velocity == Fraction(1, 2)
    assert {o.label: o.worldline.velocity for o in s.observers}["Charlie"] == Fraction(1, 2)


def test_fig1_truth_values():
    r = run(load_builtin("fig1"))
    assert by_label(r, "A' (Debbie)")["result"]["value"] == "Indeterminate"
    assert by_label(r, "B = C (Bob and Charlie at 1:00 pm)")["result"]["value"] == "Indeterminate"
    assert by_label(r, "Alice at 1:01 pm")["result"]["value"] == "True"
    falsify = [e for e in entries(r) if e["kind"] == "falsify-present-reality"]
    assert [e["result"]["found"] for e in falsify] == [True, True]
    assert falsify[1]["result"]["Q"] == ["1/2", 1]


def test_fig2_frontier_half_minute():
    r = run(load_builtin("fig2"))
    entry = by_label(r, "30 s after 1:00 pm")
    assert entry["result"]["t"] == "1/2"
    assert entry["conditioning_events"] == ["a", "b"]
    assert clock(entry["result"]["t"]) == "1:00:30 pm"


def test_fig3_overlap():
    r = run(load_builtin("fig3"))
    e = by_label(r, "between the measurements, both orderings")["result"]
    assert e["overlap_abs2"] == pytest.approx(0.25, abs=1e-12)
    assert by_label(r, "after both measurements")["result"]["overlap_abs2"] == pytest.approx(1, abs=1e-12)


def test_correlated_and_prbox_propensities():
    for name, inside in (("correlated", "3/4"), ("prbox", 1)):
        r = run(load_builtin(name))
        assert by_label(r, "inside Alice's cone")["result"]["propensity"] == inside
        assert by_label(r, "outside Alice's cone")["result"]["propensity"] == "1/2"


def test_report_is_reproducible():
    s = load_builtin("singlet")
    assert run(s, seed=7).to_json() == run(s, seed=7).to_json()
    doc = json.loads(run(s, seed=7).to_json())
    assert doc["seed"] == 7 and all(e["elapsed"] is None for e in doc["queries"])
    assert run(s, timing=True).document["queries"][0]["elapsed"] is not None


def test_sampled_outcome_depends_on_seed():
    s = load_builtin("correlated")
    values = {run(s, seed=k).document["events"][1]["value"] for k in range(20)}
    assert values == {0, 1}


def test_empty_document():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario("")
    assert exc.value.issues == ["missing required field: c"]


def test_syntax_error_has_position():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario('{"c": 1,\n  "name": }')
    assert exc.value.issues[0].startswith("2:11: syntax error")


def test_duplicate_determination_rejected():
    doc = {"c": 1, "events": [{"variable": "a", "at": [0, 0]}, {"variable": "a", "at": [1, 0]}]}
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert "determined more than once" in exc.value.issues[0]


@pytest.mark.parametrize("doc,fragment", [
    ({"c": 0}, "c must be positive"),
    ({"c": 1, "schema": 2}, "unsupported schema"),
    ({"c": 1, "bogus": 1}, "unknown top-level field"),
    ({"c": 1, "frames": [{"label": "f", "velocity": 1}]}, "below c"),
    ({"c": 1, "observers": [{"label": "o"}]}, "missing required field 'anchor'"),
    ({"c": 1, "events": [{"variable": "a", "at": {"t": 0, "x": 0, "frame": "nope"}}]}, "unknown frame"),
    ({"c": 1, "queries": [{"kind": "truth", "proposition": "z=0", "at": [0, 0]}]}, "undeclared variable"),
    ({"c": 1, "queries": [{"kind": "dance"}]}, "unknown query kind"),
    ({"c": 1, "events": [{"variable": "a", "at": [0, 0]}],
      "queries": [{"kind": "truth", "proposition": "a=", "at": [0, 0]}]}, "queries[0].proposition"),
    ({"c": 1, "seed": -3}, "seed must be"),
    ({"c": 1, "diagram": {"simultaneity": [{"frame": "nope"}]}}, "unknown frame"),
    ({"c": 1, "diagram": {"window": {"t": [2, 1]}}}, "low must be below high"),
    ({"c": 1, "correlations": [{"variables": ["a"], "joint": {"0": "1/2", "1": "1/2"}}]}, "no determination point"),
    ({"c": 1, "events": [{"variable": "a", "at": [0, 0]}],
      "correlations": [{"variables": ["a"], "joint": {"0": "1/2"}}]}, "normalization"),
])
def test_semantic_errors(doc, fragment):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert any(fragment in issue for issue in exc.value.issues), exc.value.issues


def test_multiple_errors_collected():
    doc = {"c": 1, "bogus": 1, "observers": [{"label": "o"}], "seed": "x"}
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert len(exc.value.issues) == 3


def test_points_in_moving_frame_converted():
    doc = {"c": 1, "frames": [{"label": "m", "velocity": "3/5"}],
           "events": [{"variable": "a", "at": {"t": 0, "x": 0, "frame": "m"}},
                      {"variable": "b", "at": {"t": 1, "x": 0, "frame": "m"}}]}
    s = parse_scenario(doc)
    b = s.locations()["b"]
    # one unit of the moving clock is gamma = 5/4 rest minutes, during which it moves 3/4
    assert float(b.t) == pytest.approx(1.25) and float(b.x) == pytest.approx(0.75)


def test_per_query_errors_are_recorded(monkeypatch):
    def broken(self, p):
        raise ValueError("boom")

    monkeypatch.setattr(engine._Evaluator, "q_frontier", broken)
    r = run(load_builtin("fig2"))
    failed = [e for e in entries(r) if e["kind"] == "frontier"]
    assert failed and all(e["error"] == "ValueError: boom" and e["result"] is None for e in failed)
    assert all("error" not in e for e in entries(r) if e["kind"] == "truth")


def test_text_report_and_color():
    r = run(load_builtin("fig2"))
    plain = r.to_text()
    assert "from t = 1/2 min (1:00:30 pm)" in plain and "\x1b[" not in plain
    assert "\x1b[32mTrue" in r.to_text(color=True)


def test_builtin_text_is_json():
    for name in BUILTINS:
        assert json.loads(builtin_text(name))["schema"] == 1
    with pytest.raises(KeyError):
        builtin_text("fig9")
