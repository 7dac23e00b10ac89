import pytest
from hypothesis import given, settings

from engine import PrfScore, edge_prf, mean_prf
from errors import InvalidArgumentError
from graph import ScriptGraph
from tests.oracles import label_edges
from tests.strategies import chain, scripts


def test_identical_scripts_score_one():
    g = chain(["a", "b", "c"])
    assert edge_prf(g, g) == PrfScore(1.0, 1.0, 1.0)


def test_reversed_chain_scores_zero():
    assert edge_prf(chain(["a", "b", "c"]), chain(["c", "b", "a"])).f1 == 0.0


def test_two_of_three_edges():
    pred = label_edges([("a", "b"), ("b", "c"), ("c", "d")])
    gold = label_edges([("a", "b"), ("b", "c"), ("b", "d")])
    score = edge_prf(pred, gold)
    assert score.precision == pytest.approx(2 / 3)
    assert score.recall == pytest.approx(2 / 3)
    assert score.f1 == pytest.approx(2 / 3)


def test_precision_and_recall_swap_under_literal_convention():
    pred = ScriptGraph.from_edges("s", ["a", "b", "c"], [(0, 1)])
    gold = chain(["a", "b", "c"], "s")
    standard = edge_prf(pred, gold)
    literal = edge_prf(pred, gold, convention="paper-literal")
    assert (standard.precision, standard.recall) == (1.0, 0.5)
    assert (literal.precision, literal.recall) == (0.5, 1.0)
    assert standard.f1 == literal.f1 == pytest.approx(2 / 3)


def test_matching_is_by_label_not_id():
    pred = ScriptGraph.from_edges("s", ["C", "b ", "a"], [(2, 1), (1, 0)])
    assert edge_prf(pred, chain(["a", "b", "c"])).f1 == 1.0


def test_matching_by_id():
    pred = ScriptGraph.from_edges("s", ["x", "y"], [(0, 1)])
    gold = ScriptGraph.from_edges("s", ["p", "q"], [(0, 1)])
    assert edge_prf(pred, gold, match="id").f1 == 1.0
    with pytest.raises(InvalidArgumentError):
        edge_prf(pred, gold)


def test_event_set_mismatch_raises():
    with pytest.raises(InvalidArgumentError, match="mismatch"):
        edge_prf(chain(["a", "b"]), chain(["a", "b", "c"]))


def test_unknown_convention_raises():
    g = chain(["a", "b"])
    with pytest.raises(InvalidArgumentError):
        edge_prf(g, g, convention="micro")


def test_empty_edge_sets():
    lone = ScriptGraph.from_edges("s", ["a", "b"])
    assert edge_prf(lone, lone).f1 == 1.0
    assert edge_prf(lone, chain(["a", "b"], "s")) == PrfScore(0.0, 0.0, 0.0)


def test_shortcut_edges_are_reduced_before_scoring():
    pred = ScriptGraph("s", chain(["a", "b", "c"]).events, [(0, 1), (1, 2), (0, 2)])
    assert edge_prf(pred, chain(["a", "b", "c"])).f1 == 1.0


@settings(max_examples=60, deadline=None)
@given(scripts(min_events=2, max_events=8), scripts(min_events=2, max_events=8))
def test_scores_stay_in_unit_range(a, b):
    n = min(a.n_events, b.n_events)
    pred = ScriptGraph.from_edges("s", [f"e{i}" for i in range(n)], [e for e in a.edges if max(e) < n])
    gold = ScriptGraph.from_edges("s", [f"e{i}" for i in range(n)], [e for e in b.edges if max(e) < n])
    score = edge_prf(pred, gold)
    assert 0.0 <= score.precision <= 1.0 and 0.0 <= score.recall <= 1.0
    assert min(score.precision, score.recall) - 1e-12 <= score.f1 <= max(score.precision, score.recall) + 1e-12
    assert edge_prf(gold, pred).f1 == pytest.approx(score.f1)


def test_mean_prf():
    assert mean_prf([]) is None
    mean = mean_prf([PrfScore(1.0, 0.5, 2 / 3), PrfScore(0.0, 0.5, 0.0)])
    assert (mean.precision, mean.recall) == (0.5, 0.5)
    assert mean.f1 == pytest.approx(1 / 3)
    assert mean.scaled()["f1"] == pytest.approx(100 / 3)


def test_listed_edge_examples():
    gold = label_edges([("a", "b"), ("b", "c"), ("b", "d")])
    pred = label_edges([("a", "b"), ("a", "c"), ("b", "d")])
    score = edge_prf(pred, gold)
    assert (score.precision, score.recall, score.f1) == pytest.approx((2 / 3, 2 / 3, 2 / 3))

    disjoint_gold = label_edges([("a", "c"), ("c", "b")])
    disjoint_pred = label_edges([("a", "b"), ("b", "c")])
    assert edge_prf(disjoint_pred, disjoint_gold).f1 == 0.0
