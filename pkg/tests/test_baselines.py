import networkx as nx
import numpy as np
import pytest

from corpus import CorpusRecord
from engine import RandomPolicy, baseline_ged_config, human_agreement_eval, random_baseline_eval, random_script
from errors import InvalidArgumentError
from tests.strategies import chain, synthetic_gold_corpus

EVENTS = [f"event {i}" for i in range(8)]


# ----- 정책 -----

@pytest.mark.parametrize("kwargs", [
    {"kind": "random-tree"}, {"p_branch": 1.5}, {"seed": -1}, {"seed": 1 << 64},
])
def test_policy_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        RandomPolicy(**kwargs)


def test_policy_names_and_record_seeds():
    assert RandomPolicy().name == "random-chain"
    assert RandomPolicy("random-dag", p_branch=0.25).name == "random-dag(p_branch=0.25)"
    assert RandomPolicy(seed=6).for_record(3).seed == 5


# ----- random_script -----

def test_single_event_has_no_edges():
    for kind in ("random-chain", "random-dag"):
        g = random_script(["only step"], RandomPolicy(kind, seed=1))
        assert g.n_events == 1 and g.edges == []


def test_no_events_rejected():
    with pytest.raises(InvalidArgumentError):
        random_script([])


def test_random_chain_is_a_permuted_chain():
    g = random_script(EVENTS, RandomPolicy(seed=3))
    assert len(g.edges) == len(EVENTS) - 1
    assert g.max_degree() == 1
    assert len(g.linear_extensions(10)) == 1


def test_same_seed_same_script():
    for kind in ("random-chain", "random-dag"):
        a = random_script(EVENTS, RandomPolicy(kind, seed=42))
        b = random_script(EVENTS, RandomPolicy(kind, seed=42))
        assert a == b
    scripts = {tuple(random_script(EVENTS, RandomPolicy(seed=s)).edges) for s in range(10)}
    assert len(scripts) > 1


def test_random_dag_is_valid_and_connected():
    for seed in range(200):
        n = 2 + seed % 9
        g = random_script(EVENTS[:n] + [f"extra {i}" for i in range(n - len(EVENTS))],
                          RandomPolicy("random-dag", seed=seed, p_branch=0.5))
        assert g.validate().ok
        assert nx.is_weakly_connected(g.to_networkx())
        assert len(g.sources()) == 1


def test_random_dag_without_branching_is_a_tree():
    g = random_script(EVENTS, RandomPolicy("random-dag", seed=9, p_branch=0.0))
    assert len(g.edges) == len(EVENTS) - 1
    assert all(in_degree <= 1 for _, in_degree in g.to_networkx().in_degree())


# ----- 기준선 평가 -----

def test_random_chain_f1_on_synthetic_corpus():
    report = random_baseline_eval(synthetic_gold_corpus(1000, seed=0), RandomPolicy(seed=0))
    f1 = report.macro()["prf"].f1 * 100
    assert 15.0 <= f1 <= 27.0
    assert report.label == "random-chain"
    assert report.ok


def test_random_chain_matches_expected_f1_on_chains():
    # 길이 n chain 정답에 대해 E[F1] = 1/n
    n, trials = 4, 2000
    gold = chain([f"e{i}" for i in range(n)])
    records = [CorpusRecord.from_graph(f"r{i}", gold) for i in range(trials)]
    report = random_baseline_eval(records, RandomPolicy(seed=7))
    f1 = np.array([row.prf.f1 for row in report.rows])
    se = f1.std(ddof=1) / np.sqrt(trials)
    assert abs(f1.mean() - 1 / n) <= 4 * se


def test_single_event_corpus_scores_perfectly():
    records = [CorpusRecord.from_graph(f"r{i}", chain(["alone"])) for i in range(5)]
    report = random_baseline_eval(records, RandomPolicy(seed=1))
    assert report.macro()["prf"].f1 == 1.0


def test_baseline_is_reproducible():
    records = synthetic_gold_corpus(50, seed=2)
    a = random_baseline_eval(records, RandomPolicy("random-dag", seed=11)).to_dict()
    b = random_baseline_eval(records, RandomPolicy("random-dag", seed=11)).to_dict()
    assert a == b


def test_baseline_ged_scores_root_and_leaf():
    cfg = baseline_ged_config()
    assert cfg.include_virtual and cfg.approximate
    assert not baseline_ged_config(include_virtual=False).include_virtual


def test_random_dag_edit_distance_band():
    report = random_baseline_eval(synthetic_gold_corpus(1000, seed=0), RandomPolicy("random-dag", seed=3),
                                  with_ged=True, jobs=4)
    macro = report.macro()
    assert report.ok and len(report.rows) == 1000
    assert 8.0 <= macro["ged"] <= 14.0


def test_events_only_edit_distance_is_lower():
    records = synthetic_gold_corpus(60, seed=5)
    policy = RandomPolicy("random-dag", seed=3)
    augmented = random_baseline_eval(records, policy, with_ged=True).macro()["ged"]
    events_only = random_baseline_eval(records, policy, with_ged=True,
                                       ged_cfg=baseline_ged_config(include_virtual=False)).macro()["ged"]
    assert 0.0 < events_only < augmented


# ----- annotator 일치도 행 -----

def test_human_row():
    g = chain([f"e{i}" for i in range(5)])
    agree = CorpusRecord.from_graph("agree", g, alt_edges=list(g.edges))
    swap = CorpusRecord.from_graph("swap", g, alt_edges=[(1, 0), (0, 2), (2, 3), (3, 4)])
    single = CorpusRecord.from_graph("single", g)
    report = human_agreement_eval([agree, swap, single], with_ged=True)
    assert report.label == "human"
    assert [row.id for row in report.rows] == ["agree", "swap"]
    assert report.macro()["prf"].f1 == pytest.approx(0.75)
    assert report.rows[0].ged == 0.0
