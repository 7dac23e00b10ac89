from dataclasses import replace

import numpy as np
import pytest

from config import GedConfig
from engine import apply_edit_script, ged, ged_approx, ged_breakdown
from engine.ged import _MappingSearch, _prepare
from errors import InvalidArgumentError, SizeLimitError
from graph import ScriptGraph
from tests.oracles import brute_ged, count_mappings
from tests.strategies import chain, random_dag

SMALL_LABELS = ["crack eggs", "whisk", "pour", "Crack  eggs"]


def pair(rng, max_nodes):
    n1 = int(rng.integers(0, max_nodes + 1))
    n2 = int(rng.integers(0, max_nodes + 1))
    return (random_dag(rng, n1, float(rng.uniform(0, 0.7)), labels=SMALL_LABELS),
            random_dag(rng, n2, float(rng.uniform(0, 0.7)), labels=SMALL_LABELS))


# ----- 예제 -----

def test_identical_scripts_have_zero_distance():
    g = chain(["a", "b", "c"])
    cost, script = ged(g, g.copy())
    assert cost == 0 and script.ops == []


def test_single_relabel():
    cost, script = ged(chain(["a", "b"]), chain(["a", "c"]))
    assert cost == 1
    assert [op.kind for op in script.ops] == ["V-Rep"]
    assert (script.ops[0].old_label, script.ops[0].new_label) == ("b", "c")


def test_inserted_middle_event():
    cost, script = ged(chain(["a", "b"]), chain(["a", "c", "b"]))
    assert cost == 3
    breakdown = ged_breakdown(script)
    assert (breakdown["V-Rep"], breakdown["V-Ins"], breakdown["E-Ins"]) == (1, 1, 1)
    assert sum(breakdown.values()) == 3


def test_label_normalization_applies():
    assert ged(chain(["Mix  the batter"]), chain(["mix the batter"]))[0] == 0
    exact = GedConfig(node_match="exact")
    assert ged(chain(["Mix  the batter"]), chain(["mix the batter"]), exact)[0] == 1


def test_empty_graphs():
    empty = ScriptGraph("s")
    assert ged(empty, empty)[0] == 0
    cost, script = ged(empty, chain(["a", "b"]))
    assert cost == 3
    assert ged_breakdown(script)["V-Ins"] == 2


def test_custom_costs():
    cfg = GedConfig(costs={"V-Rep": 5.0})
    # 교체 대신 삭제 + 삽입 (노드 2, 간선 2)
    assert ged(chain(["a", "b"]), chain(["a", "c"]), cfg)[0] == 4


def test_endpoint_rep_charges_preserved_edges():
    cfg = GedConfig(edge_rep_mode="endpoint-rep")
    cost, script = ged(chain(["a", "b"]), chain(["a", "c"]), cfg)
    assert cost == 2
    assert ged_breakdown(script)["E-Rep"] == 1


def test_virtual_nodes_are_optional():
    unordered = ScriptGraph.from_edges("s", ["a", "b"])
    ordered = chain(["a", "b"], "s")
    assert ged(unordered, ordered)[0] == 1
    assert ged(unordered, ordered, GedConfig(include_virtual=True))[0] == 3
    renamed = chain(["a", "b"], "other scenario")
    assert ged(ordered, renamed)[0] == 0
    assert ged(ordered, renamed, GedConfig(include_virtual=True))[0] == 1


# ----- 크기 제한 / 근사 -----

def test_size_limit():
    big = chain([f"e{i}" for i in range(7)])
    with pytest.raises(SizeLimitError) as info:
        ged(big, big)
    assert (info.value.n_nodes, info.value.limit) == (14, 12)
    cost, _ = ged(big, big, GedConfig(approximate=True))
    assert cost == 0


def test_beam_must_be_positive():
    with pytest.raises(InvalidArgumentError):
        ged_approx(chain(["a"]), chain(["a"]), beam=0)


def test_exhaustive_beam_matches_exact():
    rng = np.random.default_rng(4)
    for _ in range(150):
        g1, g2 = pair(rng, 3)
        exact, _ = ged(g1, g2)
        approx, _ = ged_approx(g1, g2, beam=10 ** 6)
        assert approx == exact
        assert ged_approx(g1, g2, beam=1)[0] >= exact


# ----- 오라클 -----

def test_oracle_mapping_count():
    assert count_mappings(2, 2) == 7
    assert count_mappings(0, 3) == 1


def test_exact_matches_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(200):
        g1, g2 = pair(rng, 5)
        cost, script = ged(g1, g2)
        assert cost == brute_ged(g1, g2)
        assert script.total_cost == cost
        assert apply_edit_script(g1, g2, script)


def test_symmetry_and_triangle_inequality():
    rng = np.random.default_rng(23)
    for _ in range(500):
        a, b = pair(rng, 4)
        c = random_dag(rng, int(rng.integers(0, 5)), 0.4, labels=SMALL_LABELS)
        ab, ba = ged(a, b)[0], ged(b, a)[0]
        assert ab == ba
        assert ged(a, c)[0] <= ab + ged(b, c)[0]


def test_tampered_edit_script_is_rejected():
    g1, g2 = chain(["a", "b"]), chain(["a", "c", "b"])
    _, script = ged(g1, g2)
    assert apply_edit_script(g1, g2, script)
    broken = replace(script, ops=script.ops[:-1])
    assert not apply_edit_script(g1, g2, broken)


def test_relabel_in_the_middle_of_a_chain():
    cost, script = ged(chain(["a", "b", "c"]), chain(["a", "x", "c"]))
    assert cost == 1
    breakdown = ged_breakdown(script)
    assert breakdown["V-Rep"] == 1 and sum(breakdown.values()) == 1


def test_breakdown_of_empty_script():
    _, script = ged(chain(["a"]), chain(["a"]))
    assert set(ged_breakdown(script).values()) == {0}


MID_LABELS = ["crack eggs", "whisk", "pour", "bake", "cool", "Crack  eggs"]


def test_symmetry_and_triangle_inequality_on_larger_scripts():
    cfg = GedConfig(max_exact_nodes=16)
    rng = np.random.default_rng(29)
    for _ in range(25):
        a, b, c = (random_dag(rng, int(rng.integers(6, 9)), float(rng.uniform(0.1, 0.5)), labels=MID_LABELS)
                   for _ in range(3))
        ab, script = ged(a, b, cfg)
        assert ab == ged(b, a, cfg)[0]
        assert apply_edit_script(a, b, script, cfg)
        assert ged(a, c, cfg)[0] <= ab + ged(b, c, cfg)[0]
        assert ged_approx(a, b, cfg)[0] >= ab


def test_assignment_bound_never_exceeds_exact_cost():
    cfg = GedConfig(max_exact_nodes=16)
    rng = np.random.default_rng(31)
    for _ in range(40):
        g1, g2 = pair(rng, 6)
        search = _MappingSearch(_prepare(g1, cfg), _prepare(g2, cfg), cfg)
        cost, mapping = search.astar()
        assert search.assignment_bound(()) <= cost
        # 최적 경로 위의 모든 접두사에서도 하한
        spent = 0.0
        for depth in range(len(mapping)):
            prefix = mapping[:depth]
            assert spent + search.assignment_bound(prefix) <= cost + 1e-9
            spent += search.step_cost(prefix, mapping[depth])
