import json

import numpy as np
import pytest

from codec import emit_dot
from corpus import (
    CorpusRecord, DotDirReader, agreement_f1, agreement_filter, corpus_stats, dump_jsonl, load_jsonl,
    passes_agreement, read_corpus, write_dot_dir,
)
from errors import DotSyntaxError, InvalidArgumentError, RecordParseError, SchemaError
from graph import DurationBucket, ScriptGraph
from tests.strategies import chain, random_dag, synthetic_gold_corpus


def record_obj(record_id, n=3, edges=None, **extra):
    obj = {
        "id": record_id,
        "scenario": "bake a cake",
        "events": [f"step {i}" for i in range(n)],
        "edges": [[i, i + 1] for i in range(n - 1)] if edges is None else edges,
    }
    obj.update(extra)
    return obj


def write_jsonl(path, objs):
    path.write_text("".join(json.dumps(o) + "\n" for o in objs), encoding="utf-8")
    return path


# ----- JSONL -----

def test_load_valid_lines(tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record_obj("a"), record_obj("b", 4), record_obj("c", 2)])
    corpus = load_jsonl(path)
    assert [r.id for r in corpus] == ["a", "b", "c"]
    assert corpus.quarantined == []
    assert corpus.records[1].n_events == 4
    assert corpus.records[2].line_no == 3


def test_cyclic_record_is_quarantined(tmp_path):
    objs = [record_obj("ok"), record_obj("loop", edges=[[0, 1], [1, 2], [2, 0]])]
    corpus = load_jsonl(write_jsonl(tmp_path / "c.jsonl", objs))
    assert [r.id for r in corpus] == ["ok"]
    assert len(corpus.quarantined) == 1
    bad = corpus.quarantined[0]
    assert (bad.line_no, bad.record_id) == (2, "loop")
    assert "CYCLE" in [v.code for v in bad.violations]


def test_cycle_in_alt_edges_is_quarantined(tmp_path):
    obj = record_obj("alt", alt_edges=[[0, 1], [1, 0]])
    corpus = load_jsonl(write_jsonl(tmp_path / "c.jsonl", [obj]))
    assert len(corpus) == 0
    assert corpus.quarantined[0].violations[0].message.startswith("alt_edges:")


def test_repairable_records_are_admitted(tmp_path):
    obj = record_obj("dup", edges=[[0, 1], [0, 1], [1, 2], [0, 2]])
    corpus = load_jsonl(write_jsonl(tmp_path / "c.jsonl", [obj]))
    assert [r.id for r in corpus] == ["dup"]
    assert corpus.records[0].graph().reduced().edges == [(0, 1), (1, 2)]


def test_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("\n\n", encoding="utf-8")
    corpus = load_jsonl(path)
    assert len(corpus) == 0 and corpus.quarantined == []


def test_malformed_json_reports_line_number(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps(record_obj("a")) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(RecordParseError) as info:
        load_jsonl(path)
    assert info.value.line_no == 2

    corpus = load_jsonl(path, strict=False)
    assert [r.id for r in corpus] == ["a"]
    assert corpus.quarantined[0].violations[0].code == "BAD_JSON"


def test_schema_violations(tmp_path):
    missing = record_obj("a")
    del missing["edges"]
    with pytest.raises(SchemaError) as info:
        load_jsonl(write_jsonl(tmp_path / "m.jsonl", [missing]))
    assert info.value.missing == ["edges"]

    with pytest.raises(SchemaError) as info:
        load_jsonl(write_jsonl(tmp_path / "x.jsonl", [record_obj("a", colour="red")]))
    assert info.value.extra == ["colour"]

    lenient = load_jsonl(write_jsonl(tmp_path / "s.jsonl", [record_obj("a", split="holdout")]), strict=False)
    assert lenient.quarantined[0].record_id == "a"
    assert lenient.quarantined[0].violations[0].code == "SCHEMA"


@pytest.mark.parametrize("events", [[1, 2], [{"label": "x"}], [{"text": "x", "duration": "fortnights"}]])
def test_bad_events_are_schema_errors(events):
    with pytest.raises(SchemaError):
        CorpusRecord.from_dict(record_obj("a", edges=[]) | {"events": events})


def test_event_objects_carry_durations():
    obj = record_obj("a", edges=[[0, 1]]) | {
        "events": [{"id": 0, "text": "boil water", "duration": "minutes"},
                   {"id": 1, "text": "steep tea", "duration": {"bucket": "minutes", "seconds": 240}}],
    }
    record = CorpusRecord.from_dict(obj)
    assert record.events[1].duration == DurationBucket("minutes", 240.0)
    assert record.to_dict()["events"][1]["duration"] == {"bucket": "minutes", "seconds": 240.0}


def test_dump_then_load_preserves_records(tmp_path):
    records = synthetic_gold_corpus(30, seed=1)
    records[0].alt_edges = records[0].edges[:1]
    records[1].parent_id, records[1].parent_edge = "s0000", (0, 1)
    path = tmp_path / "out.jsonl"
    assert dump_jsonl(records, path) == 30
    loaded = load_jsonl(path)
    assert loaded.records == records
    first = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    assert list(first)[:6] == ["id", "scenario", "source", "split", "events", "edges"]


# ----- agreement -----

def swapped_pair_record(record_id="r"):
    g = chain([f"e{i}" for i in range(5)])
    alt = [(1, 0), (0, 2), (2, 3), (3, 4)]
    return CorpusRecord.from_graph(record_id, g, alt_edges=alt)


def test_agreement_f1_examples():
    g = chain(["a", "b", "c"])
    same = CorpusRecord.from_graph("same", g, alt_edges=list(g.edges))
    assert agreement_f1(same).f1 == 1.0
    assert agreement_f1(swapped_pair_record()).f1 == pytest.approx(0.5)
    with pytest.raises(InvalidArgumentError):
        agreement_f1(CorpusRecord.from_graph("none", g))


@pytest.mark.parametrize("convention", ["standard", "paper-literal"])
def test_agreement_f1_is_symmetric_in_the_two_annotations(convention):
    rng = np.random.default_rng(13)
    for i in range(60):
        n = int(rng.integers(2, 8))
        first, second = random_dag(rng, n, 0.4), random_dag(rng, n, 0.4)
        record = CorpusRecord.from_graph(f"r{i}", first, alt_edges=list(second.edges))
        swapped = CorpusRecord.from_graph(f"r{i}", second, alt_edges=list(first.edges))
        assert agreement_f1(record, convention).f1 == pytest.approx(agreement_f1(swapped, convention).f1)


def test_agreement_threshold_boundary():
    assert passes_agreement(65.0, 65.0)
    assert passes_agreement(64.99999999, 65.0)
    assert not passes_agreement(64.9, 65.0)


def test_agreement_filter_partitions_records():
    g = chain(["a", "b", "c"])
    same = CorpusRecord.from_graph("same", g, alt_edges=list(g.edges))
    unchecked = CorpusRecord.from_graph("unchecked", g)
    result = agreement_filter([same, swapped_pair_record("swap"), unchecked])
    kept, rejected = result
    assert [r.id for r in kept] == ["same", "unchecked"]
    assert [(r.id, round(f1, 6)) for r, f1 in rejected] == [("swap", 50.0)]
    assert result.unchecked == ["unchecked"]
    assert [r.id for r in agreement_filter([swapped_pair_record()], threshold=50.0).kept] == ["r"]


# ----- stats -----

def test_stats_examples():
    five = CorpusRecord.from_graph("five", chain([f"e{i}" for i in range(5)]), split="dev")
    six = CorpusRecord.from_graph("six", chain([f"e{i}" for i in range(6)]), source="descript")
    stats = corpus_stats([five, six])
    assert stats.mean_events == 5.5
    assert stats.degree_histogram() == {"1": 2}
    assert stats.n_event_pairs == 10 + 15
    assert dict(stats.by_split) == {"dev": 1, "test": 1}
    assert stats.to_dict()["edge_count_hist"] == {"4": 1, "5": 1}

    diamond = ScriptGraph.from_edges("s", ["a", "b", "c", "d"], [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert corpus_stats([CorpusRecord.from_graph("d", diamond)]).degree_histogram() == {"2": 1}


def test_stats_fold_degrees_and_count_durations():
    fan = ScriptGraph.from_edges("s", [f"e{i}" for i in range(6)], [(0, i) for i in range(1, 6)])
    fan.events[0].duration = DurationBucket("hours")
    stats = corpus_stats([CorpusRecord.from_graph("fan", fan),
                          CorpusRecord.from_graph("c", chain(["a", "b"]))])
    assert stats.degree_histogram() == {"1": 1, "5": 1}
    assert stats.degree_histogram(fold_at=4) == {"1": 1, "4+": 1}
    assert stats.degree_fractions() == {"1": 0.5, "4+": 0.5}
    assert dict(stats.duration_pairs())["hours"] == 1
    frame = stats.to_frame()
    assert list(frame.columns) == ["section", "key", "value"]
    assert frame[(frame.section == "summary") & (frame.key == "n_scripts")].value.iloc[0] == 2


def test_stats_merge_matches_single_pass():
    records = synthetic_gold_corpus(60, seed=3)
    whole = corpus_stats(records)
    left, right = corpus_stats(records[:25]), corpus_stats(records[25:])
    assert left.merge(right).to_dict() == whole.to_dict()
    assert right.merge(left).to_dict() == whole.to_dict()


def test_empty_stats():
    stats = corpus_stats([])
    assert stats.mean_events == 0.0 and stats.degree_fractions() == {}


# ----- DOT 디렉터리 -----

def test_read_dot_directory(tmp_path):
    (tmp_path / "a.dot").write_text(
        emit_dot(chain(["x", "y"], "make tea"), meta={"id": "a", "scenario": "make tea", "split": "dev"}),
        encoding="utf-8")
    (tmp_path / "b.dot").write_text(
        'digraph {\nstep0 [label="x"];\nstep1 [label="y"];\nstep0 -> step1;\nstep1 -> step0;\n}',
        encoding="utf-8")
    (tmp_path / "c.dot").write_text("no graph here", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")

    corpus = DotDirReader(scenarios={"b": "make coffee"}).read(tmp_path)
    assert [r.id for r in corpus] == ["a", "b"]
    a, b = corpus.records
    assert (a.scenario, a.split, a.source) == ("make tea", "dev", "other")
    assert (b.scenario, b.split) == ("make coffee", "test")
    assert b.edges == [(0, 1)]
    assert list(corpus.warnings) == ["b"]
    assert corpus.warnings["b"][0].startswith("b.dot:5:1 CYCLE_DROPPED")
    assert [(q.record_id, q.violations[0].code) for q in corpus.quarantined] == [("c", "PARSE_FAILURE")]


def test_strict_dot_directory_raises(tmp_path):
    (tmp_path / "c.dot").write_text("no graph here", encoding="utf-8")
    with pytest.raises(DotSyntaxError):
        DotDirReader(strict=True).read(tmp_path)


def test_write_dot_dir_round_trip(tmp_path):
    records = synthetic_gold_corpus(5, seed=4)
    assert write_dot_dir(records, tmp_path / "out") == 5
    back = read_corpus(tmp_path / "out")
    assert back.records == records


def test_read_corpus_rejects_unknown_format(tmp_path):
    with pytest.raises(InvalidArgumentError):
        read_corpus(tmp_path, fmt="csv")
