from __future__ import annotations

import pytest
from hypothesis import given, settings

from rmm.counting import hardness_gadget
from rmm.instance import Matching, parse_instance, signature_of
from rmm.oracle import all_max_signature_matchings, brute_rmm_pairs
from rmm.switching import (
    CYCLE,
    NON_SINK,
    PATH,
    SINK,
    NotRankMaximalError,
    SwitchSequence,
    analyze,
    apply_switch,
    build_switching_graph,
    enumerate_rmms,
    make_sequence,
    paths_to_sinks,
    rmm_pairs,
    simple_cycles,
    switching_sequences,
)

from .strategies import instances

K33 = [(x, y) for x in ("x1", "x2", "x3") for y in ("y1", "y2", "y3")]


@pytest.fixture
def fig1_graph(fig1, fig1_m):
    an = analyze(fig1)
    return build_switching_graph(an.extended, fig1_m, an.trace)


def real(sg, posts):
    return {p for p in posts if not sg.instance.is_last_resort(p)}


def test_fig1_sinks_and_path(fig1_graph):
    sg = fig1_graph
    assert real(sg, sg.sinks) == {"p4"}
    assert sg.weight("p3", "p2") == -1
    assert sg.weight("p2", "p4") == 1
    assert make_sequence(sg, PATH, ["p3", "p2", "p4"]).weight == 0


def test_fig1_arcs(fig1_graph):
    sg = fig1_graph
    assert sg.weight("p7", "p5") == -2
    assert sg.weight("p5", "p7") == 2
    assert sorted(sg.arc_list()) == sorted(
        [
            ("p2", "p4", 1),
            ("p3", "p2", -1),
            ("p5", "p6", 1),
            ("p5", "p7", 2),
            ("p6", "p5", -1),
            ("p6", "p7", 1),
            ("p7", "p5", -2),
            ("p7", "p6", -1),
        ]
    )
    assert real(sg, sg.all_even) == {"p3", "p4"}


def test_fig1_components(fig1_graph):
    sg = fig1_graph
    kinds = {}
    for cid, verts in sg.components().items():
        kinds[frozenset(real(sg, verts))] = sg.component_kind[cid]
    assert kinds[frozenset({"p2", "p3", "p4"})] == SINK
    assert kinds[frozenset({"p5", "p6", "p7"})] == NON_SINK
    # p1 is unreachable in the final phase, so it sits alone in a non-sink component
    assert kinds[frozenset({"p1"})] == NON_SINK


def test_single_edge_graph():
    inst = parse_instance("a1: p1")
    an = analyze(inst)
    sg = an.graph
    assert sg.arc_list() == []
    lr = an.extended.last_resorts["a1"]
    assert sg.sinks == {lr}
    assert sg.component_kind[sg.component_of["p1"]] == NON_SINK
    assert sg.component_kind[sg.component_of[lr]] == SINK


def test_isolated_unmatched_post_is_sink_component():
    inst = parse_instance("posts: p1 p2\na1: p1")
    sg = analyze(inst).graph
    assert "p2" in sg.sinks
    assert sg.component_kind[sg.component_of["p2"]] == SINK


def test_k33_gadget_single_non_sink_component():
    sg = analyze(hardness_gadget(K33)).graph
    real_posts = [p for p in sg.posts if not sg.instance.is_last_resort(p)]
    assert len({sg.component_of[p] for p in real_posts}) == 1
    assert sg.component_kind[sg.component_of[real_posts[0]]] == NON_SINK


def test_rejects_non_rank_maximal(fig1):
    an = analyze(fig1)
    worse = Matching({"a1": "p1", "a2": "p2", "a4": "p5", "a5": "p6", "a6": "p7"})
    with pytest.raises(NotRankMaximalError):
        build_switching_graph(an.extended, worse, an.trace)


def test_apply_path(fig1, fig1_graph, fig1_m):
    seq = make_sequence(fig1_graph, PATH, ["p3", "p2", "p4"])
    m2 = apply_switch(fig1_graph.matching, seq, fig1_graph)
    an = analyze(fig1)
    got = an.restrict(m2)
    assert got == Matching(
        {"a1": "p2", "a2": "p4", "a3": "p1", "a4": "p7", "a5": "p5", "a6": "p6"}
    )
    assert signature_of(fig1, got) == (2, 2, 2)
    assert got != fig1_m


def test_two_cycle_is_involution(fig1, fig1_graph):
    an = analyze(fig1)
    seq = make_sequence(fig1_graph, CYCLE, ["p5", "p6"])
    assert seq.weight == 0
    once = apply_switch(fig1_graph.matching, seq)
    twice = apply_switch(once, seq, build_switching_graph(an.extended, once, an.trace))
    assert twice == fig1_graph.matching
    assert once != twice


def test_empty_path_is_identity(fig1_graph):
    m = fig1_graph.matching
    assert apply_switch(m, SwitchSequence(PATH, (), 0)) == m
    assert apply_switch(m, make_sequence(fig1_graph, PATH, ["p4"]), fig1_graph) == m


def test_apply_switch_rejects(fig1_graph):
    sg, m = fig1_graph, fig1_graph.matching
    with pytest.raises(ValueError):
        apply_switch(m, SwitchSequence(CYCLE, ("p5", "p6"), 1))  # nonzero weight
    with pytest.raises(ValueError):
        apply_switch(m, make_sequence(sg, PATH, ["p3", "p2"]), sg)  # nonzero, not at a sink
    with pytest.raises(ValueError):
        apply_switch(m, SwitchSequence(PATH, ("p3", "p2"), 0), sg)  # ends away from a sink
    with pytest.raises(ValueError):
        apply_switch(m, SwitchSequence(CYCLE, ("p1", "p4"), 0), sg)  # arcs missing


def test_rmm_pairs_examples(fig1):
    assert rmm_pairs(fig1) == {
        ("a3", "p1"),
        ("a1", "p2"),
        ("a1", "p3"),
        ("a2", "p2"),
        ("a2", "p4"),
    } | {(a, p) for a in ("a4", "a5", "a6") for p in ("p5", "p6", "p7")}
    assert rmm_pairs(parse_instance("a1: p1")) == {("a1", "p1")}
    assert rmm_pairs(parse_instance("a1: p1\na2: p1")) == {("a1", "p1"), ("a2", "p1")}


def test_enumerate_examples(fig1):
    assert len(enumerate_rmms(fig1).matchings) == 12
    assert len(enumerate_rmms(parse_instance("a1: p1")).matchings) == 1
    assert len(enumerate_rmms(hardness_gadget(K33)).matchings) == 6


def test_enumerate_truncation(fig1):
    res = enumerate_rmms(fig1, limit=5)
    assert res.truncated
    assert len(res.matchings) == 5
    full = enumerate_rmms(fig1, limit=12)
    assert not full.truncated and len(full.matchings) == 12
    with pytest.raises(ValueError):
        enumerate_rmms(fig1, limit=0)


def test_enumerate_canonical_order(fig1):
    found = enumerate_rmms(fig1).matchings
    keys = [tuple(m.ordered(fig1)) for m in found]
    assert keys == sorted(keys)


@settings(max_examples=200, deadline=None)
@given(instances(max_applicants=6, max_posts=6))
def test_cycle_and_path_laws(inst):
    sg = analyze(inst).graph
    for c in simple_cycles(sg):
        assert c.weight == 0
    for p in sg.posts:
        for t in paths_to_sinks(sg, p):
            assert (t.weight == 0) == (p in sg.all_even)


@settings(max_examples=150, deadline=None)
@given(instances(max_applicants=6, max_posts=6))
def test_switches_preserve_signature(inst):
    sg = analyze(inst).graph
    sig = signature_of(sg.instance, sg.matching)
    for seq in switching_sequences(sg):
        assert signature_of(sg.instance, apply_switch(sg.matching, seq, sg)) == sig


@settings(max_examples=200, deadline=None)
@given(instances(max_applicants=6, max_posts=6))
def test_enumeration_and_pairs_match_oracle(inst):
    res = enumerate_rmms(inst)
    assert not res.truncated
    assert set(res.matchings) == all_max_signature_matchings(inst)
    assert rmm_pairs(inst) == brute_rmm_pairs(inst)
