from __future__ import annotations

import dataclasses
import random

from hypothesis import given, settings

from rmm.counting import hardness_gadget
from rmm.decomposition import Label, WorkGraph
from rmm.instance import Matching, parse_instance, signature_of, strip_last_resorts
from rmm.oracle import all_max_signature_matchings, brute_max_signature
from rmm.solver import solve, verify_trace

from .strategies import instances

K33 = [(x, y) for x in ("x1", "x2", "x3") for y in ("y1", "y2", "y3")]


def test_fig1_signature(fig1):
    m, trace = solve(fig1)
    assert signature_of(trace.instance, m) == (2, 2, 2, 0)
    assert signature_of(fig1, strip_last_resorts(trace.instance, m)) == brute_max_signature(fig1)
    assert len(m) == 6
    assert len(trace.phases) == 4


def test_single_edge():
    inst = parse_instance("a1: p1")
    m, trace = solve(inst)
    assert strip_last_resorts(trace.instance, m) == Matching({"a1": "p1"})
    assert signature_of(inst, strip_last_resorts(trace.instance, m)) == (1,)


def test_k33_gadget():
    g = hardness_gadget(K33)
    m, trace = solve(g)
    assert signature_of(g, strip_last_resorts(trace.instance, m)) == (1, 1, 1)


def test_without_last_resorts():
    inst = parse_instance("a1: p1\na2: p1")
    m, trace = solve(inst, last_resorts=False)
    assert len(m) == 1
    assert not trace.instance.has_last_resorts


def test_fig1_reduced_graph(fig1):
    _, trace = solve(fig1)
    reduced = trace.reduced.edge_set()
    # a1 and a2 are odd, p1 unreachable in the last real phase
    assert ("a1", "p1") not in reduced
    assert ("a2", "p1") not in reduced
    assert all(not trace.instance.is_last_resort(p) for _, p in reduced)
    rules = {(d.applicant, d.post): d.rule for d in trace.deleted}
    assert rules[("a1", "p1")].startswith("odd")
    assert rules[("a1", trace.instance.last_resorts["a1"])].startswith("higher")


def test_verify_trace_clean(fig1):
    _, trace = solve(fig1)
    assert verify_trace(fig1, trace) == []


def test_verify_trace_detects_reinserted_odd_edge(fig1):
    _, trace = solve(fig1)
    red = trace.reduced
    adj = {a: dict(n) for a, n in red.adj.items()}
    adj["a1"]["p1"] = 1
    broken = dataclasses.replace(trace, reduced=WorkGraph(red.applicants, red.posts, adj))
    problems = verify_trace(fig1, broken)
    assert len(problems) == 1
    assert "(a1, p1)" in problems[0]


def test_verify_trace_detects_non_maximum(fig1):
    _, trace = solve(fig1)
    ph = trace.phases[1]
    smaller = Matching(list(ph.matching.items())[1:])
    phases = list(trace.phases)
    phases[1] = dataclasses.replace(ph, matching=smaller)
    broken = dataclasses.replace(trace, phases=tuple(phases))
    assert "augmenting path exists at phase 2" in verify_trace(fig1, broken)


@settings(max_examples=300, deadline=None)
@given(instances(max_applicants=6, max_posts=6))
def test_solver_matches_oracle(inst):
    m, trace = solve(inst)
    assert signature_of(inst, strip_last_resorts(trace.instance, m)) == brute_max_signature(inst)
    assert len(m) == len(inst.applicants)
    assert verify_trace(inst, trace) == []


@settings(max_examples=150, deadline=None)
@given(instances(max_applicants=6, max_posts=6))
def test_trace_independent_of_augmentation_order(inst):
    _, t1 = solve(inst, rng=random.Random(11))
    _, t2 = solve(inst, rng=random.Random(23))
    for p1, p2 in zip(t1.phases, t2.phases):
        assert p1.graph.edge_set() == p2.graph.edge_set()
        assert p1.labels == p2.labels
    assert t1.reduced.edge_set() == t2.reduced.edge_set()


@settings(max_examples=100, deadline=None)
@given(instances(max_applicants=5, max_posts=5, max_rank=3))
def test_covered_vertices_matched_in_every_rmm(inst):
    _, trace = solve(inst)
    rmms = all_max_signature_matchings(trace.instance)
    for ph in trace.phases:
        for lab in (Label.ODD, Label.UNREACHABLE):
            for a in ph.labels.applicants_with(lab):
                assert all(a in m for m in rmms)
            for p in ph.labels.posts_with(lab):
                assert all(m.holder(p) is not None for m in rmms)
