from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmm.counting import (
    BpmInstance,
    TooLargeError,
    count_perfect_matchings,
    count_rmms,
    gadget_signature,
    hardness_gadget,
    parse_bipartite_graph,
    reduce_to_bpm,
    ryser,
)
from rmm.generate import cubic_bipartite_graphs
from rmm.instance import parse_instance, signature_of, strip_last_resorts
from rmm.oracle import brute_count_rmms, brute_perfect_matchings, naive_permanent
from rmm.solver import solve

from .strategies import instances
from .conftest import data_path

K33 = [(x, y) for x in ("x1", "x2", "x3") for y in ("y1", "y2", "y3")]


def test_fig1_reduction(fig1):
    h, bpm, k = reduce_to_bpm(fig1)
    assert k == 7
    assert len(bpm.left) == len(bpm.right) == 13
    total = count_perfect_matchings(bpm)
    assert total == 12 * math.factorial(7)
    assert count_rmms(fig1) == 12


def test_single_edge_reduction():
    _, bpm, k = reduce_to_bpm(parse_instance("a1: p1"))
    assert k == 1
    assert len(bpm.left) == len(bpm.right) == 2
    assert count_perfect_matchings(bpm) == 1


def test_two_singletons():
    _, _, k = reduce_to_bpm(parse_instance("a1: p1\na2: p2"))
    assert k == 2
    assert count_rmms(parse_instance("a1: p1\na2: p2")) == 1


def test_perfect_matching_counts():
    xs, ys = ("x1", "x2", "x3"), ("y1", "y2", "y3")
    assert count_perfect_matchings(BpmInstance(xs, ys, frozenset(K33))) == 6
    ident = frozenset(zip(xs, ys))
    assert count_perfect_matchings(BpmInstance(xs, ys, ident)) == 1
    assert count_perfect_matchings(BpmInstance(xs, ys, ident - {("x1", "y1")})) == 0
    assert count_perfect_matchings(BpmInstance((), (), frozenset())) == 1


def test_too_large():
    n = 4
    xs = tuple(f"x{i}" for i in range(n))
    ys = tuple(f"y{i}" for i in range(n))
    with pytest.raises(TooLargeError):
        count_perfect_matchings(BpmInstance(xs, ys, frozenset(zip(xs, ys))), exact_limit=3)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 7).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)
))
def test_ryser_matches_naive_permanent(matrix):
    assert ryser(matrix) == naive_permanent(matrix)


def test_ryser_weighted():
    assert ryser([[1, 2], [3, 4]]) == 10
    assert ryser([[2]]) == 2


@settings(max_examples=200, deadline=None)
@given(instances(max_applicants=6, max_posts=6))
def test_count_matches_oracle(inst):
    _, bpm, k = reduce_to_bpm(inst)
    assert count_perfect_matchings(bpm) % math.factorial(k) == 0
    assert count_rmms(inst) == brute_count_rmms(inst)


def test_brute_count_examples(fig1):
    assert brute_count_rmms(fig1) == 12
    assert brute_count_rmms(parse_instance("")) == 1
    assert brute_count_rmms(parse_instance("a1: p1\na2: p1")) == 2


def _gadget_checks(edges):
    xs = {x for x, _ in edges}
    ys = sorted({y for _, y in edges})
    n = len(xs)
    g = hardness_gadget(edges)
    m, trace = solve(g)
    assert signature_of(g, strip_last_resorts(trace.instance, m)) == gadget_signature(n)
    want = brute_perfect_matchings(sorted(xs), ys, edges)
    assert count_rmms(g) == want
    assert count_rmms(hardness_gadget(edges, ties=True)) == want


def test_gadget_k33():
    assert count_rmms(hardness_gadget(K33)) == 6
    _gadget_checks(K33)


def test_gadget_cube():
    edges = parse_bipartite_graph(data_path("q3.txt").read_text())
    assert count_rmms(hardness_gadget(edges)) == 9
    _gadget_checks(edges)


def test_gadget_sampled():
    graphs = list(cubic_bipartite_graphs(4))
    assert len(graphs) == 24
    for edges in graphs[:6]:
        _gadget_checks(edges)
    for edges in cubic_bipartite_graphs(5, random.Random(3), samples=4):
        _gadget_checks(edges)


def test_gadget_rejects_bad_graphs():
    with pytest.raises(ValueError):
        hardness_gadget(K33[:-1])
    with pytest.raises(ValueError):
        hardness_gadget(K33 + [("x1", "y1")])
    with pytest.raises(ValueError):
        hardness_gadget([(x, x) for x, _ in K33])


def test_parse_bipartite_graph():
    assert parse_bipartite_graph("# c\nx1 y1\n\nx2 y2  # tail\n") == [("x1", "y1"), ("x2", "y2")]
    with pytest.raises(ValueError, match="line 1"):
        parse_bipartite_graph("x1 y1 z1")
