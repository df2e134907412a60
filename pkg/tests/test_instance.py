from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmm.instance import (
    InstanceFormatError,
    InvalidMatchingError,
    Matching,
    add_last_resorts,
    compare_signatures,
    format_instance,
    parse_instance,
    parse_matching,
    signature_of,
)

from .strategies import instances


def test_minimal_instance():
    inst = parse_instance("a1: p1")
    assert inst.r == 1
    assert inst.prefs["a1"] == ((1, ("p1",)),)


def test_fig1_parses(fig1):
    assert len(fig1.applicants) == 6
    assert len(fig1.posts) == 7
    assert fig1.r == 3
    assert fig1.prefs["a3"] == ((1, ("p1",)),)


def test_tie_group():
    inst = parse_instance("a1: p1 (p2 p3)")
    assert inst.prefs["a1"] == ((1, ("p1",)), (2, ("p2", "p3")))
    assert inst.r == 2
    assert inst.rank("a1", "p3") == 2


def test_explicit_ranks():
    inst = parse_instance("a1: p1@2 (p2 p3)@5 p4")
    assert inst.prefs["a1"] == ((2, ("p1",)), (5, ("p2", "p3")), (6, ("p4",)))
    assert inst.r == 6


def test_posts_header_keeps_isolated_posts():
    inst = parse_instance("# header\nposts: p1 p2 p9\n\na1: p1  # trailing\n")
    assert inst.posts == ("p1", "p2", "p9")


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("a1: p1 p1", 1, "duplicate post"),
        ("posts: p1\na1: p2", 2, "unknown post"),
        ("a1: p1\na2:", 2, "empty list"),
        ("a1: (p1 p2", 1, "unclosed"),
        ("a1: ( )", 1, "empty tie"),
        ("a1: p1 ) p2", 1, "malformed tie"),
        ("a1: (p1 (p2))", 1, "malformed tie"),
        ("a1: p1@3 p2@2", 1, "does not increase"),
        ("a1 p1", 1, "expected"),
        ("a1: p1\na1: p2", 2, "twice"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(InstanceFormatError) as exc:
        parse_instance(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_add_last_resorts_fig1(fig1):
    ext = add_last_resorts(fig1)
    assert ext.has_last_resorts
    assert len(ext.posts) == 7 + 6
    assert ext.r == 4
    for a in fig1.applicants:
        lr = ext.last_resorts[a]
        assert ext.prefs[a][-1] == (4, (lr,))
        assert lr not in fig1.posts


def test_add_last_resorts_empty():
    inst = parse_instance("")
    assert add_last_resorts(inst) == inst


def test_add_last_resorts_single():
    ext = add_last_resorts(parse_instance("a1: p1"))
    assert ext.prefs["a1"] == ((1, ("p1",)), (2, (ext.last_resorts["a1"],)))


def test_add_last_resorts_twice_rejected(fig1):
    with pytest.raises(ValueError):
        add_last_resorts(add_last_resorts(fig1))


def test_last_resort_names_avoid_collisions():
    inst = parse_instance("a1: ~a1")
    ext = add_last_resorts(inst)
    assert ext.last_resorts["a1"] != "~a1"


def test_signature_fig1(fig1, fig1_m):
    # a1->p3 rank 3, a2->p2 rank 2, a3->p1 rank 1, a4->p7 rank 3, a5->p5 rank 1, a6->p6 rank 2
    assert signature_of(fig1, fig1_m) == (2, 2, 2)


def test_signature_empty_and_single(fig1):
    assert signature_of(fig1, Matching()) == (0, 0, 0)
    inst = parse_instance("a1: p1")
    assert signature_of(inst, Matching({"a1": "p1"})) == (1,)


def test_signature_rejects_non_edge(fig1):
    with pytest.raises(KeyError):
        signature_of(fig1, Matching({"a3": "p2"}))


def test_matching_rejects_double_use():
    with pytest.raises(InvalidMatchingError):
        Matching([("a1", "p1"), ("a2", "p1")])
    with pytest.raises(InvalidMatchingError):
        Matching([("a1", "p1"), ("a1", "p2")])


def test_parse_matching_checks_edges(fig1):
    with pytest.raises(InstanceFormatError):
        parse_matching("a3 p2\n", fig1)


@pytest.mark.parametrize(
    "s1, s2, expected",
    [((2, 2, 2), (2, 2, 2), 0), ((2, 1, 3), (2, 2, 0), -1), ((1, 1, 1), (0, 3, 0), 1)],
)
def test_compare_signatures(s1, s2, expected):
    assert compare_signatures(s1, s2) == expected


def test_compare_pads_with_zeros():
    assert compare_signatures((2, 2, 2), (2, 2, 2, 0)) == 0
    assert compare_signatures((2, 2), (2, 2, 1)) == -1


@given(instances())
def test_round_trip(inst):
    assert parse_instance(format_instance(inst)) == inst


@given(instances(max_applicants=4))
def test_round_trip_with_last_resorts(inst):
    ext = add_last_resorts(inst)
    assert parse_instance(format_instance(ext)) == ext


sigs = st.lists(st.integers(0, 3), min_size=3, max_size=3).map(tuple)


@given(sigs, sigs, sigs)
def test_compare_is_total_order(a, b, c):
    assert compare_signatures(a, b) == -compare_signatures(b, a)
    if compare_signatures(a, b) <= 0 and compare_signatures(b, c) <= 0:
        assert compare_signatures(a, c) <= 0
    if compare_signatures(a, b) == 0:
        assert a == b


def _maximal_matchings(inst):
    """Matchings to which no edge can be added, by brute force."""
    edges = [(a, p) for a, p, _ in inst.edges()]
    out = []
    for n in range(len(inst.applicants) + 1):
        for combo in itertools.combinations(edges, n):
            apps = {a for a, _ in combo}
            posts = {p for _, p in combo}
            if len(apps) != n or len(posts) != n:
                continue
            if all(a in apps or p in posts for a, p in edges):
                out.append(dict(combo))
    return out


@settings(max_examples=40, deadline=None)
@given(instances(max_applicants=4, max_posts=4, max_rank=3))
def test_last_resorts_extend_maximal_matchings(inst):
    ext = add_last_resorts(inst)
    for m in _maximal_matchings(ext):
        free = [a for a in ext.applicants if a not in m]
        # every unmatched applicant still has its private post available
        completed = dict(m, **{a: ext.last_resorts[a] for a in free})
        Matching(completed)
        assert len(completed) == len(ext.applicants)
