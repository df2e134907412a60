"""Switching graphs of rank-maximal matchings.

For a rank-maximal matching ``M`` the switching graph has one vertex per
post and an arc ``p -> q`` whenever the holder ``a`` of ``p`` also has the
edge ``(a, q)`` in the reduced graph; its weight is
``rank(a, q) - rank(a, p)``.  Zero-weight cycles and zero-weight paths that
end in a sink are exactly the moves between rank-maximal matchings.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .decomposition import Label
from .instance import (
    Matching,
    PreferenceInstance,
    check_matching,
    compare_signatures,
    signature_of,
    strip_last_resorts,
    with_last_resorts,
)
from .solver import SolverTrace, solve

SINK = "sink"
NON_SINK = "non-sink"
PATH = "path"
CYCLE = "cycle"


class NotRankMaximalError(ValueError):
    pass


class InconsistencyError(RuntimeError):
    """An internal cross-check failed; indicates a bug upstream."""


@dataclass(frozen=True)
class Arc:
    weight: int
    applicant: str


@dataclass(frozen=True, eq=False)
class SwitchingGraph:
    instance: PreferenceInstance
    matching: Matching
    arcs: Mapping[str, Mapping[str, Arc]]
    sinks: FrozenSet[str]
    all_even: FrozenSet[str]
    last_even: FrozenSet[str]
    last_unreachable: FrozenSet[str]
    component_of: Mapping[str, int] = field(default_factory=dict)
    component_kind: Mapping[int, str] = field(default_factory=dict)

    @property
    def posts(self) -> Tuple[str, ...]:
        return self.instance.posts

    def weight(self, p: str, q: str) -> int:
        return self.arcs[p][q].weight

    def arc_list(self) -> List[Tuple[str, str, int]]:
        return [(p, q, arc.weight) for p in self.posts for q, arc in self.arcs[p].items()]

    def components(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = {}
        for p in self.posts:
            out.setdefault(self.component_of[p], []).append(p)
        return out


@dataclass(frozen=True)
class SwitchSequence:
    """A path ``p0 .. p_{k-1}`` or a cycle closing back to ``p0``."""

    kind: str
    posts: Tuple[str, ...]
    weight: int

    def arcs(self) -> List[Tuple[str, str]]:
        pairs = list(zip(self.posts, self.posts[1:]))
        if self.kind == CYCLE and self.posts:
            pairs.append((self.posts[-1], self.posts[0]))
        return pairs


def _extended(inst: PreferenceInstance, trace: SolverTrace, m: Matching) -> Matching:
    ext = trace.instance
    if ext.has_last_resorts and len(m) < len(ext.applicants):
        m = with_last_resorts(ext, m)
    return m


def build_switching_graph(
    inst: PreferenceInstance, m: Matching, trace: SolverTrace
) -> SwitchingGraph:
    """Switching graph of ``m`` over the reduced graph in ``trace``.

    ``m`` may be given over the original instance; unmatched applicants are
    then sent to their last resorts.
    """
    ext = trace.instance
    m = _extended(inst, trace, m)
    check_matching(ext, m)
    got, want = signature_of(ext, m), signature_of(ext, trace.matching)
    if compare_signatures(got, want) != 0:
        raise NotRankMaximalError(f"signature {got} differs from rank-maximal {want}")
    reduced = trace.reduced
    for a, p in m.items():
        if not reduced.has_edge(a, p):
            raise NotRankMaximalError(f"pair ({a}, {p}) lies outside the reduced graph")

    arcs: Dict[str, Dict[str, Arc]] = {p: {} for p in ext.posts}
    for a, p in m.items():
        base = ext.rank(a, p)
        for q in reduced.adj[a]:
            if q != p:
                arcs[p][q] = Arc(ext.rank(a, q) - base, a)

    final = trace.final.labels
    all_even = trace.all_even_posts()
    sinks = frozenset(p for p in ext.posts if not arcs[p] and p in all_even)
    sg = SwitchingGraph(
        ext,
        m,
        arcs,
        sinks,
        all_even,
        final.posts_with(Label.EVEN),
        final.posts_with(Label.UNREACHABLE),
    )
    comp_of, kinds = classify_components(sg)
    object.__setattr__(sg, "component_of", comp_of)
    object.__setattr__(sg, "component_kind", kinds)
    return sg


def weak_components(
    vertices: Sequence[str], arcs: Mapping[str, Mapping[str, object]]
) -> Dict[str, int]:
    """Component id per vertex of the underlying undirected graph, ids in vertex order."""
    undirected: Dict[str, Set[str]] = {v: set() for v in vertices}
    for p in vertices:
        for q in arcs.get(p, ()):
            undirected[p].add(q)
            undirected[q].add(p)
    comp: Dict[str, int] = {}
    for v in vertices:
        if v in comp:
            continue
        cid = len(set(comp.values()))
        comp[v] = cid
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in undirected[u]:
                if w not in comp:
                    comp[w] = cid
                    queue.append(w)
    return comp


def classify_components(sg: SwitchingGraph) -> Tuple[Dict[str, int], Dict[int, str]]:
    """Label each weak component sink / non-sink and cross-check the final labels.

    A component holding a sink vertex must consist of posts even in the last
    phase; any other component must consist of unreachable posts.
    """
    comp = weak_components(sg.posts, sg.arcs)
    kinds: Dict[int, str] = {}
    for p in sg.posts:
        if p in sg.sinks:
            kinds[comp[p]] = SINK
    for cid in set(comp.values()):
        kinds.setdefault(cid, NON_SINK)
    for p in sg.posts:
        expected = sg.last_even if kinds[comp[p]] == SINK else sg.last_unreachable
        if p not in expected:
            raise InconsistencyError(
                f"post {p} in a {kinds[comp[p]]} component has the wrong final label"
            )
    return comp, kinds


def strongly_connected_components(
    vertices: Sequence[str], arcs: Mapping[str, Mapping[str, object]]
) -> Dict[str, int]:
    """Tarjan's algorithm without recursion; returns an SCC id per vertex."""
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    on_stack: Set[str] = set()
    stack: List[str] = []
    scc: Dict[str, int] = {}
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(arcs.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(arcs.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                cid = len(set(scc.values()))
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc[w] = cid
                    if w == v:
                        break
    return scc


def _reach(start: Set[str], succ: Mapping[str, Set[str]]) -> Set[str]:
    seen = set(start)
    queue = deque(start)
    while queue:
        u = queue.popleft()
        for w in succ.get(u, ()):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def rmm_pair_arcs(sg: SwitchingGraph) -> Set[Tuple[str, str]]:
    """Arcs that lie on a cycle or on a path from an all-even post to a sink."""
    scc = strongly_connected_components(sg.posts, sg.arcs)
    fwd = {p: set(sg.arcs[p]) for p in sg.posts}
    bwd: Dict[str, Set[str]] = {p: set() for p in sg.posts}
    for p in sg.posts:
        for q in sg.arcs[p]:
            bwd[q].add(p)
    from_even = _reach(set(sg.all_even), fwd)
    to_sink = _reach(set(sg.sinks), bwd)
    out = set()
    for p in sg.posts:
        for q in sg.arcs[p]:
            if scc[p] == scc[q] or (p in from_even and q in to_sink):
                out.add((p, q))
    return out


@dataclass(frozen=True)
class Analysis:
    """A solved instance together with one switching graph."""

    instance: PreferenceInstance
    extended: PreferenceInstance
    matching: Matching
    trace: SolverTrace
    graph: SwitchingGraph

    def restrict(self, m: Matching) -> Matching:
        """Express a matching of the extended instance over the input instance."""
        if self.instance.has_last_resorts:
            return m
        return strip_last_resorts(self.extended, m)


def analyze(inst: PreferenceInstance) -> Analysis:
    m, trace = solve(inst)
    sg = build_switching_graph(trace.instance, m, trace)
    return Analysis(inst, trace.instance, m, trace, sg)


def rmm_pairs(
    inst: PreferenceInstance, *, include_last_resorts: bool = False
) -> Set[Tuple[str, str]]:
    """Every (applicant, post) used by at least one rank-maximal matching."""
    an = analyze(inst)
    sg = an.graph
    pairs = set(an.matching.items())
    for p, q in rmm_pair_arcs(sg):
        pairs.add((sg.arcs[p][q].applicant, q))
    if not include_last_resorts:
        pairs = {(a, p) for a, p in pairs if not an.extended.is_last_resort(p)}
    return pairs


def make_sequence(sg: SwitchingGraph, kind: str, posts: Sequence[str]) -> SwitchSequence:
    """Build a sequence from a vertex list, summing arc weights (KeyError if not arcs)."""
    seq = SwitchSequence(kind, tuple(posts), 0)
    weight = sum(sg.weight(p, q) for p, q in seq.arcs())
    return SwitchSequence(kind, tuple(posts), weight)


def simple_cycles(sg: SwitchingGraph, limit: Optional[int] = None) -> Iterator[SwitchSequence]:
    """Each simple directed cycle once, rooted at its earliest post."""
    order = {p: i for i, p in enumerate(sg.posts)}
    produced = 0
    for root in sg.posts:
        lo = order[root]
        path = [root]
        on_path = {root}
        stack = [iter(sorted(sg.arcs[root], key=order.__getitem__))]
        while stack:
            for q in stack[-1]:
                if q == root:
                    yield make_sequence(sg, CYCLE, path)
                    produced += 1
                    if limit is not None and produced >= limit:
                        return
                elif order[q] > lo and q not in on_path:
                    path.append(q)
                    on_path.add(q)
                    stack.append(iter(sorted(sg.arcs[q], key=order.__getitem__)))
                    break
            else:
                stack.pop()
                on_path.discard(path.pop())


def paths_to_sinks(
    sg: SwitchingGraph, start: str, limit: Optional[int] = None
) -> Iterator[SwitchSequence]:
    """All simple paths from ``start`` that end at a sink vertex."""
    order = {p: i for i, p in enumerate(sg.posts)}
    produced = 0
    path = [start]
    on_path = {start}
    if start in sg.sinks:
        yield make_sequence(sg, PATH, path)
        return
    stack = [iter(sorted(sg.arcs[start], key=order.__getitem__))]
    while stack:
        for q in stack[-1]:
            if q in on_path:
                continue
            if q in sg.sinks:
                yield make_sequence(sg, PATH, path + [q])
                produced += 1
                if limit is not None and produced >= limit:
                    return
                continue
            path.append(q)
            on_path.add(q)
            stack.append(iter(sorted(sg.arcs[q], key=order.__getitem__)))
            break
        else:
            stack.pop()
            on_path.discard(path.pop())


def switching_sequences(sg: SwitchingGraph, limit: Optional[int] = None) -> List[SwitchSequence]:
    """Zero-weight simple cycles plus nontrivial zero-weight paths into sinks."""
    out = [c for c in simple_cycles(sg, limit) if c.weight == 0]
    for p in sg.posts:
        if p in sg.sinks or p not in sg.matching.inverse:
            continue
        for t in paths_to_sinks(sg, p, limit):
            if t.weight == 0:
                out.append(t)
        if limit is not None and len(out) >= limit:
            break
    return out


def apply_switch(
    m: Matching, seq: SwitchSequence, graph: Optional[SwitchingGraph] = None
) -> Matching:
    """Shift each applicant along ``seq`` by one post.

    With ``graph`` the sequence is checked against its arcs and sinks; without
    it only the recorded weight and shape are checked.
    """
    if seq.weight != 0:
        raise ValueError(f"sequence has weight {seq.weight}, not 0")
    if seq.kind not in (PATH, CYCLE):
        raise ValueError(f"unknown sequence kind {seq.kind!r}")
    if len(set(seq.posts)) != len(seq.posts):
        raise ValueError("sequence repeats a post")
    if graph is not None:
        if graph.matching != m:
            raise ValueError("switching graph belongs to another matching")
        try:
            actual = make_sequence(graph, seq.kind, seq.posts).weight
        except KeyError as exc:
            raise ValueError(f"sequence uses a missing arc: {exc}") from None
        if actual != 0:
            raise ValueError(f"sequence has weight {actual} in the switching graph")
        if seq.kind == PATH and seq.posts and seq.posts[-1] not in graph.sinks:
            raise ValueError("switching path must end at a sink")
    if not seq.posts or (seq.kind == PATH and len(seq.posts) == 1):
        return m
    if seq.kind == PATH and m.holder(seq.posts[-1]) is not None:
        raise ValueError("switching path must end at an unmatched post")
    moves = seq.arcs()
    pairs = dict(m)
    for p, q in moves:
        a = m.holder(p)
        if a is None:
            raise ValueError(f"post {p} on the sequence is unmatched")
        pairs[a] = q
    return Matching(pairs)


def _canonical_key(inst: PreferenceInstance, m: Matching) -> Tuple:
    return tuple(m.ordered(inst))


@dataclass(frozen=True)
class Enumeration:
    matchings: Tuple[Matching, ...]
    truncated: bool


def enumerate_rmms(
    inst: PreferenceInstance,
    limit: Optional[int] = None,
    *,
    max_sequences: Optional[int] = None,
) -> Enumeration:
    """All rank-maximal matchings by closure under single switches.

    Starting from one rank-maximal matching, every zero-weight cycle and
    switching path of the current matching's switching graph is applied and
    the new matchings are explored breadth-first.  The reduced graph does not
    depend on the matching, so one solver run serves every step.
    """
    if limit is not None and limit < 1:
        raise ValueError("limit must be positive")
    an = analyze(inst)
    trace = an.trace
    seen = {an.matching}
    queue = deque([an.graph])
    truncated = False
    while queue and not truncated:
        sg = queue.popleft()
        for seq in switching_sequences(sg, max_sequences):
            nxt = apply_switch(sg.matching, seq, sg)
            if nxt in seen:
                continue
            if limit is not None and len(seen) >= limit:
                truncated = True
                break
            seen.add(nxt)
            queue.append(build_switching_graph(an.extended, nxt, trace))
    found = sorted((an.restrict(m) for m in seen), key=lambda m: _canonical_key(inst, m))
    return Enumeration(tuple(found), truncated)
