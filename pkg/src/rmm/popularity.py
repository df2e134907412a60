"""Is a rank-maximal matching popular among all rank-maximal matchings?

Arcs of the switching graph that no rank-maximal matching can use are
dropped, the remaining weights are replaced by their signs (an applicant
that gains, loses, or is indifferent), and Bellman-Ford looks for a negative
cycle or a negative path into a sink.  Either one, applied as a switch,
yields a strictly more popular rank-maximal matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .instance import (
    Matching,
    PreferenceInstance,
    check_matching,
    with_last_resorts,
)
from .switching import (
    CYCLE,
    PATH,
    InconsistencyError,
    SwitchingGraph,
    SwitchSequence,
    analyze,
    apply_switch,
    build_switching_graph,
    enumerate_rmms,
    make_sequence,
    rmm_pair_arcs,
    weak_components,
)


@dataclass(frozen=True)
class PopularityVerdict:
    popular: bool
    witness: Optional[SwitchSequence] = None
    better: Optional[Matching] = None
    tally: Optional[Tuple[int, int]] = None


POPULAR = PopularityVerdict(True)


def vote_count(inst: PreferenceInstance, m1: Matching, m2: Matching) -> Tuple[int, int]:
    """How many applicants prefer ``m1``, and how many prefer ``m2``."""
    prefer1 = prefer2 = 0
    for a in inst.applicants:
        p1, p2 = m1.get(a), m2.get(a)
        if p1 == p2:
            continue
        r1 = inst.rank(a, p1) if p1 is not None else None
        r2 = inst.rank(a, p2) if p2 is not None else None
        if r1 == r2:
            continue
        if r2 is None or (r1 is not None and r1 < r2):
            prefer1 += 1
        else:
            prefer2 += 1
    return prefer1, prefer2


def _sign(w: int) -> int:
    return (w > 0) - (w < 0)


@dataclass(frozen=True)
class ReweightedGraph:
    """Pruned switching graph with weights in {-1, 0, +1}, plus terminals.

    ``sources`` maps each component id to its Bellman-Ford source; sink
    components get a fresh source and target vertex.
    """

    arcs: Dict[Hashable, Dict[Hashable, int]]
    components: Dict[int, List[str]]
    sources: Dict[int, Hashable]
    targets: Dict[int, Hashable]


def reweight(sg: SwitchingGraph) -> ReweightedGraph:
    keep = rmm_pair_arcs(sg)
    arcs: Dict[Hashable, Dict[Hashable, int]] = {p: {} for p in sg.posts}
    for p, q in keep:
        arcs[p][q] = _sign(sg.weight(p, q))
    comp_of = weak_components(sg.posts, arcs)
    comps: Dict[int, List[str]] = {}
    for p in sg.posts:
        comps.setdefault(comp_of[p], []).append(p)
    sources: Dict[int, Hashable] = {}
    targets: Dict[int, Hashable] = {}
    for cid, verts in comps.items():
        sinks = [p for p in verts if p in sg.sinks]
        if not sinks:
            sources[cid] = verts[0]
            continue
        s, t = ("source", cid), ("target", cid)
        arcs[s] = {p: 0 for p in verts if p in sg.all_even and p not in sg.sinks}
        arcs[t] = {}
        for p in sinks:
            arcs[p][t] = 0
        sources[cid], targets[cid] = s, t
    return ReweightedGraph(arcs, comps, sources, targets)


def bellman_ford(
    arcs: Dict[Hashable, Dict[Hashable, int]], nodes: Sequence[Hashable], source: Hashable
) -> Tuple[Dict[Hashable, int], Dict[Hashable, Hashable], Optional[List[Hashable]]]:
    """Distances, predecessors, and a negative cycle reachable from ``source`` if any."""
    dist: Dict[Hashable, int] = {source: 0}
    pred: Dict[Hashable, Hashable] = {}
    edges = [(u, v, w) for u in nodes for v, w in arcs.get(u, {}).items()]
    for _ in range(len(nodes) - 1):
        changed = False
        for u, v, w in edges:
            if u in dist and (v not in dist or dist[u] + w < dist[v]):
                dist[v] = dist[u] + w
                pred[v] = u
                changed = True
        if not changed:
            return dist, pred, None
    for u, v, w in edges:
        if u in dist and dist[u] + w < dist[v]:
            pred[v] = u
            x = v
            for _ in range(len(nodes)):
                x = pred[x]
            cycle = [x]
            y = pred[x]
            while y != x:
                cycle.append(y)
                y = pred[y]
            cycle.reverse()
            return dist, pred, cycle
    return dist, pred, None


def find_negative(sg: SwitchingGraph) -> Optional[SwitchSequence]:
    """First negative cycle or source-to-target path, components in post order."""
    rg = reweight(sg)
    for cid in sorted(rg.components):
        verts = rg.components[cid]
        nodes: List[Hashable] = list(verts)
        src = rg.sources[cid]
        tgt = rg.targets.get(cid)
        if tgt is not None:
            nodes = [src] + nodes + [tgt]
        dist, pred, cycle = bellman_ford(rg.arcs, nodes, src)
        if cycle is not None:
            w = sum(rg.arcs[u][v] for u, v in zip(cycle, cycle[1:] + cycle[:1]))
            if w >= 0:
                raise InconsistencyError("extracted cycle is not negative")
            return make_sequence(sg, CYCLE, cycle)  # type: ignore[arg-type]
        if tgt is not None and dist.get(tgt, 0) < 0:
            path = [tgt]
            while path[-1] != src:
                path.append(pred[path[-1]])
            path.reverse()
            return make_sequence(sg, PATH, path[1:-1])  # type: ignore[arg-type]
    return None


def check_popular(inst: PreferenceInstance, m: Matching) -> PopularityVerdict:
    """Decide popularity of the rank-maximal matching ``m`` within the rank-maximal set.

    Raises NotRankMaximalError if ``m`` is not rank-maximal.  When ``m`` is
    not popular the verdict carries the switch, the better matching (over
    ``inst``), and the tally (prefer better, prefer ``m``).
    """
    check_matching(inst, m)
    an = analyze(inst)
    ext = an.extended
    m_ext = m if inst.has_last_resorts else with_last_resorts(ext, m)
    sg = build_switching_graph(ext, m_ext, an.trace)
    seq = find_negative(sg)
    if seq is None:
        return POPULAR
    better = apply_switch(m_ext, seq, sg)
    tally = vote_count(ext, better, m_ext)
    if tally[0] <= tally[1]:
        raise InconsistencyError(f"witness does not win the vote: {tally}")
    return PopularityVerdict(False, seq, an.restrict(better), tally)


def popular_rmms(inst: PreferenceInstance, limit: Optional[int] = None) -> Tuple[List[Matching], bool]:
    """Check every enumerated rank-maximal matching; returns the popular ones and truncation."""
    found = enumerate_rmms(inst, limit)
    return [m for m in found.matchings if check_popular(inst, m).popular], found.truncated
