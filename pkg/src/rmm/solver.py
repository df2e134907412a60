"""Rank-maximal matching by rank-by-rank augmentation.

Phase ``i`` holds the graph of surviving edges of rank at most ``i``, a
maximum matching of it, and its Even/Odd/Unreachable labels.  Before the
next rank is added, higher-rank edges at odd/unreachable vertices and the
odd-odd / odd-unreachable edges are removed; neither kind can occur in any
rank-maximal matching.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .decomposition import (
    EouLabels,
    Label,
    WorkGraph,
    eou_labels,
    has_augmenting_path,
    maximum_matching,
)
from .instance import Matching, PreferenceInstance, add_last_resorts, signature_of

RULE_HIGHER_RANK = "higher-rank-at-odd-or-unreachable"
RULE_ODD_EDGE = "odd-odd-or-odd-unreachable"

_COVERED = (Label.ODD, Label.UNREACHABLE)


@dataclass(frozen=True)
class PhaseRecord:
    rank: int
    graph: WorkGraph
    matching: Matching
    labels: EouLabels


@dataclass(frozen=True)
class DeletedEdge:
    applicant: str
    post: str
    rank: int
    phase: int
    rule: str


@dataclass(frozen=True)
class SolverTrace:
    """Everything the later modules need from one run of the solver."""

    instance: PreferenceInstance
    phases: Tuple[PhaseRecord, ...]
    reduced: WorkGraph
    deleted: Tuple[DeletedEdge, ...]

    @property
    def final(self) -> PhaseRecord:
        return self.phases[-1]

    @property
    def matching(self) -> Matching:
        return self.final.matching

    def all_even_posts(self) -> frozenset:
        """Posts that are even in every phase."""
        posts = set(self.instance.posts)
        for ph in self.phases:
            posts &= ph.labels.posts_with(Label.EVEN)
        return frozenset(posts)


def _odd_edge(labels: EouLabels, a: str, p: str) -> bool:
    la, lp = labels.of_applicant(a), labels.of_post(p)
    return (la is Label.ODD and lp in _COVERED) or (lp is Label.ODD and la in _COVERED)


def solve(
    inst: PreferenceInstance,
    *,
    last_resorts: bool = True,
    rng: Optional[random.Random] = None,
) -> Tuple[Matching, SolverTrace]:
    """Compute a rank-maximal matching and the per-phase trace.

    Last-resort posts are added first unless already present or
    ``last_resorts`` is false, so the result is normally A-complete and the
    trace has one phase per rank including the last-resort rank.
    """
    if last_resorts and not inst.has_last_resorts:
        inst = add_last_resorts(inst)
    top = inst.r
    by_rank: Dict[int, List[Tuple[str, str]]] = {}
    for a, p, k in inst.edges():
        by_rank.setdefault(k, []).append((a, p))

    adj: Dict[str, Dict[str, int]] = {a: {} for a in inst.applicants}
    pending = {(a, p): k for a, p, k in inst.edges()}
    deleted: List[DeletedEdge] = []
    phases: List[PhaseRecord] = []
    m = Matching()
    for i in range(1, top + 1):
        for a, p in by_rank.get(i, ()):
            if (a, p) in pending:
                adj[a][p] = i
                del pending[(a, p)]
        graph = WorkGraph(inst.applicants, inst.posts, adj)
        m = maximum_matching(graph, m, rng)
        labels = eou_labels(graph, m)
        phases.append(PhaseRecord(i, graph, m, labels))

        covered_a = {a for a, lab in labels.applicants.items() if lab in _COVERED}
        covered_p = {p for p, lab in labels.posts.items() if lab in _COVERED}
        for (a, p), k in list(pending.items()):
            if a in covered_a or p in covered_p:
                deleted.append(DeletedEdge(a, p, k, i, RULE_HIGHER_RANK))
                del pending[(a, p)]
        adj = {a: dict(nbrs) for a, nbrs in adj.items()}
        for a in inst.applicants:
            for p in list(adj[a]):
                if _odd_edge(labels, a, p):
                    deleted.append(DeletedEdge(a, p, adj[a][p], i, RULE_ODD_EDGE))
                    del adj[a][p]

    reduced = WorkGraph(inst.applicants, inst.posts, adj)
    trace = SolverTrace(inst, tuple(phases), reduced, tuple(deleted))
    return m, trace


def verify_trace(inst: PreferenceInstance, trace: SolverTrace) -> List[str]:
    """Re-check the solver's invariants; returns human-readable violations."""
    problems: List[str] = []
    if not inst.has_last_resorts and trace.instance.has_last_resorts:
        inst = trace.instance
    final_sig = signature_of(inst, trace.matching)
    graphs = [ph.graph for ph in trace.phases] + [trace.reduced]
    for idx, ph in enumerate(trace.phases):
        i = ph.rank
        if any(not ph.graph.has_edge(a, p) for a, p in ph.matching.items()):
            problems.append(f"matching at phase {i} uses an edge outside the phase graph")
            continue
        if has_augmenting_path(ph.graph, ph.matching):
            problems.append(f"augmenting path exists at phase {i}")
        sig = signature_of(inst, ph.matching)
        if sig[:i] != final_sig[:i]:
            problems.append(f"signature prefix mismatch at phase {i}: {sig[:i]} vs {final_sig[:i]}")
        labels = ph.labels
        later: Dict[Tuple[str, str], int] = {}
        for g in graphs[idx + 1 :]:
            for a, p, k in g.edges():
                later.setdefault((a, p), k)
        for (a, p), k in later.items():
            if k > i and (
                labels.of_applicant(a) in _COVERED or labels.of_post(p) in _COVERED
            ):
                problems.append(
                    f"phase {i}: rank-{k} edge ({a}, {p}) touches an odd/unreachable vertex"
                )
        # odd-edge removal is checked against the very next graph only
        for a, p, k in graphs[idx + 1].edges():
            if k <= i and _odd_edge(labels, a, p):
                problems.append(f"phase {i}: odd-odd/odd-unreachable edge ({a}, {p}) survived")
    return problems
