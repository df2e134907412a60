"""Maximum bipartite matching and the Even/Odd/Unreachable partition.

A vertex is even (odd) when some alternating path of even (odd) length
reaches it from an unmatched vertex, and unreachable otherwise.  For
bipartite graphs the labels do not depend on which maximum matching is used.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from .instance import InvalidMatchingError, Matching

Edge = Tuple[str, str]


class Label(enum.Enum):
    EVEN = "E"
    ODD = "O"
    UNREACHABLE = "U"


class NotMaximumError(ValueError):
    """Raised when a matching admits an augmenting path."""


@dataclass(frozen=True, eq=False)
class WorkGraph:
    """Bipartite graph on an applicant side and a post side, edges carry ranks.

    ``adj[a][p]`` is the rank of edge ``(a, p)``.  Vertex order is kept so
    that every traversal is deterministic.
    """

    applicants: Tuple[str, ...]
    posts: Tuple[str, ...]
    adj: Mapping[str, Mapping[str, int]]

    def __post_init__(self) -> None:
        post_set = set(self.posts)
        adj = {a: dict(self.adj.get(a, {})) for a in self.applicants}
        radj: Dict[str, Dict[str, int]] = {p: {} for p in self.posts}
        for a, nbrs in adj.items():
            for p, k in nbrs.items():
                if p not in post_set:
                    raise ValueError(f"edge ({a}, {p}) leaves the post side")
                radj[p][a] = k
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "_radj", radj)

    @classmethod
    def from_edges(
        cls, applicants: Iterable[str], posts: Iterable[str], edges: Iterable[Tuple[str, str, int]]
    ) -> "WorkGraph":
        adj: Dict[str, Dict[str, int]] = {}
        for a, p, k in edges:
            adj.setdefault(a, {})[p] = k
        return cls(tuple(applicants), tuple(posts), adj)

    def post_adj(self, p: str) -> Mapping[str, int]:
        return self._radj[p]  # type: ignore[attr-defined]

    def has_edge(self, a: str, p: str) -> bool:
        return p in self.adj.get(a, ())

    def edges(self) -> List[Tuple[str, str, int]]:
        return [(a, p, k) for a in self.applicants for p, k in self.adj[a].items()]

    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset((a, p) for a in self.applicants for p in self.adj[a])

    def __len__(self) -> int:
        return sum(len(n) for n in self.adj.values())


def _check_seed(g: WorkGraph, m: Matching) -> None:
    for a, p in m.items():
        if a not in g.adj or not g.has_edge(a, p):
            raise InvalidMatchingError(f"({a}, {p}) is not an edge of the graph")


def maximum_matching(
    g: WorkGraph, seed: Optional[Matching] = None, rng: Optional[random.Random] = None
) -> Matching:
    """Grow ``seed`` into a maximum matching by Hopcroft-Karp phases.

    Only augmentations are applied, so every vertex matched by ``seed`` stays
    matched.  ``rng`` shuffles the scan order, which is handy for checking
    that downstream results do not depend on which maximum matching is found.
    """
    seed = seed or Matching()
    _check_seed(g, seed)
    mate_a: Dict[str, Optional[str]] = {a: seed.get(a) for a in g.applicants}
    mate_p: Dict[str, Optional[str]] = {p: seed.holder(p) for p in g.posts}
    order = list(g.applicants)
    nbrs = {a: list(g.adj[a]) for a in g.applicants}
    if rng is not None:
        rng.shuffle(order)
        for lst in nbrs.values():
            rng.shuffle(lst)

    inf = len(order) + 1
    while True:
        # layered BFS from free applicants
        dist: Dict[str, int] = {}
        queue = deque()
        for a in order:
            if mate_a[a] is None:
                dist[a] = 0
                queue.append(a)
        found = inf
        while queue:
            a = queue.popleft()
            if dist[a] >= found:
                continue
            for p in nbrs[a]:
                b = mate_p[p]
                if b is None:
                    found = min(found, dist[a] + 1)
                elif b not in dist:
                    dist[b] = dist[a] + 1
                    queue.append(b)
        if found == inf:
            break

        def augment(a: str) -> bool:
            for p in nbrs[a]:
                b = mate_p[p]
                if (b is None and dist[a] + 1 == found) or (
                    b is not None and dist.get(b) == dist[a] + 1 and augment(b)
                ):
                    mate_a[a] = p
                    mate_p[p] = a
                    return True
            dist[a] = inf  # dead end for this phase
            return False

        for a in order:
            if mate_a[a] is None and dist.get(a) == 0:
                augment(a)
    return Matching((a, p) for a, p in mate_a.items() if p is not None)


@dataclass(frozen=True)
class EouLabels:
    applicants: Mapping[str, Label]
    posts: Mapping[str, Label]

    def of_post(self, p: str) -> Label:
        return self.posts[p]

    def of_applicant(self, a: str) -> Label:
        return self.applicants[a]

    def posts_with(self, label: Label) -> FrozenSet[str]:
        return frozenset(p for p, lab in self.posts.items() if lab is label)

    def applicants_with(self, label: Label) -> FrozenSet[str]:
        return frozenset(a for a, lab in self.applicants.items() if lab is label)

    def counts(self) -> Dict[Label, int]:
        out = {lab: 0 for lab in Label}
        for lab in list(self.applicants.values()) + list(self.posts.values()):
            out[lab] += 1
        return out


def eou_labels(g: WorkGraph, mm: Matching) -> EouLabels:
    """Label every vertex Even, Odd or Unreachable with respect to ``mm``.

    Two alternating BFS runs: one from the unmatched applicants, one from the
    unmatched posts.  Meeting an unmatched vertex of the other side, or
    reaching a vertex with both parities, means ``mm`` was not maximum.
    """
    _check_seed(g, mm)
    lab_a: Dict[str, Label] = {}
    lab_p: Dict[str, Label] = {}

    # from free applicants: applicants even, posts odd
    queue = deque(a for a in g.applicants if a not in mm)
    for a in queue:
        lab_a[a] = Label.EVEN
    while queue:
        a = queue.popleft()
        for p in g.adj[a]:
            if mm.get(a) == p or p in lab_p:
                continue
            b = mm.holder(p)
            if b is None:
                raise NotMaximumError(f"augmenting path ends at post {p}")
            lab_p[p] = Label.ODD
            if b not in lab_a:
                lab_a[b] = Label.EVEN
                queue.append(b)

    # from free posts: posts even, applicants odd
    queue = deque(p for p in g.posts if mm.holder(p) is None)
    for p in queue:
        lab_p[p] = Label.EVEN
    while queue:
        p = queue.popleft()
        for a in g.post_adj(p):
            if mm.get(a) == p:
                continue
            if lab_a.get(a) is Label.EVEN:
                raise NotMaximumError(f"augmenting path through applicant {a}")
            if a in lab_a:
                continue
            q = mm.get(a)
            if q is None:
                raise NotMaximumError(f"augmenting path ends at applicant {a}")
            lab_a[a] = Label.ODD
            if lab_p.get(q) is Label.ODD:
                raise NotMaximumError(f"augmenting path through post {q}")
            if q not in lab_p:
                lab_p[q] = Label.EVEN
                queue.append(q)

    return EouLabels(
        {a: lab_a.get(a, Label.UNREACHABLE) for a in g.applicants},
        {p: lab_p.get(p, Label.UNREACHABLE) for p in g.posts},
    )


def has_augmenting_path(g: WorkGraph, m: Matching) -> bool:
    """Plain DFS search for one augmenting path; independent of the BFS labeler."""
    seen: set = set()

    def reach_free(a: str) -> bool:
        for p in g.adj[a]:
            if p in seen or m.get(a) == p:
                continue
            seen.add(p)
            b = m.holder(p)
            if b is None or reach_free(b):
                return True
        return False

    return any(a not in m and reach_free(a) for a in g.applicants)
