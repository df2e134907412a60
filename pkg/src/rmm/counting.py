"""Exact counting of rank-maximal matchings.

The count is obtained by a reduction to counting perfect matchings: add
``k`` dummy applicants, where ``k`` is the number of posts a rank-maximal
matching leaves free, that accept every always-even post at one extra tied
rank.  The reduced graph of the enlarged instance is balanced and its perfect
matchings are exactly ``k!`` copies of each rank-maximal matching.  The
permanent is evaluated exactly with Ryser's formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from .decomposition import Label
from .instance import PreferenceInstance, add_last_resorts
from .oracle import brute_count_rmms  # noqa: F401  (re-exported for callers)
from .solver import solve
from .switching import InconsistencyError

DEFAULT_EXACT_LIMIT = 30


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class BpmInstance:
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]

    def biadjacency(self) -> List[List[int]]:
        col = {q: j for j, q in enumerate(self.right)}
        rows = [[0] * len(self.right) for _ in self.left]
        row = {a: i for i, a in enumerate(self.left)}
        for a, q in self.edges:
            rows[row[a]][col[q]] = 1
        return rows


def _dummy_names(taken: Iterable[str], k: int) -> List[str]:
    taken = set(taken)
    names = []
    i = 1
    while len(names) < k:
        name = f"ad{i}"
        while name in taken:
            name = "_" + name
        taken.add(name)
        names.append(name)
        i += 1
    return names


def reduce_to_bpm(inst: PreferenceInstance) -> Tuple[PreferenceInstance, BpmInstance, int]:
    """Return the enlarged instance, its perfect-matching instance, and ``k``."""
    ext = inst if inst.has_last_resorts else add_last_resorts(inst)
    m, trace = solve(ext)
    k = len(ext.posts) - len(m)
    final = trace.final.labels
    odd, unreach = final.counts()[Label.ODD], final.counts()[Label.UNREACHABLE]
    # free-post count must not depend on the matching: |P| - (|O| + |U|/2)
    if 2 * k != 2 * len(ext.posts) - (2 * odd + unreach):
        raise InconsistencyError("free-post count disagrees with the final labels")
    all_even = trace.all_even_posts()
    if len(all_even) < k:
        raise InconsistencyError("fewer always-even posts than free posts")

    dummy_rank = ext.r + 1
    group = tuple(p for p in ext.posts if p in all_even)
    dummies = _dummy_names(list(ext.applicants) + list(ext.posts), k)
    prefs = dict(ext.prefs)
    for d in dummies:
        prefs[d] = ((dummy_rank, group),)
    h = PreferenceInstance(
        ext.applicants + tuple(dummies),
        ext.posts,
        prefs,
        last_resorts=ext.last_resorts,
        has_last_resorts=False,
    )
    _, h_trace = solve(h, last_resorts=False)
    i_inst = BpmInstance(h.applicants, h.posts, h_trace.reduced.edge_set())
    if len(i_inst.left) != len(i_inst.right):
        raise InconsistencyError("perfect-matching instance is unbalanced")
    return h, i_inst, k


def _blocks(bpm: BpmInstance) -> List[Tuple[List[str], List[str]]]:
    """Connected components as (left vertices, right vertices)."""
    adj: Dict[Tuple[int, str], List[Tuple[int, str]]] = {}
    for a in bpm.left:
        adj[(0, a)] = []
    for q in bpm.right:
        adj[(1, q)] = []
    for a, q in bpm.edges:
        adj[(0, a)].append((1, q))
        adj[(1, q)].append((0, a))
    seen = set()
    out = []
    for start in adj:
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        out.append(([v for s, v in comp if s == 0], [v for s, v in comp if s == 1]))
    return out


def ryser(matrix: Sequence[Sequence[int]]) -> int:
    """Permanent by inclusion-exclusion over column subsets in Gray-code order."""
    n = len(matrix)
    if n == 0:
        return 1
    rows = [list(r) for r in matrix]
    sums = [0] * n
    total = 0
    in_set = [False] * n
    size = 0
    for g in range(1, 1 << n):
        j = (g & -g).bit_length() - 1  # column flipped between consecutive Gray codes
        if in_set[j]:
            in_set[j] = False
            size -= 1
            for i in range(n):
                sums[i] -= rows[i][j]
        else:
            in_set[j] = True
            size += 1
            for i in range(n):
                sums[i] += rows[i][j]
        prod = 1
        for s in sums:
            if not s:
                prod = 0
                break
            prod *= s
        if prod:
            total += -prod if size & 1 else prod
    return total if n % 2 == 0 else -total


def count_perfect_matchings(bpm: BpmInstance, exact_limit: int = DEFAULT_EXACT_LIMIT) -> int:
    """Exact number of perfect matchings (the permanent of the biadjacency matrix).

    The graph is split into connected components first; each balanced block
    is handed to Ryser's formula and the results multiplied.
    """
    if len(bpm.left) != len(bpm.right):
        return 0
    if len(bpm.left) > exact_limit:
        raise TooLargeError(
            f"instance too large for exact counting: {len(bpm.left)} > {exact_limit}"
        )
    result = 1
    for left, right in _blocks(bpm):
        if len(left) != len(right):
            return 0
        col = {q: j for j, q in enumerate(right)}
        row = {a: i for i, a in enumerate(left)}
        mat = [[0] * len(right) for _ in left]
        for a, q in bpm.edges:
            if a in row:
                mat[row[a]][col[q]] = 1
        result *= ryser(mat)
        if not result:
            return 0
    return result


def count_rmms(inst: PreferenceInstance, exact_limit: int = DEFAULT_EXACT_LIMIT) -> int:
    """Number of rank-maximal matchings, via perfect matchings of the reduced graph."""
    _, bpm, k = reduce_to_bpm(inst)
    total = count_perfect_matchings(bpm, exact_limit)
    quotient, remainder = divmod(total, math.factorial(k))
    if remainder:
        raise InconsistencyError(f"{total} perfect matchings are not divisible by {k}!")
    return quotient


# ------------------------------------------------------------ hardness gadget


def parse_bipartite_graph(text: str) -> List[Tuple[str, str]]:
    """Edge list ``x y`` per line; ``#`` comments. Left ids first, right ids second."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ValueError(f"line {lineno}: expected '<x> <y>'")
        edges.append((toks[0], toks[1]))
    return edges


def _sides(edges: Sequence[Tuple[str, str]]) -> Tuple[List[str], List[str]]:
    xs: Dict[str, None] = {}
    ys: Dict[str, None] = {}
    for x, y in edges:
        xs.setdefault(x)
        ys.setdefault(y)
    return list(xs), list(ys)


def _check_cubic(edges: Sequence[Tuple[str, str]]) -> Tuple[List[str], List[str]]:
    if len(set(edges)) != len(edges):
        raise ValueError("graph has parallel edges")
    xs, ys = _sides(edges)
    if set(xs) & set(ys):
        raise ValueError("left and right vertex ids must be distinct")
    if len(xs) != len(ys):
        raise ValueError("graph is unbalanced")
    deg: Dict[str, int] = {}
    for x, y in edges:
        deg[x] = deg.get(x, 0) + 1
        deg[y] = deg.get(y, 0) + 1
    if any(d != 3 for d in deg.values()):
        raise ValueError("graph is not 3-regular")
    return xs, ys


def hardness_gadget(
    edges: Sequence[Tuple[str, str]], *, ties: bool = False
) -> PreferenceInstance:
    """Instance whose rank-maximal matchings mirror the perfect matchings of a cubic graph.

    Strict version: right vertices are ordered by first appearance; agent
    ``a_x`` ranks its three neighbours at their order positions and fills the
    other ranks with the shared dummy posts.  Each dummy agent accepts only its
    own dummy post.  With ``ties`` every edge gets rank 1 instead.
    """
    xs, ys = _check_cubic(edges)
    n = len(xs)
    nbrs: Dict[str, List[str]] = {x: [] for x in xs}
    for x, y in edges:
        nbrs[x].append(y)
    agent = {x: f"a_{x}" for x in xs}
    post = {y: f"p_{y}" for y in ys}
    if ties:
        prefs = {agent[x]: ((1, tuple(post[y] for y in nbrs[x])),) for x in xs}
        return PreferenceInstance(
            tuple(agent[x] for x in xs), tuple(post[y] for y in ys), prefs
        )
    order = {y: i + 1 for i, y in enumerate(ys)}
    dummy_posts = [f"pd{i}" for i in range(1, n - 2)]
    dummy_agents = [f"ad{i}" for i in range(1, n - 2)]
    prefs: Dict[str, Tuple] = {}
    for x in xs:
        at = {order[y]: post[y] for y in nbrs[x]}
        fill = iter(dummy_posts)
        prefs[agent[x]] = tuple((k, (at[k] if k in at else next(fill),)) for k in range(1, n + 1))
    for d, pd in zip(dummy_agents, dummy_posts):
        prefs[d] = ((1, (pd,)),)
    return PreferenceInstance(
        tuple(agent[x] for x in xs) + tuple(dummy_agents),
        tuple(post[y] for y in ys) + tuple(dummy_posts),
        prefs,
    )


def gadget_signature(n: int) -> Tuple[int, ...]:
    """Signature every rank-maximal matching of the strict gadget must have."""
    return (n - 2,) + (1,) * (n - 1)

