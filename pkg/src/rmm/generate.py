"""Instance generators: seeded random instances, exhaustive tiny families, cubic graphs."""

from __future__ import annotations

import itertools
import random
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .instance import PreferenceInstance


def random_instance(
    rng: random.Random,
    n_applicants: int,
    n_posts: int,
    max_rank: int,
    tie_prob: float = 0.3,
) -> PreferenceInstance:
    """Random lists of 1..max_rank groups; a group is a tie of 2-3 posts with ``tie_prob``."""
    posts = [f"p{i}" for i in range(1, n_posts + 1)]
    applicants = [f"a{i}" for i in range(1, n_applicants + 1)]
    prefs = {}
    for a in applicants:
        pool = posts[:]
        rng.shuffle(pool)
        groups = []
        for k in range(1, rng.randint(1, max_rank) + 1):
            if not pool:
                break
            size = rng.choice((2, 3)) if rng.random() < tie_prob else 1
            size = min(size, len(pool))
            groups.append((k, tuple(pool[:size])))
            del pool[:size]
        prefs[a] = tuple(groups)
    return PreferenceInstance(tuple(applicants), tuple(posts), prefs)


def random_corpus(
    seed: int,
    count: int,
    max_applicants: int = 7,
    max_posts: int = 7,
    max_rank: int = 4,
    tie_prob: float = 0.3,
) -> Iterator[PreferenceInstance]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_instance(
            rng,
            rng.randint(1, max_applicants),
            rng.randint(1, max_posts),
            rng.randint(1, max_rank),
            tie_prob,
        )


def _lists(posts: Sequence[str], max_rank: int) -> List[Tuple[Tuple[int, Tuple[str, ...]], ...]]:
    """Every preference list over ``posts`` with at most ``max_rank`` groups."""
    subsets = [
        c for n in range(1, len(posts) + 1) for c in itertools.combinations(posts, n)
    ]
    out = []

    def extend(prefix, used):
        if prefix:
            out.append(tuple(prefix))
        if len(prefix) == max_rank:
            return
        for s in subsets:
            if used.isdisjoint(s):
                extend(prefix + [(len(prefix) + 1, s)], used | set(s))

    extend([], set())
    return out


def tiny_family(
    max_applicants: int = 3, n_posts: int = 3, max_rank: int = 2
) -> Iterator[PreferenceInstance]:
    """All instances up to applicant relabelling, on a fixed post set."""
    posts = tuple(f"p{i}" for i in range(1, n_posts + 1))
    lists = _lists(posts, max_rank)
    for n in range(1, max_applicants + 1):
        for combo in itertools.combinations_with_replacement(range(len(lists)), n):
            applicants = tuple(f"a{i}" for i in range(1, n + 1))
            prefs = {a: lists[j] for a, j in zip(applicants, combo)}
            yield PreferenceInstance(applicants, posts, prefs)


def cubic_bipartite_graphs(
    n: int, rng: Optional[random.Random] = None, samples: Optional[int] = None
) -> Iterator[List[Tuple[str, str]]]:
    """3-regular bipartite graphs on ``n + n`` vertices as edge lists ``(x_i, y_j)``.

    Without ``samples`` every labelled graph is produced (feasible for n <= 5);
    with ``samples`` that many are drawn as unions of three disjoint perfect
    matchings.
    """
    xs = [f"x{i}" for i in range(n)]
    ys = [f"y{j}" for j in range(n)]
    if samples is None:
        rows = [c for c in itertools.combinations(range(n), 3)]

        def fill(i, colsum, chosen):
            if i == n:
                yield [(xs[r], ys[c]) for r, cs in enumerate(chosen) for c in cs]
                return
            for row in rows:
                if all(colsum[c] < 3 for c in row):
                    for c in row:
                        colsum[c] += 1
                    # remaining rows must be able to fill the columns
                    if all(3 - colsum[c] <= n - i - 1 for c in range(n)):
                        yield from fill(i + 1, colsum, chosen + [row])
                    for c in row:
                        colsum[c] -= 1

        yield from fill(0, [0] * n, [])
        return
    rng = rng or random.Random(0)
    produced = 0
    while produced < samples:
        used: Dict[int, set] = {i: set() for i in range(n)}
        ok = True
        for _ in range(3):
            for _attempt in range(200):
                perm = list(range(n))
                rng.shuffle(perm)
                if all(perm[i] not in used[i] for i in range(n)):
                    break
            else:
                ok = False
                break
            for i in range(n):
                used[i].add(perm[i])
        if ok:
            yield [(xs[i], ys[j]) for i in range(n) for j in sorted(used[i])]
            produced += 1
