"""Exhaustive reference implementations.

Nothing here calls the solver, the switching graph or the counting
reduction; only the instance data model is shared.  Intended for instances
with a handful of applicants.
"""

from __future__ import annotations

from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .instance import Matching, PreferenceInstance
from .popularity import PopularityVerdict

DEFAULT_LIMIT = 8


class OracleLimitError(ValueError):
    pass


def _check_size(inst: PreferenceInstance, limit: Optional[int]) -> None:
    limit = DEFAULT_LIMIT if limit is None else limit
    if len(inst.applicants) > limit:
        raise OracleLimitError(
            f"{len(inst.applicants)} applicants exceed the brute-force limit of {limit}"
        )


def _sig(inst: PreferenceInstance, pairs: Dict[str, str]) -> Tuple[int, ...]:
    counts = [0] * inst.r
    for a, p in pairs.items():
        counts[inst.rank(a, p) - 1] += 1
    return tuple(counts)


def all_max_signature_matchings(
    inst: PreferenceInstance, limit: Optional[int] = None
) -> Set[Matching]:
    """Every matching whose signature is lexicographically largest.

    Depth-first over applicants, each taking a free acceptable post or staying
    unmatched (the latter skipped once last resorts exist).  A branch is cut
    only when crediting every remaining applicant with its best still-free
    rank cannot reach the best signature seen so far; any real completion is
    lexicographically no better than that credit vector.
    """
    _check_size(inst, limit)
    apps = list(inst.applicants)
    r = inst.r
    choices = {a: [(k, p) for k, grp in inst.prefs[a] for p in grp] for a in apps}
    allow_unmatched = not inst.has_last_resorts
    best: List[Tuple[int, ...]] = [tuple([-1] * r)]
    winners: List[Dict[str, str]] = []
    counts = [0] * r
    used: Set[str] = set()
    chosen: Dict[str, str] = {}

    def bound(i: int) -> Tuple[int, ...]:
        ub = counts[:]
        for a in apps[i:]:
            for k, p in choices[a]:
                if p not in used:
                    ub[k - 1] += 1
                    break
        return tuple(ub)

    def rec(i: int) -> None:
        if bound(i) < best[0]:
            return
        if i == len(apps):
            sig = tuple(counts)
            if sig > best[0]:
                best[0] = sig
                winners.clear()
            if sig == best[0]:
                winners.append(dict(chosen))
            return
        a = apps[i]
        for k, p in choices[a]:
            if p in used:
                continue
            used.add(p)
            chosen[a] = p
            counts[k - 1] += 1
            rec(i + 1)
            counts[k - 1] -= 1
            del chosen[a]
            used.discard(p)
        if allow_unmatched:
            rec(i + 1)

    rec(0)
    return {Matching(w) for w in winners}


def brute_max_signature(inst: PreferenceInstance, limit: Optional[int] = None) -> Tuple[int, ...]:
    found = all_max_signature_matchings(inst, limit)
    return _sig(inst, dict(next(iter(found))))


def brute_count_rmms(inst: PreferenceInstance, limit: Optional[int] = None) -> int:
    return len(all_max_signature_matchings(inst, limit))


def brute_rmm_pairs(inst: PreferenceInstance, limit: Optional[int] = None) -> Set[Tuple[str, str]]:
    pairs: Set[Tuple[str, str]] = set()
    for m in all_max_signature_matchings(inst, limit):
        pairs.update(m.items())
    return pairs


def brute_votes(inst: PreferenceInstance, m1: Matching, m2: Matching) -> Tuple[int, int]:
    """Applicants preferring ``m1``, applicants preferring ``m2``."""
    x = y = 0
    for a in inst.applicants:
        p, q = m1.get(a), m2.get(a)
        if p is None and q is None:
            continue
        if q is None:
            x += 1
        elif p is None:
            y += 1
        else:
            kp, kq = inst.rank(a, p), inst.rank(a, q)
            x += kp < kq
            y += kq < kp
    return x, y


def brute_popular(
    inst: PreferenceInstance, m: Matching, limit: Optional[int] = None
) -> PopularityVerdict:
    """Vote ``m`` against every rank-maximal matching; the first strict winner loses it.

    Candidates are tried in a fixed canonical order so the answer is stable.
    """
    rivals = sorted(
        all_max_signature_matchings(inst, limit),
        key=lambda mm: tuple(sorted(mm.items())),
    )
    for rival in rivals:
        x, y = brute_votes(inst, rival, m)
        if x > y:
            return PopularityVerdict(False, better=rival, tally=(x, y))
    return PopularityVerdict(True)


def brute_perfect_matchings(
    left: Sequence[str], right: Sequence[str], edges: Iterable[Tuple[str, str]]
) -> int:
    """Count perfect matchings by summing over all permutations of the right side."""
    edge_set = set(edges)
    if len(right) != len(left):
        return 0
    return sum(
        all((a, q) in edge_set for a, q in zip(left, perm)) for perm in permutations(right)
    )


def naive_permanent(matrix: Sequence[Sequence[int]]) -> int:
    n = len(matrix)
    total = 0
    for perm in permutations(range(n)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= matrix[i][j]
            if not prod:
                break
        total += prod
    return total
