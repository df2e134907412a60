"""Preference instances, matchings and signatures.

An instance lists, for every applicant, its acceptable posts grouped by rank.
A group may contain several posts (a tie).  Ranks are normally the position
of the group in the written list, but a group can carry an explicit rank with
``@k``, which allows gaps.

Text format::

    # comment
    posts: p1 p2 p3 p4          (optional, complete list of posts)
    a1: p1 (p2 p3) p4@5
    a2: (p1 p2)@2

Matching file format: one ``<aid> <pid>`` pair per line.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

Signature = Tuple[int, ...]
RankGroup = Tuple[int, Tuple[str, ...]]

LAST_RESORT_PREFIX = "~"

_TOKEN = re.compile(r"[^\s():@#]+")


class InstanceFormatError(ValueError):
    """Malformed instance or matching text; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidMatchingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PreferenceInstance:
    """Applicants with ranked (possibly tied) lists over posts.

    ``prefs[a]`` is a tuple of ``(rank, posts)`` groups with strictly
    increasing ranks.  ``last_resorts`` maps each applicant to its dummy
    last-resort post when those have been added.
    """

    applicants: Tuple[str, ...]
    posts: Tuple[str, ...]
    prefs: Mapping[str, Tuple[RankGroup, ...]]
    last_resorts: Mapping[str, str] = field(default_factory=dict)
    has_last_resorts: bool = False
    _rank: Dict[Tuple[str, str], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(set(self.applicants)) != len(self.applicants):
            raise ValueError("duplicate applicant id")
        if len(set(self.posts)) != len(self.posts):
            raise ValueError("duplicate post id")
        post_set = set(self.posts)
        rank: Dict[Tuple[str, str], int] = {}
        for a in self.applicants:
            groups = self.prefs.get(a)
            if not groups:
                raise ValueError(f"applicant {a} has an empty preference list")
            last = 0
            for k, group in groups:
                if k <= last:
                    raise ValueError(f"applicant {a}: ranks must strictly increase")
                if not group:
                    raise ValueError(f"applicant {a}: empty rank group")
                last = k
                for p in group:
                    if p not in post_set:
                        raise ValueError(f"applicant {a}: unknown post {p}")
                    if (a, p) in rank:
                        raise ValueError(f"applicant {a}: post {p} listed twice")
                    rank[(a, p)] = k
        if set(self.prefs) - set(self.applicants):
            raise ValueError("preferences given for unknown applicants")
        if self.has_last_resorts:
            self._check_last_resorts(rank)
        object.__setattr__(self, "prefs", {a: tuple(self.prefs[a]) for a in self.applicants})
        object.__setattr__(self, "last_resorts", dict(self.last_resorts))
        object.__setattr__(self, "_rank", rank)

    def _check_last_resorts(self, rank: Dict[Tuple[str, str], int]) -> None:
        if set(self.last_resorts) != set(self.applicants):
            raise ValueError("every applicant needs a last-resort post")
        if len(set(self.last_resorts.values())) != len(self.last_resorts):
            raise ValueError("last-resort posts must be distinct")
        holders: Dict[str, List[str]] = {}
        for (a, p) in rank:
            holders.setdefault(p, []).append(a)
        top = max(g[-1][0] for g in self.prefs.values()) if self.prefs else 0
        for a, lr in self.last_resorts.items():
            k, group = self.prefs[a][-1]
            if group != (lr,) or k != top or holders.get(lr) != [a]:
                raise ValueError(f"malformed last-resort post for applicant {a}")

    @property
    def r(self) -> int:
        """Largest rank used by any applicant (0 for the empty instance)."""
        return max((g[-1][0] for g in self.prefs.values()), default=0)

    def rank(self, a: str, p: str) -> int:
        try:
            return self._rank[(a, p)]
        except KeyError:
            raise KeyError(f"({a}, {p}) is not an edge of the instance") from None

    def has_edge(self, a: str, p: str) -> bool:
        return (a, p) in self._rank

    def acceptable(self, a: str) -> Iterator[str]:
        for _, group in self.prefs[a]:
            yield from group

    def edges(self) -> Iterator[Tuple[str, str, int]]:
        """All ``(applicant, post, rank)`` triples in list order."""
        for a in self.applicants:
            for k, group in self.prefs[a]:
                for p in group:
                    yield a, p, k

    def is_last_resort(self, p: str) -> bool:
        return p in self._lr_posts

    @property
    def _lr_posts(self) -> frozenset:
        return frozenset(self.last_resorts.values())

    @property
    def real_posts(self) -> Tuple[str, ...]:
        lr = self._lr_posts
        return tuple(p for p in self.posts if p not in lr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreferenceInstance):
            return NotImplemented
        return (
            self.applicants == other.applicants
            and self.posts == other.posts
            and dict(self.prefs) == dict(other.prefs)
            and self.has_last_resorts == other.has_last_resorts
            and dict(self.last_resorts) == dict(other.last_resorts)
        )

    __hash__ = None  # type: ignore[assignment]


class Matching(Mapping[str, str]):
    """Immutable applicant -> post assignment.  Hashable, so usable in sets."""

    __slots__ = ("_pairs", "_inverse", "_key")

    def __init__(self, pairs: Iterable[Tuple[str, str]] | Mapping[str, str] = ()):
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        fwd: Dict[str, str] = {}
        inv: Dict[str, str] = {}
        for a, p in items:
            if a in fwd:
                raise InvalidMatchingError(f"applicant {a} assigned twice")
            if p in inv:
                raise InvalidMatchingError(f"post {p} assigned twice")
            fwd[a] = p
            inv[p] = a
        self._pairs = fwd
        self._inverse = inv
        self._key = frozenset(fwd.items())

    def __getitem__(self, a: str) -> str:
        return self._pairs[a]

    def __iter__(self) -> Iterator[str]:
        return iter(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Matching):
            return self._key == other._key
        if isinstance(other, Mapping):
            return self._pairs == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{a}->{p}" for a, p in sorted(self._pairs.items()))
        return f"Matching({body})"

    @property
    def inverse(self) -> Mapping[str, str]:
        """Post -> applicant view."""
        return self._inverse

    def holder(self, p: str) -> Optional[str]:
        return self._inverse.get(p)

    def pairs(self) -> frozenset:
        return self._key

    def ordered(self, inst: PreferenceInstance) -> List[Tuple[str, str]]:
        """Pairs in the instance's applicant order."""
        return [(a, self._pairs[a]) for a in inst.applicants if a in self._pairs]


def check_matching(inst: PreferenceInstance, m: Matching) -> None:
    """Raise InvalidMatchingError unless every pair of ``m`` is an edge of ``inst``."""
    for a, p in m.items():
        if not inst.has_edge(a, p):
            raise InvalidMatchingError(f"({a}, {p}) is not an edge of the instance")


# ---------------------------------------------------------------- parsing


def _tokenize(body: str, lineno: int) -> List[str]:
    tokens: List[str] = []
    i = 0
    while i < len(body):
        c = body[i]
        if c.isspace():
            i += 1
        elif c in "()":
            tokens.append(c)
            i += 1
        elif c == "@":
            m = re.match(r"@(\d+)", body[i:])
            if not m:
                raise InstanceFormatError("'@' must be followed by a rank", lineno)
            tokens.append(m.group(0))
            i += len(m.group(0))
        else:
            m = _TOKEN.match(body, i)
            if not m:
                raise InstanceFormatError(f"unexpected character {c!r}", lineno)
            tokens.append(m.group(0))
            i = m.end()
    return tokens


def _parse_groups(tokens: List[str], lineno: int) -> List[Tuple[Optional[int], List[str]]]:
    groups: List[Tuple[Optional[int], List[str]]] = []
    i = 0
    while i < len(tokens):
        t = tokens[i]
        if t == "(":
            close = i + 1
            while close < len(tokens) and tokens[close] != ")":
                if tokens[close] == "(" or tokens[close].startswith("@"):
                    raise InstanceFormatError("malformed tie group", lineno)
                close += 1
            if close == len(tokens):
                raise InstanceFormatError("unclosed tie group", lineno)
            members = tokens[i + 1 : close]
            if not members:
                raise InstanceFormatError("empty tie group", lineno)
            i = close + 1
        elif t == ")" or t.startswith("@"):
            raise InstanceFormatError(f"malformed tie group near {t!r}", lineno)
        else:
            members = [t]
            i += 1
        explicit = None
        if i < len(tokens) and tokens[i].startswith("@"):
            explicit = int(tokens[i][1:])
            if explicit < 1:
                raise InstanceFormatError("ranks start at 1", lineno)
            i += 1
        groups.append((explicit, members))
    return groups


def parse_instance(text: str | Iterable[str]) -> PreferenceInstance:
    """Parse the line-oriented instance format; errors name the line number."""
    lines = text.splitlines() if isinstance(text, str) else [ln.rstrip("\n") for ln in text]
    declared: Optional[List[str]] = None
    declared_lr: Optional[List[str]] = None
    applicants: List[str] = []
    prefs: Dict[str, Tuple[RankGroup, ...]] = {}
    seen_posts: Dict[str, None] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        head = head.strip()
        if not sep or not head or _TOKEN.fullmatch(head) is None:
            raise InstanceFormatError("expected '<id>: ...'", lineno)
        if head == "posts":
            if declared is not None:
                raise InstanceFormatError("repeated posts header", lineno)
            declared = body.split()
            if len(set(declared)) != len(declared):
                raise InstanceFormatError("duplicate post in posts header", lineno)
            continue
        if head == "last_resorts":
            declared_lr = body.split()
            continue
        if head in prefs:
            raise InstanceFormatError(f"applicant {head} listed twice", lineno)
        groups = _parse_groups(_tokenize(body, lineno), lineno)
        if not groups:
            raise InstanceFormatError(f"applicant {head} has an empty list", lineno)
        ranked: List[RankGroup] = []
        used: set = set()
        prev = 0
        for explicit, members in groups:
            k = prev + 1 if explicit is None else explicit
            if k <= prev:
                raise InstanceFormatError(f"rank {k} does not increase", lineno)
            for p in members:
                if p in used:
                    raise InstanceFormatError(f"duplicate post {p} in list of {head}", lineno)
                if declared is not None and p not in declared:
                    raise InstanceFormatError(f"unknown post id {p}", lineno)
                used.add(p)
                seen_posts.setdefault(p)
            ranked.append((k, tuple(members)))
            prev = k
        applicants.append(head)
        prefs[head] = tuple(ranked)
    posts = tuple(declared) if declared is not None else tuple(seen_posts)
    last_resorts: Dict[str, str] = {}
    if declared_lr is not None:
        if len(declared_lr) != len(applicants):
            raise InstanceFormatError("last_resorts header must name one post per applicant")
        last_resorts = dict(zip(applicants, declared_lr))
    try:
        return PreferenceInstance(
            tuple(applicants),
            posts,
            prefs,
            last_resorts=last_resorts,
            has_last_resorts=declared_lr is not None,
        )
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def format_instance(inst: PreferenceInstance) -> str:
    """Serialize so that ``parse_instance(format_instance(x)) == x``."""
    out = ["posts: " + " ".join(inst.posts)]
    if inst.has_last_resorts:
        out.append("last_resorts: " + " ".join(inst.last_resorts[a] for a in inst.applicants))
    for a in inst.applicants:
        parts = []
        prev = 0
        for k, group in inst.prefs[a]:
            text = group[0] if len(group) == 1 else "(" + " ".join(group) + ")"
            if k != prev + 1:
                text += f"@{k}"
            parts.append(text)
            prev = k
        out.append(f"{a}: " + " ".join(parts))
    return "\n".join(out) + "\n"


def parse_matching(text: str, inst: Optional[PreferenceInstance] = None) -> Matching:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise InstanceFormatError("expected '<aid> <pid>'", lineno)
        pairs.append((toks[0], toks[1]))
    try:
        m = Matching(pairs)
        if inst is not None:
            check_matching(inst, m)
    except InvalidMatchingError as exc:
        raise InstanceFormatError(str(exc)) from exc
    return m


def format_matching(inst: PreferenceInstance, m: Matching) -> str:
    return "".join(f"{a} {p}\n" for a, p in m.ordered(inst))


# ------------------------------------------------------------- operations


def add_last_resorts(inst: PreferenceInstance) -> PreferenceInstance:
    """Give every applicant a private post at rank r+1."""
    if inst.has_last_resorts:
        raise ValueError("instance already has last-resort posts")
    if not inst.applicants:
        return inst
    top = inst.r + 1
    taken = set(inst.posts) | set(inst.applicants)
    lr: Dict[str, str] = {}
    for a in inst.applicants:
        name = LAST_RESORT_PREFIX + a
        while name in taken:
            name = LAST_RESORT_PREFIX + name
        taken.add(name)
        lr[a] = name
    prefs = {a: inst.prefs[a] + ((top, (lr[a],)),) for a in inst.applicants}
    return PreferenceInstance(
        inst.applicants,
        inst.posts + tuple(lr[a] for a in inst.applicants),
        prefs,
        last_resorts=lr,
        has_last_resorts=True,
    )


def strip_last_resorts(inst: PreferenceInstance, m: Matching) -> Matching:
    """Drop pairs that use a last-resort post."""
    return Matching((a, p) for a, p in m.items() if not inst.is_last_resort(p))


def with_last_resorts(ext: PreferenceInstance, m: Matching) -> Matching:
    """Complete ``m`` by sending unmatched applicants to their last resorts."""
    pairs = dict(m)
    for a in ext.applicants:
        pairs.setdefault(a, ext.last_resorts[a])
    return Matching(pairs)


def signature_of(inst: PreferenceInstance, m: Matching) -> Signature:
    """Number of applicants matched at each rank 1..r."""
    counts = [0] * inst.r
    for a, p in m.items():
        counts[inst.rank(a, p) - 1] += 1
    return tuple(counts)


def compare_signatures(s1: Signature, s2: Signature) -> int:
    """Lexicographic comparison with zero padding: -1, 0 or 1."""
    n = max(len(s1), len(s2))
    t1 = tuple(s1) + (0,) * (n - len(s1))
    t2 = tuple(s2) + (0,) * (n - len(s2))
    return (t1 > t2) - (t1 < t2)
