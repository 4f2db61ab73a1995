"""Smatch: triple overlap between two AMR graphs under the best node mapping.

Two search strategies share one scorer.  ``smatch_exact`` is a
branch-and-bound enumeration of injective mappings and serves as the oracle;
``smatch_hillclimb`` is the usual greedy search with random restarts.
"""
from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .amr import AmrGraph, Constant, to_triples

EXHAUSTIVE_LIMIT = 8


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class MappingResult:
    mapping: dict
    matched: int
    total1: int
    total2: int

    @property
    def precision(self) -> Fraction:
        return Fraction(self.matched, self.total1)

    @property
    def recall(self) -> Fraction:
        return Fraction(self.matched, self.total2)

    @property
    def f1(self) -> Fraction:
        p, r = self.precision, self.recall
        if p + r == 0:
            return Fraction(0)
        return 2 * p * r / (p + r)

    def as_dict(self) -> dict:
        return {
            "precision": float(self.precision),
            "recall": float(self.recall),
            "f1": float(self.f1),
            "matched": self.matched,
            "mapping": {k: v for k, v in self.mapping.items() if v is not None},
        }


def _const_key(c: Constant) -> str:
    return str(c)


class _Problem:
    """Pre-computed scoring tables for one graph pair."""

    def __init__(self, g1: AmrGraph, g2: AmrGraph):
        self.nodes1 = list(g1.instances)
        self.nodes2 = list(g2.instances)
        t1, t2 = to_triples(g1), to_triples(g2)
        self.total1, self.total2 = len(t1), len(t2)

        def unary(g: AmrGraph, triples):
            attrs: dict[str, Counter] = defaultdict(Counter)
            for t in triples:
                if t.kind == "attribute":
                    attrs[t.source][(t.role.casefold(), _const_key(t.target))] += 1
            return attrs

        a1, a2 = unary(g1, t1), unary(g2, t2)
        self.unary = {}
        for v in self.nodes1:
            row = {}
            for w in self.nodes2:
                s = int(g1.instances[v] == g2.instances[w])
                s += sum((a1[v] & a2[w]).values())
                row[w] = s
            self.unary[v] = row
        self.rel1: Counter = Counter(
            (t.role.casefold(), t.source, t.target) for t in t1 if t.kind == "relation"
        )
        self.rel2: Counter = Counter(
            (t.role.casefold(), t.source, t.target) for t in t2 if t.kind == "relation"
        )
        # relation keys of G1 indexed by their later endpoint in search order
        pos = {v: i for i, v in enumerate(self.nodes1)}
        self.rel_by_last: dict[str, list] = defaultdict(list)
        for key, c in self.rel1.items():
            _, s, t = key
            last = s if pos[s] >= pos[t] else t
            self.rel_by_last[last].append((key, c))

    def rel_gain(self, key, c, m) -> int:
        role, s, t = key
        ms, mt = m.get(s), m.get(t)
        if ms is None or mt is None:
            return 0
        return min(c, self.rel2.get((role, ms, mt), 0))

    def score(self, m: dict) -> int:
        total = 0
        for v, w in m.items():
            if w is not None:
                total += self.unary[v][w]
        for key, c in self.rel1.items():
            total += self.rel_gain(key, c, m)
        return total


def smatch_exact(g1: AmrGraph, g2: AmrGraph, limit: int = EXHAUSTIVE_LIMIT) -> MappingResult:
    """Best mapping by exhaustive branch-and-bound.

    Among equally good mappings, the lexicographically smallest one (in
    G1 instance order, G2 candidates in G2 instance order, unmapped last)
    is returned.
    """
    if min(len(g1.instances), len(g2.instances)) > limit:
        raise TooLarge(
            f"exhaustive search limited to {limit} variables; "
            f"got {len(g1.instances)} and {len(g2.instances)}"
        )
    if len(g1.instances) > len(g2.instances):
        flipped = smatch_exact(g2, g1, limit)
        inverse = {w: v for v, w in flipped.mapping.items() if w is not None}
        mapping = {v: inverse.get(v) for v in g1.instances}
        return MappingResult(mapping, flipped.matched, flipped.total2, flipped.total1)

    prob = _Problem(g1, g2)
    nodes1, nodes2 = prob.nodes1, prob.nodes2
    n1 = len(nodes1)
    best_unary = [max(prob.unary[v].values(), default=0) for v in nodes1]
    # optimistic bound for everything decided at or after position i
    suffix = [0] * (n1 + 1)
    for i in range(n1 - 1, -1, -1):
        v = nodes1[i]
        suffix[i] = suffix[i + 1] + best_unary[i] + sum(c for _, c in prob.rel_by_last[v])

    best_score = -1
    best_map: dict = {}
    current: dict = {}
    used: set = set()

    def search(i: int, score: int):
        nonlocal best_score, best_map
        if score + suffix[i] <= best_score:
            return
        if i == n1:
            best_score = score
            best_map = dict(current)
            return
        v = nodes1[i]
        for w in nodes2:
            if w in used:
                continue
            current[v] = w
            used.add(w)
            gain = prob.unary[v][w]
            gain += sum(prob.rel_gain(k, c, current) for k, c in prob.rel_by_last[v])
            search(i + 1, score + gain)
            used.discard(w)
            del current[v]
        if len(nodes2) - len(used) < n1 - i:
            current[v] = None
            search(i + 1, score)
            del current[v]

    search(0, 0)
    return MappingResult(best_map, best_score, prob.total1, prob.total2)


def _smart_init(prob: _Problem, g1: AmrGraph, g2: AmrGraph, rng: random.Random) -> dict:
    m: dict = {}
    free = list(prob.nodes2)
    for v in prob.nodes1:
        match = next((w for w in free if g2.instances[w] == g1.instances[v]), None)
        if match is not None:
            m[v] = match
            free.remove(match)
    for v in prob.nodes1:
        if v not in m:
            if free:
                w = free.pop(rng.randrange(len(free)))
                m[v] = w
            else:
                m[v] = None
    return m


def _random_init(prob: _Problem, rng: random.Random) -> dict:
    pool = list(prob.nodes2) + [None] * max(0, len(prob.nodes1) - len(prob.nodes2))
    rng.shuffle(pool)
    return dict(zip(prob.nodes1, pool))


def _climb(prob: _Problem, m: dict) -> tuple[dict, int]:
    score = prob.score(m)
    while True:
        best_gain, best_m = 0, None
        owner = {w: v for v, w in m.items() if w is not None}
        for v in prob.nodes1:
            for w in prob.nodes2 + [None]:
                if m[v] == w:
                    continue
                cand = dict(m)
                u = owner.get(w) if w is not None else None
                if u is not None:
                    cand[u] = m[v]
                cand[v] = w
                gain = prob.score(cand) - score
                if gain > best_gain:
                    best_gain, best_m = gain, cand
        if best_m is None:
            return m, score
        m, score = best_m, score + best_gain


def smatch_hillclimb(
    g1: AmrGraph, g2: AmrGraph, restarts: int = 4, seed: int = 0
) -> MappingResult:
    """Greedy search; restart 0 starts from concept matches, the rest at random."""
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    prob = _Problem(g1, g2)
    rng = random.Random(seed)
    best_m: Optional[dict] = None
    best = -1
    for r in range(restarts):
        init = _smart_init(prob, g1, g2, rng) if r == 0 else _random_init(prob, rng)
        m, s = _climb(prob, init)
        if s > best:
            best, best_m = s, m
    return MappingResult(best_m, best, prob.total1, prob.total2)


def smatch(
    g1: AmrGraph,
    g2: AmrGraph,
    method: str = "auto",
    restarts: int = 4,
    seed: int = 0,
    limit: int = EXHAUSTIVE_LIMIT,
) -> MappingResult:
    if method == "exact":
        return smatch_exact(g1, g2, limit)
    if method == "hillclimb":
        return smatch_hillclimb(g1, g2, restarts, seed)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if min(len(g1.instances), len(g2.instances)) <= limit:
        return smatch_exact(g1, g2, limit)
    return smatch_hillclimb(g1, g2, restarts, seed)


def mean_f1(pairs, **kw) -> Fraction:
    """Plain mean of per-pair F1 over a sequence of graph pairs."""
    scores = [smatch(a, b, **kw).f1 for a, b in pairs]
    if not scores:
        raise ValueError("no graph pairs")
    return sum(scores, Fraction(0)) / len(scores)
