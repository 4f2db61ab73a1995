"""Independent oracles and generators shared by the test modules."""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from pathlib import Path

from hrdialog.amr import AmrGraph, Constant, Edge, to_triples

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(*parts) -> Path:
    return FIXTURES.joinpath(*parts)


# --------------------------------------------------------------------------
# smatch by plain enumeration


def _image(t, m):
    if t.kind == "instance":
        return ("instance", t.target, m.get(t.source))
    if t.kind == "attribute":
        return ("attr", t.role.casefold(), m.get(t.source), str(t.target))
    return ("rel", t.role.casefold(), m.get(t.source), m.get(t.target))


def _key(t):
    if t.kind == "instance":
        return ("instance", t.target, t.source)
    if t.kind == "attribute":
        return ("attr", t.role.casefold(), t.source, str(t.target))
    return ("rel", t.role.casefold(), t.source, t.target)


def brute_smatch(g1: AmrGraph, g2: AmrGraph) -> tuple[int, int, int]:
    """(best matched, |T1|, |T2|) by trying every injective partial mapping."""
    t1, t2 = to_triples(g1), to_triples(g2)
    target = Counter(_key(t) for t in t2)
    v1, v2 = list(g1.instances), list(g2.instances)
    best = 0
    for choice in itertools.product(v2 + [None], repeat=len(v1)):
        used = [c for c in choice if c is not None]
        if len(used) != len(set(used)):
            continue
        m = dict(zip(v1, choice))
        imaged = Counter(_image(t, m) for t in t1)
        best = max(best, sum((imaged & target).values()))
    return best, len(t1), len(t2)


# --------------------------------------------------------------------------
# Krippendorff's alpha through the coincidence matrix, in floats


def coincidence_alpha(rows: dict) -> float:
    """rows: {unit: [values...]} with missing values already removed."""
    o: Counter = Counter()
    for vals in rows.values():
        m = len(vals)
        if m < 2:
            continue
        for i, j in itertools.permutations(range(m), 2):
            o[(vals[i], vals[j])] += 1.0 / (m - 1)
    n_c: Counter = Counter()
    for (c, _), w in o.items():
        n_c[c] += w
    n = sum(n_c.values())
    d_o = sum(w for (c, k), w in o.items() if c != k) / n
    d_e = sum(n_c[c] * n_c[k] for c in n_c for k in n_c if c != k) / (n * (n - 1))
    return 1.0 - d_o / d_e


# --------------------------------------------------------------------------
# tf-idf cosine by hand


def hand_tfidf_cosine(docs: list[str], query: str) -> list[float]:
    toks = [d.lower().split() for d in docs]
    vocab = sorted({w for d in toks for w in d})
    n = len(docs)
    idf = {w: math.log((1 + n) / (1 + sum(w in d for d in toks))) + 1 for w in vocab}

    def vec(words):
        c = Counter(w for w in words if w in idf)
        v = {w: c[w] * idf[w] for w in c}
        norm = math.sqrt(sum(x * x for x in v.values()))
        return {w: x / norm for w, x in v.items()} if norm else {}

    q = vec(query.lower().split())
    return [sum(q.get(w, 0.0) * x for w, x in vec(d).items()) for d in toks]


# --------------------------------------------------------------------------
# random graphs

CONCEPTS = ("go-02", "turn-01", "robot", "door", "wall", "now")
ROLES = ("ARG0", "ARG1", "ARG2", "mod")


def random_graph(rng: random.Random, max_vars: int = 6, reentrancy: float = 0.3,
                 concepts=CONCEPTS, prefix: str = "x") -> AmrGraph:
    """A random rooted DAG: a tree in creation order plus forward re-entrancies."""
    n = rng.randint(1, max_vars)
    names = [f"{prefix}{i}" for i in range(n)]
    instances = {v: rng.choice(concepts) for v in names}
    edges = []
    for i in range(1, n):
        edges.append(Edge(names[rng.randrange(i)], rng.choice(ROLES), names[i]))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < reentrancy / n:
                edges.append(Edge(names[i], rng.choice(ROLES), names[j]))
        if rng.random() < 0.2:
            edges.append(Edge(names[i], "polarity", Constant("polarity", "-")))
    rng.shuffle(edges)
    return AmrGraph(names[0], instances, tuple(edges))
