"""AMR graphs in PENMAN notation.

A graph is stored the way it was written: every edge keeps the role and
direction of its surface form (``:ARG1-of`` included), so that
serialization reproduces the input tree.  The triple view used for scoring
forward-normalizes inverse roles.

    >>> g = parse_penman("(d / drive-01 :mode imperative :ARG0 (y / you))")
    >>> sorted(g.instances.items())
    [('d', 'drive-01'), ('y', 'you')]
    >>> print(serialize_penman(g))
    (d / drive-01
      :mode imperative
      :ARG0 (y / you))
"""
from __future__ import annotations

import re
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Union

MODES = frozenset({"imperative", "expressive", "interrogative"})
POLARITY_VALUES = frozenset({"+", "-"})
CONSTANT_KINDS = frozenset({"symbol", "string", "number", "polarity", "mode"})

# roles that end in "-of" but are not inverses
NON_INVERTIBLE = frozenset({"consist-of", "prep-on-behalf-of", "prep-out-of"})

_NUMBER = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_VARIABLE_LIKE = re.compile(r"^[a-z]\d*$")
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<slash>/)
    | (?P<string>"(?:[^"\\]|\\.)*")
    | (?P<role>:[^\s()"/:]+)
    | (?P<symbol>[^\s()"/:]+)
    | (?P<bad>.)
    """,
    re.VERBOSE | re.DOTALL,
)


class AmrError(Exception):
    """Base class for AMR parse and graph errors."""


class PenmanSyntaxError(AmrError):
    def __init__(self, position: int, expected: str, found: str | None = None):
        self.position = position
        self.expected = expected
        self.found = found
        got = "end of input" if found is None else repr(found)
        super().__init__(f"at offset {position}: expected {expected}, found {got}")


class DuplicateVariable(AmrError):
    def __init__(self, variable: str, position: int | None = None):
        self.variable = variable
        self.position = position
        super().__init__(f"variable {variable!r} is introduced more than once")


class DanglingVariable(AmrError):
    def __init__(self, variable: str, position: int | None = None):
        self.variable = variable
        self.position = position
        super().__init__(f"variable {variable!r} is referenced but never introduced")


class GraphError(AmrError):
    """A graph violates a structural invariant."""


class CycleError(GraphError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cycle through " + " -> ".join(cycle))


@dataclass(frozen=True)
class Constant:
    """A non-node edge target.

    Numbers keep their original text so serialization is bit-exact;
    :attr:`number` gives the parsed rational.
    """

    kind: str
    value: str

    def __post_init__(self):
        if self.kind not in CONSTANT_KINDS:
            raise ValueError(f"unknown constant kind {self.kind!r}")
        if self.kind == "polarity" and self.value not in POLARITY_VALUES:
            raise ValueError(f"polarity constant must be + or -, not {self.value!r}")
        if self.kind == "mode" and self.value not in MODES:
            raise ValueError(f"mode constant must be one of {sorted(MODES)}")
        if self.kind == "number" and not _NUMBER.match(self.value):
            raise ValueError(f"not a number: {self.value!r}")

    @property
    def number(self) -> Fraction | None:
        return Fraction(self.value) if self.kind == "number" else None

    def __str__(self) -> str:
        if self.kind == "string":
            escaped = self.value.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return self.value

    @classmethod
    def from_token(cls, text: str, role: str | None = None) -> "Constant":
        """Classify a bare (unquoted) token."""
        if text in POLARITY_VALUES:
            return cls("polarity", text)
        if _NUMBER.match(text):
            return cls("number", text)
        if role is not None and role.lower() == "mode" and text in MODES:
            return cls("mode", text)
        return cls("symbol", text)


Target = Union[str, Constant]


class Edge(NamedTuple):
    source: str
    role: str
    target: Target


class Triple(NamedTuple):
    """``kind`` is instance, relation or attribute.

    Instance triples carry the concept as ``target`` and ``"instance"`` as
    ``role``.
    """

    kind: str
    role: str
    source: str
    target: Target


def is_inverse(role: str) -> bool:
    return role.endswith("-of") and role.lower() not in NON_INVERTIBLE


def normalize_role(role: str) -> str:
    return role[:-3] if is_inverse(role) else role


@dataclass(frozen=True)
class AmrGraph:
    root: str
    instances: dict[str, str]
    edges: tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "instances", dict(self.instances))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        if self.root not in self.instances:
            raise GraphError(f"root {self.root!r} has no instance")
        for var, concept in self.instances.items():
            if not concept:
                raise GraphError(f"node {var!r} has an empty concept")
        for src, role, tgt in self.edges:
            if src not in self.instances:
                raise GraphError(f"edge source {src!r} is not a node")
            if not role:
                raise GraphError(f"empty role on edge from {src!r}")
            if isinstance(tgt, str) and tgt not in self.instances:
                raise GraphError(f"edge target {tgt!r} is not a node")

    __hash__ = None  # type: ignore[assignment]

    @property
    def variables(self) -> list[str]:
        return list(self.instances)

    def concept(self, var: str) -> str:
        return self.instances[var]

    def out_edges(self, var: str) -> list[Edge]:
        return [e for e in self.edges if e.source == var]

    def targets(self, var: str, role: str) -> list[Target]:
        role = role.lower()
        return [e.target for e in self.edges if e.source == var and e.role.lower() == role]

    def relation_edges(self) -> Iterator[tuple[str, str, str]]:
        """Node-to-node edges with inverse roles turned forward."""
        for src, role, tgt in self.edges:
            if isinstance(tgt, Constant):
                continue
            if is_inverse(role):
                yield tgt, normalize_role(role), src
            else:
                yield src, role, tgt


def find_cycle(graph: AmrGraph) -> list[str] | None:
    """Return one directed cycle of the normalized graph, or None."""
    succ: dict[str, list[str]] = defaultdict(list)
    for src, _, tgt in graph.relation_edges():
        succ[src].append(tgt)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(graph.instances, WHITE)
    for start in graph.instances:
        if colour[start] != WHITE:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(start, iter(succ[start]))]
        path = [start]
        colour[start] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[node] = BLACK
                stack.pop()
                path.pop()
            elif colour[nxt] == GREY:
                return path[path.index(nxt):] + [nxt]
            elif colour[nxt] == WHITE:
                colour[nxt] = GREY
                stack.append((nxt, iter(succ[nxt])))
                path.append(nxt)
    return None


def unreachable(graph: AmrGraph) -> set[str]:
    """Nodes not reachable from the root along edges as written."""
    succ: dict[str, list[str]] = defaultdict(list)
    for src, _, tgt in graph.edges:
        if isinstance(tgt, str):
            succ[src].append(tgt)
    seen = {graph.root}
    todo = [graph.root]
    while todo:
        for nxt in succ[todo.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return set(graph.instances) - seen


def validate_graph(graph: AmrGraph, strict: bool = True) -> None:
    """Check reachability and acyclicity.

    Cycles raise :class:`CycleError` in strict mode and emit a warning
    otherwise.  Unreachable nodes always raise.
    """
    missing = unreachable(graph)
    if missing:
        raise GraphError(f"nodes unreachable from root: {sorted(missing)}")
    cycle = find_cycle(graph)
    if cycle:
        if strict:
            raise CycleError(cycle)
        warnings.warn(str(CycleError(cycle)), stacklevel=2)


# --------------------------------------------------------------------------
# parsing


class _Tok(NamedTuple):
    kind: str
    text: str
    pos: int


def _blank_comments(text: str) -> tuple[str, list[tuple[int, str]]]:
    """Replace '#' comment lines by spaces, keeping offsets stable."""
    out = []
    comments = []
    offset = 0
    for line in text.splitlines(keepends=True):
        if line.lstrip().startswith("#"):
            comments.append((offset, line.strip()))
            out.append(re.sub(r"[^\n]", " ", line))
        else:
            out.append(line)
        offset += len(line)
    return "".join(out), comments


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise PenmanSyntaxError(m.start(), "a PENMAN token", m.group())
        toks.append(_Tok(kind, m.group(), m.start()))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok], start: int = 0):
        self.toks = toks
        self.i = start

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            pos = tok.pos if tok else (self.toks[-1].pos + len(self.toks[-1].text) if self.toks else 0)
            raise PenmanSyntaxError(pos, what, tok.text if tok else None)
        self.i += 1
        return tok

    def graph(self) -> AmrGraph:
        instances: dict[str, str] = {}
        edges: list[list] = []
        pending: list[tuple[int, str, int]] = []  # (edge index, symbol, position)
        root = self._node(instances, edges, pending)
        for idx, sym, pos in pending:
            src, role, _ = edges[idx]
            if sym in instances:
                edges[idx][2] = sym
            elif _VARIABLE_LIKE.match(sym):
                raise DanglingVariable(sym, pos)
            else:
                edges[idx][2] = Constant.from_token(sym, role)
        return AmrGraph(root, instances, tuple(Edge(*e) for e in edges))

    def _node(self, instances, edges, pending) -> str:
        self.expect("lparen", "'('")
        var_tok = self.expect("symbol", "a variable")
        var = var_tok.text
        if var in instances:
            raise DuplicateVariable(var, var_tok.pos)
        self.expect("slash", "'/'")
        concept_tok = self.peek()
        if concept_tok is None or concept_tok.kind not in ("symbol", "string"):
            raise PenmanSyntaxError(
                concept_tok.pos if concept_tok else self.toks[-1].pos,
                "a concept",
                concept_tok.text if concept_tok else None,
            )
        self.i += 1
        concept = concept_tok.text
        if concept_tok.kind == "string":
            concept = _unquote(concept)
        instances[var] = concept
        while True:
            tok = self.peek()
            if tok is None:
                raise PenmanSyntaxError(self.toks[-1].pos + 1, "a role or ')'")
            if tok.kind == "rparen":
                self.i += 1
                return var
            if tok.kind != "role":
                raise PenmanSyntaxError(tok.pos, "a role or ')'", tok.text)
            self.i += 1
            role = tok.text[1:]
            tgt = self.peek()
            if tgt is None:
                raise PenmanSyntaxError(tok.pos + len(tok.text), "a node or constant")
            if tgt.kind == "lparen":
                # reserve the slot so the parent edge precedes the child's edges
                slot = len(edges)
                edges.append([var, role, None])
                edges[slot][2] = self._node(instances, edges, pending)
            elif tgt.kind == "string":
                self.i += 1
                edges.append([var, role, Constant("string", _unquote(tgt.text))])
            elif tgt.kind == "symbol":
                self.i += 1
                pending.append((len(edges), tgt.text, tgt.pos))
                edges.append([var, role, None])
            else:
                raise PenmanSyntaxError(tgt.pos, "a node or constant", tgt.text)


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def parse_penman(text: str, strict: bool = True) -> AmrGraph:
    """Parse exactly one PENMAN graph.

    Raises PenmanSyntaxError, DuplicateVariable, DanglingVariable, and in
    strict mode CycleError.
    """
    clean, _ = _blank_comments(text)
    toks = _tokenize(clean)
    if not toks:
        raise PenmanSyntaxError(0, "'('")
    parser = _Parser(toks)
    graph = parser.graph()
    extra = parser.peek()
    if extra is not None:
        raise PenmanSyntaxError(extra.pos, "end of input", extra.text)
    validate_graph(graph, strict=strict)
    return graph


@dataclass(frozen=True)
class AmrEntry:
    graph: AmrGraph
    id: str | None = None
    metadata: dict[str, str] = field(default_factory=dict)


def _metadata(lines: Iterable[str]) -> dict[str, str]:
    meta = {}
    for line in lines:
        for m in re.finditer(r"::(\S+)(?:\s+((?:(?!\s::).)*))?", line):
            meta[m.group(1)] = (m.group(2) or "").strip()
    return meta


def iter_penman(text: str, strict: bool = True) -> Iterator[AmrEntry]:
    """Yield every graph in a multi-graph ``.amr`` text.

    ``# ::id`` and other ``# ::key value`` lines between graphs become the
    metadata of the following graph.
    """
    clean, comments = _blank_comments(text)
    toks = _tokenize(clean)
    parser = _Parser(toks)
    last_end = -1
    while parser.peek() is not None:
        start = parser.peek().pos
        graph = parser.graph()
        validate_graph(graph, strict=strict)
        meta = _metadata(c for off, c in comments if last_end < off < start)
        last_end = toks[parser.i - 1].pos
        yield AmrEntry(graph, meta.get("id"), meta)


def read_amr_file(path, strict: bool = True) -> list[AmrEntry]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_penman(fh.read(), strict=strict))


# --------------------------------------------------------------------------
# output and views


def serialize_penman(graph: AmrGraph, indent: int = 2) -> str:
    out_edges: dict[str, list[Edge]] = defaultdict(list)
    for e in graph.edges:
        out_edges[e.source].append(e)
    seen: set[str] = set()

    def emit(var: str, depth: int) -> str:
        seen.add(var)
        parts = [f"({var} / {graph.instances[var]}"]
        pad = " " * (indent * (depth + 1))
        for _, role, tgt in out_edges[var]:
            if isinstance(tgt, Constant):
                val = str(tgt)
            elif tgt in seen:
                val = tgt
            else:
                val = emit(tgt, depth + 1)
            parts.append(f"\n{pad}:{role} {val}")
        parts.append(")")
        return "".join(parts)

    text = emit(graph.root, 0)
    if len(seen) != len(graph.instances):
        raise GraphError("graph has nodes unreachable from the root")
    return text


def to_triples(graph: AmrGraph) -> list[Triple]:
    """Instance triples followed by one triple per edge, in edge order."""
    triples = [Triple("instance", "instance", v, c) for v, c in graph.instances.items()]
    for src, role, tgt in graph.edges:
        if isinstance(tgt, Constant):
            triples.append(Triple("attribute", role, src, tgt))
        elif is_inverse(role):
            triples.append(Triple("relation", normalize_role(role), tgt, src))
        else:
            triples.append(Triple("relation", role, src, tgt))
    return triples


def from_triples(triples: Iterable[Triple], root: str | None = None) -> AmrGraph:
    """Rebuild a graph from its triple view.

    Relations that can only be reached against their direction are written
    back as inverse roles, so the result is rooted.
    """
    triples = list(triples)
    instances = {t.source: t.target for t in triples if t.kind == "instance"}
    if not instances:
        raise GraphError("no instance triples")
    if root is None:
        root = next(iter(instances))
    attrs = [t for t in triples if t.kind == "attribute"]
    rels = [t for t in triples if t.kind == "relation"]
    edges: list[Edge] = []
    used = [False] * len(rels)
    seen = {root}
    order = [root]
    i = 0
    while i < len(order):
        node = order[i]
        i += 1
        edges.extend(Edge(node, t.role, t.target) for t in attrs if t.source == node)
        for k, t in enumerate(rels):
            if used[k]:
                continue
            if t.source == node:
                used[k] = True
                edges.append(Edge(node, t.role, t.target))
                other = t.target
            elif t.target == node:
                used[k] = True
                edges.append(Edge(node, t.role + "-of", t.source))
                other = t.source
            else:
                continue
            if other not in seen:
                seen.add(other)
                order.append(other)
    if len(seen) != len(instances):
        raise GraphError("triples do not form a connected graph")
    return AmrGraph(root, instances, tuple(edges))


def _signature(graph: AmrGraph, var: str, depth: int, out: dict[str, list[Edge]]) -> tuple:
    if depth == 0:
        return (graph.instances[var],)
    kids = []
    for _, role, tgt in out[var]:
        if isinstance(tgt, Constant):
            kids.append((role.lower(), ("const", str(tgt))))
        else:
            kids.append((role.lower(), _signature(graph, tgt, depth - 1, out)))
    return (graph.instances[var], tuple(sorted(kids)))


def rename_variables(graph: AmrGraph, scheme: str = "canonical-depth-first") -> AmrGraph:
    """Rename every variable.

    ``canonical-depth-first`` sorts each node's edges by role and subgraph signature and
    names nodes ``v0, v1, ...`` in depth-first order, so alpha-variants and
    edge-order variants of a tree come out equal.  ``fresh`` keeps edge order
    and uses AMR-style names: first letter of the concept plus a counter.
    """
    out: dict[str, list[Edge]] = defaultdict(list)
    for e in graph.edges:
        out[e.source].append(e)
    if scheme in ("canonical", "canonical-depth-first"):
        scheme = "canonical"
        sig_cache: dict[str, tuple] = {}

        def key(e: Edge):
            if isinstance(e.target, Constant):
                return (e.role.lower(), 0, ("const", str(e.target)))
            if e.target not in sig_cache:
                sig_cache[e.target] = _signature(graph, e.target, 3, out)
            return (e.role.lower(), 1, sig_cache[e.target])

        for var in list(out):
            out[var] = sorted(out[var], key=key)
    elif scheme != "fresh":
        raise ValueError(f"unknown renaming scheme {scheme!r}")

    order: list[str] = []
    seen: set[str] = set()

    def walk(var: str):
        seen.add(var)
        order.append(var)
        for e in out[var]:
            if isinstance(e.target, str) and e.target not in seen:
                walk(e.target)

    walk(graph.root)
    for var in graph.instances:
        if var not in seen:
            walk(var)

    names: dict[str, str] = {}
    if scheme == "canonical":
        names = {v: f"v{i}" for i, v in enumerate(order)}
    else:
        counts: dict[str, int] = defaultdict(int)
        for v in order:
            m = re.search(r"[a-z]", graph.instances[v].lower())
            letter = m.group() if m else "x"
            counts[letter] += 1
            names[v] = letter if counts[letter] == 1 else f"{letter}{counts[letter]}"

    edges = []
    for v in order:
        for src, role, tgt in out[v]:
            edges.append(Edge(names[src], role, names[tgt] if isinstance(tgt, str) else tgt))
    instances = {names[v]: graph.instances[v] for v in order}
    return AmrGraph(names[graph.root], instances, tuple(edges))
