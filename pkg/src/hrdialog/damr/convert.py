"""Standard-AMR to Dialogue-AMR conversion."""
from __future__ import annotations

import re

from ..amr import AmrGraph, Constant, Edge
from .errors import UnsupportedStructure
from .lexicon import SPEECH_ACTS, Lexicon, SpeechAct, default_lexicon
from .schema import (
    DialogueAmr,
    annotate_tense_aspect,
    fresh_var,
    speech_act_of,
    validate_dialogue_amr,
)

# light verbs whose ARG1 event is the real instruction ("keep moving")
WRAPPERS = frozenset({"keep-01", "continue-01"})
_EVENT = re.compile(r"-\d+$")

# role renames into the go-02 frame
_MOVEMENT_ROLES = {"destination": "ARG4", "source": "ARG3", "extent": "ARG1"}

DEFAULT_TENSE = {"command": "imperative", "promise": "future", "question": "future",
                 "request": "imperative", "offer": "future", "open-option": "future"}


def _mode(g: AmrGraph, var: str) -> str | None:
    for t in g.targets(var, "mode"):
        if isinstance(t, Constant):
            return t.value
    return None


def infer_act(g: AmrGraph, matrix: str) -> SpeechAct:
    mode = _mode(g, g.root) or _mode(g, matrix)
    if mode == "imperative":
        return SPEECH_ACTS["command"]
    if mode == "interrogative" or "amr-unknown" in g.instances.values():
        return SPEECH_ACTS["question"]
    return SPEECH_ACTS["assertion"]


def _matrix(g: AmrGraph) -> str:
    root = g.root
    concept = g.instances[root]
    if concept in WRAPPERS:
        inner = [t for t in g.targets(root, "ARG1") if isinstance(t, str)]
        if inner and _EVENT.search(g.instances[inner[0]]):
            return inner[0]
    if concept == "and" or concept.startswith("multi-sentence"):
        raise UnsupportedStructure(f"root {concept!r} joins several predicates")
    if not _EVENT.search(concept):
        raise UnsupportedStructure(f"root {concept!r} is not a predicate")
    return root


def convert_to_dialogue_amr(
    std: AmrGraph,
    speaker: str = "commander",
    addressee: str = "robot",
    act: SpeechAct | str | None = None,
    surface_tense: str | None = None,
    lexicon: Lexicon | None = None,
) -> DialogueAmr:
    """Wrap a Standard-AMR instruction or report in a speech-act envelope.

    The act comes from ``:mode`` unless given; promises must be passed in
    explicitly.  Assertions need ``surface_tense`` since the graph alone
    does not carry tense.
    """
    lexicon = lexicon or default_lexicon()
    if speech_act_of(std.instances[std.root], lexicon.registry) is not None:
        raise UnsupportedStructure("input already has a speech-act root")
    matrix = _matrix(std)
    concept = lexicon.normalize_action(std.instances[matrix])

    if act is None:
        act = infer_act(std, matrix)
    elif isinstance(act, str):
        act = lexicon.registry[act]
    if surface_tense is None:
        surface_tense = DEFAULT_TENSE.get(act.label)
        if surface_tense is None:
            raise UnsupportedStructure(f"surface tense is required for a {act.label}")

    # keep only the part of the graph hanging off the matrix predicate
    keep = _reachable(std, matrix)
    instances = {v: c for v, c in std.instances.items() if v in keep}
    edges = [e for e in std.edges if e.source in keep]

    root = fresh_var(instances, act.label[0])
    instances[root] = f"{act.label}-SA"
    spk = fresh_var(instances, speaker[0])
    instances[spk] = speaker
    adr = fresh_var(instances, addressee[0])
    instances[adr] = addressee

    merge = {}
    for v, c in list(instances.items()):
        if c == "you" and v not in (spk, adr):
            merge[v] = adr
        elif c == "i" and v not in (spk, adr):
            merge[v] = spk
    for v in merge:
        del instances[v]
    edges = [
        Edge(merge.get(s, s), r, merge.get(t, t) if isinstance(t, str) else t)
        for s, r, t in edges
        if merge.get(s, s) in instances
    ]
    instances[matrix] = concept.roleset

    original = std.instances[matrix]
    agents = {t for s, r, t in edges if s == matrix and r == "ARG0"}
    out: list[Edge] = []
    for e in edges:
        if e.role.lower() == "mode":
            continue
        if e.source == matrix and concept.name == "MOVEMENT":
            role = e.role
            if role == "ARG1" and e.target in agents:
                continue
            if role == "ARG2" and original.startswith("move-"):
                role = "ARG4"
            role = _MOVEMENT_ROLES.get(role, role)
            e = Edge(e.source, role, e.target)
        out.append(e)
    edges = out

    own = [e for e in edges if e.source == matrix]
    if act.label in ("command", "request") and not any(e.role == "ARG0" for e in own):
        edges.insert(edges.index(own[0]) if own else len(edges), Edge(matrix, "ARG0", adr))
    if concept.name == "MOVEMENT" and not any(e.source == matrix and e.role == "ARG3" for e in edges):
        here = fresh_var(instances, "h")
        instances[here] = "here"
        after = [i for i, e in enumerate(edges) if e.source == matrix and e.role == "ARG0"]
        edges.insert(after[0] + 1 if after else len(edges), Edge(matrix, "ARG3", here))

    envelope = [Edge(root, "ARG0", spk), Edge(root, "ARG2", adr), Edge(root, "ARG1", matrix)]
    graph = AmrGraph(root, instances, tuple(envelope + edges))
    graph = annotate_tense_aspect(graph, act, surface_tense, node=matrix)
    return validate_dialogue_amr(graph, lexicon)


def _reachable(g: AmrGraph, start: str) -> set[str]:
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for e in g.out_edges(v):
            if isinstance(e.target, str) and e.target not in seen:
                seen.add(e.target)
                todo.append(e.target)
    return seen
