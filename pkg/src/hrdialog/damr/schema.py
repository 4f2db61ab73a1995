"""Dialogue-AMR envelope: decoding, validation and tense/aspect marking."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from ..amr import AmrGraph, Constant, Edge
from .errors import (
    BadTenseAspect,
    ConflictingAspect,
    DialogueAmrError,
    IncompatibleActConcept,
    MissingEnvelopeArg,
    NotASpeechActRoot,
    UnknownRobotConcept,
)
from .lexicon import SPEECH_ACTS, Lexicon, RobotConcept, SpeechAct, default_lexicon

ASPECT_FLAGS = ("stable", "ongoing", "complete", "habitual", "completable")
TIMES = ("before-now", "now", "after-now", "unspecified")
SURFACE_TENSES = ("past", "present", "future", "imperative")

_SA_ROOT = re.compile(r"^(?P<stem>.+)-(?:sa|00)$", re.IGNORECASE)


@dataclass(frozen=True)
class TenseAspect:
    time: str = "unspecified"
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.time not in TIMES:
            raise ValueError(f"unknown time {self.time!r}")
        for k, v in self.flags.items():
            if k not in ASPECT_FLAGS or v not in ("+", "-"):
                raise ValueError(f"bad aspect flag {k}={v}")

    __hash__ = None  # type: ignore[assignment]

    def as_dict(self) -> dict:
        return {"time": self.time, **self.flags}


@dataclass(frozen=True)
class DialogueAmr:
    graph: AmrGraph
    act: SpeechAct
    speaker: str
    content_root: str
    addressee: str
    concept: RobotConcept
    ta: TenseAspect

    __hash__ = None  # type: ignore[assignment]

    def as_dict(self) -> dict:
        g = self.graph
        return {
            "act": self.act.label,
            "family": self.act.family,
            "concept": self.concept.name,
            "roleset": g.instances[self.content_root],
            "speaker": g.instances[self.speaker],
            "addressee": g.instances[self.addressee],
            "tense_aspect": self.ta.as_dict(),
        }


def speech_act_of(concept: str, registry=SPEECH_ACTS) -> SpeechAct | None:
    m = _SA_ROOT.match(concept)
    return registry.get(m.group("stem")) if m else None


def _node_targets(g: AmrGraph, var: str, role: str) -> list[str]:
    return [t for t in g.targets(var, role) if isinstance(t, str)]


def content_node(g: AmrGraph) -> str:
    """ARG1 of a speech-act root, else the root itself."""
    if speech_act_of(g.instances[g.root]) is not None:
        kids = _node_targets(g, g.root, "ARG1")
        if kids:
            return kids[0]
    return g.root


def _decode_time(g: AmrGraph, var: str) -> tuple[str, list[str]]:
    times = g.targets(var, "time")
    if not times:
        return "unspecified", []
    if len(times) > 1:
        return "unspecified", [f"{var} has {len(times)} :time edges"]
    t = times[0]
    if isinstance(t, Constant):
        return "unspecified", [f":time of {var} is a constant, expected a now-anchored node"]
    concept = g.instances[t]
    out = g.out_edges(t)
    if concept == "now" and not out:
        return "now", []
    if concept in ("after", "before") and len(out) == 1 and out[0].role.lower() == "op1":
        op = out[0].target
        if isinstance(op, str) and g.instances[op] == "now" and not g.out_edges(op):
            return f"{concept}-now", []
    return "unspecified", [f":time of {var} must be now, (after :op1 now) or (before :op1 now)"]


def decode_tense_aspect(g: AmrGraph, var: str) -> tuple[TenseAspect, list[str]]:
    """Read flags and time off ``var``; returns the best-effort value and problems."""
    problems = []
    flags: dict[str, str] = {}
    for e in g.out_edges(var):
        role = e.role.lower()
        if role not in ASPECT_FLAGS:
            continue
        val = e.target
        if not isinstance(val, Constant) or val.value not in ("+", "-"):
            problems.append(f":{role} must be + or -")
            continue
        if role in flags:
            problems.append(f":{role} appears more than once")
            continue
        flags[role] = val.value
    time, tprobs = _decode_time(g, var)
    problems += tprobs
    if "completable" in flags and time in ("now", "before-now"):
        problems.append(":completable is only allowed on hypothetical or future content")
    return TenseAspect(time, flags), problems


def diagnose_dialogue_amr(g: AmrGraph, lexicon: Lexicon | None = None) -> list[DialogueAmrError]:
    """Every schema violation found, in check order."""
    lexicon = lexicon or default_lexicon()
    root_concept = g.instances[g.root]
    act = speech_act_of(root_concept, lexicon.registry)
    if act is None:
        return [NotASpeechActRoot(root_concept)]
    errors: list[DialogueAmrError] = []
    for which in ("ARG0", "ARG1", "ARG2"):
        targets = g.targets(g.root, which)
        if not targets:
            errors.append(MissingEnvelopeArg(which))
        elif len(targets) > 1:
            errors.append(MissingEnvelopeArg(which, "has more than one"))
        elif isinstance(targets[0], Constant):
            errors.append(MissingEnvelopeArg(which, "has a constant instead of a node for"))
    content = _node_targets(g, g.root, "ARG1")
    if not content:
        return errors
    c = content[0]
    concept = lexicon.by_roleset(g.instances[c])
    if concept is None:
        errors.append(UnknownRobotConcept(g.instances[c]))
    elif not concept.accepts(act):
        errors.append(IncompatibleActConcept(act.label, concept.name))
    _, problems = decode_tense_aspect(g, c)
    errors += [BadTenseAspect(p) for p in problems]
    return errors


def validate_dialogue_amr(g: AmrGraph, lexicon: Lexicon | None = None) -> DialogueAmr:
    """Decode the envelope, raising the first violation.

    ``-00`` roots and stem aliases are rewritten to ``<act>-SA``.
    """
    lexicon = lexicon or default_lexicon()
    errors = diagnose_dialogue_amr(g, lexicon)
    if errors:
        raise errors[0]
    act = speech_act_of(g.instances[g.root], lexicon.registry)
    instances = dict(g.instances)
    instances[g.root] = f"{act.label}-SA"
    g = AmrGraph(g.root, instances, g.edges)
    (speaker,) = g.targets(g.root, "ARG0")
    (content,) = g.targets(g.root, "ARG1")
    (addressee,) = g.targets(g.root, "ARG2")
    ta, _ = decode_tense_aspect(g, content)
    return DialogueAmr(g, act, speaker, content, addressee, lexicon.by_roleset(g.instances[content]), ta)


# --------------------------------------------------------------------------
# tense and aspect


def fresh_var(taken, letter: str) -> str:
    letter = (letter or "x")[0].lower()
    if not letter.isalpha():
        letter = "x"
    if letter not in taken:
        return letter
    n = 2
    while f"{letter}{n}" in taken:
        n += 1
    return f"{letter}{n}"


def is_bounded(g: AmrGraph, var: str) -> bool:
    """Whether the event at ``var`` has a goal the robot could reach."""
    agents = set(_node_targets(g, var, "ARG0"))
    for e in g.out_edges(var):
        role = e.role.lower()
        if role in ("arg4", "destination"):
            return True
        if isinstance(e.target, Constant):
            continue
        tconcept = g.instances[e.target]
        if role in ("extent", "arg1") and tconcept.endswith("-quantity"):
            return True
        if role == "path" and (g.targets(e.target, "destination") or g.targets(e.target, "ARG4")):
            return True
        if role == "arg1" and e.target not in agents:
            return True
    return False


_TENSE_FLAGS = {
    "present": {"ongoing": "+", "complete": "-"},
    "past": {"ongoing": "-", "complete": "+"},
}
_TENSE_TIME = {"imperative": "after-now", "future": "after-now", "present": "now", "past": "before-now"}


def annotate_tense_aspect(
    g: AmrGraph,
    act: SpeechAct | str | None,
    surface_tense: str,
    node: str | None = None,
) -> AmrGraph:
    """Add aspect flags and a ``:time`` anchor to the event node.

    The event node is the content of a speech-act root, or the root itself.
    Flags go before the node's other edges, the time edge after them.
    Re-annotating with the same tense changes nothing.
    """
    if surface_tense not in SURFACE_TENSES:
        raise ValueError(f"surface tense must be one of {SURFACE_TENSES}")
    if isinstance(act, str):
        act = SPEECH_ACTS[act]
    if surface_tense == "imperative" and act is not None and act.family != "action-discussion":
        raise ConflictingAspect(f"imperative surface form cannot express a {act.label}")
    var = node or content_node(g)

    if surface_tense in _TENSE_FLAGS:
        want = dict(_TENSE_FLAGS[surface_tense])
        forbidden = {"completable"}
    else:
        want = {"completable": "+" if is_bounded(g, var) else "-"}
        forbidden = {"ongoing", "complete"}
    want_time = _TENSE_TIME[surface_tense]

    have, problems = decode_tense_aspect(g, var)
    if problems:
        raise ConflictingAspect("; ".join(problems))
    for k, v in have.flags.items():
        if k in forbidden:
            raise ConflictingAspect(f":{k} {v} does not fit {surface_tense} tense")
        if k in want and want[k] != v:
            raise ConflictingAspect(f":{k} is {v}, {surface_tense} tense needs {want[k]}")
    if have.time not in ("unspecified", want_time):
        raise ConflictingAspect(f":time is {have.time}, {surface_tense} tense needs {want_time}")

    new_flags = [Edge(var, k, Constant("polarity", v)) for k, v in want.items() if k not in have.flags]
    instances = dict(g.instances)
    time_edges: list[Edge] = []
    if have.time == "unspecified":
        now = fresh_var(instances, "n")
        instances[now] = "now"
        if want_time == "now":
            time_edges = [Edge(var, "time", now)]
        else:
            concept = want_time.split("-")[0]
            anchor = fresh_var(instances, concept[0])
            instances[anchor] = concept
            time_edges = [Edge(var, "time", anchor), Edge(anchor, "op1", now)]
    if not new_flags and not time_edges:
        return g

    edges: list[Edge] = []
    placed = False
    for e in g.edges:
        if not placed and e.source == var:
            edges.extend(new_flags)
            placed = True
        edges.append(e)
    if not placed:
        edges.extend(new_flags)
    edges.extend(time_edges)
    return AmrGraph(g.root, instances, tuple(edges))


def with_concept(g: AmrGraph, var: str, concept: str) -> AmrGraph:
    instances = dict(g.instances)
    instances[var] = concept
    return replace(g, instances=instances)
