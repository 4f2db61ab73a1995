"""Retrieval-based intent matching and the dialogue-manager response policy."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from sklearn.feature_extraction.text import TfidfVectorizer

from .amr import AmrGraph, Constant
from .damr import DialogueAmr, DialogueAmrError, content_node, default_lexicon
from .structure import HEADER as TRANSCRIPT_HEADER
from .structure import extract_instruction_response_pairs, parse_transcript

DEFAULT_THRESHOLD = 0.35

GENERIC_PROMPT = "Sorry, I didn't understand that. Could you rephrase the instruction?"
MULTI_ACTION_PROMPT = "Please give me one instruction at a time."

# prompts asking for the missing end state, per robot concept;
# {direction} is filled with " <direction>" when the content names one
CLARIFY_TEMPLATES = {
    "MOVEMENT": "Where should I move{direction} to?",
    "ROTATION": "How far should I turn{direction}?",
    "SEND-IMAGE": "What should I take a picture of?",
}
FALLBACK_TEMPLATE = "What end point should I aim for?"


class EmptyTrainingSet(ValueError):
    code = "EmptyTrainingSet"


@dataclass(frozen=True)
class ResponsePair:
    instruction: str
    feedback: tuple = ()
    translation: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "feedback", tuple(self.feedback))
        object.__setattr__(self, "translation", tuple(self.translation))
        if not self.instruction.strip():
            raise ValueError("instruction must not be empty")
        if not self.feedback and not self.translation:
            raise ValueError(f"pair {self.instruction!r} has no feedback and no translation")


def _key(text: str) -> str:
    return " ".join(text.lower().split())


class IntentIndex:
    """TF-IDF weighted cosine retrieval over training instructions."""

    def __init__(self, pairs: Sequence[ResponsePair]):
        merged: dict[str, ResponsePair] = {}
        for p in pairs:
            k = _key(p.instruction)
            if k in merged:
                old = merged[k]
                fb = old.feedback + tuple(x for x in p.feedback if x not in old.feedback)
                tr = old.translation + tuple(x for x in p.translation if x not in old.translation)
                merged[k] = ResponsePair(old.instruction, fb, tr)
            else:
                merged[k] = p
        if not merged:
            raise EmptyTrainingSet("no instruction-response pairs to index")
        self.pairs: tuple[ResponsePair, ...] = tuple(merged.values())
        self.vectorizer = TfidfVectorizer(
            tokenizer=str.split, token_pattern=None, lowercase=True,
            smooth_idf=True, sublinear_tf=False, norm="l2",
        )
        self.matrix = self.vectorizer.fit_transform([_key(p.instruction) for p in self.pairs])

    def __len__(self):
        return len(self.pairs)

    def classify(self, text: str, k: int = 5) -> list[tuple[ResponsePair, float]]:
        """Top ``k`` pairs with positive cosine, best first, ties in training order."""
        q = self.vectorizer.transform([_key(text)])
        scores = (self.matrix @ q.T).toarray().ravel()
        ranked = sorted(
            ((i, min(1.0, round(float(s), 12))) for i, s in enumerate(scores) if s > 1e-12),
            key=lambda x: -x[1],
        )
        return [(self.pairs[i], s) for i, s in ranked[:k]]


def build_index(pairs: Sequence[ResponsePair]) -> IntentIndex:
    return IntentIndex(pairs)


def classify(index: IntentIndex, text: str, k: int = 5) -> list[tuple[ResponsePair, float]]:
    return index.classify(text, k)


@dataclass(frozen=True)
class PolicyDecision:
    kind: str  # actionable, clarify or no-match
    score: float
    matched_instruction: Optional[str] = None
    feedback: tuple = ()
    translation: tuple = ()
    prompt: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "score": self.score,
            "matched_instruction": self.matched_instruction,
            "feedback": list(self.feedback),
            "translation": list(self.translation),
            "prompt": self.prompt,
        }


def clarification_prompt(graph: AmrGraph, node: str) -> str:
    """Ask for the end state the content at ``node`` is missing."""
    concept = default_lexicon().by_roleset(graph.instances[node])
    if concept is None:
        try:
            concept = default_lexicon().normalize_action(graph.instances[node])
        except DialogueAmrError:
            concept = None
    template = CLARIFY_TEMPLATES.get(concept.name if concept else "", FALLBACK_TEMPLATE)
    direction = ""
    for t in graph.targets(node, "direction"):
        direction = " " + (str(t) if isinstance(t, Constant) else graph.instances[t])
        break
    return template.format(direction=direction)


def _completable(graph: AmrGraph, node: str) -> str | None:
    for t in graph.targets(node, "completable"):
        if isinstance(t, Constant):
            return t.value
    return None


def decide(
    index: IntentIndex,
    utterance: str,
    dialogue_amr: Union[DialogueAmr, AmrGraph, None] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> PolicyDecision:
    """Pick a response.

    A supplied Dialogue-AMR gates the retrieval: several joined actions or
    ``:completable -`` content lead to a clarification question.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    ranking = index.classify(utterance, k=1)
    top, score = ranking[0] if ranking else (None, 0.0)

    if dialogue_amr is not None:
        graph = dialogue_amr.graph if isinstance(dialogue_amr, DialogueAmr) else dialogue_amr
        node = content_node(graph)
        if graph.instances[node] == "and":
            return PolicyDecision("clarify", score, top and top.instruction, prompt=MULTI_ACTION_PROMPT)
        if _completable(graph, node) == "-":
            return PolicyDecision("clarify", score, top and top.instruction,
                                  prompt=clarification_prompt(graph, node))

    if top is not None and score >= threshold:
        return PolicyDecision("actionable", score, top.instruction, top.feedback, top.translation)
    return PolicyDecision("no-match", score, top and top.instruction, prompt=GENERIC_PROMPT)


# --------------------------------------------------------------------------
# training files


def parse_pairs(text: str) -> list[ResponsePair]:
    """Pairs TSV: instruction, ``|``-separated feedback, ``|``-separated translations."""
    out = []
    for n, row in enumerate(csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE), 1):
        if not row or not any(c.strip() for c in row) or row[0].startswith("#"):
            continue
        if n == 1 and row[0].strip().lower() == "instruction":
            continue
        row = row + [""] * (3 - len(row))
        split = lambda cell: tuple(x.strip() for x in cell.split("|") if x.strip())
        out.append(ResponsePair(row[0].strip(), split(row[1]), split(row[2])))
    return out


def pairs_from_transcript(text: str) -> list[ResponsePair]:
    t = parse_transcript(text, strict=False)
    return [
        ResponsePair(p.instruction, p.responses, p.translations)
        for p in extract_instruction_response_pairs(t)
        if p.responses or p.translations
    ]


def load_training(path: str | Path) -> list[ResponsePair]:
    """Read either a transcript TSV or a pairs TSV."""
    text = Path(path).read_text(encoding="utf-8")
    first = text.split("\n", 1)[0].split("\t")
    if [c.strip() for c in first] == TRANSCRIPT_HEADER:
        return pairs_from_transcript(text)
    return parse_pairs(text)
