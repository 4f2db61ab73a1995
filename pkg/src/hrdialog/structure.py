"""Multi-floor transcripts with transaction-unit (TU) annotations.

Four message streams share two floors: the commander talks to the dialogue
manager on the left floor (CMD, DM-CMD) and the dialogue manager talks to
the robot navigator on the right floor (DM-RN, RN).  Each utterance may
carry a TU id, an antecedent (``k`` or ``k*``) and a relation label.
"""
from __future__ import annotations

import csv
import io
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

HEADER = ["id", "timestamp", "stream", "text", "tu", "antecedent", "relation"]

STREAMS = ("CMD", "DM-CMD", "DM-RN", "RN")
FLOOR = {"CMD": "left", "DM-CMD": "left", "DM-RN": "right", "RN": "right"}
_STREAM_ALIASES = {
    "cmd": "CMD", "dm-cmd": "DM-CMD", "dm->cmd": "DM-CMD", "dm→cmd": "DM-CMD",
    "dm-rn": "DM-RN", "dm->rn": "DM-RN", "dm→rn": "DM-RN", "rn": "RN",
}

_EXPANSION = ("continue", "correction", "link-next", "summarization")
_TRANSLATION = (
    "translation-l", "translation-r-direct", "translation-r-contextual",
    "translation-r-landmark", "translation-r-situated", "translation-r-history",
    "translation-r-default", "translation-l-partial", "translation-r-partial",
    "quotation", "comment",
)
_RESPONSE = (
    "processing", "ack-underspecified", "ack-understand", "ack-unsure", "ack-try",
    "ack-wilco", "ack-will-do-prep", "ack-doing", "ack-doing-prep", "ack-done",
    "ack-cant", "ack-partial", "clar-request", "clar-repair", "clar-repeat",
    "clar-done-status", "req-repeat", "req-done-status", "answer",
    "non-answer-response", "offer", "offer-accept", "offer-reject", "reciprocal",
    "third-turn-feedback", "other-response",
)
RELATIONS: dict[str, str] = {
    **{c: "expansion" for c in _EXPANSION},
    **{c: "translation" for c in _TRANSLATION},
    **{c: "response" for c in _RESPONSE},
}
# codes used in annotated data but absent from the taxonomy table
NONSTANDARD = frozenset({"offer"})

RELATION_ALIASES = {
    "req-clar": "clar-request",
    "translation-left": "translation-l",
    "translation-right": "translation-r-default",
    "partial-translation-left": "translation-l-partial",
    "partial-translation-right": "translation-r-partial",
    "translation-left-partial": "translation-l-partial",
    "translation-right-partial": "translation-r-partial",
    "acknowledge-will-comply": "ack-wilco",
    "ack-will-comply": "ack-wilco",
    "ack-can't": "ack-cant",
    "acknowledge-can't": "ack-cant",
    "partial-acknowledgment": "ack-partial",
    "partial-acknowledgement": "ack-partial",
    "clarification-request": "clar-request",
    "clarification-repair": "clar-repair",
    "clarification-repeat": "clar-repeat",
    "clarification-done-status": "clar-done-status",
    "request-repeat": "req-repeat",
    "request-done-status": "req-done-status",
    "question-response-answer": "answer",
    "question-response-non-answer-response": "non-answer-response",
    "non-answer": "non-answer-response",
    "reciprocal-response": "reciprocal",
}
for _sub in ("direct", "contextual", "landmark", "situated", "history", "default"):
    RELATION_ALIASES[f"translation-right-{_sub}"] = f"translation-r-{_sub}"
for _sub in ("underspecified", "understand", "unsure", "try", "will-do-prep", "doing",
             "doing-prep", "done"):
    RELATION_ALIASES[f"acknowledge-{_sub}"] = f"ack-{_sub}"


def normalize_relation(label: str) -> str:
    key = re.sub(r"[\s_]+", "-", label.strip().lower())
    return RELATION_ALIASES.get(key, key)


def relation_family(label: str) -> str | None:
    return RELATIONS.get(normalize_relation(label))


class StructureError(ValueError):
    code = "StructureError"

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        where = f"line {row}: " if row is not None else ""
        super().__init__(where + message)


class BadHeader(StructureError):
    code = "BadHeader"


class BadRow(StructureError):
    code = "BadRow"


class BadStream(StructureError):
    code = "BadStream"


class NonMonotonicId(StructureError):
    code = "NonMonotonicId"


class BadAntecedentSyntax(StructureError):
    code = "BadAntecedentSyntax"


class UnknownRelation(StructureError):
    code = "UnknownRelation"


class InvalidTU(StructureError):
    code = "InvalidTU"


@dataclass(frozen=True)
class AntecedentRef:
    target: int
    sequence: bool = False

    def __str__(self):
        return f"{self.target}{'*' if self.sequence else ''}"

    @classmethod
    def parse(cls, text: str) -> "AntecedentRef":
        m = re.fullmatch(r"\s*(\d+)(\*?)\s*", text)
        if not m:
            raise ValueError(f"bad antecedent {text!r}")
        return cls(int(m.group(1)), bool(m.group(2)))


@dataclass(frozen=True)
class Utterance:
    id: int
    stream: str
    text: str
    timestamp: Optional[float] = None
    tu: Optional[int] = None
    antecedent: Optional[AntecedentRef] = None
    relation: Optional[str] = None
    line: Optional[int] = None

    @property
    def floor(self) -> str:
        return FLOOR[self.stream]


@dataclass(frozen=True)
class Transcript:
    utterances: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        object.__setattr__(self, "_by_id", {u.id: u for u in self.utterances})

    def __len__(self):
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def get(self, uid: int) -> Utterance | None:
        return self._by_id.get(uid)

    def tus(self) -> dict[int, list[Utterance]]:
        """Members of each positively numbered TU, in id order."""
        out: dict[int, list[Utterance]] = defaultdict(list)
        for u in self.utterances:
            if u.tu is not None and u.tu > 0:
                out[u.tu].append(u)
        return dict(out)

    def coverage(self) -> float:
        if not self.utterances:
            return 1.0
        return sum(u.tu is not None for u in self.utterances) / len(self.utterances)


def _opt_int(cell: str, what: str, line: int) -> int | None:
    cell = cell.strip()
    if not cell:
        return None
    try:
        return int(cell)
    except ValueError:
        raise BadRow(f"{what} {cell!r} is not an integer", line) from None


def parse_transcript(text: str, strict: bool = True) -> Transcript:
    """Parse transcript TSV.

    With ``strict=False`` unknown relation labels are kept verbatim so that
    validation can report them.
    """
    reader = csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE)
    rows = list(reader)
    if not rows or [c.strip() for c in rows[0]] != HEADER:
        raise BadHeader("header must be: " + "\t".join(HEADER), 1)
    out = []
    last = 0
    for line, row in enumerate(rows[1:], start=2):
        if not any(c.strip() for c in row):
            continue
        # editors often drop trailing empty cells; id..text must be present
        if 4 <= len(row) < len(HEADER):
            row = row + [""] * (len(HEADER) - len(row))
        if len(row) != len(HEADER):
            raise BadRow(f"expected {len(HEADER)} columns, found {len(row)}", line)
        sid, ts, stream, utext, tu, ant, rel = row
        uid = _opt_int(sid, "id", line)
        if uid is None or uid <= 0:
            raise BadRow("id must be a positive integer", line)
        if uid <= last:
            raise NonMonotonicId(f"id {uid} does not follow {last}", line)
        last = uid
        canon = _STREAM_ALIASES.get(stream.strip().lower())
        if canon is None:
            raise BadStream(f"unknown stream {stream!r}", line)
        if not utext.strip():
            raise BadRow("empty text", line)
        try:
            timestamp = float(ts) if ts.strip() else None
        except ValueError:
            raise BadRow(f"timestamp {ts!r} is not a number", line) from None
        antecedent = None
        if ant.strip():
            try:
                antecedent = AntecedentRef.parse(ant)
            except ValueError as e:
                raise BadAntecedentSyntax(str(e), line) from None
        relation = normalize_relation(rel) if rel.strip() else None
        if (antecedent is None) != (relation is None):
            raise BadAntecedentSyntax("antecedent and relation must be given together", line)
        if relation is not None and relation not in RELATIONS and strict:
            raise UnknownRelation(f"unknown relation {rel.strip()!r}", line)
        out.append(Utterance(uid, canon, utext.strip(), timestamp,
                             _opt_int(tu, "tu", line), antecedent, relation, line))
    return Transcript(tuple(out))


def load_transcript(path: str | Path, strict: bool = True) -> Transcript:
    return parse_transcript(Path(path).read_text(encoding="utf-8"), strict=strict)


def dump_transcript(t: Transcript) -> str:
    lines = ["\t".join(HEADER)]
    for u in t:
        lines.append("\t".join([
            str(u.id),
            "" if u.timestamp is None else f"{u.timestamp:g}",
            u.stream,
            u.text,
            "" if u.tu is None else str(u.tu),
            "" if u.antecedent is None else str(u.antecedent),
            u.relation or "",
        ]))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    rule: str
    row: int
    message: str

    def as_dict(self) -> dict:
        return {"rule": self.rule, "row": self.row, "message": self.message}


def _floors(t: Transcript, u: Utterance) -> set[str]:
    """Floors an antecedent speaks for.

    A DM utterance that is itself anchored on the other floor relays that
    floor's content, so it counts for both.
    """
    floors = {u.floor}
    if u.stream.startswith("DM-") and u.antecedent is not None:
        prev = t.get(u.antecedent.target)
        if prev is not None and prev.floor != u.floor:
            floors.add(prev.floor)
    return floors


def _check_family(t: Transcript, u: Utterance, a: Utterance) -> str | None:
    family = RELATIONS.get(u.relation)
    if family == "expansion":
        if a.stream != u.stream:
            return f"expansion {u.relation} links {u.stream} to {a.stream}; needs the same stream"
    elif family == "response":
        if a.stream == u.stream:
            return f"response {u.relation} must answer a different stream"
        if u.floor not in _floors(t, a):
            return f"response {u.relation} crosses floors ({u.stream} to {a.stream})"
    elif family == "translation":
        other = "right" if u.floor == "left" else "left"
        if other not in _floors(t, a):
            return f"translation {u.relation} must point to the other floor"
        if u.relation.startswith("translation-r") and u.stream != "DM-RN":
            return f"{u.relation} must be emitted on DM-RN"
        if u.relation.startswith("translation-l") and u.stream != "DM-CMD":
            return f"{u.relation} must be emitted on DM-CMD"
        if u.relation in ("quotation", "comment") and not u.stream.startswith("DM-"):
            return f"{u.relation} must be emitted by the dialogue manager"
    return None


def _ends_run(t: Transcript, k: Utterance) -> bool:
    members = [u for u in t if u.tu == k.tu and u.id > k.id]
    return not members or members[0].stream != k.stream


def validate_structure(t: Transcript) -> list[Violation]:
    """Run checks V1 to V8; an empty list means the annotation is well formed.

    V1 antecedent precedes; V2 same TU; V3 TU-first has no link; V4 other
    members have one; V5 relation family fits the streams and floors; V6 a
    ``k*`` antecedent ends a same-stream run; V7 TU ids positive; V8 known
    relation labels.
    """
    out: list[Violation] = []
    first = {tu: members[0].id for tu, members in t.tus().items()}
    for u in t:
        if u.tu is not None and u.tu <= 0:
            out.append(Violation("V7", u.id, f"TU id {u.tu} is not positive"))
        if u.relation is not None and u.relation not in RELATIONS:
            out.append(Violation("V8", u.id, f"relation {u.relation!r} is not in the taxonomy"))
        in_tu = u.tu is not None and u.tu > 0
        is_first = in_tu and first[u.tu] == u.id
        if u.antecedent is None:
            if in_tu and not is_first:
                out.append(Violation("V4", u.id, f"member of TU {u.tu} lacks antecedent and relation"))
            continue
        a = t.get(u.antecedent.target)
        if a is None or a.id >= u.id:
            out.append(Violation("V1", u.id, f"antecedent {u.antecedent} does not precede {u.id}"))
            continue
        if is_first:
            out.append(Violation("V3", u.id, f"first utterance of TU {u.tu} has an antecedent"))
            continue
        if in_tu and a.tu != u.tu:
            out.append(Violation("V2", u.id, f"antecedent {a.id} is in TU {a.tu}, not {u.tu}"))
            continue
        if u.antecedent.sequence and not _ends_run(t, a):
            out.append(Violation("V6", u.id, f"{u.antecedent} does not end a same-stream run"))
        msg = _check_family(t, u, a)
        if msg:
            out.append(Violation("V5", u.id, msg))
    return out


# --------------------------------------------------------------------------
# TU views


@dataclass(frozen=True)
class TuTree:
    root: int
    parent: dict
    children: dict

    __hash__ = None  # type: ignore[assignment]

    def __len__(self):
        return 1 + len(self.parent)

    def as_dict(self) -> dict:
        def node(i):
            return {"id": i, "children": [node(c) for c in self.children.get(i, [])]}
        return node(self.root)


def tu_tree(t: Transcript, tu: int) -> TuTree:
    members = t.tus().get(tu)
    if not members:
        raise InvalidTU(f"TU {tu} has no members")
    ids = {u.id for u in members}
    bad = [v for v in validate_structure(t) if v.row in ids]
    if bad:
        raise InvalidTU(f"TU {tu} fails {bad[0].rule}: {bad[0].message}")
    root = members[0].id
    parent = {u.id: u.antecedent.target for u in members[1:]}
    children: dict[int, list[int]] = defaultdict(list)
    for child, par in parent.items():
        children[par].append(child)
    return TuTree(root, parent, dict(children))


def interleaving_spans(t: Transcript) -> list[tuple[tuple[int, int], frozenset]]:
    """Maximal id spans where two or more TUs are open at once.

    A TU is open from its first to its last annotated member.
    """
    bounds = {tu: (m[0].id, m[-1].id) for tu, m in t.tus().items()}
    spans: list[tuple[tuple[int, int], frozenset]] = []
    cur_start = cur_end = None
    cur_set: frozenset = frozenset()
    for u in t:
        active = frozenset(tu for tu, (lo, hi) in bounds.items() if lo <= u.id <= hi)
        if len(active) >= 2 and active == cur_set:
            cur_end = u.id
            continue
        if cur_start is not None:
            spans.append(((cur_start, cur_end), cur_set))
        if len(active) >= 2:
            cur_start, cur_end, cur_set = u.id, u.id, active
        else:
            cur_start, cur_end, cur_set = None, None, frozenset()
    if cur_start is not None:
        spans.append(((cur_start, cur_end), cur_set))
    return spans


@dataclass(frozen=True)
class InstructionPair:
    tu: int
    instruction: str
    responses: tuple
    translations: tuple

    def as_tuple(self):
        return (self.instruction, list(self.responses), list(self.translations))


def extract_instruction_response_pairs(t: Transcript) -> list[InstructionPair]:
    """One pair per commander-initiated TU.

    The instruction joins the root with CMD utterances chained to it by
    ``continue``; responses and translations are the DM-CMD and DM-RN
    members whose antecedent chain reaches the root.
    """
    pairs = []
    for tu, members in sorted(t.tus().items()):
        root = members[0]
        if root.stream != "CMD":
            continue
        chain = {root.id}
        parts = [root.text]
        reaches = {root.id}
        responses, translations = [], []
        for u in members[1:]:
            if u.antecedent is None or u.antecedent.target not in reaches:
                continue
            reaches.add(u.id)
            if u.stream == "CMD" and u.relation == "continue" and u.antecedent.target in chain:
                chain.add(u.id)
                parts.append(u.text)
            elif u.stream == "DM-CMD":
                responses.append(u.text)
            elif u.stream == "DM-RN":
                translations.append(u.text)
        pairs.append(InstructionPair(tu, " ".join(parts), tuple(responses), tuple(translations)))
    return pairs
