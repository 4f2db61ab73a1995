"""Visual context: exploration-map inventories and photo-request strategies."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .structure import FLOOR, Transcript

STATUSES = ("scanned", "not-scanned")
CATEGORIES = ("door", "shoe", "shovel", "other")

_PREFIX_CATEGORY = {
    "door": "door", "doorway": "door",
    "shoe": "shoe", "shoes": "shoe",
    "shov": "shovel", "shovel": "shovel",
    "cone": "other",
}


class MapFormatError(ValueError):
    code = "MapFormatError"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class BadStatus(MapFormatError):
    code = "BadStatus"


class DuplicateId(MapFormatError):
    code = "DuplicateId"


class BadLine(MapFormatError):
    code = "BadLine"


class EmptyCategory(ValueError):
    code = "EmptyCategory"


@dataclass(frozen=True)
class MapItem:
    id: str
    category: str
    status: str

    @property
    def scanned(self) -> bool:
        return self.status == "scanned"


@dataclass(frozen=True)
class ExplorationMap:
    items: tuple = ()
    warnings: tuple = ()

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def with_status(self, item_id: str, status: str) -> "ExplorationMap":
        if status not in STATUSES:
            raise BadStatus(f"unknown status {status!r}")
        items = tuple(MapItem(i.id, i.category, status) if i.id == item_id else i for i in self.items)
        return ExplorationMap(items, self.warnings)


def category_of(item_id: str) -> tuple[str, bool]:
    """Category from the id prefix, and whether the prefix was recognized."""
    m = re.match(r"[a-z]+", item_id.lower())
    prefix = m.group() if m else ""
    if prefix in _PREFIX_CATEGORY:
        return _PREFIX_CATEGORY[prefix], True
    return "other", False


def parse_exploration_list(text: str) -> ExplorationMap:
    items = []
    warnings = []
    seen = set()
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BadLine(f"expected '<id> <status>', got {raw.strip()!r}", n)
        item_id, status = parts
        if status not in STATUSES:
            raise BadStatus(f"status {status!r} is not scanned or not-scanned", n)
        if item_id in seen:
            raise DuplicateId(f"item {item_id!r} listed twice", n)
        seen.add(item_id)
        cat, known = category_of(item_id)
        if not known:
            warnings.append(f"line {n}: unknown prefix in {item_id!r}, filed as other")
        items.append(MapItem(item_id, cat, status))
    return ExplorationMap(tuple(items), tuple(warnings))


def load_exploration_list(path: str | Path) -> ExplorationMap:
    return parse_exploration_list(Path(path).read_text(encoding="utf-8"))


def coverage(m: ExplorationMap, category: Optional[str] = None) -> Fraction:
    """Scanned share of all items, or of one category."""
    pool = [i for i in m if category is None or i.category == category]
    if not pool:
        raise EmptyCategory(f"no items in category {category or 'any'!r}")
    return Fraction(sum(i.scanned for i in pool), len(pool))


# --------------------------------------------------------------------------
# number words

_UNITS = {w: i for i, w in enumerate(
    "zero one two three four five six seven eight nine ten eleven twelve thirteen "
    "fourteen fifteen sixteen seventeen eighteen nineteen".split())}
_TENS = {w: 10 * i for i, w in enumerate(
    "_ _ twenty thirty forty fifty sixty seventy eighty ninety".split()) if w != "_"}


def normalize_numbers(tokens: list[str]) -> list[str]:
    """Replace spelled-out numbers (up to a few hundred) by digits."""
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if tokens[i] not in _UNITS and tokens[i] not in _TENS:
            out.append(tokens[i])
            i += 1
            continue
        value = 0
        j = i
        while j < len(tokens):
            tok = tokens[j]
            if tok in _TENS and value % 100 == 0:
                value += _TENS[tok]
            elif tok in _UNITS and value % 10 == 0 and (_UNITS[tok] < 10 or value % 100 == 0):
                if value and _UNITS[tok] == 0:
                    break
                value += _UNITS[tok]
            elif tok == "hundred" and j > i and 0 < value < 10:
                value *= 100
            elif (tok == "and" and value >= 100 and value % 100 == 0 and j + 1 < len(tokens)
                  and (tokens[j + 1] in _UNITS or tokens[j + 1] in _TENS)):
                pass
            else:
                break
            j += 1
        out.append(str(value))
        i = j
    return out


def tokenize(text: str) -> list[str]:
    text = text.lower().replace("'", "")
    return normalize_numbers(re.findall(r"[a-z0-9]+", text))


# --------------------------------------------------------------------------
# photo strategies

PHOTO_WORDS = frozenset({"photo", "photos", "picture", "pictures", "image", "images",
                         "pic", "pics", "snapshot", "snapshots"})
ROTATION_WORDS = frozenset({"pivot", "pivoting", "rotate", "rotating", "turn", "turning",
                            "spin", "spinning"})
CARDINALS = frozenset({"north", "south", "east", "west"})
NEGATORS = frozenset({"not", "dont", "never", "stop", "no"})

STRATEGIES = ("front", "cardinal", "degrees-of-rotation", "repetition", "none")


def classify_photo_strategy(text: str) -> str:
    """Keyword rules, checked in order: negation, repetition, degrees of
    rotation, cardinal, front."""
    toks = tokenize(text)
    photo_at = [i for i, t in enumerate(toks) if t in PHOTO_WORDS]
    if not photo_at:
        return "none"
    if any(t in NEGATORS for t in toks[: photo_at[0]]):
        return "none"
    joined = " ".join(toks)
    if re.search(r"\b(after|following) (each|every)\b|\b(each|every) time\b", joined):
        return "repetition"
    if ROTATION_WORDS & set(toks) and re.search(r"\bevery \d+ degrees?\b", joined):
        return "degrees-of-rotation"
    if len(CARDINALS & set(toks)) >= 2 or re.search(r"\b(4|cardinal) directions?\b", joined):
        return "cardinal"
    return "front"


# --------------------------------------------------------------------------
# photo events

_EVENT_WORDS = frozenset({"photo", "photos", "image", "images", "picture", "pictures", "sent"})


@dataclass(frozen=True)
class PhotoTrace:
    event: int
    initiating: Optional[int]
    initiator: str  # CMD, DM or unknown

    def as_dict(self) -> dict:
        return {"event": self.event, "initiating": self.initiating, "initiator": self.initiator}


def _initiator(stream: str) -> str:
    if stream == "CMD":
        return "CMD"
    if stream.startswith("DM-"):
        return "DM"
    return "unknown"


def trace_photo_requests(t: Transcript) -> list[PhotoTrace]:
    """Trace each right-floor photo event back to the request behind it.

    The antecedent chain is walked towards the TU root; the first
    left-floor utterance that mentions a photo is the request.  Without
    one, the TU root stands in.
    """
    out = []
    for u in t:
        if u.stream not in ("RN", "DM-RN") or not _EVENT_WORDS & set(tokenize(u.text)):
            continue
        if u.tu is None:
            out.append(PhotoTrace(u.id, None, "unknown"))
            continue
        cur = u
        found = None
        seen = set()
        while True:
            if FLOOR[cur.stream] == "left" and PHOTO_WORDS & set(tokenize(cur.text)):
                found = cur
                break
            if cur.antecedent is None or cur.id in seen:
                break
            seen.add(cur.id)
            nxt = t.get(cur.antecedent.target)
            if nxt is None:
                break
            cur = nxt
        if found is None:
            found = cur if cur.antecedent is None else None
        if found is None:
            out.append(PhotoTrace(u.id, None, "unknown"))
        else:
            out.append(PhotoTrace(u.id, found.id, _initiator(found.stream)))
    return out
