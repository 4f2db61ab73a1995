"""Speech-act registry and the robot behaviour lexicon."""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import NoConceptMapping

FAMILIES = ("information-transfer", "action-discussion", "expressive")


@dataclass(frozen=True)
class SpeechAct:
    label: str
    family: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown speech-act family {self.family!r}")


class SpeechActRegistry:
    """Labels are unique; extra stems (``assert``) may alias a label."""

    def __init__(self):
        self._acts: dict[str, SpeechAct] = {}
        self._aliases: dict[str, str] = {}

    def register(self, label: str, family: str, aliases: Iterable[str] = ()) -> SpeechAct:
        label = label.lower()
        if label in self._acts or label in self._aliases:
            raise ValueError(f"speech act {label!r} already registered")
        act = SpeechAct(label, family)
        self._acts[label] = act
        for a in aliases:
            self._aliases[a.lower()] = label
        return act

    def get(self, stem: str) -> SpeechAct | None:
        stem = stem.lower()
        stem = self._aliases.get(stem, stem)
        return self._acts.get(stem)

    def __getitem__(self, stem: str) -> SpeechAct:
        act = self.get(stem)
        if act is None:
            raise KeyError(stem)
        return act

    def __contains__(self, stem: str) -> bool:
        return self.get(stem) is not None

    def __iter__(self):
        return iter(self._acts.values())

    @property
    def labels(self) -> list[str]:
        return list(self._acts)


def default_registry() -> SpeechActRegistry:
    reg = SpeechActRegistry()
    reg.register("question", "information-transfer")
    reg.register("assertion", "information-transfer", aliases=("assert",))
    for label in ("command", "request", "offer", "promise"):
        reg.register(label, "action-discussion")
    reg.register("open-option", "action-discussion", aliases=("open_option", "openoption"))
    reg.register("regret", "expressive")
    return reg


SPEECH_ACTS = default_registry()

_SENSE = re.compile(r"-\d+$")
_SEND_IMAGE = re.compile(r"^send-image-\d+$")


@dataclass(frozen=True)
class RobotConcept:
    name: str
    roleset: str
    compatible_acts: frozenset
    trigger_lemmas: frozenset = field(default_factory=frozenset)
    aliases: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.compatible_acts:
            raise ValueError(f"{self.name}: compatible_acts must not be empty")

    def accepts(self, act: SpeechAct | str) -> bool:
        label = act.label if isinstance(act, SpeechAct) else act
        return label in self.compatible_acts


class Lexicon:
    def __init__(self, concepts: Iterable[RobotConcept], registry: SpeechActRegistry = SPEECH_ACTS):
        self.registry = registry
        self.concepts: list[RobotConcept] = []
        self._by_roleset: dict[str, RobotConcept] = {}
        self._by_lemma: dict[str, RobotConcept] = {}
        self._by_name: dict[str, RobotConcept] = {}
        for c in concepts:
            self.add(c)

    def add(self, concept: RobotConcept) -> None:
        for act in concept.compatible_acts:
            if act not in self.registry:
                raise ValueError(f"{concept.name}: unknown speech act {act!r}")
        for label in (concept.roleset, *concept.aliases):
            if label in self._by_roleset:
                raise ValueError(f"roleset {label!r} registered twice")
        for lemma in concept.trigger_lemmas:
            if lemma in self._by_lemma:
                other = self._by_lemma[lemma].name
                raise ValueError(f"trigger {lemma!r} maps to both {other} and {concept.name}")
        self.concepts.append(concept)
        self._by_name[concept.name] = concept
        self._by_roleset[concept.roleset] = concept
        for a in concept.aliases:
            self._by_roleset[a] = concept
        for lemma in concept.trigger_lemmas:
            self._by_lemma[lemma] = concept

    def __getitem__(self, name: str) -> RobotConcept:
        return self._by_name[name]

    def __iter__(self):
        return iter(self.concepts)

    def __len__(self):
        return len(self.concepts)

    def by_roleset(self, label: str) -> RobotConcept | None:
        """Exact roleset or alias lookup; any send-image-NN counts as SEND-IMAGE."""
        label = label.lower()
        hit = self._by_roleset.get(label)
        if hit is None and _SEND_IMAGE.match(label):
            hit = next((c for c in self.concepts if _SEND_IMAGE.match(c.roleset)), None)
        return hit

    def normalize_action(self, label: str) -> RobotConcept:
        hit = self.by_roleset(label)
        if hit is not None:
            return hit
        lemma = _SENSE.sub("", label.lower())
        hit = self._by_lemma.get(lemma)
        if hit is None:
            raise NoConceptMapping(label)
        return hit

    def pairs(self) -> list[tuple[str, str]]:
        """All compatible (act label, concept name) pairs."""
        return [(a, c.name) for c in self.concepts for a in sorted(c.compatible_acts)]


def _split(cell: str | None) -> frozenset:
    if not cell:
        return frozenset()
    return frozenset(x.strip().lower() for x in cell.split(",") if x.strip())


def load_lexicon(path: str | Path | None = None, registry: SpeechActRegistry = SPEECH_ACTS) -> Lexicon:
    """Read a lexicon table; the packaged one when ``path`` is None."""
    if path is None:
        text = resources.files("hrdialog.damr").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    rows = csv.DictReader(lines, delimiter="\t")
    missing = {"name", "roleset", "acts"} - set(rows.fieldnames or ())
    if missing:
        raise ValueError(f"lexicon header lacks {sorted(missing)}")
    concepts = []
    for row in rows:
        acts = frozenset(registry[a].label for a in _split(row["acts"]))
        concepts.append(
            RobotConcept(
                name=row["name"].strip(),
                roleset=row["roleset"].strip().lower(),
                compatible_acts=acts,
                trigger_lemmas=_split(row.get("triggers")),
                aliases=_split(row.get("aliases")),
            )
        )
    return Lexicon(concepts, registry)


_DEFAULT: Lexicon | None = None


def default_lexicon() -> Lexicon:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_lexicon()
    return _DEFAULT


def normalize_action(label: str, lexicon: Lexicon | None = None) -> RobotConcept:
    return (lexicon or default_lexicon()).normalize_action(label)
