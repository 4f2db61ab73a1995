"""Acceptance criteria 1-9.

Each ``criterion_N`` returns ``(passed, detail)``.  Under pytest every
criterion is one test marked ``acceptance(N)``; the terminal summary prints an
``ACCEPTANCE Cn PASS/FAIL`` line per criterion.  Run this file directly
(``python3 tests/test_acceptance.py``) to get the same lines without pytest.
"""
from __future__ import annotations

import csv
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import coincidence_alpha, fixture, random_graph  # noqa: E402
from hrdialog.agreement import AgreementMatrix, krippendorff_alpha, masi_distance  # noqa: E402
from hrdialog.amr import parse_penman, read_amr_file  # noqa: E402
from hrdialog.damr import (  # noqa: E402
    SPEECH_ACTS,
    IncompatibleActConcept,
    annotate_tense_aspect,
    convert_to_dialogue_amr,
    decode_tense_aspect,
    default_lexicon,
    validate_dialogue_amr,
)
from hrdialog.policy import build_index, decide, pairs_from_transcript  # noqa: E402
from hrdialog.smatch import smatch_exact, smatch_hillclimb  # noqa: E402
from hrdialog.structure import load_transcript, validate_structure  # noqa: E402
from hrdialog.visual import classify_photo_strategy  # noqa: E402

# compatible speech acts per robot concept, typed in from the published table
TABLE = {
    "ABILITY": "question assertion",
    "SCENE": "question assertion",
    "ENVIRONMENT": "question assertion",
    "READINESS": "question assertion",
    "FAMILIARITY": "assertion open-option",
    "EQUIPMENT": "question assertion",
    "MEMORY": "question assertion",
    "PROCESSING": "assertion",
    "TASK": "assertion command",
    "SEND-IMAGE": "assertion offer command open-option promise",
    "MOVEMENT": "assertion offer command open-option promise",
    "ROTATION": "assertion command open-option promise",
    "REPEAT": "offer command request",
    "CANCEL": "command",
    "DO": "question assertion",
    "CLARIFY": "assertion request",
    "STOP": "command",
    "HELP": "command request open-option",
    "LOCATE": "assertion command",
    "CALIBRATE": "assertion command",
    "INSTRUCT": "request",
    "WAIT": "command request",
    "PERMISSION": "request",
    "UNDERSTANDING": "question assertion",
}
TABLE_ACTS = ("question", "assertion", "command", "request", "offer", "open-option", "promise")


def _first(*parts):
    return read_amr_file(fixture(*parts))[0].graph


def _envelope(act: str, roleset: str):
    return parse_penman(f"(x / {act}-SA :ARG0 (s / commander) :ARG2 (r / robot) "
                        f":ARG1 (e / {roleset} :ARG0 r :time (t / after :op1 (n / now))))")


def criterion_1():
    start = time.perf_counter()
    scores = {}
    for stem in ("drive", "wall"):
        d = convert_to_dialogue_amr(_first("amr", f"{stem}_standard.amr"))
        scores[stem] = smatch_exact(d.graph, _first("amr", f"{stem}_dialogue.amr")).f1
    elapsed = time.perf_counter() - start
    ok = all(f == 1 for f in scores.values()) and elapsed < 1.0
    return ok, f"f1 drive={float(scores['drive'])} wall={float(scores['wall'])}, {elapsed:.3f}s"


def criterion_2():
    plain = _first("amr", "move_forward.amr")
    want = {
        "future": ("after-now", {"completable": "+"}),
        "present": ("now", {"ongoing": "+", "complete": "-"}),
        "past": ("before-now", {"ongoing": "-", "complete": "+"}),
    }
    gold = {e.id: e.graph for e in read_amr_file(fixture("amr", "move_forward_tensed.amr"))}
    bad = []
    for tense, (time_, flags) in want.items():
        g = annotate_tense_aspect(plain, SPEECH_ACTS["assertion"], tense)
        ta, problems = decode_tense_aspect(g, g.root)
        if problems or ta.time != time_ or ta.flags != flags or smatch_exact(g, gold[tense]).f1 != 1:
            bad.append(tense)
    return not bad, "all three variants match" if not bad else f"mismatch: {bad}"


def criterion_3():
    lex = default_lexicon()
    accepted = rejected = 0
    failures = []
    for name, acts in TABLE.items():
        roleset = lex[name].roleset
        for act in TABLE_ACTS:
            g = _envelope(act, roleset)
            if act in acts.split():
                try:
                    validate_dialogue_amr(g)
                    accepted += 1
                except Exception as e:  # any failure is a miss
                    failures.append(f"{act}x{name}: {type(e).__name__}")
            else:
                try:
                    validate_dialogue_amr(g)
                    failures.append(f"{act}x{name} accepted")
                except IncompatibleActConcept:
                    rejected += 1
    total = sum(len(a.split()) for a in TABLE.values())
    ok = not failures and accepted == total and rejected >= 10
    return ok, f"{accepted}/{total} compatible pairs validate, {rejected} incompatible rejected" + (
        f"; failures {failures[:3]}" if failures else "")


def criterion_4():
    tables = ["simple_tu.tsv", "complex_tu.tsv", "interleaved_tus.tsv", "excerpt2.tsv"]
    dirty = [t for t in tables if validate_structure(load_transcript(fixture("structure", t)))]
    wrong = []
    mutations = sorted(fixture("structure", "mutations").glob("*.tsv"))
    for p in mutations:
        rule = p.name.split("_")[0].upper()
        rules = [v.rule for v in validate_structure(load_transcript(p, strict=False))]
        if rules != [rule]:
            wrong.append((p.name, rules))
    covered = sorted(p.name.split("_")[0].upper() for p in mutations)
    ok = not dirty and not wrong and covered == [f"V{i}" for i in range(1, 9)]
    return ok, f"{len(tables) - len(dirty)}/4 tables clean, {len(mutations) - len(wrong)}/8 mutations exact" + (
        f"; {dirty} {wrong}" if dirty or wrong else "")


def criterion_5(pairs: int = 1000, restarts: int = 8):
    rng = random.Random(7)
    start = time.perf_counter()
    equal = exceeded = 0
    for k in range(pairs):
        a = random_graph(rng, max_vars=6)
        b = random_graph(rng, max_vars=6, prefix="y")
        ex = smatch_exact(a, b).f1
        hc = smatch_hillclimb(a, b, restarts=restarts, seed=k).f1
        equal += hc == ex
        exceeded += hc > ex
    elapsed = time.perf_counter() - start
    ok = equal >= 0.99 * pairs and exceeded == 0 and elapsed < 60
    return ok, f"{equal}/{pairs} equal, {exceeded} above exact, {elapsed:.1f}s"


def criterion_6(matrices: int = 500):
    rng = random.Random(11)
    worst = 0.0
    checked = 0
    while checked < matrices:
        coders = rng.randint(2, 4)
        units = rng.randint(2, 12)
        rows = {f"c{c}": {u: (None if rng.random() < 0.2 else rng.choice("abc")) for u in range(units)}
                for c in range(coders)}
        m = AgreementMatrix.from_rows(rows)
        pooled = {u: m.unit_values(u) for u in m.units if len(m.unit_values(u)) >= 2}
        if len({v for vs in pooled.values() for v in vs}) < 2:
            continue
        worst = max(worst, abs(float(krippendorff_alpha(m).alpha) - coincidence_alpha(pooled)))
        checked += 1
    masi_ok = (masi_distance({1, 2}, {1, 2}) == 0 and masi_distance({1}, {2}) == 1
               and masi_distance({1}, {1, 2}) == Fraction(2, 3))
    perfect = AgreementMatrix.from_rows({c: dict(enumerate("abcab")) for c in ("A", "B", "C")})
    perfect_ok = krippendorff_alpha(perfect).alpha == 1
    ok = worst < 1e-12 and masi_ok and perfect_ok
    return ok, f"max |alpha - oracle| = {worst:.2e} over {checked}, masi table {masi_ok}, perfect {perfect_ok}"


def criterion_7():
    with open(fixture("visual", "photo_strategies.tsv"), newline="") as f:
        rows = [(r["text"], r["strategy"]) for r in csv.DictReader(f, delimiter="\t")]
    quoted = [(t, s) for t, s in rows if s != "none"]
    misses = [t for t, s in quoted if classify_photo_strategy(t) != s]
    return not misses and len(quoted) == 10, f"{len(quoted) - len(misses)}/{len(quoted)} classified" + (
        f"; misses {misses}" if misses else "")


def criterion_8():
    text = fixture("structure", "simple_tu.tsv").read_text(encoding="utf-8")
    index = build_index(pairs_from_transcript(text))
    exact = decide(index, "move forward three feet")
    keep = decide(index, "keep moving forward", validate_dialogue_amr(_first("policy", "keep_moving.amr")))
    ok = (exact.kind == "actionable" and exact.score == 1.0
          and keep.kind == "clarify" and keep.prompt == "Where should I move forward to?")
    return ok, f"exact -> {exact.kind} {exact.score}; keep moving -> {keep.kind} {keep.prompt!r}"


NOT_REPRODUCIBLE = (
    "human IAA ranges and corpus-scale statistics need unpublished multi-coder data; "
    "covered instead by criteria 4-6"
)

CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def _check(n: int):
    ok, detail = CRITERIA[n]()
    print(f"C{n} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


@pytest.mark.acceptance(1)
def test_c1_golden_conversion():
    _check(1)


@pytest.mark.acceptance(2)
def test_c2_tense_aspect_triple():
    _check(2)


@pytest.mark.acceptance(3)
def test_c3_lexicon_compatibility():
    _check(3)


@pytest.mark.acceptance(4)
def test_c4_structure_fixtures():
    _check(4)


@pytest.mark.acceptance(5)
def test_c5_smatch_oracle_equivalence():
    _check(5)


@pytest.mark.acceptance(6)
def test_c6_agreement_formulas():
    _check(6)


@pytest.mark.acceptance(7)
def test_c7_photo_strategies():
    _check(7)


@pytest.mark.acceptance(8)
def test_c8_extraction_and_policy():
    _check(8)


@pytest.mark.acceptance(9)
def test_c9_not_reproducible():
    pytest.skip(NOT_REPRODUCIBLE)


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(f"C{n} {'PASS' if ok else 'FAIL'}: {detail}")
    print(f"C9 N/A: {NOT_REPRODUCIBLE}")
    sys.exit(1 if failed else 0)
