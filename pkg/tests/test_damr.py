from importlib import resources

import pytest

from helpers import fixture
from hrdialog.amr import parse_penman, read_amr_file, rename_variables
from hrdialog.damr import (
    SPEECH_ACTS,
    BadTenseAspect,
    ConflictingAspect,
    DialogueAmr,
    IncompatibleActConcept,
    MissingEnvelopeArg,
    NoConceptMapping,
    NotASpeechActRoot,
    UnknownRobotConcept,
    UnsupportedStructure,
    annotate_tense_aspect,
    content_node,
    convert_to_dialogue_amr,
    decode_tense_aspect,
    default_lexicon,
    diagnose_dialogue_amr,
    is_bounded,
    load_lexicon,
    normalize_action,
    validate_dialogue_amr,
)
from hrdialog.smatch import smatch_exact

# Compatible speech acts per robot concept, typed in from the published lexicon table.
APPENDIX = {
    "ABILITY": {"question", "assertion"},
    "SCENE": {"question", "assertion"},
    "ENVIRONMENT": {"question", "assertion"},
    "READINESS": {"question", "assertion"},
    "FAMILIARITY": {"assertion", "open-option"},
    "EQUIPMENT": {"question", "assertion"},
    "MEMORY": {"question", "assertion"},
    "PROCESSING": {"assertion"},
    "TASK": {"assertion", "command"},
    "SEND-IMAGE": {"assertion", "offer", "command", "open-option", "promise"},
    "MOVEMENT": {"assertion", "offer", "command", "open-option", "promise"},
    "ROTATION": {"assertion", "command", "open-option", "promise"},
    "REPEAT": {"offer", "command", "request"},
    "CANCEL": {"command"},
    "DO": {"question", "assertion"},
    "CLARIFY": {"assertion", "request"},
    "STOP": {"command"},
    "HELP": {"command", "request", "open-option"},
    "LOCATE": {"assertion", "command"},
    "CALIBRATE": {"assertion", "command"},
    "INSTRUCT": {"request"},
    "WAIT": {"command", "request"},
    "PERMISSION": {"request"},
    "UNDERSTANDING": {"question", "assertion"},
}
TABLE_ACTS = ("question", "assertion", "command", "request", "offer", "open-option", "promise")

FILLED = """
(c / command-SA :ARG0 (c2 / commander) :ARG2 (r / robot)
  :ARG1 (g / go-02 :completable +
          :ARG0 r
          :ARG3 (h / here)
          :ARG4 (d / door)
          :time (a2 / after :op1 (n / now))))
"""


def envelope(act: str, roleset: str) -> str:
    return (f"(x / {act}-SA :ARG0 (s / commander) :ARG2 (r / robot) "
            f":ARG1 (e / {roleset} :ARG0 r :time (t / after :op1 (n / now))))")


def first(*parts):
    return read_amr_file(fixture(*parts))[0].graph


def is_dialogue(g) -> bool:
    problems = diagnose_dialogue_amr(g)
    return not problems or problems[0].code != "NotASpeechActRoot"


def convert_entry(e):
    """Declaratives take their tense from ``# ::tense`` or from a tense-named id."""
    g = e.graph
    if g.targets(g.root, "mode"):
        return convert_to_dialogue_amr(g)
    tense = e.metadata.get("tense", e.id)
    return convert_to_dialogue_amr(g, speaker="robot", addressee="commander",
                                   act="assertion", surface_tense=tense)


def all_fixture_graphs():
    return [(p.name, e) for p in sorted(fixture("amr").glob("*.amr")) for e in read_amr_file(p)] + [
        (p.name, e) for p in sorted(fixture("policy").glob("*.amr")) for e in read_amr_file(p)
    ]


# --------------------------------------------------------------------------
# lexicon


def test_lexicon_matches_table():
    lex = default_lexicon()
    assert len(lex) == 24
    assert {c.name: set(c.compatible_acts) for c in lex} == APPENDIX
    assert len(lex.pairs()) == sum(len(v) for v in APPENDIX.values()) == 53


def test_lexicon_file_is_data(tmp_path):
    text = resources.files("hrdialog.damr").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    extra = text + "DANCE\tdance-01\tcommand\tdance\t\n"
    p = tmp_path / "lex.tsv"
    p.write_text(extra)
    lex = load_lexicon(p)
    assert len(lex) == 25 and lex.normalize_action("dance-01").name == "DANCE"


@pytest.mark.parametrize("label, name, roleset", [
    ("rotate-01", "ROTATION", "turn-01"),
    ("pivot-01", "ROTATION", "turn-01"),
    ("go-02", "MOVEMENT", "go-02"),
    ("go-01", "MOVEMENT", "go-02"),
    ("move-01", "MOVEMENT", "go-02"),
    ("send-image-42", "SEND-IMAGE", "send-image-99"),
])
def test_normalize_action(label, name, roleset):
    c = normalize_action(label)
    assert (c.name, c.roleset) == (name, roleset)


def test_normalize_action_unknown():
    with pytest.raises(NoConceptMapping):
        normalize_action("eat-01")


def test_speech_act_families():
    assert SPEECH_ACTS["question"].family == "information-transfer"
    assert SPEECH_ACTS["assert"].label == "assertion"
    assert SPEECH_ACTS["promise"].family == "action-discussion"


# --------------------------------------------------------------------------
# validation


def test_validate_filled_graph():
    d = validate_dialogue_amr(parse_penman(FILLED))
    assert d.act.label == "command" and d.concept.name == "MOVEMENT"
    assert d.ta.time == "after-now" and d.ta.flags == {"completable": "+"}
    assert (d.speaker, d.addressee, d.content_root) == ("c2", "r", "g")


def test_validate_send_photo_with_legacy_suffix():
    d = validate_dialogue_amr(read_amr_file(fixture("amr", "excerpt2_dialogue.amr"))[3].graph)
    assert d.graph.instances[d.graph.root] == "command-SA"
    assert d.concept.name == "SEND-IMAGE"


def test_excerpt_graphs_all_validate():
    entries = read_amr_file(fixture("amr", "excerpt2_dialogue.amr"))
    acts = [validate_dialogue_amr(e.graph).act.label for e in entries]
    assert acts == ["command", "assertion", "offer", "command", "command"]


def test_standard_amr_rejected():
    with pytest.raises(NotASpeechActRoot):
        validate_dialogue_amr(parse_penman("(m / move-01 :ARG0 (y / you))"))


def test_missing_envelope_arg():
    with pytest.raises(MissingEnvelopeArg):
        validate_dialogue_amr(parse_penman("(c / command-SA :ARG0 (c2 / commander) :ARG1 (g / go-02))"))


def test_unknown_robot_concept():
    with pytest.raises(UnknownRobotConcept):
        validate_dialogue_amr(parse_penman(envelope("command", "eat-01")))


def test_incompatible_pair():
    with pytest.raises(IncompatibleActConcept):
        validate_dialogue_amr(parse_penman(envelope("promise", "able-01")))


def test_bad_tense_aspect():
    g = parse_penman("(c / command-SA :ARG0 (s / commander) :ARG2 (r / robot) "
                     ":ARG1 (g / go-02 :completable maybe :ARG0 r))")
    with pytest.raises(BadTenseAspect):
        validate_dialogue_amr(g)


def test_diagnose_collects_all():
    g = parse_penman("(c / promise-SA :ARG1 (a / able-01 :ongoing maybe))")
    codes = [e.code for e in diagnose_dialogue_amr(g)]
    assert codes[:2] == ["MissingEnvelopeArg", "MissingEnvelopeArg"]
    assert "IncompatibleActConcept" in codes and "BadTenseAspect" in codes


def test_every_compatible_pair_validates():
    for name, acts in APPENDIX.items():
        roleset = default_lexicon()[name].roleset
        for act in acts:
            assert validate_dialogue_amr(parse_penman(envelope(act, roleset))).concept.name == name


def test_every_incompatible_pair_rejected():
    rejected = 0
    for name, acts in APPENDIX.items():
        roleset = default_lexicon()[name].roleset
        for act in set(TABLE_ACTS) - acts:
            with pytest.raises(IncompatibleActConcept):
                validate_dialogue_amr(parse_penman(envelope(act, roleset)))
            rejected += 1
    assert rejected == 24 * 7 - 53


# --------------------------------------------------------------------------
# tense and aspect


@pytest.mark.parametrize("tense, ident", [("future", "future"), ("present", "present"), ("past", "past")])
def test_tense_variants_match_published_graphs(tense, ident):
    plain = first("amr", "move_forward.amr")
    expected = {e.id: e.graph for e in read_amr_file(fixture("amr", "move_forward_tensed.amr"))}[ident]
    got = annotate_tense_aspect(plain, SPEECH_ACTS["assertion"], tense)
    assert smatch_exact(got, expected).f1 == 1


def test_tense_flags():
    plain = first("amr", "move_forward.amr")
    seen = {}
    for tense in ("future", "present", "past"):
        g = annotate_tense_aspect(plain, SPEECH_ACTS["assertion"], tense)
        ta, problems = decode_tense_aspect(g, "m")
        assert problems == []
        seen[tense] = (ta.time, ta.flags)
    assert seen == {
        "future": ("after-now", {"completable": "+"}),
        "present": ("now", {"ongoing": "+", "complete": "-"}),
        "past": ("before-now", {"ongoing": "-", "complete": "+"}),
    }


def test_annotate_idempotent():
    plain = first("amr", "move_forward.amr")
    once = annotate_tense_aspect(plain, SPEECH_ACTS["assertion"], "past")
    assert annotate_tense_aspect(once, SPEECH_ACTS["assertion"], "past") == once


def test_annotate_conflict():
    g = parse_penman("(m / move-01 :complete + :ARG0 (i / i))")
    with pytest.raises(ConflictingAspect):
        annotate_tense_aspect(g, SPEECH_ACTS["assertion"], "present")


def test_boundedness():
    assert is_bounded(first("amr", "drive_standard.amr"), "d")
    assert is_bounded(first("amr", "move_forward.amr"), "m")
    assert not is_bounded(first("amr", "turn_standard.amr"), "t")


# --------------------------------------------------------------------------
# conversion


@pytest.mark.parametrize("stem", ["drive", "wall"])
def test_conversion_reproduces_published_graph(stem):
    d = convert_to_dialogue_amr(first("amr", f"{stem}_standard.amr"))
    gold = first("amr", f"{stem}_dialogue.amr")
    assert smatch_exact(d.graph, gold).f1 == 1
    assert rename_variables(d.graph) == rename_variables(gold)


def test_turn_without_angle_is_not_completable():
    d = convert_to_dialogue_amr(first("amr", "turn_standard.amr"))
    assert d.concept.name == "ROTATION" and d.ta.flags["completable"] == "-"
    validate_dialogue_amr(d.graph)


def test_rotate_pivot_convert_to_turn():
    for e in read_amr_file(fixture("amr", "rotate_standard.amr")):
        d = convert_to_dialogue_amr(e.graph)
        assert d.graph.instances[d.content_root] == "turn-01"
    pivot = convert_to_dialogue_amr(read_amr_file(fixture("amr", "rotate_standard.amr"))[1].graph)
    assert pivot.ta.flags["completable"] == "+"


def test_keep_moving_converts_to_fixture():
    d = convert_to_dialogue_amr(first("policy", "keep_moving_standard.amr"))
    assert smatch_exact(d.graph, first("policy", "keep_moving.amr")).f1 == 1


def test_convert_assertion_about_own_action():
    d = convert_to_dialogue_amr(first("amr", "move_forward.amr"), speaker="robot", addressee="commander",
                                act="assertion", surface_tense="past")
    node = d.content_root
    assert d.graph.targets(node, "ARG0") == [d.speaker]
    assert d.ta.time == "before-now"


def test_convert_rejects_coordination():
    g = parse_penman("(a / and :op1 (g / go-02 :mode imperative) :op2 (t / turn-01 :mode imperative))")
    with pytest.raises(UnsupportedStructure):
        convert_to_dialogue_amr(g)


def test_convert_unknown_action():
    with pytest.raises(NoConceptMapping):
        convert_to_dialogue_amr(parse_penman("(e / eat-01 :mode imperative :ARG0 (y / you))"))


def test_habitual_never_emitted():
    for _, e in all_fixture_graphs():
        if is_dialogue(e.graph):
            continue
        assert "habitual" not in convert_entry(e).ta.flags


# --------------------------------------------------------------------------
# invariants over the fixture corpus


def test_domains_disjoint():
    for name, e in all_fixture_graphs():
        if is_dialogue(e.graph):
            validate_dialogue_amr(e.graph)
            with pytest.raises(UnsupportedStructure):
                convert_to_dialogue_amr(e.graph)
        else:
            with pytest.raises(NotASpeechActRoot):
                validate_dialogue_amr(e.graph)
            d = convert_entry(e)
            with pytest.raises(UnsupportedStructure):
                convert_to_dialogue_amr(d.graph)


def test_no_unknown_concepts_in_fixtures():
    for name, e in all_fixture_graphs():
        if is_dialogue(e.graph):
            validate_dialogue_amr(e.graph)
        else:
            convert_entry(e)


def converted():
    out = []
    for name, e in all_fixture_graphs():
        out.append(validate_dialogue_amr(e.graph) if is_dialogue(e.graph) else convert_entry(e))
    return out


def test_compatibility_closure():
    for d in converted():
        assert d.act.label in APPENDIX[d.concept.name]


def test_envelope_roles_and_argument_consistency():
    for d in converted():
        g = d.graph
        assert g.targets(g.root, "ARG0") == [d.speaker]
        assert g.targets(g.root, "ARG1") == [d.content_root]
        assert g.targets(g.root, "ARG2") == [d.addressee]
        agent = g.targets(d.content_root, "ARG0")
        if d.act.label == "command":
            assert agent == [d.addressee]
        elif d.act.label in ("promise", "offer"):
            assert agent == [d.speaker]


def test_as_dict_shape():
    d = validate_dialogue_amr(parse_penman(FILLED))
    assert isinstance(d, DialogueAmr)
    assert d.as_dict()["tense_aspect"] == {"time": "after-now", "completable": "+"}
    assert content_node(d.graph) == "g"
