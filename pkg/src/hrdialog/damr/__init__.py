"""Dialogue-AMR: speech-act envelopes over robot-lexicon content."""
from .convert import convert_to_dialogue_amr, infer_act
from .errors import (
    BadTenseAspect,
    ConflictingAspect,
    DialogueAmrError,
    IncompatibleActConcept,
    MissingEnvelopeArg,
    NoConceptMapping,
    NotASpeechActRoot,
    UnknownRobotConcept,
    UnsupportedStructure,
)
from .lexicon import (
    SPEECH_ACTS,
    Lexicon,
    RobotConcept,
    SpeechAct,
    SpeechActRegistry,
    default_lexicon,
    load_lexicon,
    normalize_action,
)
from .schema import (
    ASPECT_FLAGS,
    DialogueAmr,
    TenseAspect,
    annotate_tense_aspect,
    content_node,
    decode_tense_aspect,
    diagnose_dialogue_amr,
    is_bounded,
    speech_act_of,
    validate_dialogue_amr,
)

__all__ = [
    "annotate_tense_aspect",
    "ASPECT_FLAGS",
    "BadTenseAspect",
    "ConflictingAspect",
    "content_node",
    "convert_to_dialogue_amr",
    "decode_tense_aspect",
    "default_lexicon",
    "diagnose_dialogue_amr",
    "DialogueAmr",
    "DialogueAmrError",
    "IncompatibleActConcept",
    "infer_act",
    "is_bounded",
    "Lexicon",
    "load_lexicon",
    "MissingEnvelopeArg",
    "NoConceptMapping",
    "normalize_action",
    "NotASpeechActRoot",
    "RobotConcept",
    "speech_act_of",
    "SPEECH_ACTS",
    "SpeechAct",
    "SpeechActRegistry",
    "TenseAspect",
    "UnknownRobotConcept",
    "UnsupportedStructure",
    "validate_dialogue_amr",
]
