"""Dialogue-AMR error types.  Each carries a stable ``code`` for reports."""
from __future__ import annotations


class DialogueAmrError(Exception):
    code = "DialogueAmrError"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}


class NotASpeechActRoot(DialogueAmrError):
    code = "NotASpeechActRoot"

    def __init__(self, concept: str):
        self.concept = concept
        super().__init__(f"root concept {concept!r} is not a registered speech act")


class MissingEnvelopeArg(DialogueAmrError):
    code = "MissingEnvelopeArg"

    def __init__(self, which: str, detail: str = "missing"):
        self.which = which
        super().__init__(f"speech-act root {detail} {which}")


class UnknownRobotConcept(DialogueAmrError):
    code = "UnknownRobotConcept"

    def __init__(self, roleset: str):
        self.roleset = roleset
        super().__init__(f"content concept {roleset!r} is not in the robot lexicon")


class IncompatibleActConcept(DialogueAmrError):
    code = "IncompatibleActConcept"

    def __init__(self, act: str, concept: str):
        self.act = act
        self.concept = concept
        super().__init__(f"speech act {act!r} does not combine with {concept}")


class BadTenseAspect(DialogueAmrError):
    code = "BadTenseAspect"

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class ConflictingAspect(DialogueAmrError):
    code = "ConflictingAspect"

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class NoConceptMapping(DialogueAmrError):
    code = "NoConceptMapping"

    def __init__(self, label: str):
        self.label = label
        super().__init__(f"no robot concept for {label!r}")


class UnsupportedStructure(DialogueAmrError):
    code = "UnsupportedStructure"

    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)
