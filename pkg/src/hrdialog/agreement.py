"""Krippendorff's alpha with nominal and MASI distances, in exact arithmetic."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Mapping

from .structure import Transcript


class AgreementError(ValueError):
    code = "AgreementError"


class EmptySet(AgreementError):
    code = "EmptySet"


class NoPairableUnits(AgreementError):
    code = "NoPairableUnits"


class MismatchedUtteranceLists(AgreementError):
    code = "MismatchedUtteranceLists"


def nominal_distance(a, b) -> int:
    return 0 if a == b else 1


def masi_distance(a, b) -> Fraction:
    """1 - J*M, where J is Jaccard overlap and M rewards containment."""
    a, b = frozenset(a), frozenset(b)
    if not a or not b:
        raise EmptySet("MASI is defined on non-empty sets")
    inter = len(a & b)
    if a == b:
        m = Fraction(1)
    elif a <= b or b <= a:
        m = Fraction(2, 3)
    elif inter:
        m = Fraction(1, 3)
    else:
        m = Fraction(0)
    return 1 - Fraction(inter, len(a | b)) * m


DISTANCES: dict[str, Callable] = {"nominal": nominal_distance, "masi": masi_distance}


@dataclass(frozen=True)
class AgreementMatrix:
    units: tuple
    coders: tuple
    values: Mapping  # (coder, unit) -> value; absent cells are missing

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "coders", tuple(self.coders))
        object.__setattr__(self, "values", dict(self.values))
        if len(self.coders) < 2:
            raise AgreementError("need at least two coders")
        for (c, u), v in self.values.items():
            if c not in self.coders or u not in self.units:
                raise AgreementError(f"cell ({c!r}, {u!r}) is outside the matrix")
            if isinstance(v, (set, frozenset)) and not v:
                raise EmptySet(f"empty set value at ({c!r}, {u!r})")

    __hash__ = None  # type: ignore[assignment]

    def unit_values(self, unit) -> list:
        return [self.values[(c, unit)] for c in self.coders if (c, unit) in self.values]

    def pairable_units(self) -> list:
        return [u for u in self.units if len(self.unit_values(u)) >= 2]

    @classmethod
    def from_rows(cls, rows: Mapping[Hashable, Mapping[Hashable, object]]) -> "AgreementMatrix":
        """Build from ``{coder: {unit: value}}``; unit order is first-seen."""
        units: list = []
        values = {}
        for coder, row in rows.items():
            for unit, v in row.items():
                if unit not in units:
                    units.append(unit)
                if v is not None:
                    values[(coder, unit)] = v
        return cls(tuple(units), tuple(rows), values)


@dataclass(frozen=True)
class AlphaResult:
    alpha: Fraction
    d_o: Fraction
    d_e: Fraction
    pairable_units: int
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "alpha_exact": str(self.alpha),
            "D_o": float(self.d_o),
            "D_e": float(self.d_e),
            "pairable_units": self.pairable_units,
            "degenerate": self.degenerate,
        }


def krippendorff_alpha(m: AgreementMatrix, distance: str | Callable = "nominal") -> AlphaResult:
    """alpha = 1 - D_o / D_e over pairable units.

    Within a unit of n_u values every ordered pair is weighted 1/(n_u - 1);
    D_e runs over ordered pairs of all pairable values.  When every value is
    the same D_e is zero and alpha is reported as 1 with ``degenerate`` set.
    """
    delta = DISTANCES[distance] if isinstance(distance, str) else distance
    units = [m.unit_values(u) for u in m.pairable_units()]
    if not units:
        raise NoPairableUnits("no unit has values from two coders")
    n = sum(len(vals) for vals in units)

    d_o = Fraction(0)
    for vals in units:
        within = sum(
            (Fraction(delta(a, b)) for i, a in enumerate(vals) for j, b in enumerate(vals) if i != j),
            Fraction(0),
        )
        d_o += within / (len(vals) - 1)
    d_o /= n

    pooled = [v for vals in units for v in vals]
    d_e = sum(
        (Fraction(delta(a, b)) for i, a in enumerate(pooled) for j, b in enumerate(pooled) if i != j),
        Fraction(0),
    ) / (n * (n - 1))

    if d_e == 0:
        return AlphaResult(Fraction(1), d_o, d_e, len(units), degenerate=True)
    return AlphaResult(1 - d_o / d_e, d_o, d_e, len(units))


# --------------------------------------------------------------------------
# markables


MARKABLES = ("tu", "antecedent", "relation")
DEFAULT_DISTANCE = {"tu": "masi", "antecedent": "nominal", "relation": "nominal"}

# value given to an utterance that opens its TU (no antecedent, no relation)
INITIAL = "-"


def _check_same(transcripts: Mapping[Hashable, Transcript]) -> list[int]:
    lists = {c: [u.id for u in t] for c, t in transcripts.items()}
    ids = next(iter(lists.values()))
    for coder, other in lists.items():
        if other != ids:
            raise MismatchedUtteranceLists(f"coder {coder!r} annotates a different utterance list")
    return ids


def tu_agreement_matrix(transcripts: Mapping[Hashable, Transcript]) -> AgreementMatrix:
    """Unit = utterance; value = ids of all utterances in its TU for that coder."""
    ids = _check_same(transcripts)
    values = {}
    for coder, t in transcripts.items():
        blocks = {tu: frozenset(u.id for u in members) for tu, members in t.tus().items()}
        for u in t:
            if u.tu is not None and u.tu in blocks:
                values[(coder, u.id)] = blocks[u.tu]
    return AgreementMatrix(tuple(ids), tuple(transcripts), values)


def antecedent_agreement_matrix(transcripts: Mapping[Hashable, Transcript]) -> AgreementMatrix:
    """Value = (target, is_sequence), or ``INITIAL`` for a TU's first utterance."""
    ids = _check_same(transcripts)
    values = {}
    for coder, t in transcripts.items():
        for u in t:
            if u.antecedent is not None:
                values[(coder, u.id)] = (u.antecedent.target, u.antecedent.sequence)
            elif u.tu is not None:
                values[(coder, u.id)] = INITIAL
    return AgreementMatrix(tuple(ids), tuple(transcripts), values)


def relation_agreement_matrix(transcripts: Mapping[Hashable, Transcript]) -> AgreementMatrix:
    ids = _check_same(transcripts)
    values = {}
    for coder, t in transcripts.items():
        for u in t:
            if u.relation is not None:
                values[(coder, u.id)] = u.relation
            elif u.tu is not None:
                values[(coder, u.id)] = INITIAL
    return AgreementMatrix(tuple(ids), tuple(transcripts), values)


def markable_matrix(markable: str, transcripts: Mapping[Hashable, Transcript]) -> AgreementMatrix:
    builders = {
        "tu": tu_agreement_matrix,
        "antecedent": antecedent_agreement_matrix,
        "relation": relation_agreement_matrix,
    }
    if markable not in builders:
        raise ValueError(f"markable must be one of {MARKABLES}")
    return builders[markable](transcripts)
