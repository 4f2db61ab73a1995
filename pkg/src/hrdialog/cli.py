"""Command-line entry point.

Every subcommand prints one JSON report to stdout (or TSV with ``--tsv``
where the output is a table).  Exit codes: 0 clean, 1 findings or
violations, 2 usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import agreement, amr, smatch, structure, visual
from .damr import (
    DialogueAmrError,
    convert_to_dialogue_amr,
    diagnose_dialogue_amr,
    validate_dialogue_amr,
)

SCHEMA = "hrdialog.report/1"


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    tool: str
    inputs: list
    findings: object = None
    exit_code: int = 0
    tsv: list | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "tool": self.tool,
            "inputs": self.inputs,
            "findings": self.findings,
            "exit_code": self.exit_code,
        }

    def render(self, as_tsv: bool = False) -> str:
        if as_tsv and self.tsv is not None:
            return "\n".join("\t".join(str(c) for c in row) for row in self.tsv) + "\n"
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _entries(path: str, strict: bool = True) -> list[amr.AmrEntry]:
    entries = amr.read_amr_file(path, strict=strict)
    if not entries:
        raise amr.AmrError(f"{path}: no graphs found")
    return entries


def _label(entry: amr.AmrEntry, i: int) -> str:
    return entry.id or str(i + 1)


# --------------------------------------------------------------------------
# subcommands


def cmd_amr_parse(args) -> RunReport:
    out = []
    for path in args.files:
        for i, e in enumerate(_entries(path, strict=not args.lenient)):
            out.append({
                "file": path,
                "id": _label(e, i),
                "root": e.graph.root,
                "instances": len(e.graph.instances),
                "triples": len(amr.to_triples(e.graph)),
                "penman": amr.serialize_penman(e.graph),
            })
    return RunReport("amr parse", args.files, out)


def cmd_amr_check(args) -> RunReport:
    out = []
    bad = 0
    for path in args.files:
        try:
            n = len(_entries(path, strict=not args.lenient))
            out.append({"file": path, "ok": True, "graphs": n})
        except amr.AmrError as e:
            bad += 1
            out.append({"file": path, "ok": False, "error": type(e).__name__, "message": str(e)})
    return RunReport("amr check", args.files, out, 1 if bad else 0)


def cmd_smatch(args) -> RunReport:
    g1, g2 = _entries(args.first), _entries(args.second)
    if len(g1) != len(g2):
        raise UsageError(f"{args.first} has {len(g1)} graphs but {args.second} has {len(g2)}")
    pairs = []
    for i, (a, b) in enumerate(zip(g1, g2)):
        r = smatch.smatch(a.graph, b.graph, method=args.method, restarts=args.restarts,
                          seed=args.seed, limit=args.limit)
        pairs.append({"id": _label(a, i), **r.as_dict()})
    mean = sum(p["f1"] for p in pairs) / len(pairs)
    findings = {"pairs": pairs, "mean_f1": mean}
    if len(pairs) == 1:
        findings.update({k: v for k, v in pairs[0].items() if k != "id"})
    return RunReport("smatch", [args.first, args.second], findings)


def cmd_damr_validate(args) -> RunReport:
    out = []
    bad = 0
    for i, e in enumerate(_entries(args.file)):
        errors = diagnose_dialogue_amr(e.graph)
        item = {"id": _label(e, i), "ok": not errors, "errors": [x.to_dict() for x in errors]}
        if not errors:
            item["envelope"] = validate_dialogue_amr(e.graph).as_dict()
        bad += bool(errors)
        out.append(item)
    return RunReport("damr validate", [args.file], out, 1 if bad else 0)


def cmd_damr_convert(args) -> RunReport:
    out = []
    bad = 0
    for i, e in enumerate(_entries(args.file)):
        try:
            d = convert_to_dialogue_amr(e.graph, args.speaker, args.addressee,
                                        act=args.act, surface_tense=args.tense)
            out.append({"id": _label(e, i), "ok": True, "penman": amr.serialize_penman(d.graph),
                        "envelope": d.as_dict()})
        except DialogueAmrError as err:
            bad += 1
            out.append({"id": _label(e, i), "ok": False, "errors": [err.to_dict()]})
    return RunReport("damr convert", [args.file], out, 1 if bad else 0)


def cmd_struct_validate(args) -> RunReport:
    out = []
    rows = [["file", "rule", "row", "message"]]
    bad = 0
    for path in args.files:
        t = structure.load_transcript(path, strict=False)
        violations = structure.validate_structure(t)
        nonstandard = sorted({u.relation for u in t if u.relation in structure.NONSTANDARD})
        out.append({
            "file": path,
            "utterances": len(t),
            "coverage": t.coverage(),
            "violations": [v.as_dict() for v in violations],
            "nonstandard_relations": nonstandard,
        })
        rows += [[path, v.rule, v.row, v.message] for v in violations]
        bad += bool(violations)
    return RunReport("struct validate", args.files, out, 1 if bad else 0, rows)


def cmd_struct_tus(args) -> RunReport:
    t = structure.load_transcript(args.file)
    trees = []
    bad = 0
    for tu in sorted(t.tus()):
        try:
            trees.append({"tu": tu, "tree": structure.tu_tree(t, tu).as_dict()})
        except structure.InvalidTU as e:
            bad += 1
            trees.append({"tu": tu, "error": str(e)})
    return RunReport("struct tus", [args.file], trees, 1 if bad else 0)


def cmd_struct_pairs(args) -> RunReport:
    t = structure.load_transcript(args.file)
    pairs = structure.extract_instruction_response_pairs(t)
    rows = [["instruction", "feedback", "translation"]]
    rows += [[p.instruction, "|".join(p.responses), "|".join(p.translations)] for p in pairs]
    findings = [{"tu": p.tu, "instruction": p.instruction, "feedback": list(p.responses),
                 "translation": list(p.translations)} for p in pairs]
    return RunReport("struct pairs", [args.file], findings, 0, rows)


def cmd_struct_interleave(args) -> RunReport:
    t = structure.load_transcript(args.file)
    spans = structure.interleaving_spans(t)
    rows = [["start", "end", "tus"]] + [[a, b, ",".join(map(str, sorted(s)))] for (a, b), s in spans]
    findings = [{"start": a, "end": b, "tus": sorted(s)} for (a, b), s in spans]
    return RunReport("struct interleave", [args.file], findings, 0, rows)


def cmd_iaa_alpha(args) -> RunReport:
    if len(args.files) < 2:
        raise UsageError("iaa alpha needs one transcript per coder, at least two")
    # coders are positional so the same file may stand in for two coders
    transcripts = {i: structure.load_transcript(path, strict=False) for i, path in enumerate(args.files)}
    m = agreement.markable_matrix(args.markable, transcripts)
    dist = args.distance or agreement.DEFAULT_DISTANCE[args.markable]
    r = agreement.krippendorff_alpha(m, dist)
    findings = {"markable": args.markable, "distance": dist, **r.as_dict()}
    return RunReport("iaa alpha", args.files, findings)


def cmd_map_coverage(args) -> RunReport:
    m = visual.load_exploration_list(args.file)
    cats = [args.category] if args.category else [c for c in visual.CATEGORIES
                                                  if any(i.category == c for i in m)]
    findings = {
        "items": len(m),
        "overall": float(visual.coverage(m)) if len(m) else None,
        "by_category": {c: float(visual.coverage(m, c)) for c in cats},
        "warnings": list(m.warnings),
    }
    for w in m.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return RunReport("map coverage", [args.file], findings)


def cmd_strategy_classify(args) -> RunReport:
    texts = list(args.texts)
    if args.file:
        texts += [ln.strip() for ln in Path(args.file).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not texts:
        raise UsageError("give instruction texts or --file")
    rows = [["text", "strategy"]] + [[t, visual.classify_photo_strategy(t)] for t in texts]
    findings = [{"text": t, "strategy": s} for t, s in rows[1:]]
    return RunReport("strategy classify", [args.file] if args.file else [], findings, 0, rows)


def cmd_strategy_trace(args) -> RunReport:
    t = structure.load_transcript(args.file, strict=False)
    traces = visual.trace_photo_requests(t)
    rows = [["event", "initiating", "initiator"]]
    rows += [[x.event, "" if x.initiating is None else x.initiating, x.initiator] for x in traces]
    return RunReport("strategy trace", [args.file], [x.as_dict() for x in traces], 0, rows)


def cmd_dm_respond(args) -> RunReport:
    from . import policy

    index = policy.build_index(policy.load_training(args.train))
    damr = None
    inputs = [args.train]
    if args.damr:
        inputs.append(args.damr)
        damr = _entries(args.damr)[0].graph
    decision = policy.decide(index, args.utterance, damr, threshold=args.threshold)
    return RunReport("dm respond", inputs, decision.as_dict())


# --------------------------------------------------------------------------
# argument grammar


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hrdialog", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = sub.add_parser("amr", help="parse and check PENMAN files")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, fn in (("parse", cmd_amr_parse), ("check", cmd_amr_check)):
        x = gs.add_parser(name)
        x.add_argument("files", nargs="+")
        x.add_argument("--lenient", action="store_true", help="warn on cycles instead of failing")
        x.set_defaults(fn=fn)

    x = sub.add_parser("smatch", help="Smatch between two .amr files, graph by graph")
    x.add_argument("first")
    x.add_argument("second")
    x.add_argument("--method", choices=("auto", "exact", "hillclimb"), default="auto")
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--restarts", type=int, default=8)
    x.add_argument("--limit", type=int, default=smatch.EXHAUSTIVE_LIMIT)
    x.set_defaults(fn=cmd_smatch)

    g = sub.add_parser("damr", help="Dialogue-AMR validation and conversion")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = gs.add_parser("validate")
    x.add_argument("file")
    x.set_defaults(fn=cmd_damr_validate)
    x = gs.add_parser("convert")
    x.add_argument("file")
    x.add_argument("--speaker", default="commander")
    x.add_argument("--addressee", default="robot")
    x.add_argument("--act", default=None)
    x.add_argument("--tense", choices=("past", "present", "future", "imperative"), default=None)
    x.set_defaults(fn=cmd_damr_convert)

    g = sub.add_parser("struct", help="dialogue-structure transcripts")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = gs.add_parser("validate")
    x.add_argument("files", nargs="+")
    x.add_argument("--tsv", action="store_true")
    x.set_defaults(fn=cmd_struct_validate)
    for name, fn in (("tus", cmd_struct_tus), ("pairs", cmd_struct_pairs),
                     ("interleave", cmd_struct_interleave)):
        x = gs.add_parser(name)
        x.add_argument("file")
        x.add_argument("--tsv", action="store_true")
        x.set_defaults(fn=fn)

    g = sub.add_parser("iaa", help="inter-annotator agreement")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = gs.add_parser("alpha")
    x.add_argument("files", nargs="+", help="one transcript TSV per coder")
    x.add_argument("--markable", choices=agreement.MARKABLES, default="relation")
    x.add_argument("--distance", choices=tuple(agreement.DISTANCES), default=None)
    x.set_defaults(fn=cmd_iaa_alpha)

    g = sub.add_parser("map", help="exploration maps")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = gs.add_parser("coverage")
    x.add_argument("file")
    x.add_argument("--category", choices=visual.CATEGORIES)
    x.set_defaults(fn=cmd_map_coverage)

    g = sub.add_parser("strategy", help="photo-request strategies")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = gs.add_parser("classify")
    x.add_argument("texts", nargs="*")
    x.add_argument("--file", help="one instruction per line")
    x.add_argument("--tsv", action="store_true")
    x.set_defaults(fn=cmd_strategy_classify)
    x = gs.add_parser("trace")
    x.add_argument("file")
    x.add_argument("--tsv", action="store_true")
    x.set_defaults(fn=cmd_strategy_trace)

    g = sub.add_parser("dm", help="retrieval dialogue manager")
    gs = g.add_subparsers(dest="action", required=True, parser_class=_Parser)
    x = gs.add_parser("respond")
    x.add_argument("utterance")
    x.add_argument("--train", required=True, help="transcript TSV or pairs TSV")
    x.add_argument("--threshold", type=float, default=0.35)
    x.add_argument("--damr", help=".amr file whose first graph is the utterance's Dialogue-AMR")
    x.set_defaults(fn=cmd_dm_respond)
    return p


_INPUT_ERRORS = (
    amr.AmrError,
    structure.StructureError,
    visual.MapFormatError,
    visual.EmptyCategory,
    agreement.AgreementError,
    smatch.TooLarge,
    OSError,
    UnicodeDecodeError,
    ValueError,
)


def _inputs(args) -> list:
    out = []
    for name in ("files", "file", "first", "second", "train", "damr"):
        v = getattr(args, name, None)
        if v:
            out += v if isinstance(v, list) else [v]
    return out


def dispatch(argv: list[str] | None = None) -> tuple[RunReport, bool]:
    args = build_parser().parse_args(argv)
    tool = args.group + (f" {args.action}" if getattr(args, "action", None) else "")
    try:
        report = args.fn(args)
    except UsageError as e:
        print(f"hrdialog: error: {e}", file=sys.stderr)
        report = RunReport(tool, _inputs(args), {"error": {"code": "Usage", "message": str(e)}}, 2)
    except _INPUT_ERRORS as e:
        print(f"hrdialog: {type(e).__name__}: {e}", file=sys.stderr)
        code = getattr(e, "code", type(e).__name__)
        if not isinstance(code, str):
            code = type(e).__name__
        report = RunReport(tool, _inputs(args), {"error": {"code": code, "message": str(e)}}, 2)
    return report, getattr(args, "tsv", False)


def main(argv: list[str] | None = None) -> int:
    try:
        report, as_tsv = dispatch(argv)
    except SystemExit as e:
        return int(e.code or 0)
    sys.stdout.write(report.render(as_tsv and report.exit_code != 2))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
