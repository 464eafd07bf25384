"""Command-line front end: ``patmt <command> GRAMMAR ...``.

Exit codes: 0 success, 1 a check failed (diagnostics, disagreements,
untranslated lines, pairs that could not be integrated), 2 unusable input
(unreadable or malformed grammar, bad arguments), 3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .dsl import GrammarSyntaxError, parse_document, serialize_grammar
from .engine import Penalties, TranslationFailure, render_trace, translate
from .equivalence import (
    DEFAULT_LENGTH_CAP,
    DEFAULT_SIZE_CAP,
    EnumerationCapExceeded,
    SizeCapExceeded,
    check_bounds,
    check_equivalence,
    enumerate_accepted,
    head_annotated_cfg,
    skeleton_cfg,
    unconstrained_cfg,
)
from .grammar import validate
from .integration import Schedule, integrate_corpus, read_corpus

DEFAULTS = {
    "m": 1,
    "budget": 100_000,
    "max_len": 5,
    "len_cap": DEFAULT_LENGTH_CAP,
    "size_cap": DEFAULT_SIZE_CAP,
    "step": 10,
    "rounds": 20,
}
PENALTY_FLAGS = {
    "violation_penalty": "violation",
    "head_bonus": "head_bonus",
    "terminal_bonus": "terminal_bonus",
    "node_charge": "node_charge",
    "user_bonus": "user_bonus",
}


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path: str, check: bool = True):
    """Parse and (optionally) validate a grammar file, or exit with 2."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Exit(2, f"{path}: {exc.strerror or exc}")
    try:
        doc = parse_document(text)
    except GrammarSyntaxError as exc:
        raise _Exit(2, "\n".join(f"{path}:{e}" for e in exc.errors))
    if check:
        diags = validate(doc.grammar)
        if diags:
            raise _Exit(2, "\n".join(_diag_line(path, doc, d) for d in diags))
    return doc


def _diag_line(path, doc, d) -> str:
    line, col = doc.positions.get(d.pattern_id, (0, 0))
    return f"{path}:{line}:{col}: {d}"


def _config(args) -> dict:
    cfg = dict(DEFAULTS)
    pen = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise _Exit(2, f"{args.config}: {exc}")
        pen.update(data.pop("penalties", {}))
        cfg.update({k.replace("-", "_"): v for k, v in data.items()})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for flag, name in PENALTY_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            pen[name] = val
    cfg["penalties"] = Penalties.from_mapping(pen)
    if cfg["m"] < 1:
        raise _Exit(2, "--m must be at least 1")
    if cfg["max_len"] > cfg["len_cap"]:
        raise _Exit(2, f"--max-len {cfg['max_len']} exceeds the cap {cfg['len_cap']}; raise --len-cap")
    return cfg


def _num(x) -> str:
    return str(int(x)) if float(x).is_integer() else f"{x:g}"


# -- commands ------------------------------------------------------------------

def cmd_validate(args, out) -> int:
    doc = _load(args.grammar, check=False)
    diags = validate(doc.grammar)
    if args.format == "structured":
        json.dump({"ok": not diags, "diagnostics": [
            {"pattern": d.pattern_id, "check": d.check, "message": d.message,
             "line": doc.positions.get(d.pattern_id, (0, 0))[0]} for d in diags]}, out, indent=2)
        out.write("\n")
    else:
        for d in diags:
            out.write(_diag_line(args.grammar, doc, d) + "\n")
        if not diags:
            out.write(f"{args.grammar}: ok ({len(doc.grammar.patterns)} patterns)\n")
    return 1 if diags else 0


def _translate_line(line: str, g, cfg, strict: bool, trace: bool) -> dict:
    try:
        res = translate(line, g, m=cfg["m"], node_budget=cfg["budget"], strict=strict,
                        penalties=cfg["penalties"], trace=trace)
    except TranslationFailure as exc:
        return {"source": line, "failure": exc.kind, "translations": [], "budget_exhausted": False,
                "trace_text": None}
    items = [{"rank": i, "cost": t.cost, "text": t.text, "violations": t.violations,
              "derivation": str(t.derivation)} for i, t in enumerate(res, 1)]
    trace_text = render_trace(res.source, res[0].trace, res[0].tokens) if trace else None
    return {"source": line, "failure": None, "translations": items,
            "budget_exhausted": res.budget_exhausted, "trace_text": trace_text}


def cmd_translate(args, out, stdin) -> int:
    g = _load(args.grammar).grammar
    cfg = _config(args)
    lines = [ln.strip() for ln in stdin.read().splitlines()]
    lines = [ln for ln in lines if ln]

    def work(line):
        return _translate_line(line, g, cfg, args.strict, args.trace)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(work, lines))
    else:
        results = [work(ln) for ln in lines]

    if args.format == "structured":
        json.dump(results, out, indent=2, ensure_ascii=False)
        out.write("\n")
    else:
        for r in results:
            if r["failure"]:
                out.write(f"FAIL {r['failure']}\n")
                continue
            for t in r["translations"]:
                out.write(f"{t['rank']}\t{_num(t['cost'])}\t{t['text']}\n")
            if r["budget_exhausted"]:
                out.write("# budget exhausted\n")
            if r["trace_text"]:
                out.write(r["trace_text"] + "\n")
    return 0 if all(r["translations"] for r in results) else 1


def _report(report, args, out) -> int:
    if args.format == "structured":
        json.dump(report.to_dict(), out, indent=2, ensure_ascii=False)
        out.write("\n")
    else:
        out.write(report.render() + "\n")
    return 0 if report.ok else 1


def cmd_equiv(args, out) -> int:
    g = _load(args.grammar).grammar
    cfg = _config(args)
    try:
        report = check_equivalence(g, cfg["max_len"], cap=cfg["len_cap"], size_cap=cfg["size_cap"])
    except SizeCapExceeded as exc:
        raise _Exit(3, f"projected rule count {exc.projected} exceeds the cap {exc.cap}")
    return _report(report, args, out)


def cmd_bounds(args, out) -> int:
    g = _load(args.grammar).grammar
    cfg = _config(args)
    return _report(check_bounds(g, cfg["max_len"], cap=cfg["len_cap"]), args, out)


def cmd_enumerate(args, out) -> int:
    g = _load(args.grammar).grammar
    cfg = _config(args)
    try:
        acceptor = {
            "T": lambda: g,
            "G": lambda: skeleton_cfg(g),
            "H": lambda: unconstrained_cfg(g),
            "GT": lambda: head_annotated_cfg(g.erase_features(), cfg["size_cap"]),
        }[args.language]()
    except SizeCapExceeded as exc:
        raise _Exit(3, f"projected rule count {exc.projected} exceeds the cap {exc.cap}")
    strings = enumerate_accepted(acceptor, cfg["max_len"], cap=cfg["len_cap"], vocabulary=g.terminals)
    ordered = sorted((" ".join(s) for s in strings), key=lambda s: (len(s.split()), s))
    if args.format == "structured":
        json.dump({"language": args.language, "max_len": cfg["max_len"], "count": len(ordered),
                   "strings": ordered}, out, indent=2, ensure_ascii=False)
        out.write("\n")
    else:
        out.writelines(s + "\n" for s in ordered)
        out.write(f"# {len(ordered)} strings\n")
    return 0


def cmd_integrate(args, out) -> int:
    g = _load(args.grammar).grammar
    cfg = _config(args)
    try:
        pairs = read_corpus(args.corpus)
    except (OSError, ValueError) as exc:
        raise _Exit(2, str(exc))
    schedule = Schedule(step=cfg["step"], rounds=cfg["rounds"], node_budget=cfg["budget"])
    g2, report = integrate_corpus(g, pairs, schedule)
    if args.out:
        Path(args.out).write_text(serialize_grammar(g2), encoding="utf-8")
    if args.format == "structured":
        json.dump(report.to_dict(), out, indent=2, ensure_ascii=False)
        out.write("\n")
    else:
        out.write(report.render() + "\n")
    return 1 if report.counts["NotIntegrable"] else 0


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="patmt", description="Pattern-based translation toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, enum=False):
        p.add_argument("grammar", help="grammar file")
        p.add_argument("--format", choices=("text", "structured"), default="text")
        p.add_argument("--config", help="JSON file with defaults and a 'penalties' table")
        p.add_argument("--budget", type=int, help="node budget for derivation enumeration")
        if enum:
            p.add_argument("--max-len", dest="max_len", type=int)
            p.add_argument("--len-cap", dest="len_cap", type=int,
                           help=f"largest allowed --max-len (default {DEFAULT_LENGTH_CAP})")
            p.add_argument("--size-cap", dest="size_cap", type=int)
        return p

    v = sub.add_parser("validate", help="check a grammar file")
    v.add_argument("grammar")
    v.add_argument("--format", choices=("text", "structured"), default="text")

    t = common(sub.add_parser("translate", help="translate sentences read from standard input"))
    t.add_argument("--m", type=int, help="number of distinct translations per line")
    t.add_argument("--strict", action="store_true", help="target head violations are failures")
    t.add_argument("--trace", action="store_true", help="print the three-phase trace")
    t.add_argument("--jobs", type=int, default=1)
    for flag in PENALTY_FLAGS:
        t.add_argument("--" + flag.replace("_", "-"), dest=flag, type=float)

    common(sub.add_parser("equiv", help="compare the grammar with its head-annotated CFG"), enum=True)
    common(sub.add_parser("bounds", help="check the H <= T <= G sandwich"), enum=True)
    e = common(sub.add_parser("enumerate", help="list accepted strings"), enum=True)
    e.add_argument("--language", choices=("T", "G", "H", "GT"), default="T")

    i = common(sub.add_parser("integrate", help="refine a grammar from a TSV corpus"))
    i.add_argument("corpus")
    i.add_argument("--out", help="where to write the refined grammar")
    i.add_argument("--step", type=float)
    i.add_argument("--rounds", type=int)
    return ap


def main(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None) -> int:
    stdin = sys.stdin if stdin is None else stdin
    out = sys.stdout if stdout is None else stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    handlers = {
        "validate": lambda: cmd_validate(args, out),
        "translate": lambda: cmd_translate(args, out, stdin),
        "equiv": lambda: cmd_equiv(args, out),
        "bounds": lambda: cmd_bounds(args, out),
        "enumerate": lambda: cmd_enumerate(args, out),
        "integrate": lambda: cmd_integrate(args, out),
    }
    try:
        return handlers[args.command]()
    except _Exit as exc:
        if str(exc):
            _err(str(exc))
        return exc.code
    except EnumerationCapExceeded as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
