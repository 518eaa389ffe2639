"""Command-line front end.

Exit status: 0 when everything passes, 1 when a check finds violations (or an
embedding does not match), 2 for usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classical import linearize, to_classical
from .kinematics import (
    EmbeddingError,
    check_embedding,
    embedding_from_json,
    embedding_to_json,
    greedy_embed,
    induced_relation,
)
from .library import ALIASES, builtin_library
from .rules import Violation, check_rules, classify, parse_rules
from .structures import AlphabetClash, TraceStructure, Weave, enumerate_command, project_structure
from .syntax import ComponentDef, SourceError, parse_components, parse_trace, print_command, print_trace
from .terms import expand_shorthand, has_shorthand, normalize, sort_key

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _csv(text: str) -> list[str]:
    return [w.strip() for w in text.split(",") if w.strip()]


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _layout(text: str) -> tuple[float, float]:
    parts = _csv(text)
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected xE,xR")
    return float(parts[0]), float(parts[1])


def load_components(ref: str) -> list[ComponentDef]:
    """Components from a file, or the built-in named by the file stem."""
    path = Path(ref)
    if path.is_file():
        return parse_components(path.read_text(encoding="utf-8"))
    lib = builtin_library()
    name = ALIASES.get(path.stem, path.stem)
    if name in lib:
        return [lib[name]]
    raise UsageError(f"{ref}: no such file or built-in component")


def _traces(ts) -> list[str]:
    return [print_trace(t) for t in sorted(ts, key=sort_key)]


def _classical(ws) -> list[str]:
    return sorted(" ".join(w) if w else "eps" for w in ws)


def _render(x) -> object:
    if isinstance(x, tuple):
        return " ".join(x) if x else "eps"
    return print_trace(x)


def _violation(v: Violation) -> dict:
    doc = {
        "rule": v.rule.value,
        "s": _render(v.s),
        "pair": list(v.pair),
        "t": _render(v.t),
        "missing": sorted(_render(m) for m in v.missing),
        "premise_witnesses": sorted(_render(m) for m in v.premise_witnesses),
    }
    if v.c is not None:
        doc["c"] = v.c
    return doc


def _structure(comp: ComponentDef, depth: int) -> TraceStructure:
    return enumerate_command(comp.spec, depth)


# -- subcommands ---------------------------------------------------------------


def cmd_check(args) -> tuple[list, int]:
    rules = parse_rules(args.rules)
    results, status = [], EXIT_OK
    for ref in args.inputs:
        for comp in load_components(ref):
            S = _structure(comp, args.depth)
            report = check_rules(S, rules, comp.name)
            if not report.passed:
                status = EXIT_VIOLATION
            results.append({
                "component": comp.name,
                "traces": len(S),
                "horizon": S.horizon,
                "status": {r.value: st.value for r, st in report.status.items()},
                "violations": [_violation(v) for v in report.violations],
                "deferred": [_violation(v) for v in report.deferred],
            })
    return results, status


def cmd_classify(args) -> tuple[list, int]:
    results = []
    for ref in args.inputs:
        for comp in load_components(ref):
            results.append({"component": comp.name, "class": classify(_structure(comp, args.depth))})
    return results, EXIT_OK


def cmd_project(args) -> tuple[list, int]:
    if not args.keep:
        raise UsageError("project needs --keep")
    keep = _csv(args.keep)
    results = []
    for ref in args.inputs:
        for comp in load_components(ref):
            P = project_structure(_structure(comp, args.depth), keep)
            results.append({
                "component": comp.name,
                "keep": sorted(keep),
                "inputs": sorted(P.inputs),
                "outputs": sorted(P.outputs),
                "traces": _traces(P.traces),
            })
    return results, EXIT_OK


def cmd_weave(args) -> tuple[list, int]:
    comps = [c for ref in args.inputs for c in load_components(ref)]
    if len(comps) < 2:
        raise UsageError("weave needs at least two components")
    cmd = comps[0].spec
    for c in comps[1:]:
        cmd = Weave(cmd, c.spec)
    W = enumerate_command(cmd, args.depth)
    return [{
        "components": [c.name for c in comps],
        "inputs": sorted(W.inputs),
        "outputs": sorted(W.outputs),
        "traces": _traces(W.traces),
    }], EXIT_OK


def _terms(texts: list[str]):
    for text in texts:
        t = parse_trace(text)
        yield text, sorted(expand_shorthand(t), key=sort_key) if has_shorthand(t) else [t]


def cmd_normalize(args) -> tuple[list, int]:
    return [
        {"input": text, "normal_forms": [print_trace(t) for t in ts]}
        for text, ts in _terms(args.traces)
    ], EXIT_OK


def cmd_linearize(args) -> tuple[list, int]:
    results = []
    for ref in args.inputs:
        try:
            comps = load_components(ref)
        except UsageError:
            comps = None
        if comps is None:
            for text, ts in _terms([ref]):
                lin = set().union(*(linearize(t) for t in ts))
                results.append({"input": text, "classical": _classical(lin)})
        else:
            for comp in comps:
                C = to_classical(_structure(comp, args.depth))
                results.append({"component": comp.name, "classical": _classical(C.traces)})
    return results, EXIT_OK


def _directions(args) -> tuple[list, list]:
    if args.component:
        comp = load_components(args.component)[0]
        return sorted(comp.inputs), sorted(comp.outputs)
    if args.inputs is None and args.outputs is None:
        raise UsageError("embed-gen needs --component or --inputs/--outputs")
    return _csv(args.inputs or ""), _csv(args.outputs or "")


def cmd_embed_gen(args) -> tuple[list, int]:
    t = normalize(parse_trace(args.trace))
    if has_shorthand(t):
        raise UsageError("embed-gen needs a single trace without '||'")
    inputs, outputs = _directions(args)
    emb = greedy_embed(t, inputs, outputs, layout=args.layout, speed=args.speed, gap=args.gap)
    return [json.loads(embedding_to_json(emb))], EXIT_OK


def cmd_embed_check(args) -> tuple[list, int]:
    emb = embedding_from_json(Path(args.embedding).read_text(encoding="utf-8"))
    t = normalize(parse_trace(args.trace))
    ok = check_embedding(emb, t)
    induced = induced_relation(emb)
    return [{
        "trace": print_trace(t),
        "match": ok,
        "induced": print_trace(induced.term) if induced.term is not None else None,
        "series_parallel": induced.series_parallel,
    }], EXIT_OK if ok else EXIT_VIOLATION


def cmd_library(args) -> tuple[list, int]:
    lib = builtin_library()
    names = args.names or sorted(lib)
    for name in names:
        if name not in lib:
            raise UsageError(f"no built-in component {name!r}")
    return [{
        "component": n,
        "inputs": sorted(lib[n].inputs),
        "outputs": sorted(lib[n].outputs),
        "spec": print_command(lib[n].spec),
    } for n in names], EXIT_OK


# -- text output ---------------------------------------------------------------


def _text(command: str, results: list) -> str:
    lines = []
    for r in results:
        if command == "check":
            head = f"{r['component']} ({r['traces']} traces, horizon {r['horizon']})"
            lines.append(head)
            for rule, st in r["status"].items():
                lines.append(f"  {rule:6} {st}")
            for v in r["violations"]:
                extra = f" c={v['c']}" if "c" in v else ""
                lines.append(
                    f"  violation {v['rule']}: s={v['s']} pair=({', '.join(v['pair'])})"
                    f" t={v['t']}{extra} missing={{{', '.join(v['missing'])}}}"
                )
        elif command == "classify":
            lines.append(f"{r['component']}: {r['class']}")
        elif command in ("project", "weave"):
            name = r.get("component") or " || ".join(r["components"])
            lines.append(f"{name}: inputs={{{', '.join(r['inputs'])}}} outputs={{{', '.join(r['outputs'])}}}")
            lines.extend(f"  {t}" for t in r["traces"])
        elif command == "normalize":
            lines.append(f"{r['input']} => {' , '.join(r['normal_forms'])}")
        elif command == "linearize":
            lines.append(f"{r.get('component', r.get('input'))}:")
            lines.extend(f"  {w}" for w in r["classical"])
        elif command == "embed-gen":
            lines.append(json.dumps(r, indent=2, sort_keys=True))
        elif command == "embed-check":
            verdict = "match" if r["match"] else "mismatch"
            lines.append(f"{r['trace']}: {verdict} (induced {r['induced']})")
        elif command == "library":
            lines.append(
                f"{r['component']}: inputs {', '.join(r['inputs'])}; "
                f"outputs {', '.join(r['outputs'])}; spec {r['spec']}"
            )
    return "\n".join(lines)


# -- entry point ---------------------------------------------------------------

_HANDLERS = {
    "check": cmd_check,
    "classify": cmd_classify,
    "project": cmd_project,
    "weave": cmd_weave,
    "linearize": cmd_linearize,
    "normalize": cmd_normalize,
    "embed-gen": cmd_embed_gen,
    "embed-check": cmd_embed_check,
    "library": cmd_library,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=_positive, default=8, help="max events per enumerated trace")
    common.add_argument("--format", choices=("text", "structured"), default="text")

    parser = argparse.ArgumentParser(prog="rtrace", description="R-trace structure toolkit")
    parser.add_argument("--version", action="version", version=f"rtrace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check rules on components")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--rules", default="di", help="r0,r1,r2,r2p,r3p,r3pp,r3ppp or di")

    p = sub.add_parser("classify", parents=[common], help="strongest R3 class")
    p.add_argument("inputs", nargs="+")

    p = sub.add_parser("project", parents=[common], help="project onto symbols")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--keep", help="comma-separated symbols to keep")

    p = sub.add_parser("weave", parents=[common], help="weave components")
    p.add_argument("inputs", nargs="+")

    p = sub.add_parser("linearize", parents=[common], help="classical traces")
    p.add_argument("inputs", nargs="+", help="component files, built-ins or trace literals")

    p = sub.add_parser("normalize", parents=[common], help="normal form of trace literals")
    p.add_argument("traces", nargs="+")

    p = sub.add_parser("embed-gen", parents=[common], help="spacetime embedding of a trace")
    p.add_argument("trace")
    p.add_argument("--component", help="take io classes from this component")
    p.add_argument("--inputs")
    p.add_argument("--outputs")
    p.add_argument("--layout", type=_layout, default=(0.0, 1.0), help="xE,xR")
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--gap", type=float, default=1.0)

    p = sub.add_parser("embed-check", parents=[common], help="check an embedding file")
    p.add_argument("embedding")
    p.add_argument("trace")

    p = sub.add_parser("library", parents=[common], help="list built-in components")
    p.add_argument("names", nargs="*")
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("format",)}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        results, status = _HANDLERS[args.command](args)
    except (UsageError, SourceError, AlphabetClash, EmbeddingError, ValueError, OSError) as exc:
        if isinstance(exc, EmbeddingError) and args.command == "embed-gen":
            print(f"rtrace: {exc}", file=sys.stderr)
            return EXIT_VIOLATION
        print(f"rtrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "structured":
        doc = {
            "tool": "rtrace",
            "version": __version__,
            "config": _config(args),
            "results": results,
            "exit_status": status,
        }
        print(json.dumps(doc, indent=2, sort_keys=True, default=list))
    else:
        print(_text(args.command, results))
    return status


if __name__ == "__main__":
    sys.exit(main())
