"""Command-line entry point.

    hrdlha analyze MODEL [--ordering K] [--direction D] [--pspsc]
                         [--max-iterations N] [--output text|json] [--stats]
    hrdlha --generate fischer:2 [-o FILE]

``MODEL`` is a path or ``builtin:FAMILY:N``.  Exit codes: 0 converged,
1 usage error, 2 parse/validation error or unreadable file, 3 iteration
limit reached.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from .engine import AnalysisConfig, Direction, Status, analyze
from .frontend import generate, parse_model, print_model
from .hrd import FALSE, TRUE
from .ordering import ModelError, OrderingKind

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_LIMIT = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hrdlha", description="Parametric safety analysis of linear hybrid automata.")
    p.add_argument("--generate", metavar="FAMILY:N",
                   help="print a benchmark model (fischer, reactor, railroad, csma) and exit")
    p.add_argument("-o", "--out", help="with --generate, write the model here instead of stdout")
    sub = p.add_subparsers(dest="command")
    a = sub.add_parser("analyze", help="analyze a model file")
    a.add_argument("model", help="model file or builtin:FAMILY:N")
    a.add_argument("--ordering", choices=[k.value for k in OrderingKind], default="coefficient")
    a.add_argument("--direction", choices=[d.value for d in Direction], default="backward")
    a.add_argument("--pspsc", action="store_true", help="prune by parameter-space construction")
    a.add_argument("--max-iterations", type=int, default=0, metavar="N",
                   help="stop after N fixpoint iterations (0 = unbounded)")
    a.add_argument("--output", choices=["text", "json"], default="text")
    a.add_argument("--stats", action="store_true", help="per-iteration statistics on stderr")
    return p


def fmt_bound(c: Fraction) -> str:
    return str(Fraction(c))


def dnf(mgr, d) -> List[list]:
    """Paths of ``d`` as lists of ``(expr, relation, bound)`` constraints."""
    names = mgr.names()
    out = []
    key = mgr.order.dense_key
    for z, _ in mgr.enumerate_paths(d):
        conj = []
        for e, b in sorted(z.items(), key=lambda kv: key(kv[0])):
            conj.append(({names[v]: a for v, a in e.terms}, "<=" if b.weak else "<",
                         fmt_bound(b.value), e.render(names)))
        out.append(conj)
    return out


def region_json(mgr, d):
    return [[{"expression": expr, "relation": rel, "bound": bnd} for expr, rel, bnd, _ in conj]
            for conj in dnf(mgr, d)]


def region_text(mgr, d) -> str:
    if d is TRUE:
        return "true"
    if d is FALSE:
        return "false"
    parts = []
    for conj in dnf(mgr, d):
        body = " and ".join("%s %s %s" % (txt, rel, bnd) for _, rel, bnd, txt in conj)
        parts.append("(%s)" % body if len(conj) > 1 else body)
    return " or ".join(parts)


def load_model(ref: str):
    if ref.startswith("builtin:"):
        return generate(ref[len("builtin:"):])
    with open(ref, encoding="utf-8") as fh:
        return parse_model(fh.read())


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.generate is None and args.command is None:
            raise _UsageError("nothing to do: give 'analyze MODEL' or --generate")
        if args.command == "analyze" and args.max_iterations < 0:
            raise _UsageError("--max-iterations must be nonnegative")
    except _UsageError as exc:
        stderr.write("%s\nusage error: %s\n" % (parser.format_usage().rstrip(), exc))
        return EXIT_USAGE

    if args.generate is not None:
        try:
            text = print_model(generate(args.generate))
        except ModelError as exc:
            stderr.write("error: %s\n" % exc)
            return EXIT_USAGE
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        if args.command is None:
            return EXIT_OK

    try:
        model = load_model(args.model)
    except OSError as exc:
        stderr.write("error: cannot read %s: %s\n" % (args.model, exc.strerror or exc))
        return EXIT_MODEL
    except ModelError as exc:
        stderr.write("error: %s: %s\n" % (args.model, exc))
        return EXIT_MODEL

    cfg = AnalysisConfig(direction=args.direction, pspsc=args.pspsc, ordering=args.ordering,
                         max_iterations=args.max_iterations, emit_stats=args.stats)
    result = analyze(model, cfg, stream=stderr if args.stats else None)
    mgr = result.manager
    if args.output == "json":
        doc = {"status": result.status.value, "direction": cfg.direction.value,
               "ordering": cfg.ordering.value, "pspsc": cfg.pspsc,
               "parameters": list(model.params),
               "unsafe": region_json(mgr, result.unsafe_params),
               "solutions": region_json(mgr, result.solutions)}
        if args.stats:
            doc["stats"] = result.stats.as_dict()
        stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        stdout.write("status: %s\n" % result.status.value)
        stdout.write("unsafe: %s\n" % region_text(mgr, result.unsafe_params))
        stdout.write("solutions: %s\n" % region_text(mgr, result.solutions))
        if args.stats:
            s = result.stats
            stdout.write("iterations: %d\npeak_nodes: %d\nwall_time: %.3fs\n"
                         % (s.iterations, s.peak_nodes, s.wall_time))
    return EXIT_OK if result.status is Status.CONVERGED else EXIT_LIMIT


def main():  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
