"""Command-line interface.

Exit codes: 0 success, 1 criterion not satisfied / no adjustment exists /
d-connected, 2 parse error (bad file or unknown vertex in a flag),
3 precondition violation, 4 internal limit.

Two output styles share one data model: ``--format human`` prints aligned
labels, ``--format lines`` prints one tab-separated ``key<TAB>value`` record
per line for shell composition.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path as FilePath

from .analysis import AnalysisResult, analyze
from .errors import BudgetExceededError, NotExposureLoopFreeError, ParseError
from .model import DiagramDocument, parse

EXIT_OK = 0
EXIT_UNSATISFIED = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_LIMIT = 4

TRUNCATION_MARKER = "# truncated"


class _FlagError(Exception):
    """An unusable value in a command-line flag; reported like a parse error."""


def _read_source(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    return FilePath(spec).read_text(encoding="utf-8")


def _load(spec: str) -> DiagramDocument:
    return parse(_read_source(spec))


def _vertex_list(doc: DiagramDocument, raw: str | None, flag: str) -> frozenset[str] | None:
    if raw is None:
        return None
    names = [part.strip() for part in raw.split(",") if part.strip()]
    for name in names:
        if name not in doc.graph:
            raise _FlagError(f"{flag}: unknown vertex {name!r}")
    return frozenset(names)


def _emit(records: list[tuple[str, str]], fmt: str, out) -> None:
    if fmt == "lines":
        for key, value in records:
            out.write(f"{key}\t{value}\n")
    else:
        width = max((len(k) for k, _ in records), default=0) + 2
        for key, value in records:
            out.write(f"{key + ':':<{width}}{value}\n")


def _set_text(values) -> str:
    values = list(values)
    return ", ".join(values) if values else "{}"


def _bool_text(flag: bool) -> str:
    return "true" if flag else "false"


def cmd_check(args, out=sys.stdout, err=sys.stderr) -> int:
    doc = _load(args.input)
    override = _vertex_list(doc, args.adjust, "--adjust")
    doc.roles.check_against(doc.graph, require_query_roles=True)
    result = analyze(doc, adjusted_override=override, enumerate_sets=False)
    rep = result.criteria
    records = [
        ("exposure", _set_text(result.exposure)),
        ("outcome", _set_text(result.outcome)),
        ("adjusted", _set_text(result.adjusted)),
        ("exposure-loop-free", _bool_text(rep.exposure_loop_free)),
        ("adjustment-criterion", _bool_text(rep.adjustment_criterion)),
        ("backdoor-criterion", _bool_text(rep.backdoor_criterion)),
        ("moral-criterion", _bool_text(rep.moral_criterion)),
        ("forbidden", _set_text(rep.forbidden)),
    ]
    if rep.witness is not None:
        records.append(("witness", str(rep.witness)))
    _emit(records, args.format, out)
    return EXIT_OK if rep.adjustment_criterion else EXIT_UNSATISFIED


def cmd_adjustments(args, out=sys.stdout, err=sys.stderr) -> int:
    from .graph import require_exposure_loop_free

    doc = _load(args.input)
    extra_latent = _vertex_list(doc, args.latent, "--latent") or frozenset()
    _vertex_list(doc, args.adjust, "--adjust")  # accepted for flag parity; unused
    doc.roles.check_against(doc.graph, require_query_roles=True)
    require_exposure_loop_free(doc.graph, doc.roles.exposure)
    result = analyze(
        doc,
        latent_override=doc.roles.latent | extra_latent,
        max_adjustments=args.max,
    )
    if result.no_adjustment_exists:
        err.write("no adjustment exists: exposure and outcome are inseparably linked\n")
        return EXIT_UNSATISFIED
    for group in result.adjustments:
        out.write(_set_text(group) + "\n")
    if result.truncated:
        out.write(TRUNCATION_MARKER + "\n")
    return EXIT_OK


def cmd_bias_edges(args, out=sys.stdout, err=sys.stderr) -> int:
    doc = _load(args.input)
    override = _vertex_list(doc, args.adjust, "--adjust")
    doc.roles.check_against(doc.graph, require_query_roles=True)
    result = analyze(doc, adjusted_override=override, enumerate_sets=False)
    if result.biasing.adjusted_descendants:
        err.write(
            "warning: adjusted set contains descendants of the exposure\n"
        )
    for u, v in result.biasing.edges:
        out.write(f"{u} -> {v}\n")
    return EXIT_OK


def cmd_dsep(args, out=sys.stdout, err=sys.stderr) -> int:
    from .criteria import d_separated, find_open_path

    doc = _load(args.input)
    given = _vertex_list(doc, args.given, "--given") or frozenset()
    doc.roles.check_against(doc.graph, require_query_roles=True)
    x, y = doc.roles.exposure, doc.roles.outcome
    separated = d_separated(doc.graph, x, y, given)
    if args.format == "lines":
        out.write(f"verdict\t{'d-separated' if separated else 'd-connected'}\n")
    else:
        out.write(("d-separated" if separated else "d-connected") + "\n")
    if not separated:
        witness = find_open_path(doc.graph, x, y, given)
        if witness is not None:
            if args.format == "lines":
                out.write(f"witness\t{witness}\n")
            else:
                out.write(f"witness: {witness}\n")
        return EXIT_UNSATISFIED
    return EXIT_OK


def cmd_report(args, out=sys.stdout, err=sys.stderr) -> int:
    from .report import render_report

    doc = _load(args.input)
    override = _vertex_list(doc, args.adjust, "--adjust")
    doc.roles.check_against(doc.graph, require_query_roles=True)
    result = analyze(doc, adjusted_override=override, max_adjustments=args.max)
    stem = "diagram" if args.input == "-" else FilePath(args.input).stem
    written = render_report(result, FilePath(args.output), stem)
    for path in written:
        out.write(f"{path}\n")
    return EXIT_OK


def cmd_serve(args, out=sys.stdout, err=sys.stderr) -> int:
    import uvicorn

    from .service import app

    host = args.host or os.environ.get("DAGBIAS_HOST", "127.0.0.1")
    port = args.port or int(os.environ.get("DAGBIAS_PORT", "8355"))
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dagbias",
        description="Covariate adjustment and biasing-path analysis for causal diagrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="diagram file, or - for standard input")
        p.add_argument(
            "--format", choices=("human", "lines"), default="human",
            help="human-readable or line-oriented output",
        )

    p = sub.add_parser("check", help="evaluate the adjustment criteria for the adjusted set")
    common(p)
    p.add_argument("--adjust", help="comma-separated adjusted set, overrides the file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("adjustments", help="list minimal adjustment sets")
    common(p)
    p.add_argument("--max", type=int, default=100, help="stop after this many sets")
    p.add_argument("--latent", help="comma-separated unadjustable vertices, added to the file's")
    p.add_argument("--adjust", help="accepted for symmetry; enumeration ignores the adjusted set")
    p.set_defaults(run=cmd_adjustments)

    p = sub.add_parser("bias-edges", help="list the edges lying on open biasing paths")
    common(p)
    p.add_argument("--adjust", help="comma-separated adjusted set, overrides the file")
    p.set_defaults(run=cmd_bias_edges)

    p = sub.add_parser("dsep", help="test d-separation of exposure and outcome")
    common(p)
    p.add_argument("--given", help="comma-separated conditioning set")
    p.set_defaults(run=cmd_dsep)

    p = sub.add_parser("report", help="write the full analysis as text plus a rendered figure")
    common(p)
    p.add_argument("--adjust", help="comma-separated adjusted set, overrides the file")
    p.add_argument("--max", type=int, default=20, help="adjustment sets to include")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.set_defaults(run=cmd_report)

    p = sub.add_parser("serve", help="run the analysis HTTP service")
    p.add_argument("--host", help="listen address (or DAGBIAS_HOST)")
    p.add_argument("--port", type=int, help="listen port (or DAGBIAS_PORT)")
    p.set_defaults(run=cmd_serve)

    return parser


def main(argv: list[str] | None = None, out=sys.stdout, err=sys.stderr) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out, err)
    except ParseError as exc:
        err.write(f"parse error at {exc.line}:{exc.column}: {exc.message}\n")
        return EXIT_PARSE
    except _FlagError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except FileNotFoundError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except NotExposureLoopFreeError as exc:
        err.write(f"precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    except ValueError as exc:
        err.write(f"precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    except BudgetExceededError as exc:
        err.write(f"internal limit: {exc}\n")
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
