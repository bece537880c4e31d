"""Command-line entry point.

Exit status contract: 0 = success / no errors; 1 = validation errors (or
warnings under --strict); 2 = usage, IO or parse failure. Human-readable
output goes to stdout; failure-class diagnostics go to stderr. Commands are
side-effect-free unless --write / -o / --figure is given.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, catalogue as cat, dsl, figures, weave
from .render import FORMATS, InvalidModel
from .render import render as render_diagram
from .model import LinkKind, Model, ModelError
from .validator import Diagnostic, validate

CATALOGUE_ENV_VAR = "FAIRMODEL_CATALOGUE"


class CliError(Exception):
    """IO/usage failure; maps to exit status 2."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _load_model(path: str) -> Model:
    return dsl.parse(_read_text(path), file=path)


def _load_catalogue(path: str | None) -> cat.Catalogue:
    path = path or os.environ.get(CATALOGUE_ENV_VAR)
    if path is None:
        return cat.builtin()
    return cat.load(_read_text(path), file=path)


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_diagnostics(diagnostics: list[Diagnostic]) -> None:
    for diagnostic in diagnostics:
        stream = sys.stderr if diagnostic.severity == "error" else sys.stdout
        print(diagnostic.render(), file=stream)


# -- subcommands -------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    status = 0
    for path in args.files:
        try:
            model = _load_model(path)
        except dsl.ParseFailure as exc:
            for error in exc.errors:
                print(error.render(), file=sys.stderr)
            status = max(status, 2)
            continue
        diagnostics = validate(model)
        _emit_diagnostics(diagnostics)
        if any(d.severity == "error" for d in diagnostics):
            status = max(status, 1)
        elif diagnostics and args.strict:
            status = max(status, 1)
    return status


def cmd_fmt(args: argparse.Namespace) -> int:
    model = _load_model(args.file)
    text = dsl.serialize(model)
    if args.write:
        Path(args.file).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_catalogue(args: argparse.Namespace) -> int:
    loaded = _load_catalogue(args.file)
    if args.action == "list":
        for name in sorted(loaded.cards):
            card = loaded.cards[name]
            categories = "/".join(card.categories())
            print(f"{name}\t{card.title}\t{categories}\t{','.join(card.dimensions)}")
        for note in loaded.notes:
            print(f"info: {note}")
        return 0
    if args.action == "show":
        card = loaded.cards.get(args.name)
        if card is None:
            raise CliError(f"unknown pattern '{args.name}'")
        print(f"pattern: {card.name}")
        print(f"title: {card.title}")
        print(f"category: {'/'.join(card.categories())}")
        print(f"dimensions: {', '.join(card.dimensions)}")
        print(f"summary: {card.summary}")
        print(f"applicability: {card.applicability}")
        print(f"content: {card.content}")
        if card.discussion:
            print(f"discussion: {card.discussion}")
        for example in card.examples:
            print(f"example: {example}")
        if card.related:
            print(f"related: {', '.join(card.related)}")
        print("archetype:")
        sys.stdout.write(dsl.serialize_fragment_body(card.archetype, "  "))
        return 0
    # search
    results = cat.search(loaded, category=args.category, dimension=args.dimension,
                         keyword=args.keyword)
    for card in results:
        print(f"{card.name}\t{card.title}")
    return 0


def _parse_bindings(pairs: list[str]) -> dict[str, str]:
    bindings: dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise CliError(f"--bind expects KEY=VALUE, got {pair!r}")
        bindings[key] = value
    return bindings


def cmd_apply(args: argparse.Namespace) -> int:
    model = _load_model(args.file)
    loaded = _load_catalogue(args.catalogue)
    attach = None
    if args.attach is not None:
        try:
            attach = LinkKind(args.attach)
        except ValueError:
            raise CliError(f"unknown link kind {args.attach!r}") from None
    selection = tuple(s for s in (args.select or "").split(",") if s) or None
    request = weave.WeaveRequest(
        name=args.pattern, anchor=args.anchor, prefix=args.prefix,
        bindings=_parse_bindings(args.bind), selection=selection, attach_kind=attach)
    woven = weave.apply(model, request, loaded)
    _write_output(dsl.serialize(woven), args.output)
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    model = _load_model(args.file)
    imported = weave.import_fragment(model, args.element, args.fragment)
    _write_output(dsl.serialize(imported), args.output)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    model = _load_model(args.file)
    try:
        text = render_diagram(model, args.format)
    except InvalidModel as exc:
        _emit_diagnostics(exc.diagnostics)
        return 1
    _write_output(text, args.output)
    return 0


def _format_fraction(value: Fraction | None) -> str:
    return "undefined" if value is None else str(value)


def cmd_report(args: argparse.Namespace) -> int:
    model = _load_model(args.file)
    loaded = _load_catalogue(args.catalogue)
    title = model.name
    rows: list[tuple[str, ...]]

    if args.kind == "obstacles":
        statuses = analysis.obstacle_report(model)
        rows = [(s.obstacle, s.state, s.strategy or "-",
                 ",".join(s.resolvers) or "-", ",".join(s.targets) or "-")
                for s in statuses]
        _print_table(("obstacle", "state", "strategy", "resolvers", "targets"),
                     rows, args.tsv)
        if args.figure:
            figures.save_figure(figures.obstacle_figure(statuses, title), args.figure)
    elif args.kind == "attribution":
        report = analysis.attribution_report(model)
        rows = ([(e, "system") for e in report.system]
                + [(e, "environment") for e in report.environment]
                + [(e, "unspecified") for e in report.unspecified])
        _print_table(("element", "attribution"), rows, args.tsv)
        print(f"# system_share\t{_format_fraction(report.system_share)}")
        if args.figure:
            figures.save_figure(figures.attribution_figure(report, title), args.figure)
    elif args.kind == "coverage":
        report = analysis.stage_coverage(model, loaded)
        rows = [(stage, "yes" if report.per_stage[stage] else "no",
                 ",".join(report.per_stage[stage]) or "-")
                for stage in cat.STAGES]
        _print_table(("stage", "covered", "patterns"), rows, args.tsv)
        print(f"# fraction\t{report.fraction}")
        if args.figure:
            figures.save_figure(figures.coverage_figure(report, title), args.figure)
    elif args.kind == "balance":
        counts = analysis.dimension_balance(model)
        rows = [(dim, str(counts[dim])) for dim in sorted(counts)]
        _print_table(("dimension", "values"), rows, args.tsv)
        if args.figure:
            figures.save_figure(figures.balance_figure(counts, title), args.figure)
    else:  # suggest
        suggestions = analysis.suggest(model, loaded)
        rows = [(s.element, s.pattern, s.reason) for s in suggestions]
        _print_table(("element", "pattern", "reason"), rows, args.tsv)
        if args.figure:
            figures.save_figure(figures.suggestion_figure(suggestions, title),
                                args.figure)
    return 0


def _print_table(header: tuple[str, ...], rows: list[tuple[str, ...]],
                 tsv: bool) -> None:
    if tsv:
        for row in rows:
            print("\t".join(row))
        return
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
              for i in range(len(header))]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in rows:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairmodel",
        description="Author, validate, enrich, analyse and render fairness "
                    "goal models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate model files")
    p.add_argument("files", nargs="+")
    p.add_argument("--strict", action="store_true",
                   help="warnings also yield exit status 1")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fmt", help="canonical formatting")
    p.add_argument("file")
    p.add_argument("--write", action="store_true", help="rewrite the file in place")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("catalogue", help="browse pattern catalogues")
    p.add_argument("action", choices=["list", "show", "search"])
    p.add_argument("name", nargs="?", help="pattern name (for 'show')")
    p.add_argument("--category")
    p.add_argument("--dimension")
    p.add_argument("--keyword")
    p.add_argument("--file", help="catalogue file (default: builtin, or "
                                  f"${CATALOGUE_ENV_VAR})")
    p.set_defaults(func=cmd_catalogue)

    p = sub.add_parser("apply", help="weave a pattern or fragment into a model")
    p.add_argument("file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--anchor", required=True)
    p.add_argument("--prefix", required=True)
    p.add_argument("--bind", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--select", help="comma-separated archetype element ids")
    p.add_argument("--attach", help="link kind for root-to-anchor attachment")
    p.add_argument("--catalogue", dest="catalogue", help="catalogue file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("import", help="point an element at a fragment")
    p.add_argument("file")
    p.add_argument("--element", required=True)
    p.add_argument("--fragment", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("render", help="emit diagram source")
    p.add_argument("file")
    p.add_argument("--format", required=True, choices=list(FORMATS))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("report", help="analysis reports")
    p.add_argument("file")
    p.add_argument("kind", choices=["obstacles", "attribution", "coverage",
                                    "balance", "suggest"])
    p.add_argument("--tsv", action="store_true",
                   help="tab-separated records instead of a table")
    p.add_argument("--figure", help="also write a summary chart (PNG) here")
    p.add_argument("--catalogue", dest="catalogue", help="catalogue file")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "catalogue" and args.action == "show" and args.name is None:
        parser.error("catalogue show requires a pattern name")
    try:
        return args.func(args)
    except dsl.ParseFailure as exc:
        for error in exc.errors:
            print(error.render(), file=sys.stderr)
        return 2
    except (CliError, cat.CatalogueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
