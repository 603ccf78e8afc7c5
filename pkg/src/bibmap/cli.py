"""Command-line front door for the analysis pipeline and the serve layer."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import IngestError
from .pipeline import (PipelineConfig, PipelineError, run_cluster, run_export,
                       run_ingest, run_interface, run_label, run_stats,
                       run_termmap, run_themes)

_CONFIG_FLAGS: list[tuple[str, type, str]] = [
    ("corpus", str, "path to the JSONL corpus file"),
    ("output", str, "artifact output directory"),
    ("taxonomy", str, "field taxonomy CSV (default: shipped taxonomy)"),
    ("year-min", int, "first year of the analysis window"),
    ("year-max", int, "last year of the analysis window"),
    ("census-year", int, "count citations up to this year (default: last corpus year + 1)"),
    ("cohort-counting", str, "whole or fractional cohort membership"),
    ("weighting", str, "citation edge weighting: unit or per-reference-normalized"),
    ("resolution", float, "clustering resolution (larger means smaller topics)"),
    ("min-cluster-size", int, "minimum topic size after repair"),
    ("max-passes", int, "clustering improvement passes"),
    ("seed", int, "random seed recorded in all artifacts"),
    ("selection-size", int, "number of terms selected into a map"),
    ("min-doc-frequency", int, "minimum documents per candidate term"),
    ("layout-iters", int, "layout descent iterations"),
    ("layout-starts", int, "layout random starts"),
    ("eps-threshold", float, "minimum EPS publication share"),
    ("hls-threshold", float, "minimum HLS citation share"),
    ("counting", str, "interface share counting: whole or fractional"),
    ("target-themes", int, "approximate number of algorithmic theme clusters"),
    ("merge-config", str, "JSON file with theme merge directives and labels"),
    ("emerging-growth-factor", float, "minimum growth multiple for emerging topics"),
    ("emerging-first-year-max", int, "maximum first-year count for emerging topics"),
    ("emerging-last-year-min", int, "minimum last-year count for emerging topics"),
    ("country", str, "country code for contribution statistics"),
    ("impact-baseline", float, "top-cited share defining the impact baseline"),
]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None,
                        help="JSON config file; explicit flags override it")
    for flag, ftype, help_text in _CONFIG_FLAGS:
        parser.add_argument(f"--{flag}", type=ftype, default=None, help=help_text)


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    overrides = {}
    for flag, _, _ in _CONFIG_FLAGS:
        key = flag.replace("-", "_")
        overrides[key] = getattr(args, key, None)
    if args.config:
        return PipelineConfig.from_file(args.config, overrides)
    missing = [k for k in ("corpus", "output") if overrides.get(k) is None]
    if missing:
        raise PipelineError(f"missing required option(s): {', '.join('--' + m for m in missing)}")
    return PipelineConfig.from_dict({}, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bibmap",
        description="Term maps, citation-based topic clustering, and interface analytics.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("ingest", "validate the corpus and build the ingest summary"),
        ("cluster", "cluster publications into topics"),
        ("interface", "score topics against the interface thresholds"),
        ("themes", "aggregate interface topics into themes"),
        ("label", "label every topic with characteristic terms"),
        ("stats", "emit growth, theme, and country statistics"),
        ("export", "dump the citation graph as an edge list"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_config_flags(p)

    p = sub.add_parser("termmap", help="build the term map of one field")
    p.add_argument("field", help="field code, e.g. 'clinical neurology'")
    _add_config_flags(p)

    p = sub.add_parser("serve", help="serve the curation HTTP API")
    _add_config_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--frontend", default=None, help="directory with the built UI")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            if args.output is None:
                raise PipelineError("missing required option: --output")
            import uvicorn

            from .serve import create_app
            frontend = args.frontend
            if frontend is None:
                default_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
                frontend = default_dist if (default_dist / "index.html").exists() else None
            app = create_app(args.output, frontend)
            uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
            return 0

        cfg = _build_config(args)
        if args.command == "ingest":
            store = run_ingest(cfg)
            print(f"ingested {len(store)} publications "
                  f"(census year {store.census_year}) into {cfg.output}")
        elif args.command == "cluster":
            clustering = run_cluster(cfg)
            n_topics = len(clustering.topic_ids())
            residual = len(clustering.residual)
            print(f"{n_topics} topics written to clustering.csv"
                  + (f" ({residual} residual publications)" if residual else ""))
        elif args.command == "termmap":
            run_termmap(cfg, args.field)
            print(f"term map artifacts written for field {args.field!r}")
        elif args.command == "interface":
            report = run_interface(cfg)
            share = report.interface_share
            print(f"{len(report.selected_ids)} interface topics selected"
                  + (f"; interface share {share:.1%}" if share is not None else ""))
        elif args.command == "themes":
            themes = run_themes(cfg)
            print(f"{len(themes.theme_ids())} themes written to themes.json")
        elif args.command == "label":
            labels = run_label(cfg)
            print(f"labels written for {len(labels)} topics")
        elif args.command == "stats":
            run_stats(cfg)
            print("statistics tables written")
        elif args.command == "export":
            run_export(cfg)
            print("citation graph dump written")
        return 0
    except (PipelineError, IngestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
