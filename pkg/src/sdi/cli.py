"""Operator command line: validate, ingest, harvest, search, and serve.

Exit codes: 0 success, 1 domain failure (invalid records, failed harvest
URLs), 2 I/O or usage errors. Empty search results are not a failure.

Configuration precedence: flags > environment (SDI_CATALOG_DIR, SDI_ADDR,
SDI_THESAURUS) > <catalog_dir>/config.json > built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .api import (
    ApiParamError,
    create_app,
    parse_bbox_param,
    render_json,
    search_envelope,
)
from .catalog import Catalog, InvariantViolation, SpatialRelation
from .harvest import HarvestInProgressError, HarvestJob, harvest, read_seed_file
from .metadata import (
    CanonicalParseError,
    CanonicalSchemaError,
    PROFILES,
    from_canonical,
    parse_instant,
    validate_record,
)
from .search import FACET_FIELDS, InvalidQueryError, SearchQuery, UnknownFieldError
from .thesaurus import Thesaurus, ThesaurusError, load_thesaurus

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_ADDR = "127.0.0.1:8080"


@dataclass
class CliConfig:
    catalog_dir: Path
    profile: str = "sdi-basic"
    thesaurus_path: str | None = None
    listen_addr: str = DEFAULT_ADDR
    ui_dir: str | None = None


def resolve_config(args: argparse.Namespace, environ=None) -> CliConfig:
    environ = os.environ if environ is None else environ
    catalog_dir = Path(
        getattr(args, "catalog_dir", None) or environ.get("SDI_CATALOG_DIR") or "catalog"
    )

    file_values = {}
    config_path = catalog_dir / "config.json"
    if config_path.exists():
        try:
            file_values = json.loads(config_path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"sdi: cannot read {config_path}: {exc}")
        if not isinstance(file_values, dict):
            raise SystemExit(f"sdi: {config_path} must contain a JSON object")

    def pick(flag_name: str, env_name: str, file_key: str, default):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        env = environ.get(env_name)
        if env is not None:
            return env
        if file_key in file_values:
            return file_values[file_key]
        return default

    return CliConfig(
        catalog_dir=catalog_dir,
        profile=pick("profile", "SDI_PROFILE", "profile", "sdi-basic"),
        thesaurus_path=pick("thesaurus", "SDI_THESAURUS", "thesaurus_path", None),
        listen_addr=pick("addr", "SDI_ADDR", "listen_addr", DEFAULT_ADDR),
        ui_dir=pick("ui_dir", "SDI_UI_DIR", "ui_dir", None),
    )


def _load_profile(config: CliConfig):
    profile = PROFILES.get(config.profile)
    if profile is None:
        raise SystemExit(f"sdi: unknown profile {config.profile!r} (known: {sorted(PROFILES)})")
    return profile


def _load_thesaurus(config: CliConfig) -> Thesaurus | None:
    if not config.thesaurus_path:
        return None
    try:
        return load_thesaurus(config.thesaurus_path)
    except OSError as exc:
        raise SystemExit(f"sdi: cannot read thesaurus: {exc}")
    except ThesaurusError as exc:
        raise SystemExit(f"sdi: bad thesaurus: {exc}")


def _parse_listen_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise SystemExit(f"sdi: listen address must be host:port, got {addr!r}")
    return host, int(port)


# -- commands ---------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    profile = _load_profile(config)
    worst = EXIT_OK
    for name in args.files:
        try:
            text = Path(name).read_text("utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            print(f"{name}: ERROR {exc}")
            worst = EXIT_USAGE
            continue
        try:
            record = from_canonical(text)
        except (CanonicalParseError, CanonicalSchemaError) as exc:
            print(f"{name}: ERROR {exc}")
            worst = EXIT_USAGE
            continue
        report = validate_record(record, profile)
        if report.valid:
            print(f"{name}: valid (completeness {report.completeness:.3f})")
        else:
            print(f"{name}: INVALID (completeness {report.completeness:.3f})")
            if report.missing_mandatory:
                print(f"  missing mandatory: {', '.join(report.missing_mandatory)}")
            if report.violations:
                for field, message in report.violations:
                    print(f"  violation: {field}: {message}")
            if worst == EXIT_OK:
                worst = EXIT_DOMAIN
        if report.missing_recommended:
            print(f"  missing recommended: {', '.join(report.missing_recommended)}")
    return worst


def cmd_ingest(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    profile = _load_profile(config)
    added = updated = rejected = 0
    with Catalog(config.catalog_dir) as catalog:
        for name in args.files:
            try:
                text = Path(name).read_text("utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                print(f"sdi: cannot read {name}: {exc}", file=sys.stderr)
                return EXIT_USAGE
            try:
                record = from_canonical(text)
            except (CanonicalParseError, CanonicalSchemaError) as exc:
                print(f"{name}: rejected: {exc}")
                rejected += 1
                continue
            report = validate_record(record, profile)
            if not report.valid:
                problems = list(report.missing_mandatory) + [f for f, _ in report.violations]
                print(f"{name}: rejected: {', '.join(problems)}")
                rejected += 1
                continue
            existed = catalog.get(record.id) is not None
            try:
                catalog.upsert(record)
            except InvariantViolation as exc:
                print(f"{name}: rejected: {exc}")
                rejected += 1
                continue
            if existed:
                updated += 1
            else:
                added += 1
    print(f"added={added} updated={updated} rejected={rejected}")
    return EXIT_DOMAIN if rejected else EXIT_OK


def cmd_harvest(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    try:
        seeds = read_seed_file(args.seeds)
    except OSError as exc:
        print(f"sdi: cannot read seed file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not seeds:
        print("sdi: seed file lists no URLs", file=sys.stderr)
        return EXIT_USAGE
    job = HarvestJob(
        seed_urls=tuple(seeds),
        publisher_label=args.publisher,
        max_concurrent_fetches=args.max_concurrent,
        per_host_delay=args.delay,
        timeout=args.timeout,
    )
    with Catalog(config.catalog_dir) as catalog:
        try:
            report = harvest(catalog, job)
        except HarvestInProgressError as exc:
            print(f"sdi: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
    print(f"started {report.to_payload()['started']} finished {report.to_payload()['finished']}")
    for url, outcome in report.outcomes.items():
        if outcome.status == "ok":
            line = f"ok added={outcome.records_added} updated={outcome.records_updated}"
            if outcome.detail:
                line += f" ({outcome.detail})"
        else:
            line = f"{outcome.status} {outcome.detail}"
        print(f"{url}: {line}")
    return EXIT_OK if report.ok() else EXIT_DOMAIN


def _query_from_args(args: argparse.Namespace) -> SearchQuery:
    spatial = None
    if args.bbox:
        box = parse_bbox_param(args.bbox)
        spatial = (box, SpatialRelation(args.relation))
    temporal = None
    if (args.time_start is None) != (args.time_end is None):
        raise ApiParamError("--time-start and --time-end must be given together")
    if args.time_start and args.time_end:
        temporal = (parse_instant(args.time_start), parse_instant(args.time_end))
    facet_filters = []
    for raw in args.facet or []:
        field, sep, value = raw.partition("=")
        if not sep or not field:
            raise ApiParamError(f"--facet needs FIELD=VALUE, got {raw!r}")
        facet_filters.append((field, value))
    return SearchQuery(
        text=args.query or "",
        mode=args.mode,
        spatial=spatial,
        temporal=temporal,
        facet_filters=tuple(facet_filters),
        page=args.page,
        page_size=args.page_size,
    )


def cmd_search(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    thesaurus = _load_thesaurus(config)
    try:
        query = _query_from_args(args)
    except (ApiParamError, ValueError) as exc:
        print(f"sdi: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with Catalog(config.catalog_dir) as catalog:
        try:
            envelope = search_envelope(catalog, query, thesaurus)
        except (InvalidQueryError, UnknownFieldError) as exc:
            print(f"sdi: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if args.json:
        print(render_json(envelope))
        return EXIT_OK
    print(f"total {envelope['total']} (page {envelope['page']}, size {envelope['page_size']})")
    for item in envelope["results"]:
        bbox = item["bbox"]
        extent = (
            f"{bbox['west']},{bbox['south']},{bbox['east']},{bbox['north']}" if bbox else "-"
        )
        print(f"{item['id']} | {item['score']:.6f} | {item['title']} | {extent}")
    for field_name, values in envelope["facets"].items():
        if values:
            counts = ", ".join(f"{v['value']}={v['count']}" for v in values)
            print(f"facet {field_name}: {counts}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = resolve_config(args)
    profile = _load_profile(config)
    thesaurus = _load_thesaurus(config)
    host, port = _parse_listen_addr(config.listen_addr)
    ui_dir = config.ui_dir if config.ui_dir and Path(config.ui_dir).is_dir() else None
    with Catalog(config.catalog_dir) as catalog:
        app = create_app(catalog, thesaurus=thesaurus, profile=profile, ui_dir=ui_dir)
        uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdi", description="Geospatial metadata catalog tools")
    parser.add_argument("--catalog-dir", dest="catalog_dir", help="catalog directory")
    parser.add_argument("--profile", dest="profile", help="metadata profile name")
    parser.add_argument("--thesaurus", dest="thesaurus", help="thesaurus file for semantic search")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate canonical record files")
    p.add_argument("files", nargs="+")
    # SUPPRESS keeps the subcommand flag from clobbering the global one.
    p.add_argument("--profile", dest="profile", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ingest", help="validate and upsert canonical record files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("harvest", help="harvest capabilities endpoints from a seed file")
    p.add_argument("--seeds", required=True)
    p.add_argument("--publisher", required=True)
    p.add_argument("--max-concurrent", type=int, default=4)
    p.add_argument("--delay", type=float, default=0.0, help="per-host delay in seconds")
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("search", help="query the catalog")
    p.add_argument("query", nargs="?", default="")
    p.add_argument("--mode", choices=("keyword", "semantic"), default="keyword")
    p.add_argument("--bbox", help="west,south,east,north in degrees")
    p.add_argument("--relation", choices=("intersects", "within"), default="intersects")
    p.add_argument("--time-start")
    p.add_argument("--time-end")
    p.add_argument("--facet", action="append", metavar="FIELD=VALUE",
                   help=f"filter on one of {FACET_FIELDS}")
    p.add_argument("--page", type=int, default=0)
    p.add_argument("--page-size", type=int, default=10)
    p.add_argument("--json", action="store_true", help="print the portal /search envelope")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="run the portal HTTP API")
    p.add_argument("--addr", help="host:port to listen on")
    p.add_argument("--ui-dir", dest="ui_dir", help="static frontend directory to mount at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; our own aborts carry a message.
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_USAGE
        return exc.code if isinstance(exc.code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
