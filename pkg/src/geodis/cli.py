"""Command-line entry point: ``geodis geocode|evaluate|stats|cache``."""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from geodis.cache import JsonCache
from geodis.config import FatalConfig, load_config

log = logging.getLogger("geodis")

EXIT_FATAL = 2
EXIT_IO = 3
CACHE_NAMESPACES = ("parse", "nominatim", "wikidata")


def _setup_logging(verbose: int) -> None:
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _fail(msg: str, code: int) -> None:
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


@click.group()
@click.option("-v", "--verbose", count=True, help="More log output on stderr (-v, -vv).")
def main(verbose: int) -> None:
    """Geocode disaster location strings and evaluate the results."""
    _setup_logging(verbose)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False),
              help="EM-DAT style CSV (DisNo., Location, Country).")
@click.option("--gadm", "gadm_path", type=click.Path(), help="GADM GeoPackage or GeoJSON directory.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="TOML config file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--offline", is_flag=True, default=None,
              help="Fallback parser; remote backends answer from cache only.")
@click.option("--countries", default=None, help="Comma-separated country filter (names or ISO3).")
def geocode(input_path, gadm_path, config_path, out_dir, offline, countries) -> None:
    """Run the full pipeline over a record file."""
    from geodis.export import IoError, export
    from geodis.pipeline import run_pipeline
    from geodis.records import IngestError, ingest_emdat_csv

    country_list = [c.strip() for c in countries.split(",") if c.strip()] if countries else None
    try:
        cfg = load_config(config_path, gadm_path=gadm_path, offline=offline,
                          countries=country_list).validate()
    except FatalConfig as exc:
        _fail(str(exc), EXIT_FATAL)
    try:
        ingest = ingest_emdat_csv(input_path)
    except OSError as exc:
        _fail(f"cannot read {input_path}: {exc}", EXIT_IO)
    except IngestError as exc:
        _fail(f"{input_path}: {exc}", EXIT_FATAL)
    records = ingest.records
    if cfg.countries:
        from geodis.gadm.countries import CountryTable, UnknownCountry
        table = CountryTable.default(cfg.country_aliases)
        try:
            wanted = {table.resolve(c) for c in cfg.countries}
        except UnknownCountry as exc:
            _fail(f"unknown country in filter: {exc}", EXIT_FATAL)

        def keep(rec) -> bool:
            try:
                return table.resolve(rec.country) in wanted
            except UnknownCountry:
                return False
        records = [r for r in records if keep(r)]
    try:
        events = run_pipeline(records, cfg)
    except FatalConfig as exc:
        _fail(str(exc), EXIT_FATAL)
    try:
        export(events, out_dir)
        diag_path = Path(out_dir) / "diagnostics.jsonl"
        with open(diag_path, "w", encoding="utf-8") as fh:
            for ev in events:
                fh.write(json.dumps({"dis_no": ev.dis_no, "coverage": ev.coverage_flag,
                                     "diagnostics": ev.diagnostics}, sort_keys=True) + "\n")
    except (IoError, OSError) as exc:
        _fail(str(exc), EXIT_IO)
    covered = sum(1 for e in events if e.coverage_flag)
    n_loc = sum(len(e.locations) for e in events)
    click.echo(f"{len(events)} records ({ingest.skipped_empty} skipped for empty Location), "
               f"{covered} with at least one location, {n_loc} locations -> {out_dir}")


@main.command()
@click.option("--candidate", required=True, type=click.Path(dir_okay=False))
@click.option("--benchmark", required=True, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", required=True,
              type=click.Choice(["gaul_archive", "gdis", "llmgeodis"]))
@click.option("--out", "out_dir", default="evaluation", type=click.Path(file_okay=False))
@click.option("--gadm", "gadm_path", type=click.Path(),
              help="GADM data for coarsening candidates to --coarsen-to.")
@click.option("--coarsen-to", type=click.IntRange(1, 3), default=None)
def evaluate(candidate, benchmark, fmt, out_dir, gadm_path, coarsen_to) -> None:
    """Compare a geocoded output with a benchmark dataset."""
    from geodis import evaluation as ev
    from geodis.gadm.index import GadmError, load_gadm

    index = None
    if coarsen_to is not None:
        if not gadm_path:
            _fail("--coarsen-to needs --gadm", EXIT_FATAL)
        try:
            index = load_gadm(gadm_path)
        except GadmError as exc:
            _fail(str(exc), EXIT_FATAL)
    try:
        result = ev.evaluate(candidate, benchmark, fmt, out_dir, gadm=index, coarsen_to=coarsen_to)
    except ev.EmptyJoin as exc:
        _fail(str(exc), EXIT_FATAL)
    except ev.FormatError as exc:
        _fail(str(exc), EXIT_IO)
    except OSError as exc:
        _fail(str(exc), EXIT_IO)
    fj = result["footprint_jaccard"]
    click.echo(f"{result['n_shared_events']} shared events; footprint Jaccard median "
               f"{fj['median']}, mean {fj['mean']}; results in {out_dir}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False),
              help="locations.geojson written by `geocode`.")
@click.option("--out", "out_dir", default="stats", type=click.Path(file_okay=False))
def stats(input_path, out_dir) -> None:
    """Aggregate tables over a geocoded output."""
    from geodis.export import EmptyReport, IoError, read_geojson, stats_report

    try:
        report = stats_report(read_geojson(input_path))
        paths = report.write(out_dir)
    except IoError as exc:
        _fail(str(exc), EXIT_IO)
    except EmptyReport as exc:
        _fail(str(exc), EXIT_FATAL)
    for row in report.admin_level_shares:
        click.echo(f"Admin{row['admin_level']}: {row['share_pct']:.2f}% ({row['count']})")
    click.echo(f"wrote {len(paths)} tables to {out_dir}")


@main.group()
def cache() -> None:
    """Inspect or clear the response caches."""


def _cache_dir(config_path, cache_dir) -> Path:
    try:
        cfg = load_config(config_path, cache_dir=cache_dir)
    except FatalConfig as exc:
        _fail(str(exc), EXIT_FATAL)
    return cfg.cache_dir


@cache.command("inspect")
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
@click.option("--cache-dir", type=click.Path(file_okay=False))
def cache_inspect(config_path, cache_dir) -> None:
    root = _cache_dir(config_path, cache_dir)
    for ns in CACHE_NAMESPACES:
        c = JsonCache(root, ns)
        click.echo(f"{ns}: {len(c)} entries, {c.size_bytes()} bytes")


@cache.command("clear")
@click.option("--config", "config_path", type=click.Path(dir_okay=False))
@click.option("--cache-dir", type=click.Path(file_okay=False))
@click.option("--namespace", type=click.Choice(CACHE_NAMESPACES), multiple=True)
@click.option("--yes", is_flag=True, help="Do not ask for confirmation.")
def cache_clear(config_path, cache_dir, namespace, yes) -> None:
    root = _cache_dir(config_path, cache_dir)
    names = namespace or CACHE_NAMESPACES
    if not yes:
        click.confirm(f"Clear {', '.join(names)} under {root}?", abort=True)
    for ns in names:
        click.echo(f"{ns}: removed {JsonCache(root, ns).clear()} entries")


if __name__ == "__main__":  # pragma: no cover
    main()
