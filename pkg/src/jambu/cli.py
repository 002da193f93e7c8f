"""Command-line entry point tying the pipeline together.

Exit codes: 0 success, 1 validation or data failure, 2 usage error.
Stdout carries data; diagnostics go to stderr. ``stats``, ``normalize``
and ``reflex eval`` take ``--json`` for machine-readable output.
"""

from __future__ import annotations

import csv
import io
import json
import socket
import sys
from pathlib import Path

import click

from . import cldf, entries, ortho, reflex
from .errors import EntryParseError, JambuError
from .model import Database, Language, Source, family_stats
from .model import validate as validate_db


def _load(directory: str) -> Database:
    try:
        return cldf.load_wordlist(directory)
    except JambuError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Cognate database tools: validate, inspect, parse, normalize, serve."""


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="emit the report as JSON")
def validate(directory: str, as_json: bool):
    """Check referential integrity of a dataset directory."""
    db = _load(directory)
    report = validate_db(db)
    if as_json:
        click.echo(
            json.dumps(
                {"violations": [{"kind": v.kind, "id": v.offending_id, "message": v.message} for v in report]},
                ensure_ascii=False,
            )
        )
    elif not report:
        click.echo("0 violations")
    else:
        for v in report:
            click.echo(f"{v.kind}\t{v.offending_id}\t{v.message}")
        click.echo(f"{len(report)} violation{'s' if len(report) != 1 else ''}", err=True)
    sys.exit(1 if report else 0)


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="emit the table as JSON")
def stats(directory: str, as_json: bool):
    """Per-family counts of languages, cognate sets and lemmata."""
    db = _load(directory)
    rows, total = family_stats(db)
    if as_json:
        payload = {
            "families": [
                {"family": r.family, "languages": r.languages, "cognatesets": r.cognatesets, "lemmata": r.lemmata}
                for r in rows
            ],
            "total": {
                "family": "Total",
                "languages": total.languages,
                "cognatesets": total.cognatesets,
                "lemmata": total.lemmata,
            },
        }
        click.echo(json.dumps(payload, ensure_ascii=False))
        return
    width = max([len("Family"), *(len(r.family) for r in rows)]) + 2
    click.echo(f"{'Family':<{width}}{'Languages':>10}  {'Cognate sets':>12}  {'Lemmata':>10}")
    for r in rows:
        click.echo(f"{r.family:<{width}}{r.languages:>10,}  {r.cognatesets:>12,}  {r.lemmata:>10,}")
    click.echo(f"{'Total':<{width}}{total.languages:>10,}  {total.cognatesets:>12,}  {total.lemmata:>10,}")


@main.command("parse-entries")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--abbrev", required=True, type=click.Path(exists=True, dir_okay=False), help="abbrev,language_id CSV")
@click.option("--ignore", type=click.Path(exists=True, dir_okay=False), help="one ignored siglum per line")
@click.option("--ancestor", required=True, help="language id for headword forms")
@click.option("--family", default="Indo-Aryan", show_default=True, help="clade root for synthesized language rows")
@click.option("--source", "source_bibkey", default="", help="bibkey attached to emitted forms")
@click.option("-o", "--output", required=True, type=click.Path(file_okay=False), help="output dataset directory")
def parse_entries(file, abbrev, ignore, ancestor, family, source_bibkey, output):
    """Parse blank-line-separated entries into a dataset directory."""
    table = entries.load_abbreviations(abbrev, ignore)
    blocks = entries.split_entry_blocks(Path(file).read_text(encoding="utf-8"))
    cognatesets = []
    forms = []
    seen_sets: set[str] = set()
    failures: list[str] = []
    for block in blocks:
        try:
            entry = entries.parse_entry(block, table)
            if entry.entry_number in seen_sets:
                raise EntryParseError("duplicate-entry", f"entry number {entry.entry_number} repeated")
        except EntryParseError as exc:
            head = block.split(None, 1)[0] if block.split() else "?"
            failures.append(f"entry {head}: [{exc.kind}] {exc}")
            continue
        cs, entry_forms = entries.entry_to_records(entry, ancestor, source_bibkey=source_bibkey)
        seen_sets.add(cs.id)
        cognatesets.append(cs)
        forms.extend(entry_forms)

    language_ids = {ancestor} | {f.language_id for f in forms}
    languages = [Language(id=lid, name=lid, clade=(family,)) for lid in sorted(language_ids)]
    sources = []
    if source_bibkey:
        sources.append(Source(bibkey=source_bibkey, entry_type="misc", fields=(("title", source_bibkey),)))
    db = Database(forms=forms, cognatesets=cognatesets, languages=languages, sources=sources)
    cldf.write_wordlist(db, output)
    click.echo(f"wrote {len(cognatesets)} sets, {len(forms)} forms to {output}", err=True)
    for failure in failures:
        click.echo(f"failed: {failure}", err=True)
    sys.exit(1 if failures else 0)


@main.command()
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--col", required=True, help="name of the CSV column to normalize")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="write the normalized CSV copy here")
@click.option("--report", "with_report", is_flag=True, help="print a conversion report")
@click.option("--json", "as_json", is_flag=True, help="print the report as JSON")
def normalize(profile_path, input_path, col, output, with_report, as_json):
    """Normalize one column of a CSV file through an orthography profile."""
    try:
        profile = ortho.load_profile(profile_path)
    except JambuError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    with open(input_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise click.UsageError(f"{input_path}: empty file")
        if col not in header:
            raise click.UsageError(f"{input_path}: no column named {col!r}")
        idx = header.index(col)
        rows = list(reader)

    values = [row[idx] if idx < len(row) else "" for row in rows]
    report = ortho.conversion_report(profile, values)
    if output:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if idx < len(row):
                row = list(row)
                row[idx], _ = ortho.normalize(profile, row[idx])
            writer.writerow(row)
        Path(output).write_text(buf.getvalue(), encoding="utf-8")

    if as_json:
        click.echo(
            json.dumps(
                {
                    "converted": report.converted,
                    "failed": report.failed,
                    "rate": report.rate,
                    "histogram": {ch: count for ch, count in report.histogram},
                },
                ensure_ascii=False,
            )
        )
    elif with_report:
        click.echo(f"converted {report.converted}/{report.total} ({report.rate * 100:.1f}%)")
        for ch, count in report.histogram:
            click.echo(f"  {ch!r}: {count}")


@main.group("reflex")
def reflex_group():
    """Reflex prediction dataset preparation and scoring."""


@reflex_group.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ancestor", required=True, help="ancestor language id")
@click.option("--clade", required=True, help="descendant clade prefix, ';'-separated")
@click.option("--fraction", default=0.8, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--unit", default="form", show_default=True, type=click.Choice(["form", "cognateset"]))
@click.option("-o", "--output", required=True, type=click.Path(file_okay=False))
@click.option("--json", "as_json", is_flag=True)
def prep(directory, profile_path, ancestor, clade, fraction, seed, unit, output, as_json):
    """Extract examples, split, and write train.tsv / test.tsv."""
    db = _load(directory)
    try:
        profile = ortho.load_profile(profile_path)
        extraction = reflex.extract_examples(db, ancestor, clade, profile)
        config = reflex.SplitConfig(train_fraction=fraction, seed=seed, unit=unit)
        train, test = reflex.split(extraction.examples, config)
    except JambuError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    reflex.write_examples(out / "train.tsv", train)
    reflex.write_examples(out / "test.tsv", test)
    summary = {
        "examples": len(extraction.examples),
        "skipped": len(extraction.skipped),
        "train": len(train),
        "test": len(test),
    }
    if as_json:
        click.echo(json.dumps(summary))
    else:
        click.echo(
            f"{summary['examples']} examples ({summary['skipped']} skipped), "
            f"train {summary['train']} / test {summary['test']}",
            err=True,
        )


@reflex_group.command("eval")
@click.option("--test", "test_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--per-language", "per_language", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
def eval_cmd(test_path, pred_path, per_language, as_json):
    """Score a prediction file against the held-out examples."""
    try:
        examples = reflex.read_examples(test_path)
        predictions = reflex.read_predictions(pred_path)
        if len(examples) != len(predictions):
            raise click.UsageError(
                f"line count mismatch: {test_path} has {len(examples)}, {pred_path} has {len(predictions)}"
            )
        for ex, (cs_id, tag, _, _) in zip(examples, predictions):
            if (ex.cognateset_id, ex.language_tag) != (cs_id, tag):
                raise click.UsageError(
                    f"row mismatch: test ({ex.cognateset_id}, {ex.language_tag}) vs pred ({cs_id}, {tag})"
                )
        report = reflex.evaluate_predictions(examples, [p[3] for p in predictions])
    except (reflex.ExchangeError, JambuError) as exc:
        raise click.UsageError(str(exc))
    if as_json:
        click.echo(
            json.dumps(
                {
                    "bleu": report.bleu,
                    "ter": report.ter,
                    "examples": report.example_count,
                    "per_language": {
                        tag: {"bleu": s.bleu, "ter": s.ter, "count": s.count}
                        for tag, s in report.per_language.items()
                    },
                }
            )
        )
        return
    click.echo(f"BLEU {report.bleu:.2f}")
    click.echo(f"TER {report.ter:.2f}")
    if per_language:
        for tag, s in report.per_language.items():
            click.echo(f"{tag}\tBLEU {s.bleu:.2f}\tTER {s.ter:.2f}\t({s.count})")


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=8080, show_default=True, type=int, envvar="JAMBU_PORT")
@click.option("--host", default="127.0.0.1", show_default=True, envvar="JAMBU_HOST")
@click.option("--cors", "cors_origin", default="", envvar="JAMBU_CORS", help="allowed CORS origin for the UI")
def serve(directory, port, host, cors_origin):
    """Run the query service until interrupted."""
    import uvicorn

    from .server import create_app

    db = _load(directory)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        click.echo(f"error: cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(1)
    finally:
        probe.close()
    app = create_app(db, cors_origins=(cors_origin,) if cors_origin else ())
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
