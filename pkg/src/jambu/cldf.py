"""Load and write the CLDF-style wordlist directory layout.

A dataset directory holds ``Wordlist-metadata.json`` plus four CSV tables
(forms, parameters, cognates, languages) and ``sources.bib``. The metadata
file maps each table's columns onto record roles, so snapshots with
different column names load without code changes. Writing sorts rows by id
and uses a fixed CSV dialect, so two writes of the same database are
byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LoadError
from .model import CognateSet, Database, Form, Language, Source, SourceRef

__all__ = [
    "TableSpec",
    "WordlistMetadata",
    "DEFAULT_METADATA",
    "METADATA_FILENAME",
    "load_wordlist",
    "write_wordlist",
    "parse_bibtex",
    "format_bibtex",
]

METADATA_FILENAME = "Wordlist-metadata.json"

FORM_ROLES = (
    "form-id",
    "language-id",
    "cognateset-id",
    "normalized-form",
    "gloss",
    "native",
    "ipa",
    "original",
    "subset-id",
    "notes",
    "source-refs",
)
PARAMETER_ROLES = ("cognateset-id", "headword", "description")
COGNATE_ROLES = ("cognateset-id", "notes")
LANGUAGE_ROLES = ("language-id", "language-name", "clade", "latitude", "longitude")

# role -> Form/CognateSet/Language attribute, for the simple string fields
_FORM_ATTR = {
    "form-id": "id",
    "language-id": "language_id",
    "cognateset-id": "cognateset_id",
    "normalized-form": "form",
    "gloss": "gloss",
    "native": "native",
    "ipa": "ipa",
    "original": "original",
    "subset-id": "subset_id",
    "notes": "notes",
}


@dataclass(frozen=True)
class TableSpec:
    kind: str                      # forms | parameters | cognates | languages
    file: str
    columns: tuple[tuple[str, str], ...]   # (column name, role), in file order

    def role_to_column(self) -> dict[str, str]:
        return {role: col for col, role in self.columns}


@dataclass(frozen=True)
class WordlistMetadata:
    tables: tuple[TableSpec, ...]
    separator: str = ","
    clade_separator: str = ";"
    source_separator: str = ";"

    def table(self, kind: str) -> TableSpec:
        for t in self.tables:
            if t.kind == kind:
                return t
        raise LoadError("malformed-metadata", f"metadata defines no {kind!r} table")

    def check(self) -> None:
        """Every required role must be mapped exactly once in its table."""
        required = {
            "forms": ("form-id", "language-id", "cognateset-id", "normalized-form"),
            "parameters": ("cognateset-id", "headword"),
            "cognates": ("cognateset-id",),
            "languages": ("language-id", "language-name"),
        }
        kinds = [t.kind for t in self.tables]
        for kind in required:
            if kinds.count(kind) != 1:
                raise LoadError("malformed-metadata", f"metadata must define exactly one {kind!r} table")
        for kind, roles in required.items():
            spec = self.table(kind)
            mapped = [role for _, role in spec.columns]
            for role in roles:
                if mapped.count(role) != 1:
                    raise LoadError(
                        "malformed-metadata",
                        f"table {spec.file!r} must map role {role!r} exactly once",
                    )


DEFAULT_METADATA = WordlistMetadata(
    tables=(
        TableSpec(
            kind="forms",
            file="forms.csv",
            columns=(
                ("ID", "form-id"),
                ("Language_ID", "language-id"),
                ("Parameter_ID", "cognateset-id"),
                ("Form", "normalized-form"),
                ("Gloss", "gloss"),
                ("Native", "native"),
                ("IPA", "ipa"),
                ("Original", "original"),
                ("Subset_ID", "subset-id"),
                ("Notes", "notes"),
                ("Source", "source-refs"),
            ),
        ),
        TableSpec(
            kind="parameters",
            file="parameters.csv",
            columns=(("ID", "cognateset-id"), ("Name", "headword"), ("Description", "description")),
        ),
        TableSpec(
            kind="cognates",
            file="cognates.csv",
            columns=(("Cognateset_ID", "cognateset-id"), ("Notes", "notes")),
        ),
        TableSpec(
            kind="languages",
            file="languages.csv",
            columns=(
                ("ID", "language-id"),
                ("Name", "language-name"),
                ("Clade", "clade"),
                ("Latitude", "latitude"),
                ("Longitude", "longitude"),
            ),
        ),
    ),
)


def metadata_to_json(meta: WordlistMetadata) -> dict:
    return {
        "separator": meta.separator,
        "cladeSeparator": meta.clade_separator,
        "sourceSeparator": meta.source_separator,
        "tables": [
            {"kind": t.kind, "file": t.file, "columns": [[c, r] for c, r in t.columns]}
            for t in meta.tables
        ],
    }


def metadata_from_json(data: dict, name: str = METADATA_FILENAME) -> WordlistMetadata:
    try:
        tables = tuple(
            TableSpec(
                kind=t["kind"],
                file=t["file"],
                columns=tuple((c, r) for c, r in t["columns"]),
            )
            for t in data["tables"]
        )
        meta = WordlistMetadata(
            tables=tables,
            separator=data.get("separator", ","),
            clade_separator=data.get("cladeSeparator", ";"),
            source_separator=data.get("sourceSeparator", ";"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise LoadError("malformed-metadata", f"{name}: {exc!r}") from exc
    meta.check()
    return meta


def _read_rows(path: Path, spec: TableSpec, separator: str) -> tuple[list[str], list[dict[str, str]], list[list[tuple[str, str]]]]:
    """Read one CSV table.

    Returns the header, one role->value dict per row, and the per-row bag
    of unknown columns (preserved for round-tripping).
    """
    col_role = dict(spec.columns)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=separator)
        try:
            header = next(reader)
        except StopIteration:
            raise LoadError("csv-parse-error", f"{path.name}:1: missing header row") from None
        known = [(i, col_role[c]) for i, c in enumerate(header) if c in col_role]
        unknown = [(i, c) for i, c in enumerate(header) if c not in col_role]
        width = len(header)
        rows: list[dict[str, str]] = []
        extras: list[list[tuple[str, str]]] = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != width:
                raise LoadError(
                    "csv-parse-error",
                    f"{path.name}:{lineno}: expected {width} columns, got {len(raw)}",
                )
            rows.append({role: raw[i] for i, role in known})
            extras.append([(c, raw[i]) for i, c in unknown])
    return header, rows, extras


def _require(path: Path) -> Path:
    if not path.is_file():
        raise LoadError("missing-file", f"missing required file: {path.name}")
    return path


def _parse_coord(value: str, path_name: str, lineno: int, column: str) -> float | None:
    value = value.strip()
    if not value:
        return None
    try:
        return float(value)
    except ValueError:
        raise LoadError(
            "csv-parse-error", f"{path_name}:{lineno}: column {column!r}: not a number: {value!r}"
        ) from None


def load_wordlist(directory: str | Path) -> Database:
    """Load a dataset directory into an in-memory :class:`Database`.

    Row counts are preserved: every CSV row becomes exactly one record.
    Duplicate ids within a table are an error here (lenient handling is
    the validator's job for hand-built databases, not the loader's).
    """
    directory = Path(directory)
    meta_path = _require(directory / METADATA_FILENAME)
    try:
        meta = metadata_from_json(json.loads(meta_path.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise LoadError("malformed-metadata", f"{METADATA_FILENAME}: {exc}") from exc

    for kind in ("forms", "parameters", "cognates", "languages"):
        _require(directory / meta.table(kind).file)
    bib_path = _require(directory / "sources.bib")

    def check_dup(ids: list[str], file: str) -> None:
        seen: set[str] = set()
        for i in ids:
            if i in seen:
                raise LoadError("duplicate-id", f"{file}: duplicate id {i!r}")
            seen.add(i)

    # languages
    spec = meta.table("languages")
    path = directory / spec.file
    _, rows, extras = _read_rows(path, spec, meta.separator)
    languages = []
    for lineno, (row, extra) in enumerate(zip(rows, extras), start=2):
        clade = tuple(
            part.strip() for part in row.get("clade", "").split(meta.clade_separator) if part.strip()
        )
        languages.append(
            Language(
                id=row.get("language-id", ""),
                name=row.get("language-name", ""),
                clade=clade,
                latitude=_parse_coord(row.get("latitude", ""), spec.file, lineno, "latitude"),
                longitude=_parse_coord(row.get("longitude", ""), spec.file, lineno, "longitude"),
                extra=tuple(extra),
            )
        )
    check_dup([l.id for l in languages], spec.file)

    # cognate sets: parameters carry headword/description, cognates carry notes
    spec = meta.table("parameters")
    _, rows, extras = _read_rows(directory / spec.file, spec, meta.separator)
    headwords: dict[str, tuple[str, str, tuple[tuple[str, str], ...]]] = {}
    param_order: list[str] = []
    for row, extra in zip(rows, extras):
        cs_id = row.get("cognateset-id", "")
        if cs_id in headwords:
            raise LoadError("duplicate-id", f"{spec.file}: duplicate id {cs_id!r}")
        headwords[cs_id] = (row.get("headword", ""), row.get("description", ""), tuple(extra))
        param_order.append(cs_id)

    spec = meta.table("cognates")
    _, rows, extras = _read_rows(directory / spec.file, spec, meta.separator)
    notes: dict[str, tuple[str, tuple[tuple[str, str], ...]]] = {}
    notes_order: list[str] = []
    for row, extra in zip(rows, extras):
        cs_id = row.get("cognateset-id", "")
        if cs_id in notes:
            raise LoadError("duplicate-id", f"{spec.file}: duplicate id {cs_id!r}")
        notes[cs_id] = (row.get("notes", ""), tuple(extra))
        notes_order.append(cs_id)

    cognatesets = []
    for cs_id in param_order + [i for i in notes_order if i not in headwords]:
        headword, description, p_extra = headwords.get(cs_id, ("", "", ()))
        note, n_extra = notes.get(cs_id, ("", ()))
        cognatesets.append(
            CognateSet(
                id=cs_id,
                headword=headword,
                description=description,
                notes=note,
                extra=p_extra + n_extra,
            )
        )

    # forms
    spec = meta.table("forms")
    _, rows, extras = _read_rows(directory / spec.file, spec, meta.separator)
    forms = []
    refs_cache: dict[str, tuple[SourceRef, ...]] = {}
    for row, extra in zip(rows, extras):
        refs_text = row.get("source-refs", "")
        refs = refs_cache.get(refs_text)
        if refs is None:
            refs = tuple(
                SourceRef.parse(part)
                for part in refs_text.split(meta.source_separator)
                if part.strip()
            )
            refs_cache[refs_text] = refs
        forms.append(
            Form(
                id=row.get("form-id", ""),
                language_id=row.get("language-id", ""),
                cognateset_id=row.get("cognateset-id", ""),
                form=row.get("normalized-form", ""),
                gloss=row.get("gloss", ""),
                native=row.get("native", ""),
                ipa=row.get("ipa", ""),
                original=row.get("original", ""),
                subset_id=row.get("subset-id", ""),
                notes=row.get("notes", ""),
                source_refs=refs,
                extra=tuple(extra),
            )
        )
    check_dup([f.id for f in forms], spec.file)

    sources, _warnings = parse_bibtex(bib_path.read_text(encoding="utf-8"))
    check_dup([s.bibkey for s in sources], "sources.bib")

    return Database(forms=forms, cognatesets=cognatesets, languages=languages, sources=sources)


def _format_coord(value: float | None) -> str:
    return "" if value is None else repr(value)


def write_wordlist(db: Database, directory: str | Path, metadata: WordlistMetadata = DEFAULT_METADATA) -> None:
    """Write ``db`` as a dataset directory; output is byte-stable.

    Rows are sorted by id, unknown-column bags are re-emitted as extra
    columns, and the same database always produces identical bytes.
    """
    metadata.check()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    (directory / METADATA_FILENAME).write_text(
        json.dumps(metadata_to_json(metadata), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    def write_table(kind: str, records, role_value, extra_of) -> None:
        spec = metadata.table(kind)
        extra_cols = sorted({k for r in records for k, _ in extra_of(r)})
        header = [c for c, _ in spec.columns] + extra_cols
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=metadata.separator, lineterminator="\n")
        writer.writerow(header)
        for rec in records:
            row = [role_value(rec, role) for _, role in spec.columns]
            bag = dict(extra_of(rec))
            row += [bag.get(c, "") for c in extra_cols]
            writer.writerow(row)
        (directory / spec.file).write_text(buf.getvalue(), encoding="utf-8")

    def form_value(f: Form, role: str) -> str:
        if role == "source-refs":
            return metadata.source_separator.join(str(r) for r in f.source_refs)
        return getattr(f, _FORM_ATTR[role], "") if role in _FORM_ATTR else ""

    def param_value(c: CognateSet, role: str) -> str:
        return {"cognateset-id": c.id, "headword": c.headword, "description": c.description}.get(role, "")

    def cognate_value(c: CognateSet, role: str) -> str:
        return {"cognateset-id": c.id, "notes": c.notes}.get(role, "")

    def language_value(l: Language, role: str) -> str:
        if role == "clade":
            return metadata.clade_separator.join(l.clade)
        if role == "latitude":
            return _format_coord(l.latitude)
        if role == "longitude":
            return _format_coord(l.longitude)
        return {"language-id": l.id, "language-name": l.name}.get(role, "")

    forms = sorted(db.forms, key=lambda f: f.id)
    sets = sorted(db.cognatesets, key=lambda c: c.id)
    languages = sorted(db.languages, key=lambda l: l.id)

    write_table("forms", forms, form_value, lambda f: f.extra)
    write_table("parameters", sets, param_value, lambda c: c.extra)
    write_table("cognates", sets, cognate_value, lambda c: ())
    write_table("languages", languages, language_value, lambda l: l.extra)

    bib = format_bibtex(sorted(db.sources, key=lambda s: s.bibkey))
    (directory / "sources.bib").write_text(bib, encoding="utf-8")


# ---------------------------------------------------------------------------
# BibTeX

def parse_bibtex(text: str) -> tuple[list[Source], list[str]]:
    """Best-effort BibTeX parser: entry keys plus flat field/value pairs.

    Values keep nested braces verbatim (only the outer delimiters are
    stripped). Unparseable entries are skipped and reported in the warning
    list; nothing raises.
    """
    sources: list[Source] = []
    warnings: list[str] = []
    i = 0
    n = len(text)
    while True:
        at = text.find("@", i)
        if at < 0:
            break
        try:
            entry, i = _parse_bib_entry(text, at)
            if entry is not None:
                sources.append(entry)
        except _BibSyntaxError as exc:
            warnings.append(f"offset {at}: {exc}")
            nxt = text.find("@", at + 1)
            if nxt < 0:
                break
            i = nxt
    return sources, warnings


class _BibSyntaxError(Exception):
    pass


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _parse_bib_entry(text: str, at: int) -> tuple[Source | None, int]:
    i = at + 1
    start = i
    while i < len(text) and (text[i].isalnum() or text[i] in "_-"):
        i += 1
    entry_type = text[start:i].lower()
    if not entry_type:
        raise _BibSyntaxError("missing entry type after '@'")
    i = _skip_ws(text, i)
    if entry_type in ("comment", "preamble", "string"):
        # skip the whole braced group if present, otherwise just move on
        if i < len(text) and text[i] in "{(":
            _, i = _read_braced(text, i)
        return None, i
    if i >= len(text) or text[i] not in "{(":
        raise _BibSyntaxError(f"entry @{entry_type}: expected '{{'")
    closer = "}" if text[i] == "{" else ")"
    i = _skip_ws(text, i + 1)
    start = i
    while i < len(text) and text[i] not in ",\n" + closer:
        i += 1
    bibkey = text[start:i].strip()
    if not bibkey:
        raise _BibSyntaxError(f"entry @{entry_type}: missing key")
    if any(ch in "@{}\"" or ch.isspace() for ch in bibkey):
        raise _BibSyntaxError(f"entry @{entry_type}: malformed key {bibkey!r}")
    fields: list[tuple[str, str]] = []
    while True:
        i = _skip_ws(text, i)
        if i >= len(text):
            raise _BibSyntaxError(f"entry {bibkey!r}: unterminated entry")
        if text[i] == closer:
            return Source(bibkey=bibkey, entry_type=entry_type, fields=tuple(fields)), i + 1
        if text[i] == ",":
            i += 1
            continue
        start = i
        while i < len(text) and (text[i].isalnum() or text[i] in "_-"):
            i += 1
        name = text[start:i].strip().lower()
        if not name:
            raise _BibSyntaxError(f"entry {bibkey!r}: expected field name at offset {i}")
        i = _skip_ws(text, i)
        if i >= len(text) or text[i] != "=":
            raise _BibSyntaxError(f"entry {bibkey!r}: field {name!r}: expected '='")
        i = _skip_ws(text, i + 1)
        if i >= len(text):
            raise _BibSyntaxError(f"entry {bibkey!r}: field {name!r}: missing value")
        if text[i] == "{":
            value, i = _read_braced(text, i)
        elif text[i] == '"':
            end = text.find('"', i + 1)
            if end < 0:
                raise _BibSyntaxError(f"entry {bibkey!r}: field {name!r}: unterminated string")
            value = text[i + 1 : end]
            i = end + 1
        else:
            start = i
            while i < len(text) and text[i] not in ",}\n":
                i += 1
            value = text[start:i].strip()
        fields.append((name, value))


def _read_braced(text: str, i: int) -> tuple[str, int]:
    """Read a balanced {...} group starting at i; return contents and next index."""
    opener = text[i]
    closer = {"{": "}", "(": ")"}[opener]
    depth = 0
    start = i + 1
    while i < len(text):
        ch = text[i]
        if ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                return text[start:i], i + 1
        i += 1
    raise _BibSyntaxError("unbalanced braces")


def format_bibtex(sources) -> str:
    out: list[str] = []
    for s in sources:
        lines = [f"@{s.entry_type}{{{s.bibkey},"]
        for name, value in s.fields:
            lines.append(f"  {name} = {{{value}}},")
        lines.append("}")
        out.append("\n".join(lines))
    return "\n\n".join(out) + ("\n" if out else "")
