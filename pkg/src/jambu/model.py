"""In-memory cognate database: records, referential-integrity checks, search.

A :class:`Database` is immutable after construction. All text fields are
normalized to Unicode NFC when records are created, so equality and substring
matching behave the same regardless of how the source data composed its
diacritics.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, fields
from typing import Iterable

from .errors import InvalidFieldError, UnknownIdError

__all__ = [
    "SourceRef",
    "Form",
    "CognateSet",
    "Language",
    "Source",
    "Database",
    "Violation",
    "SearchPage",
    "FamilyStats",
    "validate",
    "forms_in_cognateset",
    "search",
    "family_stats",
    "SEARCH_FIELDS",
]


def nfc(s: str) -> str:
    # quick-check path: most data is already composed
    if unicodedata.is_normalized("NFC", s):
        return s
    return unicodedata.normalize("NFC", s)


@dataclass(frozen=True, slots=True)
class SourceRef:
    """A pointer into sources.bib: bibkey plus an optional page range."""

    bibkey: str
    pages: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bibkey", nfc(self.bibkey))
        object.__setattr__(self, "pages", nfc(self.pages))

    def __str__(self) -> str:
        return f"{self.bibkey}[{self.pages}]" if self.pages else self.bibkey

    @classmethod
    def parse(cls, text: str) -> "SourceRef":
        text = text.strip()
        if text.endswith("]") and "[" in text:
            key, _, pages = text[:-1].partition("[")
            return cls(key.strip(), pages.strip())
        return cls(text)


_FIELD_NAMES: dict[type, tuple[str, ...]] = {}


def _normalize_str_fields(obj) -> None:
    names = _FIELD_NAMES.get(type(obj))
    if names is None:
        names = tuple(f.name for f in fields(obj))
        _FIELD_NAMES[type(obj)] = names
    for name in names:
        value = getattr(obj, name)
        if isinstance(value, str):
            object.__setattr__(obj, name, nfc(value))


@dataclass(frozen=True, slots=True)
class Form:
    """One lemma in one lect.

    Optional fields default to the empty string, never to sentinel values.
    ``extra`` carries unknown CSV columns through a load/write round trip.
    """

    id: str
    language_id: str
    cognateset_id: str
    form: str
    gloss: str = ""
    native: str = ""
    ipa: str = ""
    original: str = ""
    subset_id: str = ""
    notes: str = ""
    source_refs: tuple[SourceRef, ...] = ()
    extra: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        _normalize_str_fields(self)
        object.__setattr__(self, "source_refs", tuple(self.source_refs))
        # extra order is not semantic and CSV cannot distinguish absent from
        # empty cells; canonicalize both for round-trip equality
        object.__setattr__(self, "extra", tuple(sorted((nfc(k), nfc(v)) for k, v in self.extra if v != "")))


@dataclass(frozen=True, slots=True)
class CognateSet:
    """A headword (ancestor or reconstruction) grouping cognate forms."""

    id: str
    headword: str
    description: str = ""
    notes: str = ""
    extra: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        _normalize_str_fields(self)
        # extra order is not semantic and CSV cannot distinguish absent from
        # empty cells; canonicalize both for round-trip equality
        object.__setattr__(self, "extra", tuple(sorted((nfc(k), nfc(v)) for k, v in self.extra if v != "")))


@dataclass(frozen=True, slots=True)
class Language:
    """A lect with its clade path (family root first) and coordinates."""

    id: str
    name: str
    clade: tuple[str, ...] = ()
    latitude: float | None = None
    longitude: float | None = None
    extra: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        _normalize_str_fields(self)
        object.__setattr__(self, "clade", tuple(nfc(c) for c in self.clade))
        # extra order is not semantic and CSV cannot distinguish absent from
        # empty cells; canonicalize both for round-trip equality
        object.__setattr__(self, "extra", tuple(sorted((nfc(k), nfc(v)) for k, v in self.extra if v != "")))

    @property
    def family(self) -> str:
        return self.clade[0] if self.clade else ""


@dataclass(frozen=True, slots=True)
class Source:
    """One BibTeX entry from sources.bib, kept as flat field/value pairs."""

    bibkey: str
    entry_type: str
    fields: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "bibkey", nfc(self.bibkey))
        object.__setattr__(self, "entry_type", nfc(self.entry_type))
        # Field order in BibTeX is not semantic; canonicalize so that
        # write/reload round trips compare equal.
        object.__setattr__(self, "fields", tuple(sorted((nfc(k), nfc(v)) for k, v in self.fields)))

    def field_map(self) -> dict[str, str]:
        return dict(self.fields)


@dataclass(frozen=True, slots=True)
class Violation:
    kind: str
    offending_id: str
    message: str


@dataclass(frozen=True, slots=True)
class SearchPage:
    """One page of search hits plus the total hit count for the query."""

    items: tuple[Form, ...]
    total: int
    limit: int
    offset: int


@dataclass(frozen=True, slots=True)
class FamilyStats:
    family: str
    languages: int
    cognatesets: int
    lemmata: int


SEARCH_FIELDS = ("form", "gloss", "headword", "language-name")


class Database:
    """Immutable collection of forms, cognate sets, languages and sources.

    Construction builds the id indices and the per-field search keys; after
    that every operation is a pure read, safe for concurrent use.
    """

    __slots__ = (
        "forms",
        "cognatesets",
        "languages",
        "sources",
        "forms_by_id",
        "cognatesets_by_id",
        "languages_by_id",
        "sources_by_key",
        "forms_by_language",
        "forms_by_cognateset",
        "_search_keys",
        "_forms_in_id_order",
    )

    def __init__(
        self,
        forms: Iterable[Form] = (),
        cognatesets: Iterable[CognateSet] = (),
        languages: Iterable[Language] = (),
        sources: Iterable[Source] = (),
    ):
        self.forms: tuple[Form, ...] = tuple(forms)
        self.cognatesets: tuple[CognateSet, ...] = tuple(cognatesets)
        self.languages: tuple[Language, ...] = tuple(languages)
        self.sources: tuple[Source, ...] = tuple(sources)

        self.forms_by_id: dict[str, Form] = {}
        for f in self.forms:
            self.forms_by_id.setdefault(f.id, f)
        self.cognatesets_by_id: dict[str, CognateSet] = {}
        for c in self.cognatesets:
            self.cognatesets_by_id.setdefault(c.id, c)
        self.languages_by_id: dict[str, Language] = {}
        for l in self.languages:
            self.languages_by_id.setdefault(l.id, l)
        self.sources_by_key: dict[str, Source] = {}
        for s in self.sources:
            self.sources_by_key.setdefault(s.bibkey, s)

        by_language: dict[str, list[Form]] = {}
        by_cognateset: dict[str, list[Form]] = {}
        for f in self.forms:
            by_language.setdefault(f.language_id, []).append(f)
            by_cognateset.setdefault(f.cognateset_id, []).append(f)
        self.forms_by_language: dict[str, tuple[Form, ...]] = {
            k: tuple(sorted(v, key=lambda f: f.id)) for k, v in by_language.items()
        }
        self.forms_by_cognateset: dict[str, tuple[Form, ...]] = {
            k: tuple(sorted(v, key=lambda f: f.id)) for k, v in by_cognateset.items()
        }

        self._forms_in_id_order: tuple[Form, ...] = tuple(sorted(self.forms, key=lambda f: f.id))
        self._search_keys: dict[str, list[str]] = {}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Database):
            return NotImplemented
        return (
            sorted(self.forms, key=lambda f: f.id) == sorted(other.forms, key=lambda f: f.id)
            and sorted(self.cognatesets, key=lambda c: c.id) == sorted(other.cognatesets, key=lambda c: c.id)
            and sorted(self.languages, key=lambda l: l.id) == sorted(other.languages, key=lambda l: l.id)
            and sorted(self.sources, key=lambda s: s.bibkey) == sorted(other.sources, key=lambda s: s.bibkey)
        )

    def _keys_for(self, field_name: str) -> list[str]:
        """Lowercased haystacks for one search field, aligned with forms in id order."""
        keys = self._search_keys.get(field_name)
        if keys is not None:
            return keys
        if field_name == "form":
            keys = [f.form.lower() for f in self._forms_in_id_order]
        elif field_name == "gloss":
            keys = [f.gloss.lower() for f in self._forms_in_id_order]
        elif field_name == "headword":
            keys = []
            for f in self._forms_in_id_order:
                cs = self.cognatesets_by_id.get(f.cognateset_id)
                keys.append(cs.headword.lower() if cs else "")
        elif field_name == "language-name":
            keys = []
            for f in self._forms_in_id_order:
                lang = self.languages_by_id.get(f.language_id)
                keys.append(lang.name.lower() if lang else "")
        else:
            raise InvalidFieldError(field_name, SEARCH_FIELDS)
        self._search_keys[field_name] = keys
        return keys


def validate(db: Database) -> tuple[Violation, ...]:
    """Check every invariant; return violations sorted by offending id.

    Violations are data, not exceptions: an empty report means the database
    is internally consistent. The function is pure, so two runs over the
    same database yield identical reports.
    """
    out: list[Violation] = []

    def dup_check(items, key, kind_label):
        seen: dict[str, int] = {}
        for item in items:
            k = key(item)
            seen[k] = seen.get(k, 0) + 1
        for k, count in seen.items():
            if count > 1:
                out.append(Violation("duplicate-id", k, f"{kind_label} id {k!r} occurs {count} times"))

    dup_check(db.forms, lambda f: f.id, "form")
    dup_check(db.cognatesets, lambda c: c.id, "cognate set")
    dup_check(db.languages, lambda l: l.id, "language")
    dup_check(db.sources, lambda s: s.bibkey, "source")

    for f in db.forms:
        if f.language_id not in db.languages_by_id:
            out.append(Violation("dangling-language", f.id, f"form {f.id!r} references unknown language {f.language_id!r}"))
        if f.cognateset_id not in db.cognatesets_by_id:
            out.append(Violation("dangling-cognateset", f.id, f"form {f.id!r} references unknown cognate set {f.cognateset_id!r}"))
        if not f.form:
            out.append(Violation("empty-form", f.id, f"form {f.id!r} has an empty transcription"))

    for c in db.cognatesets:
        if not c.headword:
            out.append(Violation("empty-headword", c.id, f"cognate set {c.id!r} has an empty headword"))

    for l in db.languages:
        if not l.clade:
            out.append(Violation("empty-clade", l.id, f"language {l.id!r} has an empty clade path"))
        if l.latitude is not None and not -90.0 <= l.latitude <= 90.0:
            out.append(Violation("bad-coordinates", l.id, f"language {l.id!r} latitude {l.latitude} out of range"))
        if l.longitude is not None and not -180.0 <= l.longitude <= 180.0:
            out.append(Violation("bad-coordinates", l.id, f"language {l.id!r} longitude {l.longitude} out of range"))

    out.sort(key=lambda v: (v.offending_id, v.kind, v.message))
    return tuple(out)


def forms_in_cognateset(db: Database, cognateset_id: str) -> tuple[Form, ...]:
    """All forms of one cognate set, in stable id-sorted order."""
    cognateset_id = nfc(cognateset_id)
    if cognateset_id not in db.cognatesets_by_id:
        raise UnknownIdError("cognate set", cognateset_id)
    return db.forms_by_cognateset.get(cognateset_id, ())


def search(
    db: Database,
    query: str,
    field_name: str = "form",
    limit: int = 50,
    offset: int = 0,
    fold_diacritics: bool = False,
) -> SearchPage:
    """Case-insensitive substring search over forms.

    ``field_name`` selects the haystack: the form itself, its gloss, its
    cognate set's headword, or its language's name. Hits are ordered by
    match position, then form id; an empty query matches everything.
    With ``fold_diacritics`` combining marks are stripped from both sides
    after NFD, so e.g. "oti" matches "oṭī".
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    if field_name not in SEARCH_FIELDS:
        raise InvalidFieldError(field_name, SEARCH_FIELDS)

    needle = nfc(query).lower()
    if fold_diacritics:
        needle = fold(needle)
        cache_key = field_name + ":folded"
        keys = db._search_keys.get(cache_key)
        if keys is None:
            keys = [fold(k) for k in db._keys_for(field_name)]
            db._search_keys[cache_key] = keys
    else:
        keys = db._keys_for(field_name)

    hits: list[tuple[int, Form]] = []
    for key, form in zip(keys, db._forms_in_id_order):
        pos = key.find(needle)
        if pos >= 0:
            hits.append((pos, form))
    hits.sort(key=lambda t: t[0])  # stable: preserves id order within a position
    total = len(hits)
    page = tuple(form for _, form in hits[offset : offset + limit])
    return SearchPage(items=page, total=total, limit=limit, offset=offset)


def fold(s: str) -> str:
    """Strip combining marks after NFD decomposition (ā -> a, ṭ -> t)."""
    return "".join(ch for ch in unicodedata.normalize("NFD", s) if not unicodedata.combining(ch))


def family_stats(db: Database) -> tuple[tuple[FamilyStats, ...], FamilyStats]:
    """Per-family row counts plus totals.

    A family is a clade root. A cognate set is counted once under every
    family that has at least one form in it, so the family column does not
    sum to the total. Rows are ordered by descending cognate set count,
    then by family name.
    """
    lang_family: dict[str, str] = {l.id: l.family for l in db.languages}
    languages: dict[str, int] = {}
    for l in db.languages:
        languages[l.family] = languages.get(l.family, 0) + 1

    lemmata: dict[str, int] = {}
    sets_touched: dict[str, set[str]] = {}
    for f in db.forms:
        fam = lang_family.get(f.language_id, "")
        lemmata[fam] = lemmata.get(fam, 0) + 1
        sets_touched.setdefault(fam, set()).add(f.cognateset_id)

    names = sorted(set(languages) | set(lemmata))
    rows = [
        FamilyStats(
            family=name,
            languages=languages.get(name, 0),
            cognatesets=len(sets_touched.get(name, ())),
            lemmata=lemmata.get(name, 0),
        )
        for name in names
    ]
    rows.sort(key=lambda r: (-r.cognatesets, r.family))
    total = FamilyStats(
        family="Total",
        languages=len(db.languages),
        cognatesets=len(db.cognatesets),
        lemmata=len(db.forms),
    )
    return tuple(rows), total
