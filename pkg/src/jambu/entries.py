"""Parser for plain-text etymological dictionary entries.

The supported shape is the classic comparative-dictionary layout: an entry
number, one or more headwords (optionally in numbered groups) with
grammatical tags, a quoted gloss, text-source sigla and a bracketed
etymology, followed by semicolon-separated reflex clauses. Each clause
starts with a language abbreviation and lists one or more lemmata, each
with an optional gender marker and quoted gloss:

    454 apavartayati tr. 'turns away from' RV. 2. apavrtta- 'reversed' [vrt]
    1. Pk. ovattei 'causes to turn back'; S. oti f. 'hem';
    2. G. otvu 'to hem', oti f. 'tucked up part'.

Markup is assumed already stripped; lemma boundaries come from position
(the token after a language abbreviation), not styling. A lemma with no
gloss of its own inherits the last gloss seen earlier in the same clause;
nothing is inherited across clauses. Cross-reference tails ("cf. ...",
"ext. ...") are kept verbatim as notes, not parsed.
"""

from __future__ import annotations

import csv
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EntryParseError
from .model import CognateSet, Form, SourceRef

__all__ = [
    "AbbreviationTable",
    "Headword",
    "ReflexRecord",
    "ParsedEntry",
    "parse_entry",
    "unparse_entry",
    "entry_to_records",
    "load_abbreviations",
    "split_entry_blocks",
    "GRAM_TAGS",
    "GENDERS",
]

# grammatical tags that may follow a lemma (genders double as tags on headwords)
GENDERS = ("m.", "f.", "n.")
GRAM_TAGS = frozenset(GENDERS) | {"tr.", "intr.", "caus.", "adj.", "adv.", "pl.", "sg.", "pres.", "pret."}

# markers that start a verbatim note tail instead of a reflex clause
_NOTE_MARKERS = ("cf.", "ext.")
_DASHES = {"--", "–", "—"}


@dataclass(frozen=True)
class AbbreviationTable:
    """Language abbreviations plus sigla to ignore (text sources, not lects)."""

    languages: dict[str, str]          # abbreviation -> language_id
    ignore: frozenset[str] = frozenset()

    def __post_init__(self):
        # tokens are matched against NFC text, so the table must be NFC too
        object.__setattr__(
            self,
            "languages",
            {unicodedata.normalize("NFC", k): unicodedata.normalize("NFC", v) for k, v in self.languages.items()},
        )
        object.__setattr__(
            self, "ignore", frozenset(unicodedata.normalize("NFC", s) for s in self.ignore)
        )
        overlap = set(self.languages) & set(self.ignore)
        if overlap:
            raise ValueError(f"abbreviations in both language and ignore sets: {sorted(overlap)}")

    def abbrev_for(self, language_id: str) -> str:
        """Smallest abbreviation mapping to ``language_id`` (for unparsing)."""
        candidates = sorted(a for a, l in self.languages.items() if l == language_id)
        if not candidates:
            raise KeyError(f"no abbreviation for language {language_id!r}")
        return candidates[0]


def load_abbreviations(csv_path: str | Path, ignore_path: str | Path | None = None) -> AbbreviationTable:
    """Read the two-column (abbrev, language_id) CSV and optional ignore list."""
    languages: dict[str, str] = {}
    with Path(csv_path).open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ValueError(f"{csv_path}:{lineno}: expected two columns (abbrev, language_id)")
            abbrev = unicodedata.normalize("NFC", row[0].strip())
            if abbrev in languages:
                raise ValueError(f"{csv_path}:{lineno}: duplicate abbreviation {abbrev!r}")
            languages[abbrev] = unicodedata.normalize("NFC", row[1].strip())
    ignore: frozenset[str] = frozenset()
    if ignore_path is not None:
        lines = Path(ignore_path).read_text(encoding="utf-8").splitlines()
        ignore = frozenset(
            unicodedata.normalize("NFC", line.strip()) for line in lines if line.strip()
        )
    return AbbreviationTable(languages=languages, ignore=ignore)


@dataclass(frozen=True)
class Headword:
    lemma: str
    gloss: str = ""
    tags: tuple[str, ...] = ()
    sigla: tuple[str, ...] = ()
    group_label: str | None = None


@dataclass(frozen=True)
class ReflexRecord:
    language_id: str
    lemma: str
    gender: str = "none"               # one of m / f / n / none
    gloss: str = ""
    group_label: str | None = None
    tags: tuple[str, ...] = ()         # non-gender grammatical tags (pl., adj., ...)


@dataclass(frozen=True)
class ParsedEntry:
    entry_number: str
    headwords: tuple[Headword, ...]
    etymology_note: str = ""
    reflexes: tuple[ReflexRecord, ...] = ()
    notes: tuple[str, ...] = ()
    # how many reflex clauses the body had; informational (a clause can
    # hold several lemmata, so this is not len(reflexes))
    clause_count: int = field(default=0, compare=False)


# ---------------------------------------------------------------------------
# tokenizer

_WORD = "word"
_GLOSS = "gloss"
_BRACKET = "bracket"
_COMMA = "comma"
_SEMI = "semi"


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    offset: int        # codepoint offset into the NFC text


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "'":
            end = text.find("'", i + 1)
            if end < 0:
                raise EntryParseError(
                    "unbalanced-quote-or-bracket", "unterminated gloss quote", _byte_offset(text, i)
                )
            tokens.append(_Token(_GLOSS, text[i + 1 : end], i))
            i = end + 1
            continue
        if ch == "[":
            depth = 0
            j = i
            while j < n:
                if text[j] == "[":
                    depth += 1
                elif text[j] == "]":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if depth != 0:
                raise EntryParseError(
                    "unbalanced-quote-or-bracket", "unterminated '[' bracket", _byte_offset(text, i)
                )
            tokens.append(_Token(_BRACKET, text[i + 1 : j], i))
            i = j + 1
            continue
        if ch == "]":
            raise EntryParseError(
                "unbalanced-quote-or-bracket", "unmatched ']'", _byte_offset(text, i)
            )
        if ch == ",":
            tokens.append(_Token(_COMMA, ",", i))
            i += 1
            continue
        if ch == ";":
            tokens.append(_Token(_SEMI, ";", i))
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in ",;'[":
            j += 1
        tokens.append(_Token(_WORD, text[i:j], i))
        i = j
    return tokens


def _is_group(token: _Token) -> bool:
    v = token.value
    return token.kind == _WORD and len(v) >= 2 and v.endswith(".") and v[:-1].isdigit()


def _is_terminal(token: _Token) -> bool:
    # a lone '.' or ellipsis closes an entry
    return token.kind == _WORD and token.value.strip(".…") == ""


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, text: str, abbrevs: AbbreviationTable):
        self.text = unicodedata.normalize("NFC", text)
        self.abbrevs = abbrevs
        self.tokens = _tokenize(self.text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token | None:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, kind: str, message: str, token: _Token | None = None) -> EntryParseError:
        offset = _byte_offset(self.text, token.offset) if token is not None else len(self.text.encode("utf-8"))
        return EntryParseError(kind, message, offset)

    def is_language(self, token: _Token | None) -> bool:
        return token is not None and token.kind == _WORD and token.value in self.abbrevs.languages

    def parse(self) -> ParsedEntry:
        first = self.peek()
        if first is None or first.kind != _WORD or not first.value[:1].isdigit() or first.value.endswith("."):
            raise self.error("no-headword", "entry must begin with an entry number", first)
        number = self.next().value

        headwords = self._parse_headwords(number)
        if not headwords:
            raise self.error("no-headword", f"entry {number}: no headword found", self.peek())

        etym = ""
        tok = self.peek()
        if tok is not None and tok.kind == _BRACKET:
            etym = self.next().value.strip()

        reflexes, notes, clause_count = self._parse_body(number)
        return ParsedEntry(
            entry_number=number,
            headwords=tuple(headwords),
            etymology_note=etym,
            reflexes=tuple(reflexes),
            notes=tuple(notes),
            clause_count=clause_count,
        )

    def _parse_headwords(self, number: str) -> list[Headword]:
        headwords: list[Headword] = []
        group: str | None = None
        expect_item = True
        while True:
            tok = self.peek()
            if tok is None or tok.kind == _BRACKET:
                break
            if _is_group(tok):
                nxt = self.peek(1)
                if self.is_language(nxt) or nxt is None:
                    break                       # body group marker, not a headword group
                self.next()
                group = tok.value[:-1]
                expect_item = True
                if headwords and headwords[0].group_label is None:
                    # groups are in play: the leading headword is implicitly "1"
                    first = headwords[0]
                    headwords[0] = Headword(
                        lemma=first.lemma,
                        gloss=first.gloss,
                        tags=first.tags,
                        sigla=first.sigla,
                        group_label="1",
                    )
                continue
            if not expect_item or self.is_language(tok) or tok.kind != _WORD or _is_terminal(tok):
                break                           # body (or trailing punctuation) begins
            lemma = self.next().value
            tags: list[str] = []
            gloss = ""
            sigla: list[str] = []
            while True:
                tok = self.peek()
                if tok is None:
                    break
                if tok.kind == _WORD and tok.value in GRAM_TAGS and not gloss and not sigla:
                    tags.append(self.next().value)
                    continue
                if tok.kind == _GLOSS and not gloss:
                    gloss = self.next().value
                    continue
                if tok.kind == _WORD and tok.value in self.abbrevs.ignore:
                    sigla.append(self.next().value)
                    continue
                break
            headwords.append(Headword(lemma=lemma, gloss=gloss, tags=tuple(tags), sigla=tuple(sigla), group_label=group))
            expect_item = False
        return headwords

    def _parse_body(self, number: str) -> tuple[list[ReflexRecord], list[str], int]:
        reflexes: list[ReflexRecord] = []
        notes: list[str] = []
        group: str | None = None
        clause_count = 0
        while True:
            tok = self.peek()
            if tok is None:
                break
            if _is_terminal(tok) or tok.kind in (_SEMI, _COMMA):
                self.next()
                continue
            if tok.kind == _WORD and tok.value in _DASHES:
                self.next()
                continue
            if _is_group(tok):
                self.next()
                group = tok.value[:-1]
                continue
            if tok.kind == _WORD and tok.value in _NOTE_MARKERS:
                notes.append(self._capture_note())
                continue
            if not self.is_language(tok):
                raise self.error(
                    "unknown-abbreviation",
                    f"entry {number}: {tok.value!r} is not a known language abbreviation",
                    tok,
                )
            lang_tok = self.next()
            language_id = self.abbrevs.languages[lang_tok.value]
            reflexes.extend(self._parse_clause(number, language_id, group))
            clause_count += 1
        return reflexes, notes, clause_count

    def _parse_clause(self, number: str, language_id: str, group: str | None) -> list[ReflexRecord]:
        records: list[ReflexRecord] = []
        last_gloss = ""
        while True:
            tok = self.peek()
            if tok is None or tok.kind != _WORD or _is_terminal(tok) or _is_group(tok):
                raise self.error(
                    "unbalanced-quote-or-bracket",
                    f"entry {number}: expected a lemma after language abbreviation",
                    tok,
                )
            # entry-final punctuation glues onto a bare last lemma ("... mūh.");
            # lemmata never end in '.', so trailing dots are punctuation
            lemma = self.next().value.rstrip(".")
            gender = "none"
            tags: list[str] = []
            gloss: str | None = None
            tok = self.peek()
            while tok is not None and tok.kind == _WORD and tok.value in GRAM_TAGS:
                value = self.next().value
                if value in GENDERS and gender == "none":
                    gender = value[:-1]
                else:
                    tags.append(value)
                tok = self.peek()
            if tok is not None and tok.kind == _GLOSS:
                gloss = self.next().value
            if gloss is None:
                gloss = last_gloss           # elliptical style: inherit within the clause
            else:
                last_gloss = gloss
            records.append(
                ReflexRecord(
                    language_id=language_id,
                    lemma=lemma,
                    gender=gender,
                    gloss=gloss,
                    group_label=group,
                    tags=tuple(tags),
                )
            )
            tok = self.peek()
            if tok is not None and tok.kind == _COMMA:
                self.next()
                continue
            break
        return records

    def _capture_note(self) -> str:
        """Consume tokens verbatim up to the next ';' or end of entry."""
        start_tok = self.peek()
        start = start_tok.offset
        end = start
        at_entry_end = True
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == _SEMI:
                at_entry_end = False
                break
            self.next()
            end = tok.offset + self._token_width(tok)
        note = self.text[start:end].strip()
        if at_entry_end:
            # the entry's closing punctuation is not part of the note
            note = note.rstrip(".…").strip()
        return note

    def _token_width(self, tok: _Token) -> int:
        if tok.kind in (_GLOSS, _BRACKET):
            return len(tok.value) + 2
        return len(tok.value)


def parse_entry(text: str, abbrevs: AbbreviationTable) -> ParsedEntry:
    """Parse one entry (number through final reflex) into its structure.

    Raises :class:`EntryParseError` with a byte offset on unknown
    abbreviations, missing headwords, and unbalanced quotes or brackets.
    Every input character is either consumed into the structure or named
    in the error; nothing is dropped silently.
    """
    return _Parser(text, abbrevs).parse()


def unparse_entry(entry: ParsedEntry, abbrevs: AbbreviationTable) -> str:
    """Render an entry back to text.

    Re-parsing the output reproduces the entry's lemmata, glosses, genders
    and group labels exactly; whitespace and elided inherited glosses are
    not preserved, which is fine because they carry no information.
    """
    parts: list[str] = [entry.entry_number]
    for i, hw in enumerate(entry.headwords):
        if hw.group_label is not None and not (i == 0 and hw.group_label == "1"):
            parts.append(f"{hw.group_label}.")
        parts.append(hw.lemma)
        parts.extend(hw.tags)
        if hw.gloss:
            parts.append(f"'{hw.gloss}'")
        parts.extend(hw.sigla)
    if entry.etymology_note:
        parts.append(f"[{entry.etymology_note}]")
    head = " ".join(parts)

    # group reflexes into clauses: consecutive same (group, language) runs
    runs: list[tuple[tuple[str | None, str], list[ReflexRecord]]] = []
    for r in entry.reflexes:
        key = (r.group_label, r.language_id)
        if runs and runs[-1][0] == key:
            runs[-1][1].append(r)
        else:
            runs.append((key, [r]))

    chunks: list[str] = []
    current_group: str | None = None
    for (glabel, language_id), items in runs:
        words: list[str] = []
        if glabel is not None and glabel != current_group:
            words.append(f"{glabel}.")
            current_group = glabel
        words.append(abbrevs.abbrev_for(language_id))
        last_gloss = ""
        for idx, r in enumerate(items):
            words.append(r.lemma)
            if r.gender != "none":
                words.append(f"{r.gender}.")
            words.extend(r.tags)
            if r.gloss != last_gloss:
                words.append(f"'{r.gloss}'")
                last_gloss = r.gloss
            if idx < len(items) - 1:
                words[-1] += ","
        chunks.append(" ".join(words))
    body = "; ".join(chunks)
    for note in entry.notes:
        body = f"{body}; {note}" if body else note
    if body:
        # a ';' terminator keeps a trailing note's final '.' from being
        # re-read as entry punctuation
        stop = ";" if entry.notes else ("" if body.endswith(".") else ".")
        return f"{head}\n{body}{stop}"
    return head


def entry_to_records(
    entry: ParsedEntry,
    ancestor_language_id: str,
    source_bibkey: str = "",
) -> tuple[CognateSet, list[Form]]:
    """Flatten a parsed entry into one cognate set plus language-tagged forms.

    Every headword becomes a form in the ancestor language; the first
    headword also names the set. Group labels become ``subset_id``; form
    ids are the entry number plus a stable ordinal.
    """
    primary = entry.headwords[0]
    note_parts = []
    if entry.etymology_note:
        note_parts.append(entry.etymology_note)
    note_parts.extend(entry.notes)
    cognateset = CognateSet(
        id=entry.entry_number,
        headword=primary.lemma,
        description=primary.gloss,
        notes="; ".join(note_parts),
    )
    refs = (SourceRef(source_bibkey),) if source_bibkey else ()

    forms: list[Form] = []
    ordinal = 0

    def add(language_id: str, lemma: str, gloss: str, subset: str | None, notes: str):
        nonlocal ordinal
        ordinal += 1
        forms.append(
            Form(
                id=f"{entry.entry_number}-{ordinal}",
                language_id=language_id,
                cognateset_id=entry.entry_number,
                form=lemma,
                gloss=gloss,
                subset_id=subset or "",
                notes=notes,
                source_refs=refs,
            )
        )

    for hw in entry.headwords:
        add(
            ancestor_language_id,
            hw.lemma,
            hw.gloss,
            hw.group_label,
            " ".join((*hw.tags, *hw.sigla)),
        )
    for r in entry.reflexes:
        markers = ([f"{r.gender}."] if r.gender != "none" else []) + list(r.tags)
        add(r.language_id, r.lemma, r.gloss, r.group_label, " ".join(markers))
    return cognateset, forms


def split_entry_blocks(text: str) -> list[str]:
    """Split a file of entries into blank-line-separated blocks."""
    blocks: list[str] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append("\n".join(current))
            current = []
    if current:
        blocks.append("\n".join(current))
    return blocks
