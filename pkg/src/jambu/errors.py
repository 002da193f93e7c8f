"""Exception hierarchy shared across the package."""

from __future__ import annotations


class JambuError(Exception):
    """Base class for all errors raised by this package."""


class UnknownIdError(JambuError, KeyError):
    """A lookup referenced an id that does not exist in the database."""

    def __init__(self, kind: str, id: str):
        super().__init__(f"unknown {kind} id: {id!r}")
        self.kind = kind
        self.id = id


class InvalidFieldError(JambuError, ValueError):
    """A search was requested on a field that is not searchable."""

    def __init__(self, field: str, allowed: tuple[str, ...]):
        super().__init__(f"invalid search field {field!r}; expected one of {', '.join(allowed)}")
        self.field = field
        self.allowed = allowed


class LoadError(JambuError):
    """A wordlist directory could not be loaded.

    ``kind`` is one of ``missing-file``, ``malformed-metadata``,
    ``csv-parse-error``, ``duplicate-id``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class ProfileError(JambuError):
    """An orthography profile file is unusable.

    ``kind`` is ``malformed-profile`` or ``duplicate-grapheme``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class EntryParseError(JambuError):
    """An etymological dictionary entry could not be parsed.

    ``kind`` is one of ``unknown-abbreviation``, ``no-headword``,
    ``unbalanced-quote-or-bracket``. ``offset`` is the character offset
    into the NFC-normalized entry text.
    """

    def __init__(self, kind: str, message: str, offset: int = 0):
        super().__init__(f"{message} (at offset {offset})")
        self.kind = kind
        self.offset = offset


class UntokenizableFormError(JambuError):
    """A form cannot be segmented into phonemes by the given profile."""

    def __init__(self, form: str, offenders: tuple[str, ...]):
        super().__init__(f"cannot tokenize {form!r}; no rule covers: {', '.join(map(repr, offenders))}")
        self.form = form
        self.offenders = offenders


class SplitError(JambuError, ValueError):
    """A train/test split was requested on too little data."""


class MetricError(JambuError, ValueError):
    """Metric inputs are malformed (length mismatch or empty references)."""
