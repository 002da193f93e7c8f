"""Profile-driven grapheme segmentation and transcription normalization.

A profile is an ordered list of grapheme -> replacement rules. ``segment``
scans the NFC-normalized input left to right, always taking the longest
matching grapheme (rule order only breaks ties between equally long
matches). ``^`` and ``$`` inside a grapheme anchor it to the start or end
of the word. Characters no rule covers are recorded as failures and passed
through unchanged, so nothing is ever silently deleted.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import ProfileError

__all__ = [
    "Rule",
    "OrthoProfile",
    "SegmentationResult",
    "ConversionReport",
    "load_profile",
    "parse_profile",
    "segment",
    "normalize",
    "conversion_report",
]


def _nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


@dataclass(frozen=True, slots=True)
class Rule:
    grapheme: str      # as written in the profile, anchors included
    replacement: str
    core: str          # grapheme without anchors; what actually consumes input
    at_start: bool
    at_end: bool
    index: int         # position in the profile, breaks equal-length ties


@dataclass(frozen=True)
class OrthoProfile:
    name: str
    rules: tuple[Rule, ...]
    # rules bucketed by first codepoint of their core, in profile order
    _by_first: dict[str, tuple[Rule, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        buckets: dict[str, list[Rule]] = {}
        for rule in self.rules:
            buckets.setdefault(rule.core[0], []).append(rule)
        object.__setattr__(self, "_by_first", {k: tuple(v) for k, v in buckets.items()})


@dataclass(frozen=True, slots=True)
class SegmentationResult:
    """Matched graphemes plus the characters nothing matched.

    In-order concatenation of token graphemes and failure characters always
    reproduces the input exactly.
    """

    tokens: tuple[tuple[str, str], ...]       # (matched grapheme, replacement)
    failures: tuple[tuple[int, str], ...]     # (codepoint offset, offending char)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass(frozen=True, slots=True)
class ConversionReport:
    converted: int
    failed: int
    histogram: tuple[tuple[str, int], ...]   # offending codepoint -> occurrences

    @property
    def total(self) -> int:
        return self.converted + self.failed

    @property
    def rate(self) -> float:
        return self.converted / self.total if self.total else 1.0


def parse_profile(text: str, name: str = "<string>") -> OrthoProfile:
    """Parse profile text: TSV with a ``Grapheme<TAB>Replacement`` header.

    Lines starting with ``#`` are comments. Graphemes and replacements are
    NFC-normalized; a repeated grapheme is an error.
    """
    lines = text.splitlines()
    body: list[tuple[int, str]] = [
        (i + 1, line) for i, line in enumerate(lines) if line.strip() and not line.startswith("#")
    ]
    if not body:
        raise ProfileError("malformed-profile", f"{name}: empty profile (missing header)")
    header_no, header = body[0]
    if [c.strip() for c in header.split("\t")[:2]] != ["Grapheme", "Replacement"]:
        raise ProfileError(
            "malformed-profile",
            f"{name}:{header_no}: expected header 'Grapheme\\tReplacement', got {header!r}",
        )

    rules: list[Rule] = []
    seen: dict[str, int] = {}
    for lineno, line in body[1:]:
        parts = line.split("\t")
        if len(parts) < 2:
            raise ProfileError("malformed-profile", f"{name}:{lineno}: expected two tab-separated columns")
        grapheme = _nfc(parts[0])
        replacement = _nfc(parts[1])
        if not grapheme:
            raise ProfileError("malformed-profile", f"{name}:{lineno}: empty grapheme")
        if grapheme in seen:
            raise ProfileError(
                "duplicate-grapheme",
                f"{name}:{lineno}: grapheme {grapheme!r} already defined on line {seen[grapheme]}",
            )
        seen[grapheme] = lineno
        at_start = grapheme.startswith("^")
        core = grapheme[1:] if at_start else grapheme
        at_end = core.endswith("$")
        if at_end:
            core = core[:-1]
        if not core:
            raise ProfileError("malformed-profile", f"{name}:{lineno}: grapheme {grapheme!r} consumes no text")
        rules.append(Rule(grapheme, replacement, core, at_start, at_end, len(rules)))
    return OrthoProfile(name=name, rules=tuple(rules))


def load_profile(path: str | Path) -> OrthoProfile:
    path = Path(path)
    return parse_profile(path.read_text(encoding="utf-8"), name=path.name)


def segment(profile: OrthoProfile, text: str) -> SegmentationResult:
    """Greedy longest-match segmentation of the NFC input.

    At each position the longest matching rule core wins; among rules with
    equally long cores the one earlier in the profile wins (buckets keep
    profile order, so the first strictly-longer match is the winner). A
    position no rule matches contributes one failure and advances by one
    codepoint.
    """
    text = _nfc(text)
    by_first = profile._by_first
    n = len(text)
    tokens: list[tuple[str, str]] = []
    failures: list[tuple[int, str]] = []
    i = 0
    while i < n:
        best: Rule | None = None
        best_len = 0
        for rule in by_first.get(text[i], ()):
            ln = len(rule.core)
            if ln <= best_len or ln > n - i:
                continue
            if rule.at_start and i != 0:
                continue
            if rule.at_end and i + ln != n:
                continue
            if text.startswith(rule.core, i):
                best, best_len = rule, ln
        if best is None:
            failures.append((i, text[i]))
            i += 1
        else:
            tokens.append((best.core, best.replacement))
            i += best_len
    return SegmentationResult(tokens=tuple(tokens), failures=tuple(failures))


def normalize(profile: OrthoProfile, text: str) -> tuple[str, bool]:
    """Apply the profile; unmatched characters pass through, flagged not-ok."""
    result = segment(profile, text)
    if result.ok:
        return "".join(rep for _, rep in result.tokens), True
    # interleave replacements and failure characters back in input order
    text_nfc = _nfc(text)
    fail_at = dict(result.failures)
    out: list[str] = []
    i = 0
    ti = 0
    while i < len(text_nfc):
        if i in fail_at:
            out.append(fail_at[i])
            i += 1
        else:
            grapheme, rep = result.tokens[ti]
            out.append(rep)
            i += len(grapheme)
            ti += 1
    return "".join(out), False


def conversion_report(profile: OrthoProfile, forms: Iterable[str]) -> ConversionReport:
    """Count how many of ``forms`` segment cleanly; histogram the offenders."""
    converted = 0
    failed = 0
    histogram: dict[str, int] = {}
    for form in forms:
        result = segment(profile, form)
        if result.ok:
            converted += 1
        else:
            failed += 1
            for _, ch in result.failures:
                histogram[ch] = histogram.get(ch, 0) + 1
    return ConversionReport(
        converted=converted,
        failed=failed,
        histogram=tuple(sorted(histogram.items())),
    )
