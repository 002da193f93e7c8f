"""Reflex prediction harness: dataset extraction, splits, scoring.

An example pairs the phoneme tokens of an ancestor-language form with the
phoneme tokens of one descendant form, tagged with the descendant's
language id. Predictors plug in through a one-method protocol; exchange
with external trainers happens through plain TSV files (one example per
line, tokens space-joined), so the harness stays model-agnostic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from . import metrics
from .errors import SplitError, UnknownIdError, UntokenizableFormError
from .model import Database
from .ortho import OrthoProfile, segment

__all__ = [
    "ReflexExample",
    "SplitConfig",
    "ExtractionResult",
    "EvalReport",
    "LanguageScore",
    "Predictor",
    "IdentityPredictor",
    "ExchangeError",
    "extract_examples",
    "split",
    "tokenize_phonemes",
    "evaluate",
    "evaluate_predictions",
    "write_examples",
    "read_examples",
    "write_predictions",
    "read_predictions",
    "EXCHANGE_HEADER",
    "PREDICTION_HEADER",
]


class ExchangeError(ValueError):
    """An exchange TSV is malformed or inconsistent with its counterpart."""


@dataclass(frozen=True, slots=True)
class ReflexExample:
    cognateset_id: str
    source_tokens: tuple[str, ...]
    language_tag: str
    target_tokens: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0
    unit: str = "form"                 # "form" or "cognateset"

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.unit not in ("form", "cognateset"):
            raise ValueError(f"unit must be 'form' or 'cognateset', got {self.unit!r}")


@dataclass(frozen=True, slots=True)
class SkippedForm:
    form_id: str
    offenders: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class ExtractionResult:
    examples: tuple[ReflexExample, ...]
    skipped: tuple[SkippedForm, ...]


@dataclass(frozen=True, slots=True)
class LanguageScore:
    bleu: float
    ter: float
    count: int


@dataclass(frozen=True)
class EvalReport:
    bleu: float
    ter: float
    example_count: int
    per_language: dict[str, LanguageScore] = field(default_factory=dict)
    predictor_failures: int = 0


class Predictor(Protocol):
    def predict(self, source_tokens: Sequence[str], language_tag: str) -> Sequence[str]: ...


class IdentityPredictor:
    """Floor baseline: the descendant is predicted to equal the ancestor."""

    def predict(self, source_tokens: Sequence[str], language_tag: str) -> Sequence[str]:
        return list(source_tokens)


def tokenize_phonemes(profile: OrthoProfile, form: str) -> tuple[str, ...]:
    """Split a form into phoneme tokens using the inventory profile.

    The profile's graphemes enumerate the phoneme inventory, so aspiration
    superscripts, length marks and the like stay attached to their base.
    Reconstruction asterisks and stem-boundary hyphens are notation, not
    phonemes, and are dropped before segmentation.
    """
    form = form.replace("*", "").strip("-")
    result = segment(profile, form)
    if result.failures:
        offenders = tuple(ch for _, ch in result.failures)
        raise UntokenizableFormError(form, offenders)
    return tuple(grapheme for grapheme, _ in result.tokens)


def _clade_prefix(descendant_clade: str | Sequence[str]) -> tuple[str, ...]:
    if isinstance(descendant_clade, str):
        return tuple(p.strip() for p in descendant_clade.split(";") if p.strip())
    return tuple(descendant_clade)


def extract_examples(
    db: Database,
    ancestor_language_id: str,
    descendant_clade: str | Sequence[str],
    profile: OrthoProfile,
) -> ExtractionResult:
    """Pair each cognate set's ancestor form with its descendant forms.

    A set contributes examples only if it has a form in the ancestor
    language; when it has several (headword variants), the one matching
    the set's headword is the source, otherwise the id-smallest one.
    Descendants are the set's other forms whose language clade starts
    with ``descendant_clade``; ancestor-language forms never appear on
    the target side. Forms that fail tokenization are skipped and
    reported. Output order is (cognate set id, form id), independent of
    input row order.
    """
    if ancestor_language_id not in db.languages_by_id:
        raise UnknownIdError("language", ancestor_language_id)
    prefix = _clade_prefix(descendant_clade)

    examples: list[ReflexExample] = []
    skipped: list[SkippedForm] = []

    for cs_id in sorted(db.forms_by_cognateset):
        forms = db.forms_by_cognateset[cs_id]      # already id-sorted
        ancestors = [f for f in forms if f.language_id == ancestor_language_id]
        if not ancestors:
            continue
        headword = ""
        cs = db.cognatesets_by_id.get(cs_id)
        if cs is not None:
            headword = cs.headword.replace("*", "")
        source = next((f for f in ancestors if f.form.replace("*", "") == headword), ancestors[0])
        try:
            source_tokens = tokenize_phonemes(profile, source.form)
        except UntokenizableFormError as exc:
            skipped.append(SkippedForm(source.id, exc.offenders))
            continue
        if not source_tokens:
            skipped.append(SkippedForm(source.id, ()))
            continue
        for f in forms:
            if f.language_id == ancestor_language_id:
                continue
            language = db.languages_by_id.get(f.language_id)
            if language is None or language.clade[: len(prefix)] != prefix:
                continue
            try:
                target_tokens = tokenize_phonemes(profile, f.form)
            except UntokenizableFormError as exc:
                skipped.append(SkippedForm(f.id, exc.offenders))
                continue
            if not target_tokens:
                skipped.append(SkippedForm(f.id, ()))
                continue
            examples.append(
                ReflexExample(
                    cognateset_id=cs_id,
                    source_tokens=source_tokens,
                    language_tag=f.language_id,
                    target_tokens=target_tokens,
                )
            )
    return ExtractionResult(examples=tuple(examples), skipped=tuple(skipped))


def split(
    examples: Sequence[ReflexExample], config: SplitConfig
) -> tuple[tuple[ReflexExample, ...], tuple[ReflexExample, ...]]:
    """Deterministic seeded train/test split.

    With ``unit="form"`` the train size is round(fraction * n), clamped so
    both sides are non-empty. With ``unit="cognateset"`` whole sets are
    assigned greedily in shuffled order, so no set straddles the boundary;
    the balance is then best-effort.
    """
    n = len(examples)
    if n < 2:
        raise SplitError(f"too-few-examples: need at least 2, got {n}")
    rng = random.Random(config.seed)

    if config.unit == "form":
        indices = list(range(n))
        rng.shuffle(indices)
        k = round(config.train_fraction * n)
        k = max(1, min(n - 1, k))
        train_idx = sorted(indices[:k])
        test_idx = sorted(indices[k:])
        return (
            tuple(examples[i] for i in train_idx),
            tuple(examples[i] for i in test_idx),
        )

    groups: dict[str, list[int]] = {}
    for i, ex in enumerate(examples):
        groups.setdefault(ex.cognateset_id, []).append(i)
    set_ids = sorted(groups)
    if len(set_ids) < 2:
        raise SplitError("too-few-examples: cognateset unit needs at least 2 distinct sets")
    rng.shuffle(set_ids)
    target = config.train_fraction * n
    train_sids: list[str] = []
    test_sids: list[str] = []
    taken = 0
    for sid in set_ids:
        size = len(groups[sid])
        # take the whole set iff that leaves the train side closer to target
        if taken + size <= target or (taken + size - target) < (target - taken):
            train_sids.append(sid)
            taken += size
        else:
            test_sids.append(sid)
    # a degenerate shuffle can empty one side; move one whole set over
    if not test_sids:
        test_sids.append(train_sids.pop())
    elif not train_sids:
        train_sids.append(test_sids.pop(0))
    train_idx = sorted(i for sid in train_sids for i in groups[sid])
    test_idx = sorted(i for sid in test_sids for i in groups[sid])
    return (
        tuple(examples[i] for i in train_idx),
        tuple(examples[i] for i in test_idx),
    )


# ---------------------------------------------------------------------------
# exchange files

EXCHANGE_HEADER = ("cognateset_id", "language_tag", "source", "target")
PREDICTION_HEADER = ("cognateset_id", "language_tag", "source", "prediction")


def write_examples(path: str | Path, examples: Iterable[ReflexExample]) -> None:
    lines = ["\t".join(EXCHANGE_HEADER)]
    for ex in examples:
        lines.append(
            "\t".join(
                (ex.cognateset_id, ex.language_tag, " ".join(ex.source_tokens), " ".join(ex.target_tokens))
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_tsv(path: str | Path, header: tuple[str, ...]) -> list[tuple[str, str, tuple[str, ...], tuple[str, ...]]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or tuple(lines[0].split("\t")) != header:
        expected = "\t".join(header)
        raise ExchangeError(f"{path}: expected header {expected!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ExchangeError(f"{path}:{lineno}: expected 4 tab-separated columns, got {len(cols)}")
        rows.append((cols[0], cols[1], tuple(cols[2].split()), tuple(cols[3].split())))
    return rows


def read_examples(path: str | Path) -> tuple[ReflexExample, ...]:
    return tuple(
        ReflexExample(cognateset_id=a, language_tag=b, source_tokens=src, target_tokens=tgt)
        for a, b, src, tgt in _read_tsv(path, EXCHANGE_HEADER)
    )


def write_predictions(
    path: str | Path,
    examples: Sequence[ReflexExample],
    predictions: Sequence[Sequence[str]],
) -> None:
    lines = ["\t".join(PREDICTION_HEADER)]
    for ex, pred in zip(examples, predictions):
        lines.append(
            "\t".join((ex.cognateset_id, ex.language_tag, " ".join(ex.source_tokens), " ".join(pred)))
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_predictions(path: str | Path) -> list[tuple[str, str, tuple[str, ...], tuple[str, ...]]]:
    return _read_tsv(path, PREDICTION_HEADER)


# ---------------------------------------------------------------------------
# evaluation

def evaluate_predictions(
    examples: Sequence[ReflexExample],
    predictions: Sequence[Sequence[str]],
    predictor_failures: int = 0,
) -> EvalReport:
    """Score aligned predictions against example targets, pooled and per language."""
    if len(examples) != len(predictions):
        raise ExchangeError(
            f"line count mismatch: {len(examples)} examples vs {len(predictions)} predictions"
        )
    hyps = [list(p) for p in predictions]
    refs = [list(ex.target_tokens) for ex in examples]
    pooled_bleu = metrics.bleu(hyps, refs)
    pooled_ter = metrics.ter(hyps, refs)

    by_language: dict[str, list[int]] = {}
    for i, ex in enumerate(examples):
        by_language.setdefault(ex.language_tag, []).append(i)
    per_language = {
        tag: LanguageScore(
            bleu=metrics.bleu([hyps[i] for i in idx], [refs[i] for i in idx]),
            ter=metrics.ter([hyps[i] for i in idx], [refs[i] for i in idx]),
            count=len(idx),
        )
        for tag, idx in sorted(by_language.items())
    }
    return EvalReport(
        bleu=pooled_bleu,
        ter=pooled_ter,
        example_count=len(examples),
        per_language=per_language,
        predictor_failures=predictor_failures,
    )


def evaluate(
    predictor: Predictor,
    examples: Sequence[ReflexExample],
    dump_path: str | Path | None = None,
) -> EvalReport:
    """Run a predictor over the examples and score it.

    A predictor exception on one example is recorded and scored as an
    empty hypothesis rather than aborting the run. With ``dump_path`` the
    predictions are also written in the exchange format.
    """
    predictions: list[list[str]] = []
    failures = 0
    for ex in examples:
        try:
            predictions.append(list(predictor.predict(ex.source_tokens, ex.language_tag)))
        except Exception:
            failures += 1
            predictions.append([])
    if dump_path is not None:
        write_predictions(dump_path, examples, predictions)
    return evaluate_predictions(examples, predictions, predictor_failures=failures)
