"""Exchange-file handling.

The contract with the dataset side is a UTF-8 TSV with a header row and
four columns: cognateset_id, language_tag, source tokens space-joined,
target tokens space-joined. Predictions use the same layout with the last
column renamed ``prediction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

EXCHANGE_HEADER = ("cognateset_id", "language_tag", "source", "target")
PREDICTION_HEADER = ("cognateset_id", "language_tag", "source", "prediction")


@dataclass(frozen=True)
class Pair:
    cognateset_id: str
    language_tag: str
    source: tuple[str, ...]
    target: tuple[str, ...]


def read_pairs(path: str | Path) -> list[Pair]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != EXCHANGE_HEADER:
        raise ValueError(f"{path}: malformed exchange file (bad header)")
    pairs: list[Pair] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(cols)}")
        pairs.append(
            Pair(
                cognateset_id=cols[0],
                language_tag=cols[1],
                source=tuple(cols[2].split()),
                target=tuple(cols[3].split()),
            )
        )
    return pairs


def write_predictions(path: str | Path, pairs: list[Pair], predictions: list[list[str]]) -> None:
    if len(pairs) != len(predictions):
        raise ValueError(f"{len(pairs)} pairs but {len(predictions)} predictions")
    lines = ["\t".join(PREDICTION_HEADER)]
    for pair, tokens in zip(pairs, predictions):
        lines.append(
            "\t".join((pair.cognateset_id, pair.language_tag, " ".join(pair.source), " ".join(tokens)))
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
