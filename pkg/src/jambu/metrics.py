"""Corpus-level BLEU and TER over phoneme token sequences.

BLEU follows the reference scorer's defaults: modified n-gram precisions
for orders 1..4 pooled over the corpus, exponential smoothing for
zero-count orders (the k-th zero is replaced by 1/(2^k * total_n)), and a
brevity penalty of exp(1 - r/h) when the hypothesis side is shorter.
Scores are on the 0..100 scale.

TER counts insertions, deletions, substitutions and block shifts. The
shift search is greedy: among all ways to move one contiguous block of
the hypothesis to another position, repeatedly apply the one that most
reduces the Levenshtein distance to the reference (ties broken by
smallest (start, length, destination)), then charge the remaining
Levenshtein distance. The corpus score is total edits over total
reference tokens, as a percentage.
"""

from __future__ import annotations

from collections import Counter
from math import exp, log
from typing import Sequence

import numpy as np

from .errors import MetricError

__all__ = ["bleu", "ter", "pair_edits", "levenshtein"]

Tokens = Sequence[str]

_MAX_ORDER = 4


def _check_inputs(hypotheses: Sequence[Tokens], references: Sequence[Tokens]) -> None:
    if len(hypotheses) != len(references):
        raise MetricError(
            f"length-mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not references or any(len(r) == 0 for r in references):
        raise MetricError("empty-references: every reference must have at least one token")


def bleu(hypotheses: Sequence[Tokens], references: Sequence[Tokens]) -> float:
    """Corpus BLEU in [0, 100] for paired token sequences."""
    _check_inputs(hypotheses, references)

    correct = [0] * _MAX_ORDER
    total = [0] * _MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp = tuple(hyp)
        ref = tuple(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, _MAX_ORDER + 1):
            if len(hyp) < n:
                break
            hyp_ngrams = Counter(hyp[i : i + n] for i in range(len(hyp) - n + 1))
            ref_ngrams = Counter(ref[i : i + n] for i in range(len(ref) - n + 1))
            for gram, count in hyp_ngrams.items():
                total[n - 1] += count
                correct[n - 1] += min(count, ref_ngrams.get(gram, 0))

    if hyp_len == 0:
        return 0.0

    # effective order: orders with no hypothesis n-grams at all drop out of
    # the mean, so an identical corpus scores 100 even when every sequence
    # is shorter than four tokens
    precisions: list[float] = []
    smooth = 1.0
    for n in range(1, _MAX_ORDER + 1):
        if total[n - 1] == 0:
            break
        if correct[n - 1] == 0:
            smooth *= 2.0
            precisions.append(100.0 / (smooth * total[n - 1]))
        else:
            precisions.append(100.0 * correct[n - 1] / total[n - 1])

    if not precisions:
        return 0.0

    brevity = exp(1.0 - ref_len / hyp_len) if hyp_len < ref_len else 1.0
    log_mean = sum(log(p) for p in precisions) / len(precisions)
    return brevity * exp(log_mean)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Plain token-level edit distance (insert / delete / substitute)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, 1):
            cost = 0 if ca == cb else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev = cur
    return prev[-1]


def _batch_levenshtein(cands: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Edit distance of every row of ``cands`` against ``ref``.

    Rows are processed in one DP that is vectorized across candidates;
    the insertion recurrence along the reference axis is folded into a
    prefix-minimum cascade.
    """
    n_cand, n = cands.shape
    m = len(ref)
    offsets = np.arange(m + 1, dtype=np.int32)
    prev = np.broadcast_to(offsets, (n_cand, m + 1)).copy()
    tmp = np.empty_like(prev)
    for i in range(1, n + 1):
        cost = (cands[:, i - 1 : i] != ref[None, :]).astype(np.int32)
        tmp[:, 0] = i
        np.minimum(prev[:, 1:] + 1, prev[:, :-1] + cost, out=tmp[:, 1:])
        # cur[j] = min over k <= j of tmp[k] + (j - k)
        prev = np.minimum.accumulate(tmp - offsets, axis=1) + offsets
        tmp = np.empty_like(prev)
    return prev[:, m]


def _shift_candidates(h: list) -> list[list]:
    """All single-block moves of ``h``, in (start, length, destination) order."""
    out: list[list] = []
    n = len(h)
    for start in range(n):
        for length in range(1, n - start + 1):
            block = h[start : start + length]
            rest = h[:start] + h[start + length :]
            for dest in range(len(rest) + 1):
                if dest == start:
                    continue
                out.append(rest[:dest] + block + rest[dest:])
    return out


def pair_edits(hypothesis: Tokens, reference: Tokens) -> int:
    """Edits (shifts + Levenshtein) for one hypothesis/reference pair."""
    h = list(hypothesis)
    ref = list(reference)
    edits = 0
    d = levenshtein(h, ref)
    # A shift is worth applying only while it strictly reduces the distance;
    # at d <= 1 the best possible shift saves exactly what it costs, so the
    # total is d either way.
    while d > 1 and len(h) >= 2:
        vocab: dict = {}
        for tok in h:
            vocab.setdefault(tok, len(vocab))
        for tok in ref:
            vocab.setdefault(tok, len(vocab))
        cands = _shift_candidates(h)
        cand_arr = np.array([[vocab[t] for t in c] for c in cands], dtype=np.int32)
        ref_arr = np.array([vocab[t] for t in ref], dtype=np.int32)
        dists = _batch_levenshtein(cand_arr, ref_arr)
        best = int(np.argmin(dists))  # first minimum == smallest (start, length, dest)
        best_d = int(dists[best])
        if d - best_d < 1:
            break
        h = cands[best]
        d = best_d
        edits += 1
    return edits + d


def ter(hypotheses: Sequence[Tokens], references: Sequence[Tokens]) -> float:
    """Corpus TER as a percentage: total edits / total reference tokens * 100."""
    _check_inputs(hypotheses, references)
    total_edits = 0
    total_ref = 0
    for hyp, ref in zip(hypotheses, references):
        total_edits += pair_edits(hyp, ref)
        total_ref += len(ref)
    return 100.0 * total_edits / total_ref
