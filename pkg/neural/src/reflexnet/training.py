"""Training loop, checkpointing, greedy prediction.

Defaults follow the tuned setup: 50 epochs, batch size 1024, no early
stopping; GRU learning rate 2e-3 (Adam); transformer on the Noam
warmup/decay schedule with factor 1. Held-out perplexity is
exp(mean token cross-entropy). Unspecified knobs (optimizer family,
dropout 0.1, teacher forcing 1.0, greedy decoding) are recorded in the
returned log.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .data import Pair, read_pairs, write_predictions
from .models import make_model
from .vocab import Vocabulary

MAX_DECODE_LEN = 64


@dataclass
class TrainConfig:
    model: str = "gru"                  # "gru" or "transformer"
    epochs: int = 50
    batch_size: int = 1024
    seed: int = 0
    learning_rate: float = 2e-3        # GRU (Adam)
    lr_factor: float = 1.0             # transformer Noam factor
    warmup_steps: int = 4000
    embedding_size: int = 64
    hidden_size: int = 64
    gru_layers: int = 4
    transformer_layers: int = 3
    heads: int = 4
    feedforward: int = 128
    dropout: float = 0.1


def _pad_batch(rows: list[list[int]], pad: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([r + [pad] * (width - len(r)) for r in rows], dtype=torch.long)


def _batches(encoded: list[tuple[list[int], list[int]]], batch_size: int, pad: int, rng: random.Random):
    order = list(range(len(encoded)))
    rng.shuffle(order)
    for start in range(0, len(order), batch_size):
        chunk = [encoded[i] for i in order[start : start + batch_size]]
        sources = _pad_batch([c[0] for c in chunk], pad)
        targets = _pad_batch([c[1] for c in chunk], pad)
        yield sources, targets


def _noam_lr(step: int, model_size: int, factor: float, warmup: int) -> float:
    step = max(step, 1)
    return factor * model_size ** -0.5 * min(step ** -0.5, step * warmup ** -1.5)


def perplexity(model: nn.Module, encoded, pad: int, batch_size: int = 1024) -> float:
    loss_fn = nn.CrossEntropyLoss(ignore_index=pad, reduction="sum")
    model.eval()
    total_loss = 0.0
    total_tokens = 0
    rng = random.Random(0)
    with torch.no_grad():
        for sources, targets in _batches(encoded, batch_size, pad, rng):
            logits = model(sources, targets[:, :-1])
            gold = targets[:, 1:]
            total_loss += loss_fn(logits.reshape(-1, logits.size(-1)), gold.reshape(-1)).item()
            total_tokens += int(gold.ne(pad).sum())
    model.train()
    return float(torch.exp(torch.tensor(total_loss / max(total_tokens, 1))))


def train(
    train_path: str | Path,
    config: TrainConfig,
    checkpoint_path: str | Path,
    dev_path: str | Path | None = None,
) -> list[dict]:
    pairs = read_pairs(train_path)
    if not pairs:
        raise ValueError(f"{train_path}: empty training set")
    torch.manual_seed(config.seed)
    vocab = Vocabulary.build(pairs)
    encoded = [(vocab.encode_source(p), vocab.encode_target(p)) for p in pairs]
    dev_encoded = None
    if dev_path is not None:
        dev_encoded = [(vocab.encode_source(p), vocab.encode_target(p)) for p in read_pairs(dev_path)]

    model = make_model(config.model, len(vocab), vocab.pad, config)
    if config.model == "transformer":
        optimizer = torch.optim.Adam(model.parameters(), lr=1.0, betas=(0.9, 0.98), eps=1e-9)
        schedule = torch.optim.lr_scheduler.LambdaLR(
            optimizer,
            lambda step: _noam_lr(step, config.embedding_size, config.lr_factor, config.warmup_steps),
        )
    else:
        optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
        schedule = None
    loss_fn = nn.CrossEntropyLoss(ignore_index=vocab.pad)

    rng = random.Random(config.seed)
    log: list[dict] = [
        {
            "event": "start",
            "config": asdict(config),
            "train_pairs": len(pairs),
            "vocab_size": len(vocab),
            "notes": "optimizer=Adam teacher_forcing=1.0 decoding=greedy",
        }
    ]
    model.train()
    for epoch in range(1, config.epochs + 1):
        epoch_loss = 0.0
        steps = 0
        for sources, targets in _batches(encoded, config.batch_size, vocab.pad, rng):
            optimizer.zero_grad()
            logits = model(sources, targets[:, :-1])
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), targets[:, 1:].reshape(-1))
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
            optimizer.step()
            if schedule is not None:
                schedule.step()
            epoch_loss += loss.item()
            steps += 1
        entry = {"event": "epoch", "epoch": epoch, "train_loss": epoch_loss / max(steps, 1)}
        if dev_encoded is not None:
            entry["dev_perplexity"] = perplexity(model, dev_encoded, vocab.pad, config.batch_size)
        log.append(entry)

    checkpoint = {
        "model_state": model.state_dict(),
        "vocab": vocab.to_dict(),
        "config": asdict(config),
        "log": log,
    }
    torch.save(checkpoint, checkpoint_path)
    return log


def load_checkpoint(path: str | Path):
    checkpoint = torch.load(path, map_location="cpu", weights_only=False)
    config = TrainConfig(**checkpoint["config"])
    vocab = Vocabulary.from_dict(checkpoint["vocab"])
    model = make_model(config.model, len(vocab), vocab.pad, config)
    model.load_state_dict(checkpoint["model_state"])
    model.eval()
    return model, vocab, config, checkpoint.get("log", [])


def greedy_decode(model, vocab: Vocabulary, pairs: list[Pair], batch_size: int = 512) -> list[list[str]]:
    """Batched greedy decoding to EOS, capped at MAX_DECODE_LEN tokens."""
    from .models import GruSeq2Seq

    model.eval()
    out: list[list[str]] = []
    with torch.no_grad():
        for start in range(0, len(pairs), batch_size):
            chunk = pairs[start : start + batch_size]
            sources = _pad_batch([vocab.encode_source(p) for p in chunk], vocab.pad)
            n = sources.size(0)
            finished = torch.zeros(n, dtype=torch.bool)
            generated = torch.full((n, 0), vocab.pad, dtype=torch.long)
            if isinstance(model, GruSeq2Seq):
                enc_outputs, hidden, enc_mask = model.encode(sources)
                token = torch.full((n,), vocab.bos, dtype=torch.long)
                for _ in range(MAX_DECODE_LEN):
                    logits, hidden = model.decode_step(token, hidden, enc_outputs, enc_mask)
                    token = logits.argmax(dim=-1)
                    token = torch.where(finished, torch.full_like(token, vocab.pad), token)
                    generated = torch.cat((generated, token.unsqueeze(1)), dim=1)
                    finished |= token.eq(vocab.eos)
                    if bool(finished.all()):
                        break
            else:
                target = torch.full((n, 1), vocab.bos, dtype=torch.long)
                for _ in range(MAX_DECODE_LEN):
                    logits = model(sources, target)
                    token = logits[:, -1].argmax(dim=-1)
                    token = torch.where(finished, torch.full_like(token, vocab.pad), token)
                    target = torch.cat((target, token.unsqueeze(1)), dim=1)
                    finished |= token.eq(vocab.eos)
                    if bool(finished.all()):
                        break
                generated = target[:, 1:]
            for row in generated:
                out.append(vocab.decode(row.tolist()))
    return out


def predict(checkpoint_path: str | Path, test_path: str | Path, out_path: str | Path) -> int:
    model, vocab, _config, _log = load_checkpoint(checkpoint_path)
    pairs = read_pairs(test_path)
    predictions = greedy_decode(model, vocab, pairs)
    write_predictions(out_path, pairs, predictions)
    return len(pairs)


def write_log(log: list[dict], path: str | Path) -> None:
    Path(path).write_text("\n".join(json.dumps(entry) for entry in log) + "\n", encoding="utf-8")
