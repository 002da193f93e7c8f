"""Sequence-to-sequence reflex predictors.

Two architectures: a bidirectional GRU encoder-decoder with additive
(Bahdanau) attention, and a transformer encoder-decoder with learned
positional embeddings. Sizes follow the tuned configuration: GRU with 4
layers and embedding/hidden size 64; transformer with 3 layers, 4 heads,
model size 64 and feed-forward size 128.
"""

from __future__ import annotations

import torch
from torch import nn


class BahdanauAttention(nn.Module):
    def __init__(self, query_dim: int, key_dim: int, attn_dim: int):
        super().__init__()
        self.query_proj = nn.Linear(query_dim, attn_dim, bias=False)
        self.key_proj = nn.Linear(key_dim, attn_dim, bias=False)
        self.score = nn.Linear(attn_dim, 1, bias=False)

    def forward(self, query: torch.Tensor, keys: torch.Tensor, mask: torch.Tensor):
        # query: B x Q, keys: B x S x K, mask: B x S (True where real tokens)
        scores = self.score(torch.tanh(self.query_proj(query).unsqueeze(1) + self.key_proj(keys)))
        scores = scores.squeeze(-1).masked_fill(~mask, float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        context = torch.bmm(weights.unsqueeze(1), keys).squeeze(1)
        return context, weights


class GruSeq2Seq(nn.Module):
    def __init__(
        self,
        vocab_size: int,
        pad_index: int,
        embedding_size: int = 64,
        hidden_size: int = 64,
        layers: int = 4,
        dropout: float = 0.1,
    ):
        super().__init__()
        self.pad_index = pad_index
        self.layers = layers
        self.hidden_size = hidden_size
        self.source_embedding = nn.Embedding(vocab_size, embedding_size, padding_idx=pad_index)
        self.target_embedding = nn.Embedding(vocab_size, embedding_size, padding_idx=pad_index)
        self.encoder = nn.GRU(
            embedding_size,
            hidden_size,
            num_layers=layers,
            bidirectional=True,
            batch_first=True,
            dropout=dropout if layers > 1 else 0.0,
        )
        self.bridge = nn.Linear(2 * hidden_size, hidden_size)
        key_dim = 2 * hidden_size
        self.attention = BahdanauAttention(hidden_size, key_dim, hidden_size)
        self.decoder = nn.GRU(
            embedding_size + key_dim,
            hidden_size,
            num_layers=layers,
            batch_first=True,
            dropout=dropout if layers > 1 else 0.0,
        )
        self.output = nn.Linear(hidden_size + key_dim, vocab_size)

    def encode(self, source: torch.Tensor):
        mask = source.ne(self.pad_index)
        lengths = mask.sum(dim=1).clamp(min=1)
        embedded = self.source_embedding(source)
        # pack so the final hidden states sit at each true sequence end,
        # independent of how wide the batch happens to be padded
        packed = nn.utils.rnn.pack_padded_sequence(
            embedded, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        outputs, hidden = self.encoder(packed)
        outputs, _ = nn.utils.rnn.pad_packed_sequence(
            outputs, batch_first=True, total_length=source.size(1)
        )
        # (layers*2, B, H) -> (layers, B, 2H) -> bridge -> decoder init
        hidden = hidden.view(self.layers, 2, source.size(0), self.hidden_size)
        hidden = torch.cat((hidden[:, 0], hidden[:, 1]), dim=-1)
        hidden = torch.tanh(self.bridge(hidden))
        return outputs, hidden, mask

    def decode_step(self, token: torch.Tensor, hidden: torch.Tensor, enc_outputs, enc_mask):
        context, _ = self.attention(hidden[-1], enc_outputs, enc_mask)
        embedded = self.target_embedding(token)
        rnn_in = torch.cat((embedded, context), dim=-1).unsqueeze(1)
        out, hidden = self.decoder(rnn_in, hidden)
        logits = self.output(torch.cat((out.squeeze(1), context), dim=-1))
        return logits, hidden

    def forward(self, source: torch.Tensor, target_in: torch.Tensor) -> torch.Tensor:
        """Teacher-forced logits for every target position."""
        enc_outputs, hidden, enc_mask = self.encode(source)
        logits = []
        for t in range(target_in.size(1)):
            step_logits, hidden = self.decode_step(target_in[:, t], hidden, enc_outputs, enc_mask)
            logits.append(step_logits)
        return torch.stack(logits, dim=1)


class TransformerSeq2Seq(nn.Module):
    def __init__(
        self,
        vocab_size: int,
        pad_index: int,
        model_size: int = 64,
        heads: int = 4,
        layers: int = 3,
        feedforward: int = 128,
        dropout: float = 0.1,
        max_len: int = 128,
    ):
        super().__init__()
        self.pad_index = pad_index
        self.model_size = model_size
        self.embedding = nn.Embedding(vocab_size, model_size, padding_idx=pad_index)
        self.positions = nn.Embedding(max_len, model_size)    # learned positional embeddings
        self.transformer = nn.Transformer(
            d_model=model_size,
            nhead=heads,
            num_encoder_layers=layers,
            num_decoder_layers=layers,
            dim_feedforward=feedforward,
            dropout=dropout,
            batch_first=True,
        )
        self.output = nn.Linear(model_size, vocab_size)

    def _embed(self, tokens: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(tokens.size(1), device=tokens.device).unsqueeze(0)
        return self.embedding(tokens) * (self.model_size ** 0.5) + self.positions(positions)

    def forward(self, source: torch.Tensor, target_in: torch.Tensor) -> torch.Tensor:
        src_pad = source.eq(self.pad_index)
        tgt_pad = target_in.eq(self.pad_index)
        causal = nn.Transformer.generate_square_subsequent_mask(target_in.size(1), device=source.device)
        decoded = self.transformer(
            self._embed(source),
            self._embed(target_in),
            tgt_mask=causal,
            src_key_padding_mask=src_pad,
            tgt_key_padding_mask=tgt_pad,
            memory_key_padding_mask=src_pad,
        )
        return self.output(decoded)


def make_model(name: str, vocab_size: int, pad_index: int, config) -> nn.Module:
    if name == "gru":
        return GruSeq2Seq(
            vocab_size,
            pad_index,
            embedding_size=config.embedding_size,
            hidden_size=config.hidden_size,
            layers=config.gru_layers,
            dropout=config.dropout,
        )
    if name == "transformer":
        return TransformerSeq2Seq(
            vocab_size,
            pad_index,
            model_size=config.embedding_size,
            heads=config.heads,
            layers=config.transformer_layers,
            feedforward=config.feedforward,
            dropout=config.dropout,
        )
    raise ValueError(f"unknown model {name!r}")
