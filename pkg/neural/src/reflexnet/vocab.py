"""Token vocabulary: phonemes plus one tag token per target language.

Built from training pairs only; anything unseen at prediction time maps to
UNK. The language tag is encoded as a pseudo-token prepended to the source
sequence, which lets one model serve every target language.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .data import Pair

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)


def tag_token(language_tag: str) -> str:
    return f"<{language_tag}>"


@dataclass
class Vocabulary:
    index: dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, pairs: list[Pair]) -> "Vocabulary":
        tokens: dict[str, None] = {}
        for special in SPECIALS:
            tokens[special] = None
        for pair in sorted(pairs, key=lambda p: (p.cognateset_id, p.language_tag)):
            tokens.setdefault(tag_token(pair.language_tag), None)
        phonemes: set[str] = set()
        for pair in pairs:
            phonemes.update(pair.source)
            phonemes.update(pair.target)
        for tok in sorted(phonemes):
            tokens.setdefault(tok, None)
        return cls(index={tok: i for i, tok in enumerate(tokens)})

    def __len__(self) -> int:
        return len(self.index)

    @property
    def pad(self) -> int:
        return self.index[PAD]

    @property
    def bos(self) -> int:
        return self.index[BOS]

    @property
    def eos(self) -> int:
        return self.index[EOS]

    @property
    def unk(self) -> int:
        return self.index[UNK]

    def encode(self, tokens) -> list[int]:
        unk = self.unk
        return [self.index.get(t, unk) for t in tokens]

    def encode_source(self, pair: Pair) -> list[int]:
        return self.encode([tag_token(pair.language_tag), *pair.source]) + [self.eos]

    def encode_target(self, pair: Pair) -> list[int]:
        return [self.bos, *self.encode(pair.target), self.eos]

    def decode(self, ids) -> list[str]:
        reverse = {i: t for t, i in self.index.items()}
        out = []
        for i in ids:
            tok = reverse.get(int(i), UNK)
            if tok == EOS:
                break
            if tok in (PAD, BOS):
                continue
            out.append(tok)
        return out

    def to_dict(self) -> dict[str, int]:
        return dict(self.index)

    @classmethod
    def from_dict(cls, data: dict[str, int]) -> "Vocabulary":
        return cls(index=dict(data))
