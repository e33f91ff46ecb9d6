"""Siamese recurrent synonymy models.

Both models encode the two term strings with one shared-weight encoder
(token embeddings -> LSTM) and score the pair with a Manhattan similarity,
exp(-L1(h, h')), thresholded at 0.5 (ties labeled synonymous).

The lexical model (LexLM) uses the final LSTM state as the representation.
The context model (ConLM) additionally projects the atom's context vector
through a 50-unit dense layer, concatenates it with the LSTM state, and
refines the result through 128- and 50-unit dense layers; the 50-unit output
is the representation fed to the similarity.

Token vectors are seeded-random by default; a plain-text word-vector file
(``token v1 ... vn`` per line) can stand in for pretrained vectors.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn

from .io import Metrics, PairRecord, compute_metrics

_TOKEN_RE = re.compile(r"[^0-9a-z]+")

PAD, UNK = 0, 1


def tokenize(text: str) -> list[str]:
    return [tok for tok in _TOKEN_RE.sub(" ", text.lower()).split() if tok]


class Vocab:
    def __init__(self, texts: list[str]):
        tokens = sorted({tok for text in texts for tok in tokenize(text)})
        self.index = {tok: i + 2 for i, tok in enumerate(tokens)}

    def __len__(self) -> int:
        return len(self.index) + 2

    def encode(self, text: str) -> list[int]:
        ids = [self.index.get(tok, UNK) for tok in tokenize(text)]
        return ids or [UNK]


@dataclass(frozen=True)
class ModelConfig:
    kind: str = "LexLM"  # or "ConLM"
    token_dim: int = 32
    hidden: int = 32  # recurrent size
    context_variant: str | None = None
    context_proj: int = 50
    dense1: int = 128
    dense2: int = 50
    threshold: float = 0.5
    epochs: int = 25
    batch_size: int = 32
    learning_rate: float = 1e-2
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in ("LexLM", "ConLM"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "ConLM" and self.context_variant is None:
            raise ValueError("ConLM needs a context_variant")


class MissingContextError(KeyError):
    pass


def manhattan_score(h: torch.Tensor, h2: torch.Tensor) -> torch.Tensor:
    """exp(-L1 distance), elementwise over a batch; range (0, 1]."""
    return torch.exp(-torch.sum(torch.abs(h - h2), dim=-1))


class SiameseEncoder(nn.Module):
    def __init__(self, config: ModelConfig, vocab_size: int, context_dim: int | None):
        super().__init__()
        self.config = config
        self.embedding = nn.Embedding(vocab_size, config.token_dim, padding_idx=PAD)
        self.lstm = nn.LSTM(config.token_dim, config.hidden, batch_first=True)
        self.is_conlm = config.kind == "ConLM"
        if self.is_conlm:
            assert context_dim is not None
            self.context_proj = nn.Linear(context_dim, config.context_proj)
            self.dense1 = nn.Linear(config.hidden + config.context_proj, config.dense1)
            self.dense2 = nn.Linear(config.dense1, config.dense2)

    @property
    def concat_width(self) -> int:
        """Width of the vector the first post-recurrent dense layer consumes."""
        return self.dense1.in_features if self.is_conlm else self.config.hidden

    def encode(
        self, tokens: torch.Tensor, lengths: torch.Tensor, ctx: torch.Tensor | None
    ) -> torch.Tensor:
        emb = self.embedding(tokens)
        packed = nn.utils.rnn.pack_padded_sequence(
            emb, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        _, (h_n, _) = self.lstm(packed)
        h = h_n[-1]
        if not self.is_conlm:
            return h
        c = torch.relu(self.context_proj(ctx))
        z = torch.cat([h, c], dim=1)
        z = torch.relu(self.dense1(z))
        return self.dense2(z)

    def forward(self, a_tokens, a_lengths, b_tokens, b_lengths, a_ctx=None, b_ctx=None):
        ha = self.encode(a_tokens, a_lengths, a_ctx)
        hb = self.encode(b_tokens, b_lengths, b_ctx)
        return manhattan_score(ha, hb)


def _pad_batch(seqs: list[list[int]]) -> tuple[torch.Tensor, torch.Tensor]:
    lengths = torch.tensor([len(s) for s in seqs], dtype=torch.long)
    width = int(lengths.max())
    out = torch.full((len(seqs), width), PAD, dtype=torch.long)
    for i, s in enumerate(seqs):
        out[i, : len(s)] = torch.tensor(s, dtype=torch.long)
    return out, lengths


class TrainedModel:
    """A trained encoder plus everything needed to score new pairs."""

    def __init__(
        self,
        config: ModelConfig,
        vocab: Vocab,
        encoder: SiameseEncoder,
        context_store: dict[str, np.ndarray] | None,
        loss_history: list[float],
    ):
        self.config = config
        self.vocab = vocab
        self.encoder = encoder
        self.context_store = context_store
        self.loss_history = loss_history

    def _context_tensor(self, auis: list[str]) -> torch.Tensor | None:
        if self.config.kind != "ConLM":
            return None
        assert self.context_store is not None
        rows = []
        for aui in auis:
            if aui not in self.context_store:
                raise MissingContextError(f"no context vector for atom {aui!r}")
            rows.append(self.context_store[aui])
        return torch.tensor(np.stack(rows), dtype=torch.float32)

    @torch.no_grad()
    def score_batch(self, records: list[PairRecord]) -> np.ndarray:
        self.encoder.eval()
        a_tokens, a_len = _pad_batch([self.vocab.encode(r.anchor_str) for r in records])
        b_tokens, b_len = _pad_batch([self.vocab.encode(r.other_str) for r in records])
        a_ctx = self._context_tensor([r.anchor_aui for r in records])
        b_ctx = self._context_tensor([r.other_aui for r in records])
        return self.encoder(a_tokens, a_len, b_tokens, b_len, a_ctx, b_ctx).numpy()

    def predict(self, record: PairRecord) -> tuple[float, int]:
        """(similarity score, label); label is 1 iff score >= threshold."""
        score = float(self.score_batch([record])[0])
        return score, int(score >= self.config.threshold)

    def save(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "model_config.json"), "w", encoding="utf-8") as f:
            json.dump(asdict(self.config), f, indent=2)
        with open(os.path.join(out_dir, "vocab.json"), "w", encoding="utf-8") as f:
            json.dump(self.vocab.index, f)
        torch.save(self.encoder.state_dict(), os.path.join(out_dir, "encoder.pt"))
        if self.context_store is not None:
            names = sorted(self.context_store)
            np.savez_compressed(
                os.path.join(out_dir, "context.npz"),
                matrix=np.stack([self.context_store[n] for n in names]),
            )
            with open(os.path.join(out_dir, "context_atoms.json"), "w", encoding="utf-8") as f:
                json.dump(names, f)

    @classmethod
    def load(cls, out_dir: str) -> "TrainedModel":
        with open(os.path.join(out_dir, "model_config.json"), encoding="utf-8") as f:
            config = ModelConfig(**json.load(f))
        vocab = Vocab([])
        with open(os.path.join(out_dir, "vocab.json"), encoding="utf-8") as f:
            vocab.index = json.load(f)
        context_store = None
        ctx_dim = None
        ctx_path = os.path.join(out_dir, "context.npz")
        if os.path.exists(ctx_path):
            matrix = np.load(ctx_path)["matrix"]
            with open(os.path.join(out_dir, "context_atoms.json"), encoding="utf-8") as f:
                names = json.load(f)
            context_store = {name: matrix[i] for i, name in enumerate(names)}
            ctx_dim = matrix.shape[1]
        encoder = SiameseEncoder(config, len(vocab), ctx_dim)
        encoder.load_state_dict(torch.load(os.path.join(out_dir, "encoder.pt"), weights_only=True))
        return cls(config, vocab, encoder, context_store, [])


def load_word_vectors(path: str) -> dict[str, np.ndarray]:
    """Plain-text vectors: ``token v1 v2 ...`` per line; an optional leading
    ``count dim`` header line is skipped."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            parts = line.rstrip().split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            vectors[parts[0]] = np.array([float(x) for x in parts[1:]], dtype=np.float64)
    return vectors


def train_model(
    records: list[PairRecord],
    config: ModelConfig,
    context_store: dict[str, np.ndarray] | None = None,
    word_vectors: dict[str, np.ndarray] | None = None,
) -> TrainedModel:
    """Train a Siamese model on pair records; deterministic in config.seed."""
    config.validate()
    if not records:
        raise ValueError("no training records")
    if config.kind == "ConLM":
        if context_store is None:
            raise ValueError("ConLM training needs a context store")
        for r in records:
            for aui in (r.anchor_aui, r.other_aui):
                if aui not in context_store:
                    raise MissingContextError(f"no context vector for atom {aui!r}")

    torch.manual_seed(config.seed)
    vocab = Vocab([r.anchor_str for r in records] + [r.other_str for r in records])
    ctx_dim = None
    if config.kind == "ConLM":
        ctx_dim = len(next(iter(context_store.values())))
    encoder = SiameseEncoder(config, len(vocab), ctx_dim)

    if word_vectors:
        with torch.no_grad():
            hits = 0
            for tok, idx in vocab.index.items():
                vec = word_vectors.get(tok)
                if vec is not None and len(vec) == config.token_dim:
                    encoder.embedding.weight[idx] = torch.tensor(vec, dtype=torch.float32)
                    hits += 1

    a_ids = [vocab.encode(r.anchor_str) for r in records]
    b_ids = [vocab.encode(r.other_str) for r in records]
    labels = torch.tensor([float(r.label) for r in records])
    if config.kind == "ConLM":
        a_ctx_all = torch.tensor(
            np.stack([context_store[r.anchor_aui] for r in records]), dtype=torch.float32
        )
        b_ctx_all = torch.tensor(
            np.stack([context_store[r.other_aui] for r in records]), dtype=torch.float32
        )

    optimizer = torch.optim.Adam(encoder.parameters(), lr=config.learning_rate)
    bce = nn.BCELoss()
    generator = torch.Generator().manual_seed(config.seed)
    n = len(records)
    losses = []
    encoder.train()
    for _ in range(config.epochs):
        order = torch.randperm(n, generator=generator)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size].tolist()
            a_tokens, a_len = _pad_batch([a_ids[i] for i in batch])
            b_tokens, b_len = _pad_batch([b_ids[i] for i in batch])
            a_ctx = a_ctx_all[batch] if config.kind == "ConLM" else None
            b_ctx = b_ctx_all[batch] if config.kind == "ConLM" else None
            scores = encoder(a_tokens, a_len, b_tokens, b_len, a_ctx, b_ctx)
            loss = bce(scores.clamp(1e-7, 1 - 1e-7), labels[batch])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.detach()) * len(batch)
        losses.append(epoch_loss / n)

    return TrainedModel(config, vocab, encoder, context_store, losses)


def evaluate_model(
    model: TrainedModel,
    records: list[PairRecord],
    predictor: str = "",
    dataset: str = "",
    batch_size: int = 256,
) -> Metrics:
    """Score records and compute metrics with the shared conventions."""
    if not records:
        raise ValueError("no records to evaluate")
    tp = fp = fn = tn = 0
    for start in range(0, len(records), batch_size):
        chunk = records[start : start + batch_size]
        scores = model.score_batch(chunk)
        for rec, score in zip(chunk, scores):
            pred = int(score >= model.config.threshold)
            if pred and rec.label:
                tp += 1
            elif pred:
                fp += 1
            elif rec.label:
                fn += 1
            else:
                tn += 1
    return compute_metrics(tp, fp, fn, tn, predictor=predictor, dataset=dataset)
