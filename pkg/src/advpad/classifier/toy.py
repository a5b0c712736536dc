"""Desk-scale byte-sequence classifier.

A 256-entry byte embedding, one self-attention mixing layer, masked mean
pooling and a linear class head. Reads at most `max_len` bytes, which is
what makes the prefix-dominance behaviour of large traffic classifiers
reproducible at toy scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..checkpoint import load_checkpoint, save_checkpoint
from ..errors import DegenerateDataset
from .oracle import Oracle, OracleCapabilities, Prediction

PAD_ID = 256


@dataclass
class ToyConfig:
    embed_dim: int = 32
    max_len: int = 128
    epochs: int = 12
    batch_size: int = 128
    lr: float = 1e-3
    weight_decay: float = 0.01
    seed: int = 0


class ToyClassifierModel(nn.Module):
    def __init__(self, n_classes: int, embed_dim: int = 32, max_len: int = 128):
        super().__init__()
        self.n_classes = n_classes
        self.embed_dim = embed_dim
        self.max_len = max_len
        self.byte_embed = nn.Embedding(257, embed_dim, padding_idx=PAD_ID)
        self.pos_embed = nn.Embedding(max_len, embed_dim)
        self.q = nn.Linear(embed_dim, embed_dim)
        self.k = nn.Linear(embed_dim, embed_dim)
        self.v = nn.Linear(embed_dim, embed_dim)
        self.norm = nn.LayerNorm(embed_dim)
        self.head = nn.Linear(embed_dim, n_classes)

    def forward(self, tokens: torch.Tensor, mask: torch.Tensor):
        """tokens: [B, L] byte ids (PAD_ID for padding), mask: [B, L] bool.

        Returns (logits [B, C], pooled [B, d]); pooled is the pre-head
        representation used as the white-box embedding.
        """
        L = tokens.shape[1]
        x = self.byte_embed(tokens) + self.pos_embed.weight[:L].unsqueeze(0)
        q, k, v = self.q(x), self.k(x), self.v(x)
        scores = q @ k.transpose(1, 2) / (self.embed_dim**0.5)
        scores = scores.masked_fill(~mask.unsqueeze(1), float("-inf"))
        attn = torch.softmax(scores, dim=-1)
        x = self.norm(x + attn @ v)
        denom = mask.sum(dim=1, keepdim=True).clamp(min=1)
        pooled = (x * mask.unsqueeze(-1)).sum(dim=1) / denom
        return self.head(pooled), pooled


def encode_batch(sequences, max_len: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Pad/truncate byte sequences into (tokens, mask) tensors."""
    L = max(1, min(max_len, max(len(s) for s in sequences)))
    tokens = torch.full((len(sequences), L), PAD_ID, dtype=torch.long)
    mask = torch.zeros((len(sequences), L), dtype=torch.bool)
    for i, seq in enumerate(sequences):
        seq = seq[:max_len]
        n = len(seq)
        if n:
            tokens[i, :n] = torch.frombuffer(bytearray(seq), dtype=torch.uint8).long()
            mask[i, :n] = True
    return tokens, mask


def train_toy(dataset, config: ToyConfig | None = None) -> ToyClassifierModel:
    """Train the toy classifier on the dataset's train split.

    Deterministic for a given config.seed. Raises DegenerateDataset when
    fewer than 2 classes or fewer than 50 samples per class are present.
    """
    cfg = config or ToyConfig()
    samples = dataset.samples
    train_idx = list(dataset.train_indices)
    labels = [samples[i].label for i in train_idx]
    classes = sorted(set(s.label for s in samples))
    if len(classes) < 2:
        raise DegenerateDataset("need at least 2 classes, got %d" % len(classes))
    for c in classes:
        n = sum(1 for s in samples if s.label == c)
        if n < 50:
            raise DegenerateDataset("class %r has %d samples, need >= 50" % (c, n))

    torch.manual_seed(cfg.seed)
    model = ToyClassifierModel(len(classes), cfg.embed_dim, cfg.max_len)
    opt = torch.optim.AdamW(model.parameters(), lr=cfg.lr, weight_decay=cfg.weight_decay)
    loss_fn = nn.CrossEntropyLoss()

    tokens, mask = encode_batch([samples[i].data for i in train_idx], cfg.max_len)
    target = torch.tensor(labels, dtype=torch.long)
    gen = torch.Generator().manual_seed(cfg.seed)

    model.train()
    for _epoch in range(cfg.epochs):
        order = torch.randperm(len(train_idx), generator=gen)
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            logits, _ = model(tokens[idx], mask[idx])
            loss = loss_fn(logits, target[idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
    model.eval()
    return model


class ToyOracle(Oracle):
    """White-box oracle over a trained toy classifier."""

    capabilities = OracleCapabilities(has_distribution=True, has_embedding=True)

    def __init__(self, model: ToyClassifierModel, batch_size: int = 256):
        self.model = model.eval()
        self.batch_size = batch_size

    @torch.no_grad()
    def predict_batch(self, batch):
        for data in batch:
            self.check_input(bytes(data))
        out: list[Prediction] = []
        for start in range(0, len(batch), self.batch_size):
            chunk = [bytes(b) for b in batch[start : start + self.batch_size]]
            tokens, mask = encode_batch(chunk, self.model.max_len)
            logits, pooled = self.model(tokens, mask)
            dist = torch.softmax(logits.double(), dim=-1)
            dist = dist / dist.sum(dim=-1, keepdim=True)
            labels = dist.argmax(dim=-1)
            for i in range(len(chunk)):
                out.append(
                    Prediction(
                        label=int(labels[i]),
                        distribution=dist[i].numpy(),
                        embedding=pooled[i].double().numpy(),
                    )
                )
        return out


def save_toy(path, model: ToyClassifierModel) -> str:
    header = {
        "n_classes": model.n_classes,
        "embed_dim": model.embed_dim,
        "max_len": model.max_len,
    }
    return save_checkpoint(path, "toy_classifier", header, model.state_dict())


def load_toy(path) -> ToyClassifierModel:
    header, state = load_checkpoint(path, expect_kind="toy_classifier")
    model = ToyClassifierModel(header["n_classes"], header["embed_dim"], header["max_len"])
    model.load_state_dict(state)
    return model.eval()


def ground_truth_accuracy(oracle: Oracle, sequences, labels) -> float:
    preds = oracle.predict_batch(list(sequences))
    hits = sum(1 for p, y in zip(preds, labels) if p.label == int(y))
    return hits / max(1, len(labels))
