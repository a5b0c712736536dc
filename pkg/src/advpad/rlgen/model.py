"""Policy and critic networks over raw packet bytes.

Both use the same compact encoder: byte + position embeddings, two
self-attention blocks, masked mean pooling into a fixed-size state
embedding. The policy head maps the embedding to 256 action logits (one
per byte value); the critic head maps it to a scalar state value. Action
distributions come from a temperature softmax over the logits.
"""

from __future__ import annotations

import torch
from torch import nn

from ..errors import NonPositiveTemperature

N_ACTIONS = 256
PAD_ID = 256


class EncoderBlock(nn.Module):
    def __init__(self, dim: int, n_heads: int):
        super().__init__()
        self.attn = nn.MultiheadAttention(dim, n_heads, batch_first=True)
        self.norm1 = nn.LayerNorm(dim)
        self.ffn = nn.Sequential(nn.Linear(dim, 2 * dim), nn.GELU(), nn.Linear(2 * dim, dim))
        self.norm2 = nn.LayerNorm(dim)

    def forward(self, x: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        attn_out, _ = self.attn(x, x, x, key_padding_mask=pad_mask, need_weights=False)
        x = self.norm1(x + attn_out)
        return self.norm2(x + self.ffn(x))


class ByteSequenceEncoder(nn.Module):
    """Variable-length byte sequences -> fixed-size embedding."""

    def __init__(self, dim: int = 64, n_heads: int = 4, n_layers: int = 2, max_len: int = 256):
        super().__init__()
        self.dim = dim
        self.max_len = max_len
        self.byte_embed = nn.Embedding(257, dim, padding_idx=PAD_ID)
        self.pos_embed = nn.Embedding(max_len, dim)
        self.blocks = nn.ModuleList(EncoderBlock(dim, n_heads) for _ in range(n_layers))

    def forward(self, tokens: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        L = tokens.shape[1]
        x = self.byte_embed(tokens) + self.pos_embed.weight[:L].unsqueeze(0)
        pad = ~mask
        for block in self.blocks:
            x = block(x, pad)
        denom = mask.sum(dim=1, keepdim=True).clamp(min=1)
        return (x * mask.unsqueeze(-1)).sum(dim=1) / denom


class ActorCritic(nn.Module):
    """Shared encoder with a policy head (256 logits) and a critic head
    (scalar state value). One forward serves both action sampling and the
    value baseline."""

    def __init__(self, dim: int = 64, n_heads: int = 4, n_layers: int = 2, max_len: int = 256):
        super().__init__()
        self.encoder = ByteSequenceEncoder(dim, n_heads, n_layers, max_len)
        self.policy_head = nn.Linear(dim, N_ACTIONS)
        self.critic_head = nn.Linear(dim, 1)

    @property
    def max_len(self) -> int:
        return self.encoder.max_len

    def forward(self, tokens: torch.Tensor, mask: torch.Tensor):
        emb = self.encoder(tokens, mask)
        return self.policy_head(emb), self.critic_head(emb).squeeze(-1)

    def logits(self, tokens: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.policy_head(self.encoder(tokens, mask))

    def values(self, tokens: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.critic_head(self.encoder(tokens, mask)).squeeze(-1)

    def actor_parameters(self):
        """Encoder + policy head: updated at the actor learning rate."""
        yield from self.encoder.parameters()
        yield from self.policy_head.parameters()

    def critic_parameters(self):
        yield from self.critic_head.parameters()


def encode_state_batch(byte_seqs, max_len: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Pad/truncate state byte strings into (tokens, mask).

    States longer than max_len keep their first max_len bytes — headers and
    the payload front, which is where the perturbation lives.
    """
    L = max(1, min(max_len, max(len(s) for s in byte_seqs)))
    tokens = torch.full((len(byte_seqs), L), PAD_ID, dtype=torch.long)
    mask = torch.zeros((len(byte_seqs), L), dtype=torch.bool)
    for i, seq in enumerate(byte_seqs):
        seq = seq[:max_len]
        n = len(seq)
        if n:
            tokens[i, :n] = torch.frombuffer(bytearray(seq), dtype=torch.uint8).long()
            mask[i, :n] = True
    return tokens, mask


def temperature_softmax(logits: torch.Tensor, tau: float) -> torch.Tensor:
    """Softmax over logits/tau. tau > 1 flattens, tau < 1 sharpens."""
    if tau <= 0:
        raise NonPositiveTemperature("temperature must be > 0, got %r" % tau)
    return torch.softmax(logits / tau, dim=-1)


def distribution_entropy(dist: torch.Tensor) -> torch.Tensor:
    """Shannon entropy in nats along the last axis (0·log 0 = 0)."""
    logp = torch.where(dist > 0, dist.log(), torch.zeros_like(dist))
    return -(dist * logp).sum(dim=-1)


def sample_action(dist: torch.Tensor, generator: torch.Generator) -> int:
    """One action index drawn from a single distribution."""
    return int(torch.multinomial(dist, 1, generator=generator).item())


def sample_actions(dist: torch.Tensor, generator: torch.Generator) -> torch.Tensor:
    """Batched sampling: dist [B, 256] -> actions [B]."""
    return torch.multinomial(dist, 1, generator=generator).squeeze(-1)


def policy_forward(model: "ActorCritic", state_bytes: bytes) -> torch.Tensor:
    """Action logits for a single state."""
    tokens, mask = encode_state_batch([state_bytes], model.max_len)
    return model.logits(tokens, mask).squeeze(0)
