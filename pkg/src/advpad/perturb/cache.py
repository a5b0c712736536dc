"""Pre-generated adversarial sequence cache.

Rolling the trained policy per packet is too slow for line-rate use, so
sequences are generated ahead of time and sampled uniformly at perturbation
time. File format: one JSON header line {"len": .., "k": .., "policy_version": ..},
then one lowercase-hex sequence per line.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from ..errors import EmptyCache
from ..packet import ParsedPacket
from .schemes import (
    PROVENANCE_CACHE,
    AdversarialByteSequence,
    PerturbationRecord,
    pre_pad,
)


@dataclass
class SequenceCache:
    entries: list[AdversarialByteSequence] = field(default_factory=list)
    sequence_len: int = 0
    generation_timestamp: float = 0.0
    policy_version: str = ""

    def __len__(self) -> int:
        return len(self.entries)


def build_cache(policy, sample_packets, k: int, length: int, seed: int = 0) -> SequenceCache:
    """Roll out `policy` on the sample packets until k sequences exist.

    Packets are visited cyclically; every rollout emits one complete
    length-`length` byte sequence.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not sample_packets:
        raise ValueError("need at least one sample packet")
    from ..rlgen.train import rollout_sequences  # local import; rlgen depends on perturb

    packets = [sample_packets[i % len(sample_packets)] for i in range(k)]
    sequences = rollout_sequences(policy, packets, budget=length, scheme="prepad", seed=seed)
    entries = [
        AdversarialByteSequence(seq, PROVENANCE_CACHE) for seq in sequences
    ]
    return SequenceCache(
        entries=entries,
        sequence_len=length,
        generation_timestamp=time.time(),
        policy_version=getattr(policy, "version", ""),
    )


def cache_pad(
    pkt: ParsedPacket, cache: SequenceCache, rng: random.Random
) -> tuple[ParsedPacket, PerturbationRecord]:
    """Uniformly sample a cached sequence and pre-pad the packet with it."""
    if not cache.entries:
        raise EmptyCache("sequence cache holds no entries")
    entry = cache.entries[rng.randrange(len(cache.entries))]
    return pre_pad(pkt, entry)


def save_cache(path, cache: SequenceCache) -> None:
    with open(path, "w", encoding="utf-8") as f:
        header = {
            "len": cache.sequence_len,
            "k": len(cache.entries),
            "policy_version": cache.policy_version,
        }
        f.write(json.dumps(header) + "\n")
        for entry in cache.entries:
            f.write(entry.data.hex() + "\n")


def load_cache(path) -> SequenceCache:
    with open(path, "r", encoding="utf-8") as f:
        header = json.loads(f.readline())
        entries = [
            AdversarialByteSequence(bytes.fromhex(line.strip()), PROVENANCE_CACHE)
            for line in f
            if line.strip()
        ]
    cache = SequenceCache(
        entries=entries,
        sequence_len=int(header["len"]),
        policy_version=header.get("policy_version", ""),
    )
    if any(len(e.data) != cache.sequence_len for e in entries):
        raise EmptyCache("cache entries disagree with declared length")
    return cache
