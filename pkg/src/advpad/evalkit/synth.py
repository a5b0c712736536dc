"""Synthetic labeled traffic for desk-scale experiments.

Five classes of TCP packets. Each class owns a byte distribution that
shapes the first 64 post-strip bytes (mutable header fields plus the
payload front) and a 4-byte motif placed at a random early offset, so the
class signal is prefix-dominant: long prefixes classify near-perfectly,
very short prefixes are ambiguous, and bytes past the front carry nothing.
That is the regime in which pre-padding and post-padding behave very
differently.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..packet import IpHeader, ParsedPacket, TcpHeader, finalize, serialize
from .dataset import PacketSample

CLASS_REGION = 64  # post-strip bytes shaped by the class distribution
MOTIF_LEN = 4
# Motif offsets are post-strip positions. The window must avoid the
# data-offset/flags bytes (8-9) and the checksum bytes (12-13), which the
# packet structure owns, so the usable early offsets start at 14.
MOTIF_MIN_OFFSET = 14
MOTIF_MAX_OFFSET = 40

# post-strip positions the generator cannot shape (structure/checksum)
_STRUCTURAL = (8, 9, 12, 13)


@dataclass
class SynthConfig:
    n_classes: int = 5
    packets_per_class: int = 2000
    min_total_len: int = 60
    max_total_len: int = 1400
    preferred_set_size: int = 64
    preferred_weight: float = 0.8
    flow_len_range: tuple[int, int] = (12, 28)
    run_len_range: tuple[int, int] = (1, 4)
    seed: int = 7


def class_distributions(cfg: SynthConfig, rng: np.random.Generator):
    """Per-class byte distributions and motifs."""
    dists = []
    motifs = []
    for _c in range(cfg.n_classes):
        preferred = rng.choice(256, size=cfg.preferred_set_size, replace=False)
        p = np.full(256, (1.0 - cfg.preferred_weight) / 256.0)
        p[preferred] += cfg.preferred_weight / cfg.preferred_set_size
        dists.append(p / p.sum())
        motifs.append(bytes(int(x) for x in rng.integers(0, 256, size=MOTIF_LEN)))
    return dists, motifs


def _build_packet(template: np.ndarray, payload_len: int, flow_key: bytes, direction: int,
                  rng: np.random.Generator) -> ParsedPacket:
    """Assemble a TCP packet whose post-strip view matches `template`
    (except the structural bytes) followed by uniform filler."""
    payload = bytearray(rng.integers(0, 256, size=payload_len, dtype=np.uint8).tobytes())
    n_front = min(len(template), 16 + payload_len) - 16
    if n_front > 0:
        payload[:n_front] = bytes(int(x) for x in template[16 : 16 + n_front])

    src = flow_key[:4] if direction == 0 else flow_key[4:8]
    dst = flow_key[4:8] if direction == 0 else flow_key[:4]
    sport = 49152 + (flow_key[8] << 8 | flow_key[9]) % 16000
    dport = 443
    ip = IpHeader(
        protocol=6,
        identification=int(rng.integers(0, 65536)),
        flags_fragment=0x4000,
        ttl=64,
        src_addr=src,
        dst_addr=dst,
    )
    tcp = TcpHeader(
        src_port=sport if direction == 0 else dport,
        dst_port=dport if direction == 0 else sport,
        seq_num=int(struct.unpack("!I", bytes(int(x) for x in template[0:4]))[0]),
        ack_num=int(struct.unpack("!I", bytes(int(x) for x in template[4:8]))[0]),
        data_offset=5,
        flags=0x018,
        window=int(template[10]) << 8 | int(template[11]),
        urgent_ptr=int(template[14]) << 8 | int(template[15]),
    )
    return finalize(ParsedPacket(ip=ip, transport=tcp, payload=bytes(payload)))


def make_synthetic_packets(cfg: SynthConfig | None = None) -> list[PacketSample]:
    """Generate the labeled synthetic corpus, grouped into flows with
    alternating direction runs (so bursts are well defined)."""
    cfg = cfg or SynthConfig()
    rng = np.random.default_rng(cfg.seed)
    dists, motifs = class_distributions(cfg, rng)

    out: list[PacketSample] = []
    for cls in range(cfg.n_classes):
        produced = 0
        flow_no = 0
        while produced < cfg.packets_per_class:
            flow_len = min(
                int(rng.integers(cfg.flow_len_range[0], cfg.flow_len_range[1] + 1)),
                cfg.packets_per_class - produced,
            )
            flow_id = "c%d-f%04d" % (cls, flow_no)
            flow_key = rng.integers(0, 256, size=10, dtype=np.uint8).tobytes()
            direction = 0
            emitted = 0
            while emitted < flow_len:
                run = min(
                    int(rng.integers(cfg.run_len_range[0], cfg.run_len_range[1] + 1)),
                    flow_len - emitted,
                )
                for _ in range(run):
                    total_len = int(rng.integers(cfg.min_total_len, cfg.max_total_len + 1))
                    payload_len = total_len - 40
                    template = rng.choice(256, size=CLASS_REGION, p=dists[cls]).astype(np.uint8)
                    offset = int(rng.integers(MOTIF_MIN_OFFSET, MOTIF_MAX_OFFSET + 1))
                    template[offset : offset + MOTIF_LEN] = np.frombuffer(
                        motifs[cls], dtype=np.uint8
                    )
                    pkt = _build_packet(template, payload_len, flow_key, direction, rng)
                    out.append(
                        PacketSample(
                            raw=serialize(pkt),
                            label="class-%d" % cls,
                            flow_id=flow_id,
                            direction=direction,
                        )
                    )
                    emitted += 1
                direction ^= 1
            produced += flow_len
            flow_no += 1
    return out
