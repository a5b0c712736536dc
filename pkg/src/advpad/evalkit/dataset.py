"""Dataset ingestion and preprocessing.

Classifier inputs are the packet bytes after discarding everything that
identifies endpoints rather than content: the Ethernet header, the whole
IP header, and the transport-layer port numbers. Transport checksums are
zeroed in place (they are recomputed junk that would otherwise leak
length/content noise into the model). ARP/DHCP traffic, payload-less
packets and packets shorter than 20 post-strip bytes are dropped.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import EmptyAfterFiltering, PacketError
from ..packet import (
    LINKTYPE_ETHERNET,
    ParsedPacket,
    parse_packet,
    read_pcap,
)

MIN_STRIPPED_LEN = 20
DHCP_PORTS = {67, 68}
ETHERTYPE_IPV4 = 0x0800


@dataclass
class PacketSample:
    """A labeled packet before preprocessing."""

    raw: bytes
    label: object
    flow_id: str = ""
    direction: int = 0


@dataclass
class Sample:
    """A preprocessed classifier input."""

    data: bytes
    label: int
    flow_id: str = ""
    direction: int = 0
    source_index: int = -1


@dataclass
class LabeledDataset:
    samples: list[Sample] = field(default_factory=list)
    train_indices: list[int] = field(default_factory=list)
    val_indices: list[int] = field(default_factory=list)
    test_indices: list[int] = field(default_factory=list)
    label_names: list[str] = field(default_factory=list)
    seed: int = 0

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    def split(self, name: str) -> list[Sample]:
        indices = {
            "train": self.train_indices,
            "val": self.val_indices,
            "test": self.test_indices,
        }[name]
        return [self.samples[i] for i in indices]


def strip_for_classifier(pkt: ParsedPacket) -> bytes:
    """Transport header without ports (checksum zeroed) + payload."""
    if pkt.is_tcp:
        t = pkt.transport
        header = struct.pack(
            "!IIHHHH",
            t.seq_num,
            t.ack_num,
            (t.data_offset << 12) | (t.flags & 0x0FFF),
            t.window,
            0,  # checksum zeroed
            t.urgent_ptr,
        ) + t.options
    else:
        header = struct.pack("!HH", pkt.transport.length, 0)
    return header + pkt.payload


def _keep(pkt: ParsedPacket) -> bool:
    if pkt.is_udp and (
        pkt.transport.src_port in DHCP_PORTS or pkt.transport.dst_port in DHCP_PORTS
    ):
        return False
    if len(pkt.payload) == 0:
        return False
    return len(strip_for_classifier(pkt)) >= MIN_STRIPPED_LEN


def _split_counts(n: int) -> tuple[int, int, int]:
    n_val = n // 10
    n_test = n // 10
    return n - n_val - n_test, n_val, n_test


def preprocess(packet_samples: list[PacketSample], seed: int = 0) -> LabeledDataset:
    """Filter, strip and split labeled packets into a LabeledDataset.

    The split is a deterministic seeded shuffle cut 8:1:1 by count.
    Raises EmptyAfterFiltering when no packet survives.
    """
    import random

    kept: list[Sample] = []
    labels_seen = []
    for idx, ps in enumerate(packet_samples):
        try:
            pkt = ps.raw if isinstance(ps.raw, ParsedPacket) else parse_packet(ps.raw)
        except PacketError:
            continue  # non-IPv4 / non-TCP-UDP traffic (ARP & friends)
        if not _keep(pkt):
            continue
        if ps.label not in labels_seen:
            labels_seen.append(ps.label)
        kept.append(
            Sample(
                data=strip_for_classifier(pkt),
                label=ps.label,  # remapped below
                flow_id=ps.flow_id,
                direction=ps.direction,
                source_index=idx,
            )
        )
    if not kept:
        raise EmptyAfterFiltering("no packets survived preprocessing")

    label_names = sorted(labels_seen, key=str)
    label_map = {name: i for i, name in enumerate(label_names)}
    for s in kept:
        s.label = label_map[s.label]

    order = list(range(len(kept)))
    random.Random(seed).shuffle(order)
    n_train, n_val, n_test = _split_counts(len(kept))
    return LabeledDataset(
        samples=kept,
        train_indices=sorted(order[:n_train]),
        val_indices=sorted(order[n_train : n_train + n_val]),
        test_indices=sorted(order[n_train + n_val :]),
        label_names=[str(x) for x in label_names],
        seed=seed,
    )


# --- ingestion ---------------------------------------------------------------

def load_jsonl(path) -> list[PacketSample]:
    """JSONL ingestion: {"bytes_hex", "label", "flow_id"?, "direction"?}."""
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append(
                PacketSample(
                    raw=bytes.fromhex(obj["bytes_hex"]),
                    label=obj["label"],
                    flow_id=str(obj.get("flow_id", "")),
                    direction=int(obj.get("direction", 0)),
                )
            )
    return out


def save_jsonl(path, samples: list[PacketSample]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for ps in samples:
            f.write(
                json.dumps(
                    {
                        "bytes_hex": ps.raw.hex(),
                        "label": ps.label,
                        "flow_id": ps.flow_id,
                        "direction": ps.direction,
                    }
                )
                + "\n"
            )


def strip_ethernet(data: bytes, linktype: int) -> bytes | None:
    """IP bytes from a capture record, or None for non-IPv4 frames."""
    if linktype != LINKTYPE_ETHERNET:
        return data
    if len(data) < 14:
        return None
    ethertype = (data[12] << 8) | data[13]
    if ethertype != ETHERTYPE_IPV4:
        return None
    return data[14:]


def _five_tuple(pkt: ParsedPacket):
    a = (pkt.ip.src_addr, pkt.transport.src_port)
    b = (pkt.ip.dst_addr, pkt.transport.dst_port)
    if a <= b:
        return (a, b, pkt.ip.protocol), 0
    return (b, a, pkt.ip.protocol), 1


def load_pcap_dir(directory, labels_csv) -> list[PacketSample]:
    """pcap-directory ingestion: labels.csv rows are (filename, label)."""
    labels: dict[str, str] = {}
    with open(labels_csv, "r", encoding="utf-8") as f:
        for row in csv.reader(f):
            if len(row) >= 2:
                labels[row[0].strip()] = row[1].strip()
    out: list[PacketSample] = []
    for name in sorted(labels):
        path = Path(directory) / name
        cap = read_pcap(path)
        for rec in cap.records:
            ip_bytes = strip_ethernet(rec.data, cap.linktype)
            if ip_bytes is None:
                continue
            try:
                pkt = parse_packet(ip_bytes)
            except PacketError:
                continue
            key, direction = _five_tuple(pkt)
            out.append(
                PacketSample(
                    raw=ip_bytes,
                    label=labels[name],
                    flow_id="%s/%s" % (name, hash(key) & 0xFFFFFFFF),
                    direction=direction,
                )
            )
    return out
