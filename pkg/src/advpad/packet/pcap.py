"""Classic pcap reading and writing.

Supports the microsecond magic (0xA1B2C3D4) in either byte order, with
Ethernet (DLT 1) or raw-IP (DLT 101) link types. Records survive a
read/write round trip byte-for-byte.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from ..errors import BadMagic, TruncatedRecord

MAGIC_USEC = 0xA1B2C3D4
LINKTYPE_ETHERNET = 1
LINKTYPE_RAW_IP = 101

_GLOBAL_HEADER = "IHHiIII"
_RECORD_HEADER = "IIII"


@dataclass
class PcapRecord:
    ts_sec: int
    ts_usec: int
    data: bytes
    orig_len: int | None = None  # defaults to len(data) on write

    @property
    def timestamp(self) -> float:
        return self.ts_sec + self.ts_usec / 1e6


@dataclass
class PcapCapture:
    linktype: int = LINKTYPE_RAW_IP
    snaplen: int = 0x40000
    records: list[PcapRecord] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def read_pcap(path) -> PcapCapture:
    """Read a classic pcap file into memory.

    Raises BadMagic for unknown magic numbers and TruncatedRecord when a
    record header declares more bytes than the file holds.
    """
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 24:
        raise BadMagic("file too short for a pcap global header")
    magic_le = struct.unpack("<I", blob[:4])[0]
    magic_be = struct.unpack(">I", blob[:4])[0]
    if magic_le == MAGIC_USEC:
        endian = "<"
    elif magic_be == MAGIC_USEC:
        endian = ">"
    else:
        raise BadMagic("unknown pcap magic 0x%08X" % magic_be)

    _, _vmaj, _vmin, _zone, _sig, snaplen, network = struct.unpack(
        endian + _GLOBAL_HEADER, blob[:24]
    )
    cap = PcapCapture(linktype=network, snaplen=snaplen)
    off = 24
    while off < len(blob):
        if off + 16 > len(blob):
            raise TruncatedRecord("record header truncated at offset %d" % off)
        ts_sec, ts_usec, incl_len, orig_len = struct.unpack(
            endian + _RECORD_HEADER, blob[off : off + 16]
        )
        off += 16
        if off + incl_len > len(blob):
            raise TruncatedRecord(
                "record at offset %d declares %d bytes, %d remain" % (off - 16, incl_len, len(blob) - off)
            )
        cap.records.append(
            PcapRecord(ts_sec=ts_sec, ts_usec=ts_usec, data=blob[off : off + incl_len], orig_len=orig_len)
        )
        off += incl_len
    return cap


def write_pcap(path, capture: PcapCapture) -> None:
    """Write records as a little-endian classic pcap file."""
    with open(path, "wb") as f:
        f.write(
            struct.pack(
                "<" + _GLOBAL_HEADER, MAGIC_USEC, 2, 4, 0, 0, capture.snaplen, capture.linktype
            )
        )
        for rec in capture.records:
            orig = rec.orig_len if rec.orig_len is not None else len(rec.data)
            f.write(struct.pack("<" + _RECORD_HEADER, rec.ts_sec, rec.ts_usec, len(rec.data), orig))
            f.write(rec.data)


def read_hex_dump(path) -> list[bytes]:
    """Fixture format: one packet per line, lowercase hex, # comments allowed."""
    packets = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            packets.append(bytes.fromhex(line))
    return packets


def write_hex_dump(path, packets) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for raw in packets:
            f.write(raw.hex())
            f.write("\n")
