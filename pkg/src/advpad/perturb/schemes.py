"""Packet perturbation schemes and their reversal.

Pre-padding rewrites mutable TCP header fields (sequence number, ack
number, window, urgent pointer — in that order) with adversarial bytes and
inserts any remainder immediately before the payload. The original field
values travel in a fixed trailer at the packet end so the receiver can
restore the packet byte-exactly. UDP headers are never modified; the whole
sequence is inserted before the payload.

Trailer layout (TCP pre-pad only, 15 bytes appended after the payload):

    orig seq (4) | orig ack (4) | orig window (2) | orig urgent_ptr (2)
    | payload_insert_len (1) | magic 0xAD 0x7E

Post-padding appends bytes after the payload; fixed-pad appends zeros up
to a target size. Both are baselines and are not reversible.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

from ..errors import AlreadyLonger, InconsistentRecord, PacketTooLarge
from ..packet import ParsedPacket, TcpHeader, finalize

SCHEME_PREPAD = "prepad"
SCHEME_POSTPAD = "postpad"
SCHEME_FIXEDPAD = "fixedpad"

TRAILER_MAGIC = b"\xad\x7e"
TRAILER_LEN = 15
FIELD_BLOCK_LEN = 12  # seq(4) + ack(4) + window(2) + urgent_ptr(2)

PROVENANCE_RANDOM = "random"
PROVENANCE_POLICY = "policy"
PROVENANCE_CACHE = "cache"

SWEEP_LENGTHS = (1, 2, 4, 8, 16, 32)


@dataclass
class AdversarialByteSequence:
    data: bytes
    provenance: str = PROVENANCE_RANDOM

    def __len__(self) -> int:
        return len(self.data)


@dataclass
class PerturbationRecord:
    """Everything needed to reverse one pre-pad perturbation."""

    scheme: str = SCHEME_PREPAD
    header_bytes_used: int = 0
    payload_insert_len: int = 0
    original_field_bytes: bytes = b"\x00" * FIELD_BLOCK_LEN

    @property
    def is_empty(self) -> bool:
        return self.header_bytes_used == 0 and self.payload_insert_len == 0

    def to_json_dict(self, index: int) -> dict:
        return {
            "index": index,
            "scheme": self.scheme,
            "header_bytes_used": self.header_bytes_used,
            "payload_insert_len": self.payload_insert_len,
            "original_fields_hex": self.original_field_bytes.hex(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PerturbationRecord":
        return cls(
            scheme=obj["scheme"],
            header_bytes_used=int(obj["header_bytes_used"]),
            payload_insert_len=int(obj["payload_insert_len"]),
            original_field_bytes=bytes.fromhex(obj["original_fields_hex"]),
        )


def _as_bytes(adv) -> bytes:
    if isinstance(adv, AdversarialByteSequence):
        return adv.data
    return bytes(adv)


def field_block(tcp: TcpHeader) -> bytes:
    """The 12 mutable header bytes in overwrite order."""
    return struct.pack("!IIHH", tcp.seq_num, tcp.ack_num, tcp.window, tcp.urgent_ptr)


def set_field_block(tcp: TcpHeader, block: bytes) -> None:
    tcp.seq_num, tcp.ack_num, tcp.window, tcp.urgent_ptr = struct.unpack("!IIHH", block)


def random_sequence(length: int, rng_seed: int) -> AdversarialByteSequence:
    """Uniform random bytes, deterministic for a given seed."""
    rng = random.Random(rng_seed)
    return AdversarialByteSequence(rng.randbytes(length), PROVENANCE_RANDOM)


def pre_pad(pkt: ParsedPacket, adv) -> tuple[ParsedPacket, PerturbationRecord]:
    """Apply the pre-padding scheme and return the reversal record.

    TCP: the first min(|adv|, 12) bytes overwrite seq/ack/window/urgent in
    order, the rest are inserted before the payload, and the 15-byte
    reversal trailer is appended. UDP: the whole sequence is inserted
    before the payload and no trailer is added. The output is finalized.
    """
    data = _as_bytes(adv)
    if len(data) == 0:
        return finalize(pkt), PerturbationRecord(scheme=SCHEME_PREPAD)

    out = pkt.copy()
    if out.is_tcp:
        used = min(len(data), FIELD_BLOCK_LEN)
        original = field_block(out.transport)
        patched = data[:used] + original[used:]
        set_field_block(out.transport, patched)
        insert = data[used:]
        if len(insert) > 255:
            raise PacketTooLarge(
                "payload_insert_len %d does not fit the trailer length byte" % len(insert)
            )
        trailer = original + bytes([len(insert)]) + TRAILER_MAGIC
        out.payload = insert + out.payload + trailer
        record = PerturbationRecord(
            scheme=SCHEME_PREPAD,
            header_bytes_used=used,
            payload_insert_len=len(insert),
            original_field_bytes=original,
        )
    else:
        out.payload = data + out.payload
        record = PerturbationRecord(
            scheme=SCHEME_PREPAD,
            header_bytes_used=0,
            payload_insert_len=len(data),
        )
    return finalize(out), record


def de_perturb(pkt: ParsedPacket, record: PerturbationRecord | None = None) -> ParsedPacket:
    """Reverse a pre-pad perturbation.

    For TCP the trailer makes reversal self-contained; a record, when
    given, is cross-checked against it. UDP reversal requires the record.
    Raises InconsistentRecord when trailer/record disagree with the
    packet's length arithmetic.
    """
    if record is not None and record.scheme != SCHEME_PREPAD:
        raise InconsistentRecord("only %s records are reversible" % SCHEME_PREPAD)
    if record is not None and record.is_empty:
        return finalize(pkt)

    out = pkt.copy()
    if out.is_tcp:
        if len(out.payload) < TRAILER_LEN:
            raise InconsistentRecord("payload too short to hold a reversal trailer")
        trailer = out.payload[-TRAILER_LEN:]
        if trailer[-2:] != TRAILER_MAGIC:
            raise InconsistentRecord("trailer magic missing")
        original = trailer[:FIELD_BLOCK_LEN]
        insert_len = trailer[FIELD_BLOCK_LEN]
        body = out.payload[:-TRAILER_LEN]
        if record is not None:
            if record.payload_insert_len != insert_len:
                raise InconsistentRecord(
                    "record insert length %d != trailer %d" % (record.payload_insert_len, insert_len)
                )
            if record.original_field_bytes != original:
                raise InconsistentRecord("record original fields differ from trailer")
        if insert_len > len(body):
            raise InconsistentRecord(
                "insert length %d exceeds payload %d" % (insert_len, len(body))
            )
        out.payload = body[insert_len:]
        set_field_block(out.transport, original)
    else:
        if record is None:
            raise InconsistentRecord("UDP reversal requires the perturbation record")
        if record.payload_insert_len > len(out.payload):
            raise InconsistentRecord(
                "insert length %d exceeds payload %d"
                % (record.payload_insert_len, len(out.payload))
            )
        out.payload = out.payload[record.payload_insert_len :]
    return finalize(out)


def post_pad(pkt: ParsedPacket, adv) -> ParsedPacket:
    """Append the sequence after the payload (RandPostPad / RLPostPad)."""
    data = _as_bytes(adv)
    out = pkt.copy()
    out.payload = out.payload + data
    return finalize(out)


def fixed_pad(pkt: ParsedPacket, target_len: int) -> ParsedPacket:
    """Zero-pad the packet until total_length == target_len (Ditto-style)."""
    if pkt.ip.total_length > target_len:
        raise AlreadyLonger(
            "packet is %d bytes, target is %d" % (pkt.ip.total_length, target_len)
        )
    out = pkt.copy()
    out.payload = out.payload + b"\x00" * (target_len - pkt.ip.total_length)
    return finalize(out)
