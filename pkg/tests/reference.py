"""Independent oracles used by the test suite.

Kept deliberately separate from the package: a straight byte-pair loop
with a 32-bit accumulator, plus pseudo-header assembly that never touches
advpad's own serialization helpers.
"""

import struct


def reference_checksum(data: bytes) -> int:
    acc = 0
    for i in range(0, len(data), 2):
        hi = data[i]
        lo = data[i + 1] if i + 1 < len(data) else 0
        acc = (acc + ((hi << 8) | lo)) & 0xFFFFFFFF
    acc = (acc >> 16) + (acc & 0xFFFF)
    acc += acc >> 16
    return ~acc & 0xFFFF


def reference_ip_checksum(raw_packet: bytes) -> int:
    """IP header checksum recomputed from raw wire bytes (field zeroed)."""
    ihl = raw_packet[0] & 0x0F
    hdr = bytearray(raw_packet[: ihl * 4])
    hdr[10:12] = b"\x00\x00"
    return reference_checksum(bytes(hdr))


def reference_transport_checksum(raw_packet: bytes) -> int:
    """Transport checksum recomputed from raw wire bytes (field zeroed)."""
    ihl = raw_packet[0] & 0x0F
    proto = raw_packet[9]
    total = (raw_packet[2] << 8) | raw_packet[3]
    seg = bytearray(raw_packet[ihl * 4 : total])
    if proto == 6:
        seg[16:18] = b"\x00\x00"
    elif proto == 17:
        seg[6:8] = b"\x00\x00"
    else:
        raise ValueError("unsupported protocol %d" % proto)
    pseudo = struct.pack(
        "!4s4sBBH", raw_packet[12:16], raw_packet[16:20], 0, proto, len(seg)
    )
    return reference_checksum(pseudo + bytes(seg))


def reference_verify_stored(raw_packet: bytes) -> bool:
    """Self-verification: summing the checksummed regions including the
    stored checksum fields must give 0x0000 (i.e. complement 0xFFFF)."""
    ihl = raw_packet[0] & 0x0F
    proto = raw_packet[9]
    total = (raw_packet[2] << 8) | raw_packet[3]
    if reference_checksum(raw_packet[: ihl * 4]) != 0:
        return False
    seg = raw_packet[ihl * 4 : total]
    if proto == 17 and seg[6:8] == b"\x00\x00":
        return True  # UDP checksum disabled
    pseudo = struct.pack(
        "!4s4sBBH", raw_packet[12:16], raw_packet[16:20], 0, proto, len(seg)
    )
    return reference_checksum(pseudo + seg) == 0
