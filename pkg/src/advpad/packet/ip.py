"""IPv4/TCP/UDP packet model: parse, serialize, checksum, finalize.

Packets round-trip byte-exactly: serialize(parse_packet(b)) == b for any
well-formed input, including IP/TCP options (carried opaquely) and capture
padding beyond total_length (re-emitted verbatim).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

from ..errors import (
    MalformedHeader,
    PacketTooLarge,
    TruncatedPacket,
    UnsupportedProtocol,
)

PROTO_TCP = 6
PROTO_UDP = 17

IP_MAX_LEN = 65535


def ones_complement_checksum(data: bytes) -> int:
    """RFC 1071 Internet checksum over big-endian 16-bit words.

    Odd-length input is zero-padded for summation. Returns the one's
    complement of the one's-complement word sum, as a 16-bit value.
    """
    if len(data) % 2:
        data = data + b"\x00"
    total = sum(struct.unpack("!%dH" % (len(data) // 2), data))
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


@dataclass
class IpHeader:
    version: int = 4
    ihl: int = 5
    tos: int = 0
    total_length: int = 0
    identification: int = 0
    flags_fragment: int = 0  # raw 16-bit flags+fragment-offset field
    ttl: int = 64
    protocol: int = PROTO_TCP
    header_checksum: int = 0
    src_addr: bytes = b"\x00\x00\x00\x00"
    dst_addr: bytes = b"\x00\x00\x00\x00"
    options: bytes = b""

    @property
    def header_len(self) -> int:
        return self.ihl * 4

    def to_bytes(self) -> bytes:
        head = struct.pack(
            "!BBHHHBBH4s4s",
            (self.version << 4) | self.ihl,
            self.tos,
            self.total_length,
            self.identification,
            self.flags_fragment,
            self.ttl,
            self.protocol,
            self.header_checksum,
            self.src_addr,
            self.dst_addr,
        )
        return head + self.options


@dataclass
class TcpHeader:
    src_port: int = 0
    dst_port: int = 0
    seq_num: int = 0
    ack_num: int = 0
    data_offset: int = 5
    flags: int = 0  # low 12 bits of the offset/flags word (reserved+flags)
    window: int = 0
    checksum: int = 0
    urgent_ptr: int = 0
    options: bytes = b""

    @property
    def header_len(self) -> int:
        return self.data_offset * 4

    def to_bytes(self) -> bytes:
        head = struct.pack(
            "!HHIIHHHH",
            self.src_port,
            self.dst_port,
            self.seq_num,
            self.ack_num,
            (self.data_offset << 12) | (self.flags & 0x0FFF),
            self.window,
            self.checksum,
            self.urgent_ptr,
        )
        return head + self.options


@dataclass
class UdpHeader:
    src_port: int = 0
    dst_port: int = 0
    length: int = 8
    checksum: int = 0

    @property
    def header_len(self) -> int:
        return 8

    def to_bytes(self) -> bytes:
        return struct.pack(
            "!HHHH", self.src_port, self.dst_port, self.length, self.checksum
        )


@dataclass
class ParsedPacket:
    ip: IpHeader
    transport: TcpHeader | UdpHeader
    payload: bytes
    # capture bytes beyond total_length (e.g. Ethernet pad), kept verbatim
    padding: bytes = b""

    @property
    def is_tcp(self) -> bool:
        return self.ip.protocol == PROTO_TCP

    @property
    def is_udp(self) -> bool:
        return self.ip.protocol == PROTO_UDP

    @property
    def total_length(self) -> int:
        return self.ip.total_length

    def copy(self) -> "ParsedPacket":
        return ParsedPacket(
            ip=replace(self.ip),
            transport=replace(self.transport),
            payload=self.payload,
            padding=self.padding,
        )


def parse_packet(raw: bytes) -> ParsedPacket:
    """Decode an IPv4 packet carrying TCP or UDP.

    Raises TruncatedPacket, UnsupportedProtocol, or MalformedHeader.
    """
    if len(raw) < 20:
        raise TruncatedPacket("need at least 20 bytes for an IPv4 header, got %d" % len(raw))
    version = raw[0] >> 4
    if version != 4:
        raise UnsupportedProtocol("IP version %d not supported (IPv4 only)" % version)
    ihl = raw[0] & 0x0F
    if ihl < 5:
        raise MalformedHeader("ihl %d < 5" % ihl)
    ip_hlen = ihl * 4
    if len(raw) < ip_hlen:
        raise TruncatedPacket("ihl declares %d header bytes, got %d" % (ip_hlen, len(raw)))

    (tos, total_length, ident, flags_frag, ttl, proto, checksum) = struct.unpack(
        "!BHHHBBH", raw[1:12]
    )
    src, dst = raw[12:16], raw[16:20]
    if proto not in (PROTO_TCP, PROTO_UDP):
        raise UnsupportedProtocol("transport protocol %d not in {TCP, UDP}" % proto)
    if total_length < ip_hlen:
        raise MalformedHeader("total_length %d < ip header %d" % (total_length, ip_hlen))
    if len(raw) < total_length:
        raise TruncatedPacket(
            "total_length declares %d bytes, capture holds %d" % (total_length, len(raw))
        )

    ip = IpHeader(
        version=version,
        ihl=ihl,
        tos=tos,
        total_length=total_length,
        identification=ident,
        flags_fragment=flags_frag,
        ttl=ttl,
        protocol=proto,
        header_checksum=checksum,
        src_addr=src,
        dst_addr=dst,
        options=raw[20:ip_hlen],
    )

    body = raw[ip_hlen:total_length]
    transport: TcpHeader | UdpHeader
    if proto == PROTO_TCP:
        if len(body) < 20:
            raise TruncatedPacket("TCP header needs 20 bytes, got %d" % len(body))
        sport, dport, seq, ack, off_flags, window, tsum, urg = struct.unpack(
            "!HHIIHHHH", body[:20]
        )
        data_offset = off_flags >> 12
        if data_offset < 5:
            raise MalformedHeader("TCP data offset %d < 5" % data_offset)
        t_hlen = data_offset * 4
        if len(body) < t_hlen:
            raise TruncatedPacket(
                "TCP data offset declares %d bytes, segment holds %d" % (t_hlen, len(body))
            )
        transport = TcpHeader(
            src_port=sport,
            dst_port=dport,
            seq_num=seq,
            ack_num=ack,
            data_offset=data_offset,
            flags=off_flags & 0x0FFF,
            window=window,
            checksum=tsum,
            urgent_ptr=urg,
            options=body[20:t_hlen],
        )
        payload = body[t_hlen:]
    else:
        if len(body) < 8:
            raise TruncatedPacket("UDP header needs 8 bytes, got %d" % len(body))
        sport, dport, ulen, usum = struct.unpack("!HHHH", body[:8])
        if ulen < 8 or ulen > len(body):
            raise MalformedHeader("UDP length %d inconsistent with segment %d" % (ulen, len(body)))
        transport = UdpHeader(src_port=sport, dst_port=dport, length=ulen, checksum=usum)
        payload = body[8:ulen]
        if ulen < len(body):
            # bytes between UDP length and IP total_length are malformed
            raise MalformedHeader(
                "UDP length %d leaves %d stray bytes inside total_length" % (ulen, len(body) - ulen)
            )

    return ParsedPacket(ip=ip, transport=transport, payload=payload, padding=raw[total_length:])


def serialize(pkt: ParsedPacket) -> bytes:
    """Wire bytes for a packet, exactly as its fields are stored."""
    return pkt.ip.to_bytes() + pkt.transport.to_bytes() + pkt.payload + pkt.padding


def ip_header_checksum(pkt: ParsedPacket) -> int:
    """Checksum of the IP header with its checksum field zeroed."""
    hdr = replace(pkt.ip, header_checksum=0).to_bytes()
    return ones_complement_checksum(hdr)


def transport_checksum(pkt: ParsedPacket) -> int:
    """Pseudo-header checksum for the packet's TCP/UDP segment.

    Covers src/dst addresses, zero, protocol, transport length, the
    transport header with its checksum field zeroed, and the payload.
    """
    seg = replace(pkt.transport, checksum=0).to_bytes() + pkt.payload
    pseudo = struct.pack(
        "!4s4sBBH", pkt.ip.src_addr, pkt.ip.dst_addr, 0, pkt.ip.protocol, len(seg)
    )
    return ones_complement_checksum(pseudo + seg)


def finalize(pkt: ParsedPacket) -> ParsedPacket:
    """Recompute all dependent fields after arbitrary mutation.

    Sets total_length, UDP length, IP header checksum and the transport
    checksum. A UDP checksum stored as 0x0000 (disabled) stays disabled;
    a computed UDP checksum of zero is transmitted as 0xFFFF per RFC 768.
    Raises PacketTooLarge when total_length would exceed 65535.
    """
    out = pkt.copy()
    total = out.ip.header_len + out.transport.header_len + len(out.payload)
    if total > IP_MAX_LEN:
        raise PacketTooLarge("total_length %d exceeds %d" % (total, IP_MAX_LEN))
    out.ip.total_length = total
    if out.is_udp:
        out.transport.length = 8 + len(out.payload)
    out.ip.header_checksum = ip_header_checksum(out)
    if out.is_udp and pkt.transport.checksum == 0:
        out.transport.checksum = 0
    else:
        csum = transport_checksum(out)
        if out.is_udp and csum == 0:
            csum = 0xFFFF
        out.transport.checksum = csum
    return out


def validate(pkt: ParsedPacket) -> None:
    """Raise MalformedHeader unless lengths and checksums are consistent."""
    expect = pkt.ip.header_len + pkt.transport.header_len + len(pkt.payload)
    if pkt.ip.total_length != expect:
        raise MalformedHeader(
            "total_length %d != header+payload %d" % (pkt.ip.total_length, expect)
        )
    if pkt.is_udp and pkt.transport.length != 8 + len(pkt.payload):
        raise MalformedHeader("UDP length %d != 8+payload" % pkt.transport.length)
    if pkt.is_tcp and pkt.transport.data_offset < 5:
        raise MalformedHeader("TCP data offset < 5")
    if ip_header_checksum(pkt) != pkt.ip.header_checksum:
        raise MalformedHeader("IP header checksum mismatch")
    if not (pkt.is_udp and pkt.transport.checksum == 0):
        stored = pkt.transport.checksum
        computed = transport_checksum(pkt)
        if pkt.is_udp and computed == 0:
            computed = 0xFFFF
        if stored != computed:
            raise MalformedHeader("transport checksum mismatch")


def verifies(pkt: ParsedPacket) -> bool:
    """True when the packet passes validate() without raising."""
    try:
        validate(pkt)
    except MalformedHeader:
        return False
    return True
