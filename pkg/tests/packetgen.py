"""Random well-formed packet builders for tests."""

import random
import struct

from advpad.packet import IpHeader, ParsedPacket, TcpHeader, UdpHeader, finalize


def make_tcp_packet(
    rng: random.Random,
    payload_len: int | None = None,
    tcp_options_words: int | None = None,
) -> ParsedPacket:
    if payload_len is None:
        payload_len = rng.randrange(0, 1200)
    if tcp_options_words is None:
        tcp_options_words = rng.choice([0, 0, 0, 1, 3])
    ip = IpHeader(
        protocol=6,
        identification=rng.randrange(0, 65536),
        flags_fragment=0x4000,
        ttl=rng.randrange(32, 128),
        src_addr=struct.pack("!I", rng.getrandbits(32)),
        dst_addr=struct.pack("!I", rng.getrandbits(32)),
    )
    tcp = TcpHeader(
        src_port=rng.randrange(1024, 65536),
        dst_port=rng.randrange(1, 65536),
        seq_num=rng.getrandbits(32),
        ack_num=rng.getrandbits(32),
        data_offset=5 + tcp_options_words,
        flags=0x018,
        window=rng.randrange(0, 65536),
        urgent_ptr=rng.randrange(0, 65536),
        options=rng.randbytes(4 * tcp_options_words),
    )
    payload = rng.randbytes(payload_len)
    return finalize(ParsedPacket(ip=ip, transport=tcp, payload=payload))


def make_udp_packet(
    rng: random.Random,
    payload_len: int | None = None,
    checksum_disabled: bool = False,
) -> ParsedPacket:
    if payload_len is None:
        payload_len = rng.randrange(0, 1200)
    ip = IpHeader(
        protocol=17,
        identification=rng.randrange(0, 65536),
        ttl=rng.randrange(32, 128),
        src_addr=struct.pack("!I", rng.getrandbits(32)),
        dst_addr=struct.pack("!I", rng.getrandbits(32)),
    )
    udp = UdpHeader(
        src_port=rng.randrange(1024, 65536),
        dst_port=rng.randrange(1, 65536),
        checksum=0 if checksum_disabled else 1,
    )
    payload = rng.randbytes(payload_len)
    return finalize(ParsedPacket(ip=ip, transport=udp, payload=payload))


def make_packet(rng: random.Random, **kw) -> ParsedPacket:
    if rng.random() < 0.5:
        return make_tcp_packet(rng, **kw)
    return make_udp_packet(rng, **kw)
