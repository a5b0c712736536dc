import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advpad.errors import AlreadyLonger, InconsistentRecord, PacketTooLarge
from advpad.packet import finalize, parse_packet, serialize, verifies
from advpad.perturb import (
    TRAILER_LEN,
    TRAILER_MAGIC,
    AdversarialByteSequence,
    PerturbationRecord,
    de_perturb,
    field_block,
    fixed_pad,
    post_pad,
    pre_pad,
    random_sequence,
)
from packetgen import make_packet, make_tcp_packet, make_udp_packet
from reference import reference_verify_stored


def test_prepad_empty_sequence_is_identity():
    rng = random.Random(0)
    pkt = make_tcp_packet(rng, payload_len=40)
    out, record = pre_pad(pkt, b"")
    assert serialize(out) == serialize(finalize(pkt))
    assert record.is_empty
    assert record.header_bytes_used == 0
    assert record.payload_insert_len == 0


def test_prepad_8_bytes_touches_only_seq_and_ack():
    rng = random.Random(1)
    pkt = make_tcp_packet(rng, payload_len=64)
    adv = bytes(range(8))
    out, record = pre_pad(pkt, adv)
    assert out.transport.seq_num == int.from_bytes(adv[:4], "big")
    assert out.transport.ack_num == int.from_bytes(adv[4:8], "big")
    assert out.transport.window == pkt.transport.window
    assert out.transport.urgent_ptr == pkt.transport.urgent_ptr
    # payload untouched apart from the appended trailer
    assert out.payload[:-TRAILER_LEN] == pkt.payload
    assert record.header_bytes_used == 8
    assert record.payload_insert_len == 0


def test_prepad_16_bytes_fills_fields_then_inserts():
    rng = random.Random(2)
    pkt = make_tcp_packet(rng, payload_len=4, tcp_options_words=0)
    adv = bytes(range(16))
    out, record = pre_pad(pkt, adv)
    assert field_block(out.transport) == adv[:12]
    assert out.payload[:4] == adv[12:16]
    assert out.payload[4:8] == pkt.payload
    assert record.header_bytes_used == 12
    assert record.payload_insert_len == 4
    # growth: 4 inserted + 15-byte trailer
    assert out.ip.total_length == pkt.ip.total_length + 4 + TRAILER_LEN
    raw = serialize(out)
    assert reference_verify_stored(raw)
    assert raw[-2:] == TRAILER_MAGIC


def test_prepad_udp_leaves_header_untouched():
    rng = random.Random(3)
    pkt = make_udp_packet(rng, payload_len=10)
    adv = bytes(range(16))
    out, record = pre_pad(pkt, adv)
    assert out.transport.src_port == pkt.transport.src_port
    assert out.transport.dst_port == pkt.transport.dst_port
    assert out.payload == adv + pkt.payload
    assert record.header_bytes_used == 0
    assert record.payload_insert_len == 16
    assert out.ip.total_length == pkt.ip.total_length + 16
    assert reference_verify_stored(serialize(out))


@pytest.mark.parametrize("budget", [1, 2, 4, 8, 16, 32])
def test_round_trip_tcp_and_udp(budget):
    rng = random.Random(budget)
    for _ in range(60):
        pkt = make_packet(rng)
        adv = rng.randbytes(budget)
        out, record = pre_pad(pkt, adv)
        assert verifies(out)
        back = de_perturb(out, record)
        assert serialize(back) == serialize(finalize(pkt))


def test_round_trip_without_record_tcp():
    rng = random.Random(77)
    pkt = make_tcp_packet(rng, payload_len=33)
    out, _record = pre_pad(pkt, rng.randbytes(20))
    back = de_perturb(out)  # trailer-only reversal
    assert serialize(back) == serialize(finalize(pkt))


def test_udp_round_trip_removes_exact_prefix():
    rng = random.Random(4)
    pkt = make_udp_packet(rng, payload_len=25)
    adv = rng.randbytes(9)
    out, record = pre_pad(pkt, adv)
    back = de_perturb(out, record)
    assert back.payload == pkt.payload
    assert serialize(back) == serialize(finalize(pkt))


def test_inconsistent_record_rejected():
    rng = random.Random(5)
    pkt = make_udp_packet(rng, payload_len=6)
    out, record = pre_pad(pkt, rng.randbytes(4))
    bad = PerturbationRecord(
        scheme=record.scheme,
        header_bytes_used=0,
        payload_insert_len=len(out.payload) + 1,
        original_field_bytes=record.original_field_bytes,
    )
    with pytest.raises(InconsistentRecord):
        de_perturb(out, bad)


def test_missing_trailer_rejected():
    rng = random.Random(6)
    pkt = make_tcp_packet(rng, payload_len=30)
    with pytest.raises(InconsistentRecord):
        de_perturb(pkt, PerturbationRecord(header_bytes_used=12, payload_insert_len=3))


def test_postpad_identity_and_growth():
    rng = random.Random(7)
    pkt = make_tcp_packet(rng, payload_len=12)
    assert serialize(post_pad(pkt, b"")) == serialize(finalize(pkt))
    out = post_pad(pkt, b"\x55" * 32)
    assert len(out.payload) == len(pkt.payload) + 32
    assert out.payload[: len(pkt.payload)] == pkt.payload
    assert out.ip.total_length == pkt.ip.total_length + 32
    assert reference_verify_stored(serialize(out))


def test_fixed_pad():
    rng = random.Random(8)
    pkt = make_tcp_packet(rng, payload_len=2)  # 42 bytes total
    out = fixed_pad(pkt, 1500)
    assert out.ip.total_length == 1500
    assert verifies(out)
    assert serialize(fixed_pad(out, 1500)) == serialize(out)
    with pytest.raises(AlreadyLonger):
        fixed_pad(fixed_pad(pkt, 1501), 1500)


def test_prepad_too_large_rejected():
    rng = random.Random(9)
    pkt = make_tcp_packet(rng, payload_len=65000)
    with pytest.raises(PacketTooLarge):
        pre_pad(pkt, b"\x00" * 600)


def test_random_sequence_deterministic_and_uniform():
    assert random_sequence(0, 1).data == b""
    a = random_sequence(64, 42)
    b = random_sequence(64, 42)
    c = random_sequence(64, 43)
    assert a.data == b.data
    assert a.data != c.data
    assert len(a) == 64

    from scipy.stats import chisquare

    draws = random_sequence(1_000_000, 7).data
    counts = [0] * 256
    for byte in draws:
        counts[byte] += 1
    _stat, p = chisquare(counts)
    assert p > 0.01


@given(st.binary(min_size=0, max_size=48), st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_reversibility_property(adv, seed):
    rng = random.Random(seed)
    pkt = make_packet(rng, payload_len=rng.randrange(0, 200))
    out, record = pre_pad(pkt, AdversarialByteSequence(adv))
    back = de_perturb(out, record)
    assert serialize(back) == serialize(finalize(pkt))
    assert verifies(out)


def test_budget_accounting_growth():
    rng = random.Random(10)
    for budget in (1, 5, 12, 13, 32):
        tcp = make_tcp_packet(rng, payload_len=50)
        out, _ = pre_pad(tcp, rng.randbytes(budget))
        inserted = max(0, budget - 12)
        assert out.ip.total_length - tcp.ip.total_length == inserted + TRAILER_LEN
        udp = make_udp_packet(rng, payload_len=50)
        out_u, _ = pre_pad(udp, rng.randbytes(budget))
        assert out_u.ip.total_length - udp.ip.total_length == budget


def test_perturbed_packets_reparse():
    rng = random.Random(11)
    for _ in range(40):
        pkt = make_packet(rng)
        out, _ = pre_pad(pkt, rng.randbytes(rng.choice([1, 2, 4, 8, 16, 32])))
        reparsed = parse_packet(serialize(out))
        assert serialize(reparsed) == serialize(out)
        assert verifies(reparsed)
