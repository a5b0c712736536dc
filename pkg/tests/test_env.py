import random

import pytest

from advpad.errors import EpisodeFinished
from advpad.packet import serialize
from advpad.perturb import field_block, post_pad, pre_pad
from advpad.rlgen import env_reset, env_step, final_packet
from advpad.rlgen.env import first_payload_step, replay_actions
from packetgen import make_packet, make_tcp_packet, make_udp_packet


def test_reset_twice_identical():
    rng = random.Random(0)
    pkt = make_tcp_packet(rng, payload_len=10)
    a = env_reset(pkt, 8)
    b = env_reset(pkt, 8)
    assert a.state_bytes() == b.state_bytes()
    assert a.t == b.t == 1
    assert a.state_bytes() == serialize(pkt)


def test_budget_one_terminates():
    rng = random.Random(1)
    pkt = make_tcp_packet(rng, payload_len=10)
    state = env_reset(pkt, 1)
    state, done = env_step(state, 0x41)
    assert done
    with pytest.raises(EpisodeFinished):
        env_step(state, 0x42)


def test_tcp_budget_12_touches_header_only():
    rng = random.Random(2)
    pkt = make_tcp_packet(rng, payload_len=30)
    state = env_reset(pkt, 12)
    actions = bytes(range(12))
    for a in actions:
        state, _ = env_step(state, a)
    assert state.packet.payload == pkt.payload
    assert field_block(state.packet.transport) == actions
    assert state.inserted == 0


def test_udp_always_inserts_before_payload():
    rng = random.Random(3)
    pkt = make_udp_packet(rng, payload_len=9)
    state = env_reset(pkt, 5)
    actions = b"\x10\x20\x30\x40\x50"
    for a in actions:
        state, _ = env_step(state, a)
    assert state.packet.payload == actions + pkt.payload
    assert state.packet.transport.src_port == pkt.transport.src_port


def test_inserted_block_reads_in_action_order():
    rng = random.Random(4)
    pkt = make_tcp_packet(rng, payload_len=6)
    actions = bytes(range(16))
    state = env_reset(pkt, 16)
    for a in actions:
        state, _ = env_step(state, a)
    assert state.packet.payload[:4] == actions[12:16]
    assert state.packet.payload[4:] == pkt.payload


def test_env_matches_pre_pad_engine():
    rng = random.Random(5)
    for _ in range(50):
        pkt = make_packet(rng, payload_len=rng.randrange(0, 120))
        budget = rng.choice([1, 2, 4, 8, 12, 16, 32])
        actions = rng.randbytes(budget)
        via_env = replay_actions(pkt, actions, "prepad")
        via_engine, _rec = pre_pad(pkt, actions)
        assert serialize(via_env) == serialize(via_engine)


def test_env_matches_post_pad_engine():
    rng = random.Random(6)
    for _ in range(20):
        pkt = make_packet(rng, payload_len=rng.randrange(0, 80))
        actions = rng.randbytes(8)
        via_env = replay_actions(pkt, actions, "postpad")
        assert serialize(via_env) == serialize(post_pad(pkt, actions))


def test_markov_transition_only_depends_on_state():
    rng = random.Random(7)
    pkt = make_tcp_packet(rng, payload_len=20)
    s1 = env_reset(pkt, 6)
    s2, _ = env_step(s1, 0xAA)
    # branch twice from the same mid-state
    a, _ = env_step(s2, 0xBB)
    b, _ = env_step(s2, 0xBB)
    assert a.state_bytes() == b.state_bytes()
    # and the original mid-state is unchanged by branching
    assert s2.actions == b"\xaa"


def test_first_payload_step():
    rng = random.Random(8)
    assert first_payload_step(make_tcp_packet(rng, payload_len=5)) == 13
    assert first_payload_step(make_udp_packet(rng, payload_len=5)) == 1


def test_intermediate_states_not_finalized():
    rng = random.Random(9)
    pkt = make_tcp_packet(rng, payload_len=10)
    state = env_reset(pkt, 14)
    for a in b"\x01" * 14:
        state, _ = env_step(state, a)
    # stale checksum/lengths mid-episode, fixed after final assembly
    assert state.packet.ip.total_length == pkt.ip.total_length
    final = final_packet(state)
    from advpad.packet import verifies

    assert verifies(final)
