"""MDP environment over a single packet.

One episode perturbs one packet. Each step consumes one byte of the
padding budget: for TCP pre-padding the first twelve steps overwrite the
mutable header fields (seq, ack, window, urgent pointer, consumed
left-to-right), later steps insert the action byte immediately before the
payload, after previously inserted bytes; for UDP every step inserts. The
post-padding scheme appends at the packet end instead.

Intermediate states deliberately carry stale checksums — dependent fields
are recomputed once, when the finished packet is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import EpisodeFinished
from ..packet import ParsedPacket, finalize, serialize
from ..perturb import (
    FIELD_BLOCK_LEN,
    SCHEME_POSTPAD,
    SCHEME_PREPAD,
    TRAILER_MAGIC,
    field_block,
    set_field_block,
)


@dataclass
class EnvState:
    packet: ParsedPacket
    t: int  # 1-based index of the next action
    budget: int
    scheme: str
    header_filled: int = 0
    inserted: int = 0
    original_field_bytes: bytes = b""
    actions: bytes = b""

    @property
    def done(self) -> bool:
        return self.t > self.budget

    def state_bytes(self) -> bytes:
        """Wire view of the working packet (policy input)."""
        return serialize(self.packet)

    def classifier_bytes(self) -> bytes:
        """Classifier view: stripped like dataset preprocessing."""
        from ..evalkit.dataset import strip_for_classifier

        return strip_for_classifier(self.packet)


def env_reset(packet: ParsedPacket, budget: int, scheme: str = SCHEME_PREPAD) -> EnvState:
    """Initial state: the unmodified packet, step index 1."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if scheme not in (SCHEME_PREPAD, SCHEME_POSTPAD):
        raise ValueError("unknown scheme %r" % scheme)
    working = packet.copy()
    original = field_block(working.transport) if working.is_tcp else b""
    return EnvState(
        packet=working,
        t=1,
        budget=budget,
        scheme=scheme,
        original_field_bytes=original,
    )


def env_step(state: EnvState, action: int) -> tuple[EnvState, bool]:
    """Apply one action byte; returns (next_state, done).

    Depends only on (state, action). Raises EpisodeFinished past budget.
    """
    if state.done:
        raise EpisodeFinished("episode budget %d already consumed" % state.budget)
    if not 0 <= action <= 255:
        raise ValueError("action must be a byte value, got %r" % action)

    pkt = state.packet.copy()
    header_filled = state.header_filled
    inserted = state.inserted

    if state.scheme == SCHEME_PREPAD and pkt.is_tcp and header_filled < FIELD_BLOCK_LEN:
        block = bytearray(field_block(pkt.transport))
        block[header_filled] = action
        set_field_block(pkt.transport, bytes(block))
        header_filled += 1
    elif state.scheme == SCHEME_PREPAD:
        pkt.payload = pkt.payload[:inserted] + bytes([action]) + pkt.payload[inserted:]
        inserted += 1
    else:  # post-pad: append at the end
        pkt.payload = pkt.payload + bytes([action])
        inserted += 1

    next_state = EnvState(
        packet=pkt,
        t=state.t + 1,
        budget=state.budget,
        scheme=state.scheme,
        header_filled=header_filled,
        inserted=inserted,
        original_field_bytes=state.original_field_bytes,
        actions=state.actions + bytes([action]),
    )
    return next_state, next_state.done


def final_packet(state: EnvState) -> ParsedPacket:
    """The packet as transmitted after the episode.

    For TCP pre-padding this appends the reversal trailer (original field
    values, insert count, magic) before finalizing, assembled from the
    environment's own bookkeeping rather than the perturb engine.
    """
    pkt = state.packet.copy()
    if (
        state.scheme == SCHEME_PREPAD
        and pkt.is_tcp
        and (state.header_filled or state.inserted)
    ):
        trailer = state.original_field_bytes + bytes([state.inserted]) + TRAILER_MAGIC
        pkt.payload = pkt.payload + trailer
    return finalize(pkt)


def replay_actions(packet: ParsedPacket, actions: bytes, scheme: str = SCHEME_PREPAD) -> ParsedPacket:
    """Run a fixed action byte string through the environment."""
    state = env_reset(packet, len(actions), scheme)
    for a in actions:
        state, _done = env_step(state, a)
    return final_packet(state)


def first_payload_step(packet: ParsedPacket, scheme: str = SCHEME_PREPAD) -> int:
    """Step index (1-based) whose action becomes the first payload byte."""
    if scheme == SCHEME_PREPAD and packet.is_tcp:
        return FIELD_BLOCK_LEN + 1
    return 1
