"""Defense evaluation: packet level, burst level, and latency.

The report mirrors the paper-style table: the No-Defense row is the
classifier's ground-truth accuracy on clean packets; every defense row is
the flip-based ACC against clean predictions (identity generator == 1.0).
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from ..classifier import Oracle
from ..errors import AlreadyLonger
from ..packet import ParsedPacket, finalize, parse_packet
from ..perturb import cache_pad, fixed_pad, post_pad, pre_pad
from .dataset import PacketSample, Sample, strip_for_classifier
from .metrics import acc_from_labels, bandwidth_overhead

SCHEME_NONE = "no-defense"
SCHEME_RANDPOSTPAD = "randpostpad"
SCHEME_FIXEDPAD = "fixedpad"
SCHEME_RLPOSTPAD = "rlpostpad"
SCHEME_PREPAD_RANDOM = "prepad-random"
SCHEME_PREPAD_POLICY = "prepad-policy"
SCHEME_CACHE = "cache"

DEFAULT_SCHEMES = (
    SCHEME_NONE,
    SCHEME_RANDPOSTPAD,
    SCHEME_FIXEDPAD,
    SCHEME_RLPOSTPAD,
    SCHEME_PREPAD_RANDOM,
    SCHEME_PREPAD_POLICY,
)


@dataclass
class ReportRow:
    scheme: str
    acc: float
    samples: int
    budget: int
    overhead_pct: float
    runtime_s: float


@dataclass
class EvalReport:
    rows: list[ReportRow] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def row(self, scheme: str) -> ReportRow:
        for r in self.rows:
            if r.scheme == scheme:
                return r
        raise KeyError(scheme)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": [
                {
                    "scheme": r.scheme,
                    "acc": r.acc,
                    "samples": r.samples,
                    "budget": r.budget,
                    "overhead_pct": r.overhead_pct,
                    "runtime_s": r.runtime_s,
                }
                for r in self.rows
            ],
        }


def _as_packet(item) -> ParsedPacket:
    if isinstance(item, ParsedPacket):
        return item
    if isinstance(item, PacketSample):
        return parse_packet(item.raw)
    return parse_packet(bytes(item))


def perturb_packets(
    scheme: str,
    packets: list[ParsedPacket],
    budget: int,
    policy=None,
    postpad_policy=None,
    cache=None,
    seed: int = 0,
) -> list[ParsedPacket]:
    """Apply one scheme to every packet. Policy schemes roll in batches."""
    rng = random.Random(seed)
    if scheme == SCHEME_NONE:
        return [finalize(p) for p in packets]
    if scheme == SCHEME_RANDPOSTPAD:
        return [post_pad(p, rng.randbytes(budget)) for p in packets]
    if scheme == SCHEME_FIXEDPAD:
        out = []
        for p in packets:
            try:
                out.append(fixed_pad(p, 1500))
            except AlreadyLonger:
                out.append(finalize(p))  # longer than the target: left as-is
        return out
    if scheme == SCHEME_PREPAD_RANDOM:
        return [pre_pad(p, rng.randbytes(budget))[0] for p in packets]
    if scheme == SCHEME_CACHE:
        if cache is None:
            raise ValueError("cache scheme requires a SequenceCache")
        return [cache_pad(p, cache, rng)[0] for p in packets]
    if scheme in (SCHEME_PREPAD_POLICY, SCHEME_RLPOSTPAD):
        from ..rlgen import rollout_sequences

        rollout_policy = policy if scheme == SCHEME_PREPAD_POLICY else postpad_policy
        if rollout_policy is None:
            raise ValueError("scheme %s requires a trained policy" % scheme)
        env_scheme = "prepad" if scheme == SCHEME_PREPAD_POLICY else "postpad"
        seqs = rollout_sequences(rollout_policy, packets, budget, env_scheme, seed=seed)
        if scheme == SCHEME_PREPAD_POLICY:
            return [pre_pad(p, s)[0] for p, s in zip(packets, seqs)]
        return [post_pad(p, s) for p, s in zip(packets, seqs)]
    raise ValueError("unknown scheme %r" % scheme)


def eval_packet_defense(
    oracle: Oracle,
    testset,
    labels=None,
    schemes=DEFAULT_SCHEMES,
    budget: int = 32,
    policy=None,
    postpad_policy=None,
    cache=None,
    seed: int = 0,
) -> EvalReport:
    """Evaluate schemes on test packets.

    testset: packets (ParsedPacket / PacketSample / raw bytes); labels are
    required only for the No-Defense (ground-truth accuracy) row.
    """
    packets = [_as_packet(p) for p in testset]
    report = EvalReport(
        config={"budget": budget, "seed": seed, "samples": len(packets)}
    )
    clean_views = [strip_for_classifier(p) for p in packets]
    clean_preds = [p.label for p in oracle.predict_batch(clean_views)]
    mean_len = statistics.fmean(p.ip.total_length for p in packets) if packets else 0.0

    for scheme in schemes:
        t0 = time.time()
        if scheme == SCHEME_NONE:
            if labels is None:
                score = 1.0
            else:
                hits = sum(1 for p, y in zip(clean_preds, labels) if p == int(y))
                score = hits / max(1, len(packets))
            overhead = 0.0
        else:
            perturbed = perturb_packets(
                scheme, packets, budget, policy, postpad_policy, cache, seed
            )
            views = [strip_for_classifier(p) for p in perturbed]
            preds = [p.label for p in oracle.predict_batch(views)]
            score = acc_from_labels(clean_preds, preds)
            grown = statistics.fmean(p.ip.total_length for p in perturbed)
            overhead = 100.0 * (grown - mean_len) / mean_len if mean_len else 0.0
        report.rows.append(
            ReportRow(
                scheme=scheme,
                acc=score,
                samples=len(packets),
                budget=budget,
                overhead_pct=overhead,
                runtime_s=time.time() - t0,
            )
        )
    return report


# --- bursts ------------------------------------------------------------------


@dataclass
class Burst:
    flow_id: str
    direction: int
    label: int
    packets: list[ParsedPacket] = field(default_factory=list)


def group_bursts(samples: list[Sample], packet_lookup) -> list[Burst]:
    """Maximal runs of consecutive same-direction packets within a flow.

    `samples` are preprocessed samples in source order; packet_lookup maps
    a sample's source_index to its ParsedPacket.
    """
    bursts: list[Burst] = []
    current: Burst | None = None
    for s in samples:
        if (
            current is None
            or s.flow_id != current.flow_id
            or s.direction != current.direction
        ):
            current = Burst(flow_id=s.flow_id, direction=s.direction, label=s.label)
            bursts.append(current)
        current.packets.append(packet_lookup(s.source_index))
    return bursts


def burst_view(packets: list[ParsedPacket], max_len: int) -> bytes:
    data = b"".join(strip_for_classifier(p) for p in packets)
    return data[:max_len]


def eval_burst_defense(
    oracle: Oracle,
    bursts: list[Burst],
    scheme: str = SCHEME_PREPAD_POLICY,
    budget: int = 32,
    policy=None,
    postpad_policy=None,
    cache=None,
    seed: int = 0,
    max_len: int = 4096,
) -> EvalReport:
    """Perturb every packet inside each burst; classify concatenated bytes."""
    report = EvalReport(
        config={"budget": budget, "seed": seed, "bursts": len(bursts), "scheme": scheme}
    )
    clean_inputs = [burst_view(b.packets, max_len) for b in bursts]
    clean_preds = [p.label for p in oracle.predict_batch(clean_inputs)]

    t0 = time.time()
    hits = sum(1 for p, b in zip(clean_preds, bursts) if p == b.label)
    report.rows.append(
        ReportRow(
            scheme=SCHEME_NONE,
            acc=hits / max(1, len(bursts)),
            samples=len(bursts),
            budget=budget,
            overhead_pct=0.0,
            runtime_s=time.time() - t0,
        )
    )

    t0 = time.time()
    flat = [p for b in bursts for p in b.packets]
    perturbed_flat = perturb_packets(scheme, flat, budget, policy, postpad_policy, cache, seed)
    views = []
    pos = 0
    for b in bursts:
        chunk = perturbed_flat[pos : pos + len(b.packets)]
        pos += len(chunk)
        views.append(burst_view(chunk, max_len))
    preds = [p.label for p in oracle.predict_batch(views)]
    report.rows.append(
        ReportRow(
            scheme=scheme,
            acc=acc_from_labels(clean_preds, preds),
            samples=len(bursts),
            budget=budget,
            overhead_pct=0.0,
            runtime_s=time.time() - t0,
        )
    )
    return report


# --- latency -----------------------------------------------------------------


@dataclass
class LatencyReport:
    scheme: str
    packets: int
    mean_ms: float
    variance_ms2: float

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "packets": self.packets,
            "mean_ms": self.mean_ms,
            "variance_ms2": self.variance_ms2,
        }


def measure_perturb_latency(perturb_fn, packets, min_packets: int = 10_000) -> LatencyReport:
    """Mean wall-clock per-packet cost of a perturbation callable."""
    pool = list(packets)
    if not pool:
        raise ValueError("need packets to measure")
    todo = [pool[i % len(pool)] for i in range(max(min_packets, len(pool)))]
    samples_ms = []
    for pkt in todo:
        t0 = time.perf_counter()
        perturb_fn(pkt)
        samples_ms.append((time.perf_counter() - t0) * 1e3)
    return LatencyReport(
        scheme=getattr(perturb_fn, "__name__", "custom"),
        packets=len(todo),
        mean_ms=statistics.fmean(samples_ms),
        variance_ms2=statistics.pvariance(samples_ms),
    )


__all__ = [
    "EvalReport",
    "ReportRow",
    "Burst",
    "LatencyReport",
    "eval_packet_defense",
    "eval_burst_defense",
    "group_bursts",
    "burst_view",
    "perturb_packets",
    "measure_perturb_latency",
    "bandwidth_overhead",
    "SCHEME_NONE",
    "SCHEME_RANDPOSTPAD",
    "SCHEME_FIXEDPAD",
    "SCHEME_RLPOSTPAD",
    "SCHEME_PREPAD_RANDOM",
    "SCHEME_PREPAD_POLICY",
    "SCHEME_CACHE",
    "DEFAULT_SCHEMES",
]
