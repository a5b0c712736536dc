"""Evaluation metrics."""

from __future__ import annotations

from ..classifier import Oracle
from .dataset import strip_for_classifier


def acc(oracle: Oracle, generator, testset) -> float:
    """Fraction of test packets whose predicted label survives perturbation.

    ACC = 1 - |{x : f(G(x)) != f(x)}| / |testset|, measured against the
    clean-input prediction (not the ground-truth label). Lower means a
    stronger defense.
    """
    packets = list(testset)
    if not packets:
        return 1.0
    clean = oracle.predict_batch([strip_for_classifier(p) for p in packets])
    perturbed = oracle.predict_batch([strip_for_classifier(generator(p)) for p in packets])
    flips = sum(1 for a, b in zip(clean, perturbed) if a.label != b.label)
    return 1.0 - flips / len(packets)


def acc_from_labels(clean_labels, perturbed_labels) -> float:
    pairs = list(zip(clean_labels, perturbed_labels))
    if not pairs:
        return 1.0
    flips = sum(1 for a, b in pairs if a != b)
    return 1.0 - flips / len(pairs)


def bandwidth_overhead(packet_lengths, pad_len: int) -> float:
    """Padding bytes as a percentage of the mean packet length."""
    lengths = list(packet_lengths)
    if not lengths:
        raise ValueError("need at least one packet length")
    mean_len = sum(lengths) / len(lengths)
    return 100.0 * pad_len / mean_len
