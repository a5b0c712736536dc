"""Prefix-truncation study: accuracy as a function of input length."""

from __future__ import annotations

from .oracle import Oracle

DEFAULT_LENGTHS = (1, 2, 4, 8, 16, 32, 64, 128)


def truncation_sweep(oracle: Oracle, testset, lengths=DEFAULT_LENGTHS) -> dict[int, float]:
    """Accuracy per prefix length.

    testset: iterable of (byte sequence, ground-truth label). Inputs are
    truncated to each length before prediction; empty prefixes cannot
    occur because lengths must be >= 1.
    """
    items = [(bytes(b), int(y)) for b, y in testset]
    result: dict[int, float] = {}
    for L in lengths:
        if L < 1:
            raise ValueError("prefix lengths must be >= 1")
        preds = oracle.predict_batch([b[:L] for b, _ in items])
        hits = sum(1 for p, (_, y) in zip(preds, items) if p.label == y)
        result[int(L)] = hits / max(1, len(items))
    return result
