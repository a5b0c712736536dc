"""Reward functions for the two oracle-access settings.

White-box: KL divergence between the oracle's output distributions at
consecutive states plus a representation distance (Euclidean over
embeddings by default, switchable to distributions). Black-box: 1 when the
predicted label changes between consecutive states, else 0.
"""

from __future__ import annotations

import numpy as np

from ..classifier import Oracle

DISTANCE_ON_EMBEDDING = "embedding"
DISTANCE_ON_DISTRIBUTION = "distribution"

_EPS = 1e-12


def _view(state) -> bytes:
    if hasattr(state, "classifier_bytes"):
        return state.classifier_bytes()
    return bytes(state)


def kl_divergence(p, q) -> float:
    """KL(p || q) in nats, with q clamped away from zero."""
    p = np.asarray(p, dtype=np.float64)
    q = np.clip(np.asarray(q, dtype=np.float64), _EPS, None)
    mask = p > 0
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def reward_whitebox(
    oracle: Oracle, s_t, s_next, distance_on: str = DISTANCE_ON_EMBEDDING
) -> float:
    """KL(dist(s_t) || dist(s_next)) + D(s_t, s_next); always >= 0."""
    oracle.require(
        distribution=True, embedding=(distance_on == DISTANCE_ON_EMBEDDING)
    )
    a, b = oracle.predict_batch([_view(s_t), _view(s_next)])
    kl = kl_divergence(a.distribution, b.distribution)
    if distance_on == DISTANCE_ON_EMBEDDING:
        dist = float(np.linalg.norm(np.asarray(a.embedding) - np.asarray(b.embedding)))
    else:
        dist = float(
            np.linalg.norm(np.asarray(a.distribution) - np.asarray(b.distribution))
        )
    return kl + dist


def reward_blackbox(oracle: Oracle, s_t, s_next) -> int:
    """1 iff the predicted label flips between consecutive states."""
    a, b = oracle.predict_batch([_view(s_t), _view(s_next)])
    return int(a.label != b.label)


def episode_rewards(
    oracle: Oracle,
    episode_views: list[list[bytes]],
    mode: str,
    distance_on: str = DISTANCE_ON_EMBEDDING,
) -> list[list[float]]:
    """Per-step rewards for whole episodes in one oracle batch.

    episode_views[i] holds the classifier views of states s_1 .. s_{T+1}
    of episode i; the result holds T rewards per episode.
    """
    flat: list[bytes] = [v for views in episode_views for v in views]
    preds = oracle.predict_batch(flat)
    out: list[list[float]] = []
    pos = 0
    for views in episode_views:
        chunk = preds[pos : pos + len(views)]
        pos += len(views)
        rewards = []
        for a, b in zip(chunk, chunk[1:]):
            if mode == "blackbox":
                rewards.append(float(a.label != b.label))
            else:
                kl = kl_divergence(a.distribution, b.distribution)
                if distance_on == DISTANCE_ON_EMBEDDING:
                    d = float(
                        np.linalg.norm(np.asarray(a.embedding) - np.asarray(b.embedding))
                    )
                else:
                    d = float(
                        np.linalg.norm(
                            np.asarray(a.distribution) - np.asarray(b.distribution)
                        )
                    )
                rewards.append(kl + d)
        out.append(rewards)
    return out
