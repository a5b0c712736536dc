"""Hyperparameter sweeps: padding length, temperature, entropy coefficient."""

from __future__ import annotations

import torch

from ..classifier import Oracle
from ..packet import ParsedPacket
from ..perturb import SWEEP_LENGTHS, post_pad, pre_pad
from .dataset import strip_for_classifier
from .metrics import acc_from_labels

TEMPERATURE_RANGE = (1.0, 2.0, 4.0, 6.0, 8.0, 10.0)
ALPHA_RANGE = (0.1, 0.5, 1.0, 1.5)


def _rollout_with_entropy(policy, packets, budget, scheme, tau, seed, batch_size=64):
    """Sampled sequences plus the mean action-distribution entropy."""
    from ..rlgen import (
        distribution_entropy,
        encode_state_batch,
        env_reset,
        env_step,
        sample_actions,
        temperature_softmax,
    )

    model = policy.model if hasattr(policy, "model") else policy
    generator = torch.Generator().manual_seed(seed)
    sequences: list[bytes] = []
    entropy_sum = 0.0
    entropy_n = 0
    with torch.no_grad():
        for start in range(0, len(packets), batch_size):
            chunk = packets[start : start + batch_size]
            states = [env_reset(p, budget, scheme) for p in chunk]
            for _t in range(budget):
                tokens, mask = encode_state_batch(
                    [s.state_bytes() for s in states], model.max_len
                )
                dist = temperature_softmax(model(tokens, mask), tau)
                entropy_sum += float(distribution_entropy(dist).sum())
                entropy_n += len(states)
                actions = sample_actions(dist, generator)
                states = [env_step(s, int(a))[0] for s, a in zip(states, actions)]
            sequences.extend(s.actions for s in states)
    return sequences, entropy_sum / max(1, entropy_n)


def _acc_for_sequences(oracle, packets, sequences, scheme):
    clean = [p.label for p in oracle.predict_batch([strip_for_classifier(p) for p in packets])]
    if scheme == "prepad":
        perturbed = [pre_pad(p, s)[0] for p, s in zip(packets, sequences)]
    else:
        perturbed = [post_pad(p, s) for p, s in zip(packets, sequences)]
    preds = [
        p.label for p in oracle.predict_batch([strip_for_classifier(p) for p in perturbed])
    ]
    return acc_from_labels(clean, preds)


def sweep_padding_length(
    oracle: Oracle,
    packets: list[ParsedPacket],
    policy,
    lengths=SWEEP_LENGTHS,
    scheme: str = "prepad",
    seed: int = 0,
) -> dict[int, float]:
    """ACC per padding budget, re-rolling the trained policy per length."""
    out: dict[int, float] = {}
    for length in lengths:
        sequences, _h = _rollout_with_entropy(policy, packets, length, scheme, policy.config.tau_soft, seed)
        out[int(length)] = _acc_for_sequences(oracle, packets, sequences, scheme)
    return out


def sweep_temperature(
    oracle: Oracle,
    packets: list[ParsedPacket],
    policy,
    taus=TEMPERATURE_RANGE,
    budget: int | None = None,
    seed: int = 0,
) -> list[dict]:
    """ACC and mean policy entropy per sampling temperature, on a fixed checkpoint."""
    budget = budget or policy.config.budget
    rows = []
    for tau in taus:
        sequences, mean_h = _rollout_with_entropy(
            policy, packets, budget, policy.config.scheme, tau, seed
        )
        rows.append(
            {
                "tau": float(tau),
                "acc": _acc_for_sequences(oracle, packets, sequences, policy.config.scheme),
                "mean_entropy": mean_h,
            }
        )
    return rows


def sweep_entropy_alpha(
    oracle: Oracle,
    train_packets,
    eval_packets,
    base_config,
    alphas=ALPHA_RANGE,
    seed: int = 0,
) -> list[dict]:
    """Retrain per entropy coefficient and evaluate each policy."""
    import dataclasses

    from ..rlgen import train

    rows = []
    for alpha in alphas:
        cfg = dataclasses.replace(base_config, alpha=float(alpha))
        policy = train(train_packets, oracle, cfg)
        sequences, mean_h = _rollout_with_entropy(
            policy, eval_packets, cfg.budget, cfg.scheme, cfg.tau_soft, seed
        )
        rows.append(
            {
                "alpha": float(alpha),
                "acc": _acc_for_sequences(oracle, eval_packets, sequences, cfg.scheme),
                "mean_entropy": mean_h,
            }
        )
    return rows
