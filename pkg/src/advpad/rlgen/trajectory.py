"""Episode records and return/advantage computation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class EpisodeStep:
    state_bytes: bytes  # policy view of s_t
    action: int
    log_prob_old: float
    reward: float = 0.0
    value_estimate: float = 0.0
    ret: float = 0.0
    advantage: float = 0.0


@dataclass
class Trajectory:
    steps: list[EpisodeStep] = field(default_factory=list)
    terminal: bool = False

    def __len__(self) -> int:
        return len(self.steps)


def compute_returns_and_advantages(
    trajectory: Trajectory, discount: float
) -> list[tuple[float, float]]:
    """Monte-Carlo discounted returns and raw advantages (return - value).

    Fills the trajectory's ret/advantage fields and returns the pairs.
    Batch-level normalization is applied separately by the caller.
    """
    g = 0.0
    out: list[tuple[float, float]] = []
    for step in reversed(trajectory.steps):
        g = step.reward + discount * g
        step.ret = g
        step.advantage = g - step.value_estimate
        out.append((step.ret, step.advantage))
    out.reverse()
    return out


def normalize_advantages(trajectories: list[Trajectory], eps: float = 1e-8) -> None:
    """Zero-mean/unit-variance advantages across every step in the batch."""
    adv = np.array([s.advantage for t in trajectories for s in t.steps], dtype=np.float64)
    if adv.size == 0:
        return
    mean = adv.mean()
    std = adv.std()
    for t in trajectories:
        for s in t.steps:
            s.advantage = float((s.advantage - mean) / (std + eps))
