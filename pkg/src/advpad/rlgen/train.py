"""Actor-critic optimization of the padding policy.

The actor maximizes an importance-weighted score-function objective with
an entropy bonus:

    J(theta) = mean_t[ w_t * log pi_theta(a_t|s_t) * A_t ]
               + alpha * mean_t[ H(pi_theta(.|s_t)) ]

where w_t = pi_theta(a_t|s_t) / pi_theta'(a_t|s_t) is the importance
ratio against the rollout policy, treated as a constant weight for the
gradient (optionally clipped to [1-c, 1+c]); its value is refreshed from
the current parameters at every update step, which is what lets collected
trajectories be reused off-policy. The critic minimizes the mean squared
error between V_phi(s_t) and the Monte-Carlo discounted return.

Updates use AdamW with separate actor/critic learning rates (parameter
groups over the shared encoder model); batches are fixed-size step
minibatches drawn from parallel episode rollouts. The training loop fuses
the actor and critic losses into one backward pass per minibatch; the
standalone actor_update/critic_update entry points apply each loss on its
own.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import torch

from ..checkpoint import load_checkpoint, save_checkpoint
from ..classifier import Oracle
from ..errors import NaNLoss
from ..packet import ParsedPacket, parse_packet
from .config import REWARD_WHITEBOX, TrainConfig
from .env import env_reset, env_step
from .model import (
    ActorCritic,
    distribution_entropy,
    encode_state_batch,
    sample_actions,
    temperature_softmax,
)
from .rewards import episode_rewards
from .trajectory import (
    EpisodeStep,
    Trajectory,
    compute_returns_and_advantages,
    normalize_advantages,
)

logger = logging.getLogger("advpad.rlgen")


@dataclass
class TrainedPolicy:
    """Deployable policy: model plus the sampling settings it was trained with."""

    model: ActorCritic
    config: TrainConfig
    version: str = ""

    @property
    def budget(self) -> int:
        return self.config.budget

    @property
    def scheme(self) -> str:
        return self.config.scheme


# --- objectives --------------------------------------------------------------


def actor_objective_from_logits(
    logits: torch.Tensor,
    actions: torch.Tensor,
    log_prob_old: torch.Tensor,
    advantages: torch.Tensor,
    tau: float,
    alpha: float,
    clip_enabled: bool = True,
    clip_range: float = 0.2,
    ratios: torch.Tensor | None = None,
) -> tuple[torch.Tensor, dict]:
    """Combined actor objective (to be maximized) from action logits.

    When `ratios` is given they are used verbatim as constant importance
    weights (the gradient-check path); otherwise they are computed from
    the current log-probabilities and detached.
    """
    log_dist = torch.log_softmax(logits / tau, dim=-1)
    log_pi = log_dist.gather(1, actions.unsqueeze(1)).squeeze(1)
    if ratios is None:
        ratios = torch.exp(log_pi.detach() - log_prob_old)
        if clip_enabled:
            ratios = torch.clamp(ratios, 1.0 - clip_range, 1.0 + clip_range)
    policy_term = (ratios * log_pi * advantages).mean()
    entropy_term = distribution_entropy(torch.softmax(logits / tau, dim=-1)).mean()
    objective = policy_term + alpha * entropy_term
    return objective, {
        "policy_term": float(policy_term.detach()),
        "entropy_term": float(entropy_term.detach()),
        "objective": float(objective.detach()),
        "mean_ratio": float(ratios.detach().mean()),
    }


def critic_objective_from_values(
    values: torch.Tensor, returns: torch.Tensor
) -> torch.Tensor:
    return torch.nn.functional.mse_loss(values, returns)


def _check_finite(value: torch.Tensor, what: str, step: int) -> None:
    if not torch.isfinite(value):
        raise NaNLoss("%s became non-finite at update step %d" % (what, step))


def make_optimizer(model: ActorCritic, cfg: TrainConfig) -> torch.optim.Optimizer:
    """AdamW with the actor and critic learning rates as parameter groups.

    The shared encoder sits in the actor group; critic gradients reaching
    it are applied at the actor rate.
    """
    return torch.optim.AdamW(
        [
            {"params": list(model.actor_parameters()), "lr": cfg.lr_actor},
            {"params": list(model.critic_parameters()), "lr": cfg.lr_critic},
        ],
        weight_decay=cfg.weight_decay,
    )


def actor_update(
    model: ActorCritic,
    optimizer: torch.optim.Optimizer,
    batch: dict,
    cfg: TrainConfig,
    step: int = 0,
) -> dict:
    """One gradient ascent step on the combined actor objective alone."""
    logits = model.logits(batch["tokens"], batch["mask"])
    objective, stats = actor_objective_from_logits(
        logits,
        batch["actions"],
        batch["log_prob_old"],
        batch["advantages"],
        tau=cfg.tau_soft,
        alpha=cfg.alpha,
        clip_enabled=cfg.clip_enabled,
        clip_range=cfg.clip_range,
    )
    loss = -objective
    _check_finite(loss, "actor loss", step)
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()
    return stats


def critic_update(
    model: ActorCritic,
    optimizer: torch.optim.Optimizer,
    batch: dict,
    cfg: TrainConfig,
    step: int = 0,
) -> float:
    """One gradient descent step on the critic MSE alone."""
    values = model.values(batch["tokens"], batch["mask"])
    loss = critic_objective_from_values(values, batch["returns"])
    _check_finite(loss, "critic loss", step)
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()
    return float(loss.detach())


def _fused_update(
    model: ActorCritic,
    optimizer: torch.optim.Optimizer,
    batch: dict,
    cfg: TrainConfig,
    step: int,
) -> None:
    """Actor + critic losses in one forward/backward (training fast path).

    Gradients are identical to running the two updates on the same
    parameters; only the optimizer-step interleaving differs.
    """
    logits, values = model(batch["tokens"], batch["mask"])
    objective, _stats = actor_objective_from_logits(
        logits,
        batch["actions"],
        batch["log_prob_old"],
        batch["advantages"],
        tau=cfg.tau_soft,
        alpha=cfg.alpha,
        clip_enabled=cfg.clip_enabled,
        clip_range=cfg.clip_range,
    )
    critic_loss = critic_objective_from_values(values, batch["returns"])
    loss = -objective + critic_loss
    _check_finite(loss, "training loss", step)
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()


# --- rollouts ----------------------------------------------------------------


def _as_packet(item) -> ParsedPacket:
    if isinstance(item, ParsedPacket):
        return item
    if hasattr(item, "raw"):
        return parse_packet(item.raw)
    return parse_packet(bytes(item))


@torch.no_grad()
def _rollout(
    model: ActorCritic,
    packets: list[ParsedPacket],
    budget: int,
    scheme: str,
    tau: float,
    generator: torch.Generator,
    record_views: bool = False,
):
    """Roll parallel episodes; returns (trajectories, final states, views).

    views[i] holds the classifier inputs of s_1..s_{T+1} for episode i
    (only when record_views is set).
    """
    states = [env_reset(p, budget, scheme) for p in packets]
    trajectories = [Trajectory() for _ in packets]
    views: list[list[bytes]] = [[] for _ in packets]
    if record_views:
        for i, s in enumerate(states):
            views[i].append(s.classifier_bytes())
    for _t in range(budget):
        policy_in = [s.state_bytes() for s in states]
        tokens, mask = encode_state_batch(policy_in, model.max_len)
        logits, values = model(tokens, mask)
        dist = temperature_softmax(logits, tau)
        actions = sample_actions(dist, generator)
        log_probs = torch.log(
            dist.gather(1, actions.unsqueeze(1)).squeeze(1).clamp(min=1e-30)
        )
        for i, s in enumerate(states):
            a = int(actions[i])
            trajectories[i].steps.append(
                EpisodeStep(
                    state_bytes=policy_in[i],
                    action=a,
                    log_prob_old=float(log_probs[i]),
                    value_estimate=float(values[i]),
                )
            )
            states[i], done = env_step(s, a)
            if record_views:
                views[i].append(states[i].classifier_bytes())
            trajectories[i].terminal = done
    return trajectories, states, views


def rollout_sequences(
    policy,
    packets,
    budget: int,
    scheme: str = "prepad",
    seed: int = 0,
    tau: float | None = None,
    batch_size: int = 64,
) -> list[bytes]:
    """Sample one action byte string per packet from the trained policy."""
    model = policy.model if isinstance(policy, TrainedPolicy) else policy
    if tau is None:
        tau = policy.config.tau_soft if isinstance(policy, TrainedPolicy) else 1.0
    generator = torch.Generator().manual_seed(seed)
    parsed = [_as_packet(p) for p in packets]
    out: list[bytes] = []
    for start in range(0, len(parsed), batch_size):
        chunk = parsed[start : start + batch_size]
        _trajs, finals, _ = _rollout(model, chunk, budget, scheme, tau, generator)
        out.extend(s.actions for s in finals)
    return out


def _update_on_batch(
    model: ActorCritic,
    optimizer: torch.optim.Optimizer,
    trajectories: list[Trajectory],
    cfg: TrainConfig,
    generator: torch.Generator,
    global_step: int,
) -> int:
    steps = [s for t in trajectories for s in t.steps]
    for _pass in range(cfg.update_passes):
        order = torch.randperm(len(steps), generator=generator).tolist()
        for start in range(0, len(order), cfg.batch_size):
            chunk = [steps[i] for i in order[start : start + cfg.batch_size]]
            tokens, mask = encode_state_batch(
                [s.state_bytes for s in chunk], model.max_len
            )
            batch = {
                "tokens": tokens,
                "mask": mask,
                "actions": torch.tensor([s.action for s in chunk], dtype=torch.long),
                "log_prob_old": torch.tensor(
                    [s.log_prob_old for s in chunk], dtype=torch.float32
                ),
                "advantages": torch.tensor(
                    [s.advantage for s in chunk], dtype=torch.float32
                ),
                "returns": torch.tensor([s.ret for s in chunk], dtype=torch.float32),
            }
            _fused_update(model, optimizer, batch, cfg, global_step)
            global_step += 1
    return global_step


def train(dataset, oracle: Oracle, config: TrainConfig | None = None) -> TrainedPolicy:
    """One pass over the training packets.

    `dataset` is a sequence of packets (ParsedPacket, raw bytes, or
    anything with a .raw attribute). Per rollout batch: run episodes,
    compute rewards and advantages, then update actor and critic on step
    minibatches. Fully deterministic for a given config.seed.
    """
    cfg = (config or TrainConfig()).validate()
    torch.manual_seed(cfg.seed)
    model = ActorCritic(cfg.embed_dim, cfg.n_heads, cfg.n_layers, cfg.max_input_len)
    trained = TrainedPolicy(model=model, config=cfg)
    if cfg.budget == 0:
        model.eval()
        return trained

    if cfg.reward_mode == REWARD_WHITEBOX:
        oracle.require(distribution=True, embedding=cfg.distance_on == "embedding")

    packets = [_as_packet(p) for p in dataset]
    generator = torch.Generator().manual_seed(cfg.seed)
    order = torch.randperm(len(packets), generator=generator).tolist()
    if cfg.max_episodes is not None:
        order = order[: cfg.max_episodes]

    model.train()
    optimizer = make_optimizer(model, cfg)

    t_start = time.time()
    episodes_done = 0
    global_step = 0
    for start in range(0, len(order), cfg.rollout_batch):
        chunk = [packets[i] for i in order[start : start + cfg.rollout_batch]]
        trajectories, _finals, views = _rollout(
            model, chunk, cfg.budget, cfg.scheme, cfg.tau_soft, generator, record_views=True
        )
        rewards = episode_rewards(oracle, views, cfg.reward_mode, cfg.distance_on)
        for traj, rs in zip(trajectories, rewards):
            for step, r in zip(traj.steps, rs):
                step.reward = r
        for traj in trajectories:
            compute_returns_and_advantages(traj, cfg.discount)
        if cfg.advantage_norm:
            normalize_advantages(trajectories)
        global_step = _update_on_batch(
            model, optimizer, trajectories, cfg, generator, global_step
        )
        episodes_done += len(chunk)
        if cfg.log_every and episodes_done % cfg.log_every < cfg.rollout_batch:
            mean_r = sum(s.reward for t in trajectories for s in t.steps) / max(
                1, sum(len(t) for t in trajectories)
            )
            logger.info(
                "episodes=%d mean_step_reward=%.4f elapsed=%.0fs",
                episodes_done,
                mean_r,
                time.time() - t_start,
            )

    model.eval()
    return trained


# --- persistence -------------------------------------------------------------


def save_policy(path, trained: TrainedPolicy) -> str:
    import dataclasses

    header = {
        "config": dataclasses.asdict(trained.config),
        "budget": trained.config.budget,
        "tau_soft": trained.config.tau_soft,
        "encoder": {
            "dim": trained.config.embed_dim,
            "heads": trained.config.n_heads,
            "layers": trained.config.n_layers,
            "max_len": trained.config.max_input_len,
        },
    }
    version = save_checkpoint(path, "policy", header, trained.model.state_dict())
    trained.version = version
    return version


def load_policy(path) -> TrainedPolicy:
    header, state = load_checkpoint(path, expect_kind="policy")
    cfg = TrainConfig(**header["config"])
    model = ActorCritic(cfg.embed_dim, cfg.n_heads, cfg.n_layers, cfg.max_input_len)
    model.load_state_dict(state)
    model.eval()
    return TrainedPolicy(
        model=model, config=cfg, version=header.get("policy_version", "")
    )
