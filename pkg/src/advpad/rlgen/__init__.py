from .config import REWARD_BLACKBOX, REWARD_WHITEBOX, TrainConfig, load_config
from .env import EnvState, env_reset, env_step, final_packet, first_payload_step
from .model import (
    N_ACTIONS,
    ActorCritic,
    distribution_entropy,
    encode_state_batch,
    policy_forward,
    sample_action,
    sample_actions,
    temperature_softmax,
)
from .rewards import episode_rewards, kl_divergence, reward_blackbox, reward_whitebox
from .train import (
    TrainedPolicy,
    actor_objective_from_logits,
    actor_update,
    critic_objective_from_values,
    critic_update,
    load_policy,
    make_optimizer,
    rollout_sequences,
    save_policy,
    train,
)
from .trajectory import (
    EpisodeStep,
    Trajectory,
    compute_returns_and_advantages,
    normalize_advantages,
)

__all__ = [
    "TrainConfig",
    "load_config",
    "REWARD_BLACKBOX",
    "REWARD_WHITEBOX",
    "EnvState",
    "env_reset",
    "env_step",
    "final_packet",
    "first_payload_step",
    "ActorCritic",
    "N_ACTIONS",
    "temperature_softmax",
    "distribution_entropy",
    "sample_action",
    "sample_actions",
    "policy_forward",
    "encode_state_batch",
    "reward_whitebox",
    "reward_blackbox",
    "episode_rewards",
    "kl_divergence",
    "EpisodeStep",
    "Trajectory",
    "compute_returns_and_advantages",
    "normalize_advantages",
    "TrainedPolicy",
    "train",
    "actor_update",
    "critic_update",
    "make_optimizer",
    "actor_objective_from_logits",
    "critic_objective_from_values",
    "rollout_sequences",
    "save_policy",
    "load_policy",
]
