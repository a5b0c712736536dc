"""Training configuration, loadable from JSON or flat key=value files."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError

REWARD_BLACKBOX = "blackbox"
REWARD_WHITEBOX = "whitebox"


@dataclass
class TrainConfig:
    reward_mode: str = REWARD_BLACKBOX
    scheme: str = "prepad"
    budget: int = 32
    tau_soft: float = 1.0
    alpha: float = 1.0  # entropy regularization coefficient
    discount: float = 0.99
    clip_enabled: bool = True
    clip_range: float = 0.2  # importance ratio clipped to [0.8, 1.2]
    seed: int = 0
    lr_actor: float = 1e-5
    lr_critic: float = 1e-4
    weight_decay: float = 0.0
    batch_size: int = 32  # steps per gradient update
    rollout_batch: int = 32  # episodes rolled out in parallel
    update_passes: int = 1
    advantage_norm: bool = True
    distance_on: str = "embedding"  # white-box D term: embedding|distribution
    max_episodes: int | None = None
    embed_dim: int = 64
    n_heads: int = 4
    n_layers: int = 2
    max_input_len: int = 256
    log_every: int = 0  # episodes between progress lines; 0 disables

    def validate(self) -> "TrainConfig":
        if self.reward_mode not in (REWARD_BLACKBOX, REWARD_WHITEBOX):
            raise ConfigError("reward_mode must be blackbox|whitebox")
        if self.scheme not in ("prepad", "postpad"):
            raise ConfigError("scheme must be prepad|postpad")
        if self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if self.tau_soft <= 0:
            raise ConfigError("tau_soft must be > 0")
        if self.distance_on not in ("embedding", "distribution"):
            raise ConfigError("distance_on must be embedding|distribution")
        return self


def _coerce(text: str):
    low = text.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    if low.lower() in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(low)
        except ValueError:
            pass
    return low


def load_config(path) -> TrainConfig:
    """Accepts a JSON object or flat key=value lines (# comments)."""
    text = Path(path).read_text(encoding="utf-8")
    values: dict = {}
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config %s: invalid JSON: %s" % (path, exc))
    else:
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError("config %s line %d: expected key=value" % (path, lineno))
            key, _, value = line.partition("=")
            values[key.strip()] = _coerce(value)
    known = {f.name for f in dataclasses.fields(TrainConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError("config %s: unknown keys %s" % (path, sorted(unknown)))
    return TrainConfig(**values).validate()
