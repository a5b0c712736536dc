"""Finite-difference gradient checks for the actor/critic objectives.

Small float64 networks (well under 200 parameters) so central differences
are accurate; the objectives under test are exactly the ones the training
loop optimizes, with the importance ratios frozen at their evaluation-point
values (they are constant weights during a gradient step).
"""

import torch
from torch import nn
from torch.nn.utils import parameters_to_vector, vector_to_parameters

from advpad.rlgen import actor_objective_from_logits, critic_objective_from_values


class TinyPolicy(nn.Module):
    """2-feature state, 3 actions; 51 parameters."""

    def __init__(self):
        super().__init__()
        self.net = nn.Sequential(nn.Linear(2, 8), nn.Tanh(), nn.Linear(8, 3))
        self.double()

    def forward(self, x):
        return self.net(x)


class TinyCritic(nn.Module):
    """2-feature state to scalar value; 33 parameters."""

    def __init__(self):
        super().__init__()
        self.net = nn.Sequential(nn.Linear(2, 8), nn.Tanh(), nn.Linear(8, 1))
        self.double()

    def forward(self, x):
        return self.net(x).squeeze(-1)


def _numerical_grad(f, net, eps=1e-6):
    theta0 = parameters_to_vector(net.parameters()).detach().clone()
    grad = torch.zeros_like(theta0)
    for i in range(len(theta0)):
        for sign in (1.0, -1.0):
            theta = theta0.clone()
            theta[i] += sign * eps
            vector_to_parameters(theta, net.parameters())
            with torch.no_grad():
                grad[i] += sign * f()
    vector_to_parameters(theta0, net.parameters())
    return grad / (2 * eps)


def _analytic_grad(f, net):
    for p in net.parameters():
        p.grad = None
    f().backward()
    return torch.cat(
        [
            (p.grad if p.grad is not None else torch.zeros_like(p)).reshape(-1)
            for p in net.parameters()
        ]
    ).detach()


def _rel_error(a, b):
    denom = max(float(a.norm()), float(b.norm()), 1e-12)
    return float((a - b).norm()) / denom


def actor_grad_relative_error(n_points=50, seed=0, batch=16, tau=1.0, alpha=0.7):
    """FD-vs-autograd relative error of the combined actor objective,
    one value per random parameter point."""
    errors = []
    for point in range(n_points):
        torch.manual_seed(seed * 1000 + point)
        net = TinyPolicy()
        x = torch.randn(batch, 2, dtype=torch.float64)
        actions = torch.randint(0, 3, (batch,))
        advantages = torch.randn(batch, dtype=torch.float64)
        with torch.no_grad():
            log_dist = torch.log_softmax(net(x) / tau, dim=-1)
            logp_now = log_dist.gather(1, actions.unsqueeze(1)).squeeze(1)
        # a plausible older policy: perturb current log-probs
        logp_old = logp_now + 0.1 * torch.randn(batch, dtype=torch.float64)
        ratios = torch.clamp(torch.exp(logp_now - logp_old), 0.8, 1.2)

        def objective():
            obj, _stats = actor_objective_from_logits(
                net(x), actions, logp_old, advantages, tau=tau, alpha=alpha, ratios=ratios
            )
            return obj

        errors.append(_rel_error(_analytic_grad(objective, net), _numerical_grad(objective, net)))
    return errors


def critic_grad_relative_error(n_points=50, seed=0, batch=16):
    errors = []
    for point in range(n_points):
        torch.manual_seed(seed * 2000 + point)
        net = TinyCritic()
        x = torch.randn(batch, 2, dtype=torch.float64)
        returns = torch.randn(batch, dtype=torch.float64)

        def objective():
            return critic_objective_from_values(net(x), returns)

        errors.append(_rel_error(_analytic_grad(objective, net), _numerical_grad(objective, net)))
    return errors
