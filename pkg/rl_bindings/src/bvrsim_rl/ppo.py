"""Compact clipped-surrogate PPO used by the example training script.

This is training machinery only — the environment side stays behind the
``BvrEnv`` adapter.  The policy is a diagonal Gaussian with a
state-independent log-std over a normalized action box [-1, 1]^n; the
sample is clipped at the box edge and affinely mapped to the env's
action bounds before stepping.  Advantages come from GAE; updates are
the usual clipped ratio objective plus a value MSE term.

Everything is seeded (torch manual seed, seeded minibatch shuffling,
per-episode engine seeds drawn from one counter) and single-threaded,
so a (seed, hyperparameters, engine version) triple reproduces a run.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import torch
from torch import nn

from .env import BvrEnv


@dataclass
class PPOParams:
    # Defaults picked empirically for the smoke-scale evade demo: episodic
    # terminal-only reward wants undiscounted Monte Carlo credit (gamma =
    # lam = 1), wide initial exploration (std 1), and many passes over the
    # small batch.  Runs this short stay seed-sensitive; see train.py.
    rollout_steps: int = 512      # env steps collected per iteration
    minibatch_size: int = 128
    epochs: int = 15              # optimizer passes per iteration
    gamma: float = 1.0
    lam: float = 1.0
    clip_ratio: float = 0.2
    lr: float = 1e-3
    vf_coef: float = 0.5
    ent_coef: float = 0.0
    max_grad_norm: float = 0.5
    hidden: Tuple[int, ...] = (64, 64)
    init_log_std: float = 0.0
    seed: int = 0


def _mlp(sizes: List[int], gain_out: float) -> nn.Sequential:
    layers: list = []
    for i in range(len(sizes) - 1):
        lin = nn.Linear(sizes[i], sizes[i + 1])
        last = i == len(sizes) - 2
        nn.init.orthogonal_(lin.weight, gain=gain_out if last else math.sqrt(2.0))
        nn.init.zeros_(lin.bias)
        layers.append(lin)
        if not last:
            layers.append(nn.Tanh())
    return nn.Sequential(*layers)


class ActorCritic(nn.Module):
    """Separate policy and value MLPs plus a learned log-std vector."""

    def __init__(self, obs_dim: int, act_dim: int,
                 hidden: Tuple[int, ...] = (64, 64),
                 init_log_std: float = -0.5):
        super().__init__()
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.pi = _mlp([obs_dim, *hidden, act_dim], gain_out=0.01)
        self.v = _mlp([obs_dim, *hidden, 1], gain_out=1.0)
        self.log_std = nn.Parameter(torch.full((act_dim,), float(init_log_std)))

    def dist(self, obs: torch.Tensor) -> torch.distributions.Normal:
        return torch.distributions.Normal(self.pi(obs), self.log_std.exp())

    def value(self, obs: torch.Tensor) -> torch.Tensor:
        return self.v(obs).squeeze(-1)

    @torch.no_grad()
    def step(self, obs: torch.Tensor):
        """Sample (action, logp, value) for one observation."""
        d = self.dist(obs)
        a = d.sample()
        return a, d.log_prob(a).sum(-1), self.value(obs)

    @torch.no_grad()
    def mean_action(self, obs: torch.Tensor) -> torch.Tensor:
        return self.pi(obs)


class BoxMapper:
    """Affine map between the [-1, 1]^n policy box and env action units."""

    def __init__(self, low, high):
        self.low = np.asarray(low, dtype=np.float64)
        self.high = np.asarray(high, dtype=np.float64)
        self.center = 0.5 * (self.low + self.high)
        self.half = 0.5 * (self.high - self.low)

    def to_env(self, a: np.ndarray) -> np.ndarray:
        return self.center + self.half * np.clip(a, -1.0, 1.0)


@dataclass
class IterationStats:
    iteration: int
    env_steps: int
    episodes: int
    mean_reward: float            # mean terminal reward of episodes that
    #                               finished this iteration (evade: MD [km])
    extra: dict = field(default_factory=dict)


class PPOTrainer:
    """On-policy training loop against a single BvrEnv."""

    def __init__(self, env: BvrEnv, params: Optional[PPOParams] = None):
        self.env = env
        self.p = params or PPOParams()
        torch.manual_seed(self.p.seed)
        torch.set_num_threads(1)
        self.net = ActorCritic(env.observation_space.size,
                               env.action_space.size,
                               hidden=tuple(self.p.hidden),
                               init_log_std=self.p.init_log_std)
        self.mapper = BoxMapper(env.action_space.low, env.action_space.high)
        self.opt = torch.optim.Adam(self.net.parameters(), lr=self.p.lr)
        self._shuffle = torch.Generator().manual_seed(self.p.seed + 1)
        # fresh engine seed per training episode, disjoint from typical
        # evaluation ranges by construction
        self._episode_seed = self.p.seed * 1_000_000 + 1
        self._obs: Optional[np.ndarray] = None
        self.total_steps = 0
        self.total_episodes = 0

    # -- rollout -----------------------------------------------------------

    def _next_obs(self) -> np.ndarray:
        if self._obs is None or self.env.done:
            self._obs = self.env.reset(self._episode_seed)
            self._episode_seed += 1
        return self._obs

    def collect(self, n_steps: int):
        """Collect n_steps transitions; returns (batch dict, episode rewards)."""
        obs_buf = np.empty((n_steps, self.net.obs_dim), dtype=np.float64)
        act_buf = np.empty((n_steps, self.net.act_dim), dtype=np.float64)
        logp_buf = np.empty(n_steps, dtype=np.float64)
        rew_buf = np.empty(n_steps, dtype=np.float64)
        done_buf = np.empty(n_steps, dtype=np.float64)
        val_buf = np.empty(n_steps, dtype=np.float64)
        finished: List[float] = []

        for i in range(n_steps):
            obs = self._next_obs()
            t_obs = torch.as_tensor(obs, dtype=torch.float32)
            a, logp, val = self.net.step(t_obs)
            a_np = a.numpy().astype(np.float64)
            nxt, reward, done, _info = self.env.step(self.mapper.to_env(a_np))
            obs_buf[i] = obs
            act_buf[i] = a_np
            logp_buf[i] = float(logp)
            rew_buf[i] = reward
            done_buf[i] = 1.0 if done else 0.0
            val_buf[i] = float(val)
            self._obs = nxt
            self.total_steps += 1
            if done:
                self.total_episodes += 1
                finished.append(reward)

        if self.env.done:
            last_val = 0.0
        else:
            with torch.no_grad():
                last_val = float(self.net.value(
                    torch.as_tensor(self._obs, dtype=torch.float32)))
        adv, ret = gae(rew_buf, val_buf, done_buf, last_val,
                       self.p.gamma, self.p.lam)
        batch = {
            "obs": torch.as_tensor(obs_buf, dtype=torch.float32),
            "act": torch.as_tensor(act_buf, dtype=torch.float32),
            "logp": torch.as_tensor(logp_buf, dtype=torch.float32),
            "adv": torch.as_tensor(adv, dtype=torch.float32),
            "ret": torch.as_tensor(ret, dtype=torch.float32),
        }
        return batch, finished

    # -- optimization ------------------------------------------------------

    def update(self, batch: dict) -> dict:
        adv = batch["adv"]
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
        n = batch["obs"].shape[0]
        pi_losses, v_losses = [], []
        for _ in range(self.p.epochs):
            order = torch.randperm(n, generator=self._shuffle)
            for start in range(0, n, self.p.minibatch_size):
                idx = order[start:start + self.p.minibatch_size]
                d = self.net.dist(batch["obs"][idx])
                logp = d.log_prob(batch["act"][idx]).sum(-1)
                ratio = torch.exp(logp - batch["logp"][idx])
                a = adv[idx]
                clipped = torch.clamp(ratio, 1.0 - self.p.clip_ratio,
                                      1.0 + self.p.clip_ratio) * a
                pi_loss = -torch.min(ratio * a, clipped).mean()
                v = self.net.value(batch["obs"][idx])
                v_loss = ((v - batch["ret"][idx]) ** 2).mean()
                ent = d.entropy().sum(-1).mean()
                loss = pi_loss + self.p.vf_coef * v_loss - self.p.ent_coef * ent
                self.opt.zero_grad()
                loss.backward()
                nn.utils.clip_grad_norm_(self.net.parameters(),
                                         self.p.max_grad_norm)
                self.opt.step()
                pi_losses.append(float(pi_loss.detach()))
                v_losses.append(float(v_loss.detach()))
        return {"pi_loss": float(np.mean(pi_losses)),
                "v_loss": float(np.mean(v_losses))}

    # -- driver ------------------------------------------------------------

    def train(self, total_steps: int,
              callback: Optional[Callable[[IterationStats], None]] = None
              ) -> List[IterationStats]:
        history: List[IterationStats] = []
        iteration = 0
        last_mean = math.nan
        while self.total_steps < total_steps:
            iteration += 1
            n = min(self.p.rollout_steps, max(total_steps - self.total_steps,
                                              self.p.minibatch_size))
            batch, finished = self.collect(n)
            losses = self.update(batch)
            if finished:
                last_mean = float(np.mean(finished))
            stats = IterationStats(iteration=iteration,
                                   env_steps=self.total_steps,
                                   episodes=self.total_episodes,
                                   mean_reward=last_mean,
                                   extra=losses)
            history.append(stats)
            if callback is not None:
                callback(stats)
        return history

    def policy_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        """Deterministic (mean-action) policy in env action units."""
        return GreedyPolicy(self.net, self.mapper)


class GreedyPolicy:
    """Picklable obs -> env-action callable using the policy mean."""

    def __init__(self, net: ActorCritic, mapper: BoxMapper):
        self.net = net
        self.mapper = mapper

    def __call__(self, obs) -> np.ndarray:
        t = torch.as_tensor(np.asarray(obs, dtype=np.float64),
                            dtype=torch.float32)
        a = self.net.mean_action(t).numpy().astype(np.float64)
        return self.mapper.to_env(a)


def gae(rewards: np.ndarray, values: np.ndarray, dones: np.ndarray,
        last_value: float, gamma: float, lam: float):
    """Generalized advantage estimation over a flat rollout.

    `dones[t]` marks transitions into a terminal state: the bootstrap
    value after them is zero.  Returns (advantages, value targets).
    """
    n = len(rewards)
    adv = np.zeros(n, dtype=np.float64)
    next_val = float(last_value)
    next_adv = 0.0
    for t in range(n - 1, -1, -1):
        mask = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_val * mask - values[t]
        next_adv = delta + gamma * lam * mask * next_adv
        adv[t] = next_adv
        next_val = values[t]
    return adv, adv + values
