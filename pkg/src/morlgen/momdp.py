"""Contextual multi-objective MDP contract and episode rollout.

A context fully determines one environment configuration (transitions,
rewards, initial state). Environments implement a small reset/step
contract with vector rewards; `rollout` accumulates the discounted vector
return of a policy. Context sampling for domain randomization is a thin
protocol so domains can declare their own parameter spaces.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any, Callable, Protocol

import numpy as np


@dataclass(frozen=True)
class Transition:
    """One environment step: next observation, vector reward, end flags."""

    next_observation: Any
    reward: np.ndarray
    terminal: bool
    truncated: bool

    @property
    def done(self) -> bool:
        return self.terminal or self.truncated


class EpisodeOverError(RuntimeError):
    """Raised when step() is called after terminal/truncated without reset."""


class EnvironmentContract(abc.ABC):
    """Episodic multi-objective environment driven by an explicit context.

    Identical (context, stream, action sequence) must reproduce identical
    transitions. One instance serves one episode at a time; run concurrent
    episodes on separate instances with disjoint streams.
    """

    @abc.abstractmethod
    def reset(self, context, stream=None):
        """Begin an episode under `context`; returns the initial observation."""

    @abc.abstractmethod
    def step(self, action: int) -> Transition:
        """Advance one step. Raises EpisodeOverError after episode end."""

    @abc.abstractmethod
    def num_objectives(self) -> int:
        ...

    @abc.abstractmethod
    def action_count(self) -> int:
        ...


class ContextSpace(Protocol):
    """A declared context parameter space supporting uniform sampling."""

    def sample(self, stream): ...


def domain_randomization_sampler(space: ContextSpace, stream):
    """Draw one context uniformly from the declared parameter space."""
    return space.sample(stream)


def rollout(
    env: EnvironmentContract,
    policy: Callable[[Any], int],
    context,
    gamma: float,
    stream=None,
    max_steps: int = 256,
) -> np.ndarray:
    """Discounted vector return of `policy` on one episode of `context`.

    Accumulates sum_t gamma^t r_{t+1} componentwise until the environment
    reports terminal or truncated, or `max_steps` elapse. Deterministic
    given (context, stream, policy).
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must be in [0, 1)")
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    obs = env.reset(context, stream)
    ret = np.zeros(env.num_objectives())
    disc = 1.0
    for _ in range(max_steps):
        action = policy(obs)
        if not 0 <= int(action) < env.action_count():
            raise ValueError(f"policy returned out-of-range action {action!r}")
        tr = env.step(int(action))
        ret += disc * tr.reward
        disc *= gamma
        obs = tr.next_observation
        if tr.done:
            break
    return ret
