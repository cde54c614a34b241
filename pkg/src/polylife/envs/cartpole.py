"""Parametric cart-pole dynamics.

Classic Barto-Sutton-Anderson equations with Euler integration at
dt = 0.02 s, gravity 9.8 m/s^2, no friction, and a force magnitude of 1 N.
Reward is +1 per step; an episode ends when the pole leans more than 15
degrees, the cart leaves +-2.4 m, or 200 steps complete (success).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import UsageError
from .domains import TaskSpec

GRAVITY = 9.8
DT = 0.02
FORCE_MAG = 1.0
ANGLE_LIMIT = 15.0 * math.pi / 180.0
POSITION_LIMIT = 2.4
CARTPOLE_MAX_STEPS = 200
CARTPOLE_ACTIONS = 2  # 0 = push left, 1 = push right


@dataclass
class CartpoleState:
    x: float
    theta: float
    x_dot: float
    theta_dot: float
    steps: int = 0
    termination: str | None = None  # angle | position | time-limit


def cartpole_reset(task: TaskSpec, rng: np.random.Generator) -> CartpoleState:
    """Start near upright: each component uniform in [-0.05, 0.05]."""
    x, theta, x_dot, theta_dot = rng.uniform(-0.05, 0.05, size=4)
    return CartpoleState(x, theta, x_dot, theta_dot)


def cartpole_observe(state: CartpoleState) -> np.ndarray:
    return np.array([state.x, state.theta, state.x_dot, state.theta_dot])


def cartpole_step(task: TaskSpec, state: CartpoleState, action: int):
    """Advance one step; returns (state', observation, reward, terminal).

    The state's ``termination`` field records why the episode ended
    (angle / position / time-limit), which callers use to distinguish
    failure from the 200-step success cutoff.
    """
    if state.termination is not None:
        raise UsageError("cannot step a terminated cartpole episode")

    force = FORCE_MAG if action == 1 else -FORCE_MAG
    mass_pole = task.pole_mass
    total_mass = task.cart_mass + mass_pole
    half_length = task.pole_length / 2.0
    polemass_length = mass_pole * half_length

    cos_t = math.cos(state.theta)
    sin_t = math.sin(state.theta)
    temp = (force + polemass_length * state.theta_dot**2 * sin_t) / total_mass
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        half_length * (4.0 / 3.0 - mass_pole * cos_t**2 / total_mass)
    )
    x_acc = temp - polemass_length * theta_acc * cos_t / total_mass

    new = CartpoleState(
        x=state.x + DT * state.x_dot,
        theta=state.theta + DT * state.theta_dot,
        x_dot=state.x_dot + DT * x_acc,
        theta_dot=state.theta_dot + DT * theta_acc,
        steps=state.steps + 1,
    )

    if abs(new.theta) > ANGLE_LIMIT:
        new.termination = "angle"
    elif abs(new.x) > POSITION_LIMIT:
        new.termination = "position"
    elif new.steps >= CARTPOLE_MAX_STEPS:
        new.termination = "time-limit"

    return new, cartpole_observe(new), 1.0, new.termination is not None
