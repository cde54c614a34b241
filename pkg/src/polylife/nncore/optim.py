"""Gradient clipping and the two optimizers (Adam, AdaDelta).

AdaDelta follows Zeiler's accumulator recurrences with decay ``rho`` and, in
addition, a global step multiplier ``lr`` (0.1 by default) applied to the
computed delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError, NumericalError
from .backend import kernels as K
from .network import ParamSet


def global_norm(gradients: ParamSet) -> float:
    total = 0.0
    for _, _, arr in gradients.arrays():
        total += K.sum_squares(arr)
    return math.sqrt(total)


def clip_gradients(gradients: ParamSet, mode: str, threshold: float) -> ParamSet:
    """Clip in place and return the gradients.

    ``elementwise-abs`` clamps every component to [-threshold, threshold];
    ``global-norm`` rescales all gradients so the joint L2 norm is at most
    the threshold, preserving direction.
    """
    if threshold <= 0:
        raise ConfigurationError("clip threshold must be positive")
    if mode == "elementwise-abs":
        for _, _, arr in gradients.arrays():
            K.clip_abs(arr, threshold)
    elif mode == "global-norm":
        norm = global_norm(gradients)
        if norm > threshold:
            factor = threshold / norm
            for _, _, arr in gradients.arrays():
                K.scale(arr, factor)
    else:
        raise ConfigurationError(f"unknown clip mode {mode!r}")
    return gradients


@dataclass
class OptimizerState:
    """Optimizer hyperparameters plus per-parameter accumulators."""

    algorithm: str  # adam | adadelta
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    rho: float = 0.95
    eps: float = 1e-8
    step: int = 0
    slots: dict = field(default_factory=dict)

    @classmethod
    def adam(cls, params: ParamSet, learning_rate: float = 0.00025,
             beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        slots = {
            "m": ParamSet.zeros_like(params),
            "v": ParamSet.zeros_like(params),
        }
        return cls("adam", learning_rate, beta1=beta1, beta2=beta2, eps=eps, slots=slots)

    @classmethod
    def adadelta(cls, params: ParamSet, learning_rate: float = 0.1,
                 rho: float = 0.95, eps: float = 1e-6):
        slots = {
            "avg_sq_grad": ParamSet.zeros_like(params),
            "avg_sq_delta": ParamSet.zeros_like(params),
        }
        return cls("adadelta", learning_rate, rho=rho, eps=eps, slots=slots)


def optimizer_step(params: ParamSet, gradients: ParamSet, opt: OptimizerState):
    """Apply one update; params and accumulators are modified in place.

    Returns (params, opt) for call-site convenience.
    """
    opt.step += 1
    if opt.algorithm == "adam":
        m, v = opt.slots["m"], opt.slots["v"]
        for (i, name, p), (_, _, g), (_, _, ma), (_, _, va) in zip(
            params.arrays(), gradients.arrays(), m.arrays(), v.arrays()
        ):
            K.adam_step(p, g, ma, va, opt.step, opt.learning_rate,
                        opt.beta1, opt.beta2, opt.eps)
            if not np.all(np.isfinite(p)):
                raise NumericalError(f"non-finite parameter after adam step (layer {i}, {name})")
    elif opt.algorithm == "adadelta":
        eg, ed = opt.slots["avg_sq_grad"], opt.slots["avg_sq_delta"]
        for (i, name, p), (_, _, g), (_, _, ega), (_, _, eda) in zip(
            params.arrays(), gradients.arrays(), eg.arrays(), ed.arrays()
        ):
            K.adadelta_step(p, g, ega, eda, opt.rho, opt.eps, opt.learning_rate)
            if not np.all(np.isfinite(p)):
                raise NumericalError(
                    f"non-finite parameter after adadelta step (layer {i}, {name})"
                )
    else:
        raise ConfigurationError(f"unknown optimizer {opt.algorithm!r}")
    return params, opt
