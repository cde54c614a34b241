"""Minimal neural-network core: dense and LSTM layers with reverse-mode
gradients, gradient clipping, and Adam/AdaDelta optimizers.

The hot kernels live in a compiled Cython extension when available and fall
back to NumPy otherwise; see :mod:`polylife.nncore.backend`.
"""

from .backend import BACKEND
from .network import (
    LayerSpec,
    NetworkSpec,
    ParamSet,
    RecurrentState,
    Tape,
    backward,
    forward,
    forward_sequence,
    glorot_init,
    log_softmax,
    recurrent_trace_outputs,
    softmax,
)
from .optim import OptimizerState, clip_gradients, global_norm, optimizer_step

__all__ = [
    "BACKEND",
    "LayerSpec",
    "NetworkSpec",
    "ParamSet",
    "RecurrentState",
    "Tape",
    "OptimizerState",
    "backward",
    "clip_gradients",
    "forward",
    "forward_sequence",
    "glorot_init",
    "global_norm",
    "log_softmax",
    "optimizer_step",
    "recurrent_trace_outputs",
    "softmax",
]
