"""Network specification, parameters, and the forward/backward passes.

Networks are chains of layers: dense layers with ReLU/linear/softmax
activation and at most one LSTM layer.  ``forward`` records a tape with the
intermediate values needed by ``backward``; for recurrent networks a tape
may span a multi-step trace, in which case ``backward`` runs backprop
through time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError, NumericalError
from .backend import kernels as K

LAYER_KINDS = ("dense-relu", "dense-linear", "lstm-tanh", "softmax-head")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    width: int


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture description: input size plus an ordered layer chain."""

    input_dim: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if self.input_dim <= 0:
            raise ConfigurationError("input_dim must be positive")
        if not self.layers:
            raise ConfigurationError("network needs at least one layer")
        n_recurrent = 0
        for i, layer in enumerate(self.layers):
            if layer.kind not in LAYER_KINDS:
                raise ConfigurationError(f"unknown layer kind {layer.kind!r}")
            if layer.width <= 0:
                raise ConfigurationError("layer widths must be positive")
            if layer.kind == "lstm-tanh":
                n_recurrent += 1
            if layer.kind == "softmax-head" and i != len(self.layers) - 1:
                raise ConfigurationError("softmax-head must be the terminal layer")
        if n_recurrent > 1:
            raise ConfigurationError("at most one recurrent layer is supported")

    @property
    def output_dim(self) -> int:
        return self.layers[-1].width

    @property
    def recurrent_index(self) -> int | None:
        for i, layer in enumerate(self.layers):
            if layer.kind == "lstm-tanh":
                return i
        return None

    @property
    def is_recurrent(self) -> bool:
        return self.recurrent_index is not None

    def layer_input_dims(self) -> list[int]:
        dims, prev = [], self.input_dim
        for layer in self.layers:
            dims.append(prev)
            prev = layer.width
        return dims


def spec_mlp(input_dim: int, hidden: int, out: int, n_hidden: int = 2) -> NetworkSpec:
    """The feedforward architecture: n_hidden dense-ReLU layers plus a linear head."""
    layers = tuple(LayerSpec("dense-relu", hidden) for _ in range(n_hidden))
    return NetworkSpec(input_dim, layers + (LayerSpec("dense-linear", out),))


def spec_recurrent(input_dim: int, hidden: int, out: int) -> NetworkSpec:
    """The recurrent architecture: dense-ReLU into an LSTM, then a linear head."""
    return NetworkSpec(
        input_dim,
        (
            LayerSpec("dense-relu", hidden),
            LayerSpec("lstm-tanh", hidden),
            LayerSpec("dense-linear", out),
        ),
    )


class ParamSet:
    """Per-layer weight arrays laid out to mirror a NetworkSpec.

    Dense layers hold ``W`` (out, in) and ``b`` (out,); the LSTM layer holds
    ``Wx`` (4H, in), ``Wh`` (4H, H) and ``b`` (4H,) with gate order
    input/forget/cell/output.
    """

    __slots__ = ("layers",)

    def __init__(self, layers: list[dict[str, np.ndarray]]):
        self.layers = layers

    @classmethod
    def zeros(cls, spec: NetworkSpec) -> "ParamSet":
        layers = []
        for in_dim, layer in zip(spec.layer_input_dims(), spec.layers):
            w = layer.width
            if layer.kind == "lstm-tanh":
                layers.append(
                    {
                        "Wx": np.zeros((4 * w, in_dim)),
                        "Wh": np.zeros((4 * w, w)),
                        "b": np.zeros(4 * w),
                    }
                )
            else:
                layers.append({"W": np.zeros((w, in_dim)), "b": np.zeros(w)})
        return cls(layers)

    @classmethod
    def zeros_like(cls, other: "ParamSet") -> "ParamSet":
        return cls(
            [{k: np.zeros_like(v) for k, v in layer.items()} for layer in other.layers]
        )

    def copy(self) -> "ParamSet":
        return ParamSet([{k: v.copy() for k, v in layer.items()} for layer in self.layers])

    def arrays(self):
        """Yield (layer_index, name, array) in a fixed order."""
        for i, layer in enumerate(self.layers):
            for name in sorted(layer):
                yield i, name, layer[name]

    def to_vector(self) -> np.ndarray:
        return np.concatenate([a.ravel() for _, _, a in self.arrays()])

    def from_vector(self, vec: np.ndarray) -> None:
        pos = 0
        for _, _, a in self.arrays():
            n = a.size
            a[...] = vec[pos : pos + n].reshape(a.shape)
            pos += n
        if pos != vec.size:
            raise ConfigurationError("vector length does not match parameter count")

    @property
    def size(self) -> int:
        return sum(a.size for _, _, a in self.arrays())


def glorot_init(spec: NetworkSpec, rng: np.random.Generator) -> ParamSet:
    """Glorot-uniform weights, zero biases, LSTM forget-gate bias 1."""
    params = ParamSet.zeros(spec)
    for in_dim, layer, arrays in zip(spec.layer_input_dims(), spec.layers, params.layers):
        w = layer.width
        if layer.kind == "lstm-tanh":
            bx = np.sqrt(6.0 / (in_dim + w))
            bh = np.sqrt(6.0 / (w + w))
            arrays["Wx"][...] = rng.uniform(-bx, bx, size=(4 * w, in_dim))
            arrays["Wh"][...] = rng.uniform(-bh, bh, size=(4 * w, w))
            arrays["b"][w : 2 * w] = 1.0
        else:
            bound = np.sqrt(6.0 / (in_dim + w))
            arrays["W"][...] = rng.uniform(-bound, bound, size=(w, in_dim))
    return params


@dataclass
class RecurrentState:
    """Hidden and cell vectors of the LSTM layer; zeroed at episode start."""

    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, width: int, batch: int | None = None) -> "RecurrentState":
        shape = (width,) if batch is None else (batch, width)
        return cls(np.zeros(shape), np.zeros(shape))

    def copy(self) -> "RecurrentState":
        return RecurrentState(self.h.copy(), self.c.copy())


@dataclass
class Tape:
    """Computation record for one forward call or an appended trace of them."""

    spec: NetworkSpec
    params: ParamSet
    steps: list[list[tuple]] = field(default_factory=list)
    single_input: bool = False  # inputs were vectors, not batches


def _check_input(spec: NetworkSpec, x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 1:
        single = True
        x = x[None, :]
    elif x.ndim == 2:
        single = False
    else:
        raise ConfigurationError(f"input must be 1-D or 2-D, got shape {x.shape}")
    if x.shape[1] != spec.input_dim:
        raise ConfigurationError(
            f"input length {x.shape[1]} does not match input_dim {spec.input_dim}"
        )
    return x, single


def _forward_step(spec, params, x, state, record):
    """One time-step through every layer; returns (out, new_state, caches)."""
    caches = [] if record else None
    a = x
    new_state = None
    for layer, arrays in zip(spec.layers, params.layers):
        if layer.kind == "lstm-tanh":
            if state is None:
                raise ConfigurationError("recurrent network requires a RecurrentState")
            h = state.h if state.h.ndim == 2 else state.h[None, :]
            c = state.c if state.c.ndim == 2 else state.c[None, :]
            h2, c2, gates, ct = K.lstm_forward(
                a, arrays["Wx"], arrays["Wh"], arrays["b"], h, c
            )
            if record:
                caches.append((a, h, c, gates, ct))
            new_state = RecurrentState(h2, c2)
            a = h2
        else:
            z = K.dense_forward(a, arrays["W"], arrays["b"])
            if layer.kind == "dense-relu":
                if record:
                    caches.append((a, z))
                a = K.relu(z)
            elif layer.kind == "dense-linear":
                if record:
                    caches.append((a,))
                a = z
            else:  # softmax-head
                p = K.softmax(z)
                if record:
                    caches.append((a, p))
                a = p
    return a, new_state, caches


def forward(
    spec: NetworkSpec,
    params: ParamSet,
    x: np.ndarray,
    state: RecurrentState | None = None,
    tape: Tape | None = None,
    want_tape: bool = True,
):
    """Run the network on one input (or batch of inputs).

    Returns (output, new_state, tape).  new_state is None for feedforward
    networks.  Passing an existing tape appends this step to it, building a
    trace for backprop through time; otherwise a fresh tape is created.
    With want_tape=False no computation record is kept (cheaper; for acting).
    """
    x, single = _check_input(spec, x)
    if spec.is_recurrent:
        if state is None:
            raise ConfigurationError("recurrent network requires a RecurrentState")
    elif state is not None:
        raise ConfigurationError("non-recurrent network must not receive a state")

    record = want_tape
    out, new_state, caches = _forward_step(spec, params, x, state, record)

    if record:
        if tape is None:
            tape = Tape(spec, params, single_input=single)
        tape.steps.append(caches)
    if new_state is not None and single:
        new_state = RecurrentState(new_state.h[0], new_state.c[0])
    if single:
        out = out[0]
    return out, new_state, tape


def forward_sequence(
    spec: NetworkSpec,
    params: ParamSet,
    xs: np.ndarray,
    state: RecurrentState | None = None,
    want_tape: bool = True,
):
    """Run a T-step trace, threading the recurrent state.

    xs has shape (T, input_dim) or (B, T, input_dim).  Returns
    (outputs, final_state, tape) with outputs (T, out) or (B, T, out).
    Implemented as repeated single-step forwards, so it is bit-identical to
    manual threading.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim == 2:
        single = True
        seq = np.ascontiguousarray(xs[:, None, :])  # (T, 1, I)
    elif xs.ndim == 3:
        single = False
        seq = np.ascontiguousarray(np.swapaxes(xs, 0, 1))  # (T, B, I)
    else:
        raise ConfigurationError(f"trace input must be 2-D or 3-D, got {xs.shape}")

    if spec.is_recurrent and state is None:
        raise ConfigurationError("recurrent network requires a RecurrentState")
    if state is not None and state.h.ndim == 1:
        state = RecurrentState(state.h[None, :], state.c[None, :])

    tape = Tape(spec, params, single_input=False) if want_tape else None
    outs = []
    for t in range(seq.shape[0]):
        out, state, caches = _forward_step(spec, params, seq[t], state, want_tape)
        if want_tape:
            tape.steps.append(caches)
        outs.append(out)
    ys = np.stack(outs, axis=1)  # (B, T, out)
    if single:
        ys = ys[0]
        if state is not None:
            state = RecurrentState(state.h[0], state.c[0])
    return ys, state, tape


def backward(tape: Tape, output_gradient: np.ndarray) -> ParamSet:
    """Accumulate parameter gradients for the forward pass(es) on the tape.

    output_gradient matches the outputs that were produced: (out,) or
    (B, out) for a single step; (T, out) or (B, T, out) for a trace (zero
    rows mask steps out of the loss).  For traces this is full backprop
    through time.
    """
    spec, params = tape.spec, tape.params
    T = len(tape.steps)
    if T == 0:
        raise ConfigurationError("tape is empty")

    dy = np.asarray(output_gradient, dtype=np.float64)
    out_dim = spec.output_dim
    if T == 1 and dy.ndim <= 2:
        if dy.ndim == 1:
            dy = dy[None, :]
        dys = np.ascontiguousarray(dy[None, :, :])  # (T=1, B, out)
    else:
        if dy.ndim == 2:  # (T, out)
            dys = np.ascontiguousarray(dy[:, None, :])
        elif dy.ndim == 3:  # (B, T, out)
            dys = np.ascontiguousarray(np.swapaxes(dy, 0, 1))
        else:
            raise ConfigurationError(
                f"output gradient shape {dy.shape} does not match a {T}-step tape"
            )
    if dys.shape[0] != T or dys.shape[2] != out_dim:
        raise ConfigurationError(
            f"output gradient shape {dy.shape} does not match tape ({T} steps, "
            f"output dim {out_dim})"
        )

    grads = ParamSet.zeros(spec)
    dh_next = None
    dc_next = None

    for t in range(T - 1, -1, -1):
        caches = tape.steps[t]
        da = dys[t]
        for li in range(len(spec.layers) - 1, -1, -1):
            layer = spec.layers[li]
            arrays = params.layers[li]
            acc = grads.layers[li]
            cache = caches[li]
            if layer.kind == "lstm-tanh":
                x_in, h_prev, c_prev, gates, ct = cache
                dh = da if dh_next is None else da + dh_next
                dc = (
                    dc_next
                    if dc_next is not None
                    else np.zeros_like(c_prev)
                )
                dWx, dWh, db, dx, dh_prev, dc_prev = K.lstm_backward(
                    x_in, arrays["Wx"], arrays["Wh"], h_prev, c_prev, gates, ct, dh, dc
                )
                acc["Wx"] += dWx
                acc["Wh"] += dWh
                acc["b"] += db
                da = dx
                dh_next = dh_prev
                dc_next = dc_prev
            else:
                if layer.kind == "dense-relu":
                    x_in, z = cache
                    dz = K.relu_backward(da, z)
                elif layer.kind == "softmax-head":
                    x_in, p = cache
                    dz = K.softmax_backward(da, p)
                else:
                    (x_in,) = cache
                    dz = da
                dW, db, da = K.dense_backward(x_in, arrays["W"], dz)
                acc["W"] += dW
                acc["b"] += db

    for li, name, arr in grads.arrays():
        if not np.all(np.isfinite(arr)):
            raise NumericalError(
                f"non-finite gradient in layer {li} ({spec.layers[li].kind}, {name})"
            )
    return grads


def recurrent_trace_outputs(spec: NetworkSpec, params: ParamSet, xs: np.ndarray) -> np.ndarray:
    """Evaluation-only unroll of the recurrent chain from a zero state.

    Only valid for the dense-relu -> lstm-tanh -> dense-linear architecture;
    returns the (T, out) outputs without building a tape.  Agrees with
    forward_sequence and is much cheaper for pure evaluation (finite
    differences, target values).
    """
    kinds = tuple(layer.kind for layer in spec.layers)
    if kinds != ("dense-relu", "lstm-tanh", "dense-linear"):
        raise ConfigurationError("fused trace evaluation needs the recurrent chain")
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != spec.input_dim:
        raise ConfigurationError(f"trace must be (T, {spec.input_dim}), got {xs.shape}")
    l0, l1, l2 = params.layers
    return K.recurrent_trace_outputs(
        xs, l0["W"], l0["b"], l1["Wx"], l1["Wh"], l1["b"], l2["W"], l2["b"]
    )


def softmax(z: np.ndarray) -> np.ndarray:
    return K.softmax(np.asarray(z, dtype=np.float64))


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
