"""NumPy implementations of the network kernels.

This module defines the kernel contract; the Cython extension in
``_kernels.pyx`` provides the same functions with identical semantics.
All arrays are C-contiguous float64.  Optimizer kernels update their
parameter/accumulator arguments in place.
"""

import numpy as np


def dense_forward(X, W, b):
    # X (B, I), W (O, I), b (O,) -> (B, O)
    return X @ W.T + b


def dense_backward(X, W, dZ):
    # returns (dW, db, dX)
    return dZ.T @ X, dZ.sum(axis=0), dZ @ W


def relu(Z):
    return np.maximum(Z, 0.0)


def relu_backward(dA, Z):
    return np.where(Z > 0.0, dA, 0.0)


def softmax(Z):
    shifted = Z - Z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_backward(dP, P):
    # Jacobian-vector product of the row-wise softmax.
    inner = (dP * P).sum(axis=-1, keepdims=True)
    return P * (dP - inner)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(X, Wx, Wh, b, h, c):
    """One LSTM step over a batch.

    X (B, I); Wx (4H, I); Wh (4H, H); b (4H,); h, c (B, H).
    Gate order along the 4H axis: input, forget, cell, output.
    Returns (h_new, c_new, gates (B, 4H), ct (B, H)) where gates holds the
    post-activation gate values and ct = tanh(c_new), both kept for backward.
    """
    H = h.shape[1]
    pre = X @ Wx.T + h @ Wh.T + b
    i = _sigmoid(pre[:, :H])
    f = _sigmoid(pre[:, H : 2 * H])
    g = np.tanh(pre[:, 2 * H : 3 * H])
    o = _sigmoid(pre[:, 3 * H :])
    c_new = f * c + i * g
    ct = np.tanh(c_new)
    h_new = o * ct
    gates = np.concatenate([i, f, g, o], axis=1)
    return h_new, c_new, gates, ct


def lstm_backward(X, Wx, Wh, h_prev, c_prev, gates, ct, dh, dc):
    """Backward of one LSTM step.

    dh, dc are the gradients flowing into h_new and c_new.  Returns
    (dWx, dWh, db, dX, dh_prev, dc_prev).
    """
    H = h_prev.shape[1]
    i = gates[:, :H]
    f = gates[:, H : 2 * H]
    g = gates[:, 2 * H : 3 * H]
    o = gates[:, 3 * H :]

    do = dh * ct
    dc_total = dc + dh * o * (1.0 - ct * ct)
    di = dc_total * g
    df = dc_total * c_prev
    dg = dc_total * i
    dc_prev = dc_total * f

    dpre = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    dWx = dpre.T @ X
    dWh = dpre.T @ h_prev
    db = dpre.sum(axis=0)
    dX = dpre @ Wx
    dh_prev = dpre @ Wh
    return dWx, dWh, db, dX, dh_prev, dc_prev


def adam_step(p, g, m, v, t, lr, beta1, beta2, eps):
    """In-place Adam update; t is the 1-based step count."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * g * g
    mhat = m / (1.0 - beta1**t)
    vhat = v / (1.0 - beta2**t)
    p -= lr * mhat / (np.sqrt(vhat) + eps)


def adadelta_step(p, g, avg_sq_grad, avg_sq_delta, rho, eps, lr):
    """In-place AdaDelta update with a global step multiplier ``lr``."""
    avg_sq_grad *= rho
    avg_sq_grad += (1.0 - rho) * g * g
    delta = np.sqrt(avg_sq_delta + eps) / np.sqrt(avg_sq_grad + eps) * g
    avg_sq_delta *= rho
    avg_sq_delta += (1.0 - rho) * delta * delta
    p -= lr * delta


def recurrent_trace_outputs(xs, W1, b1, Wx, Wh, b, W2, b2):
    """No-tape unroll of the dense-relu -> lstm -> linear chain over a trace.

    xs is (T, input_dim); returns the (T, out) head outputs.  Matches the
    generic layer-by-layer forward; exists as a single call so evaluation-only
    unrolls (finite differences, targets) skip the per-step plumbing.
    """
    T = xs.shape[0]
    H = Wh.shape[1]
    h = np.zeros(H)
    c = np.zeros(H)
    outs = np.empty((T, W2.shape[0]))
    for t in range(T):
        a = np.maximum(W1 @ xs[t] + b1, 0.0)
        pre = Wx @ a + Wh @ h + b
        i = _sigmoid(pre[:H])
        f = _sigmoid(pre[H : 2 * H])
        g = np.tanh(pre[2 * H : 3 * H])
        o = _sigmoid(pre[3 * H :])
        c = f * c + i * g
        h = o * np.tanh(c)
        outs[t] = W2 @ h + b2
    return outs


def clip_abs(g, limit):
    """In-place element-wise clamp to [-limit, +limit]."""
    np.clip(g, -limit, limit, out=g)


def scale(g, factor):
    """In-place multiplication by a scalar."""
    g *= factor


def sum_squares(g):
    return float(np.dot(g.ravel(), g.ravel()))
