# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled network kernels.

Same contract as ``_kernels_py``: matrix products go through BLAS dgemm
(scipy's shared BLAS, so results match the NumPy fallback closely) and the
element-wise passes are fused single loops.
"""

import numpy as np

cimport cython
from libc.math cimport exp, fabs, pow, sqrt, tanh

from scipy.linalg.cython_blas cimport dgemm, dgemv


cdef void _gemm(char ta, char tb, int m, int n, int k,
                double alpha, double *a, int lda, double *b, int ldb,
                double beta, double *c, int ldc) noexcept nogil:
    dgemm(&ta, &tb, &m, &n, &k, &alpha, a, &lda, b, &ldb, &beta, c, &ldc)


cdef inline double _sigmoid_one(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


def dense_forward(double[:, ::1] X, double[:, ::1] W, double[::1] b):
    cdef int B = X.shape[0], I = X.shape[1], O = W.shape[0]
    Z = np.empty((B, O))
    cdef double[:, ::1] Zv = Z
    cdef int i, j
    # Z^T (col-major O x B) = W^T_cm' X^T: see row/column-major mapping notes
    _gemm(b'T', b'N', O, B, I, 1.0, &W[0, 0], I, &X[0, 0], I, 0.0, &Zv[0, 0], O)
    for i in range(B):
        for j in range(O):
            Zv[i, j] += b[j]
    return Z


def dense_backward(double[:, ::1] X, double[:, ::1] W, double[:, ::1] dZ):
    cdef int B = X.shape[0], I = X.shape[1], O = W.shape[0]
    dW = np.empty((O, I))
    db = np.zeros(O)
    dX = np.empty((B, I))
    cdef double[:, ::1] dWv = dW
    cdef double[::1] dbv = db
    cdef double[:, ::1] dXv = dX
    cdef int i, j
    _gemm(b'N', b'T', I, O, B, 1.0, &X[0, 0], I, &dZ[0, 0], O, 0.0, &dWv[0, 0], I)
    _gemm(b'N', b'N', I, B, O, 1.0, &W[0, 0], I, &dZ[0, 0], O, 0.0, &dXv[0, 0], I)
    for i in range(B):
        for j in range(O):
            dbv[j] += dZ[i, j]
    return dW, db, dX


def relu(double[:, ::1] Z):
    cdef int B = Z.shape[0], O = Z.shape[1]
    A = np.empty((B, O))
    cdef double[:, ::1] Av = A
    cdef int i, j
    for i in range(B):
        for j in range(O):
            Av[i, j] = Z[i, j] if Z[i, j] > 0.0 else 0.0
    return A


def relu_backward(double[:, ::1] dA, double[:, ::1] Z):
    cdef int B = Z.shape[0], O = Z.shape[1]
    dZ = np.empty((B, O))
    cdef double[:, ::1] dZv = dZ
    cdef int i, j
    for i in range(B):
        for j in range(O):
            dZv[i, j] = dA[i, j] if Z[i, j] > 0.0 else 0.0
    return dZ


def softmax(Z):
    Z2 = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    out = _softmax_2d(np.ascontiguousarray(Z2))
    return out[0] if np.asarray(Z).ndim == 1 else out


def _softmax_2d(double[:, ::1] Z):
    cdef int B = Z.shape[0], O = Z.shape[1]
    P = np.empty((B, O))
    cdef double[:, ::1] Pv = P
    cdef int i, j
    cdef double m, s
    for i in range(B):
        m = Z[i, 0]
        for j in range(1, O):
            if Z[i, j] > m:
                m = Z[i, j]
        s = 0.0
        for j in range(O):
            Pv[i, j] = exp(Z[i, j] - m)
            s += Pv[i, j]
        for j in range(O):
            Pv[i, j] /= s
    return P


def softmax_backward(double[:, ::1] dP, double[:, ::1] P):
    cdef int B = P.shape[0], O = P.shape[1]
    dZ = np.empty((B, O))
    cdef double[:, ::1] dZv = dZ
    cdef int i, j
    cdef double inner
    for i in range(B):
        inner = 0.0
        for j in range(O):
            inner += dP[i, j] * P[i, j]
        for j in range(O):
            dZv[i, j] = P[i, j] * (dP[i, j] - inner)
    return dZ


def lstm_forward(double[:, ::1] X, double[:, ::1] Wx, double[:, ::1] Wh,
                 double[::1] b, double[:, ::1] h, double[:, ::1] c):
    cdef int B = X.shape[0], I = X.shape[1]
    cdef int H4 = Wx.shape[0], H = H4 // 4
    pre = np.empty((B, H4))
    h_new = np.empty((B, H))
    c_new = np.empty((B, H))
    ct = np.empty((B, H))
    gates = np.empty((B, H4))
    cdef double[:, ::1] prev = pre, hn = h_new, cn = c_new, ctv = ct, gv = gates
    cdef int i, j
    cdef double gi, gf, gg, go, cc
    _gemm(b'T', b'N', H4, B, I, 1.0, &Wx[0, 0], I, &X[0, 0], I, 0.0, &prev[0, 0], H4)
    _gemm(b'T', b'N', H4, B, H, 1.0, &Wh[0, 0], H, &h[0, 0], H, 1.0, &prev[0, 0], H4)
    for i in range(B):
        for j in range(H):
            gi = _sigmoid_one(prev[i, j] + b[j])
            gf = _sigmoid_one(prev[i, H + j] + b[H + j])
            gg = tanh(prev[i, 2 * H + j] + b[2 * H + j])
            go = _sigmoid_one(prev[i, 3 * H + j] + b[3 * H + j])
            cc = gf * c[i, j] + gi * gg
            gv[i, j] = gi
            gv[i, H + j] = gf
            gv[i, 2 * H + j] = gg
            gv[i, 3 * H + j] = go
            cn[i, j] = cc
            ctv[i, j] = tanh(cc)
            hn[i, j] = go * ctv[i, j]
    return h_new, c_new, gates, ct


def lstm_backward(double[:, ::1] X, double[:, ::1] Wx, double[:, ::1] Wh,
                  double[:, ::1] h_prev, double[:, ::1] c_prev,
                  double[:, ::1] gates, double[:, ::1] ct,
                  double[:, ::1] dh, double[:, ::1] dc):
    cdef int B = X.shape[0], I = X.shape[1]
    cdef int H4 = Wx.shape[0], H = H4 // 4
    dpre = np.empty((B, H4))
    dc_prev = np.empty((B, H))
    cdef double[:, ::1] dprev = dpre, dcp = dc_prev
    cdef int i, j
    cdef double gi, gf, gg, go, dct, dcT, di, df, dg, do
    for i in range(B):
        for j in range(H):
            gi = gates[i, j]
            gf = gates[i, H + j]
            gg = gates[i, 2 * H + j]
            go = gates[i, 3 * H + j]
            do = dh[i, j] * ct[i, j]
            dcT = dc[i, j] + dh[i, j] * go * (1.0 - ct[i, j] * ct[i, j])
            di = dcT * gg
            df = dcT * c_prev[i, j]
            dg = dcT * gi
            dcp[i, j] = dcT * gf
            dprev[i, j] = di * gi * (1.0 - gi)
            dprev[i, H + j] = df * gf * (1.0 - gf)
            dprev[i, 2 * H + j] = dg * (1.0 - gg * gg)
            dprev[i, 3 * H + j] = do * go * (1.0 - go)

    dWx = np.empty((H4, I))
    dWh = np.empty((H4, H))
    db = np.zeros(H4)
    dX = np.empty((B, I))
    dh_prev = np.empty((B, H))
    cdef double[:, ::1] dWxv = dWx, dWhv = dWh, dXv = dX, dhp = dh_prev
    cdef double[::1] dbv = db
    _gemm(b'N', b'T', I, H4, B, 1.0, &X[0, 0], I, &dprev[0, 0], H4, 0.0, &dWxv[0, 0], I)
    _gemm(b'N', b'T', H, H4, B, 1.0, &h_prev[0, 0], H, &dprev[0, 0], H4, 0.0, &dWhv[0, 0], H)
    _gemm(b'N', b'N', I, B, H4, 1.0, &Wx[0, 0], I, &dprev[0, 0], H4, 0.0, &dXv[0, 0], I)
    _gemm(b'N', b'N', H, B, H4, 1.0, &Wh[0, 0], H, &dprev[0, 0], H4, 0.0, &dhp[0, 0], H)
    for i in range(B):
        for j in range(H4):
            dbv[j] += dprev[i, j]
    return dWx, dWh, db, dX, dh_prev, dc_prev


cdef void _matvec(double[:, ::1] W, double *x, double *y, double beta) noexcept nogil:
    # y = W x (+ beta * y); W row-major (O, I) is W^T in column-major
    cdef char trans = b'T'
    cdef int m = W.shape[1], n = W.shape[0], inc = 1
    cdef double alpha = 1.0
    dgemv(&trans, &m, &n, &alpha, &W[0, 0], &m, x, &inc, &beta, y, &inc)


def recurrent_trace_outputs(double[:, ::1] xs, double[:, ::1] W1, double[::1] b1,
                            double[:, ::1] Wx, double[:, ::1] Wh, double[::1] b,
                            double[:, ::1] W2, double[::1] b2):
    """No-tape unroll of the dense-relu -> lstm -> linear chain over a trace."""
    cdef int T = xs.shape[0]
    cdef int D = W1.shape[0]       # dense width
    cdef int H = Wh.shape[1]       # lstm width
    cdef int O = W2.shape[0]
    outs = np.empty((T, O))
    cdef double[:, ::1] out_v = outs
    a_buf = np.empty(D)
    pre_buf = np.empty(4 * H)
    h_buf = np.zeros(H)
    c_buf = np.zeros(H)
    cdef double[::1] a = a_buf, pre = pre_buf, h = h_buf, c = c_buf
    cdef int t, j
    cdef double gi, gf, gg, go
    for t in range(T):
        _matvec(W1, &xs[t, 0], &a[0], 0.0)
        for j in range(D):
            a[j] = a[j] + b1[j]
            if a[j] < 0.0:
                a[j] = 0.0
        _matvec(Wx, &a[0], &pre[0], 0.0)
        _matvec(Wh, &h[0], &pre[0], 1.0)
        for j in range(H):
            gi = _sigmoid_one(pre[j] + b[j])
            gf = _sigmoid_one(pre[H + j] + b[H + j])
            gg = tanh(pre[2 * H + j] + b[2 * H + j])
            go = _sigmoid_one(pre[3 * H + j] + b[3 * H + j])
            c[j] = gf * c[j] + gi * gg
            h[j] = go * tanh(c[j])
        _matvec(W2, &h[0], &out_v[t, 0], 0.0)
        for j in range(O):
            out_v[t, j] += b2[j]
    return outs


def adam_step(p, g, m, v, long t, double lr, double beta1, double beta2, double eps):
    cdef double[::1] pv = p.ravel(), gv = g.ravel(), mv = m.ravel(), vv = v.ravel()
    cdef Py_ssize_t i, n = pv.shape[0]
    cdef double bc1 = 1.0 - pow(beta1, t)
    cdef double bc2 = 1.0 - pow(beta2, t)
    cdef double mhat, vhat
    for i in range(n):
        mv[i] = beta1 * mv[i] + (1.0 - beta1) * gv[i]
        vv[i] = beta2 * vv[i] + (1.0 - beta2) * gv[i] * gv[i]
        mhat = mv[i] / bc1
        vhat = vv[i] / bc2
        pv[i] -= lr * mhat / (sqrt(vhat) + eps)


def adadelta_step(p, g, avg_sq_grad, avg_sq_delta, double rho, double eps, double lr):
    cdef double[::1] pv = p.ravel(), gv = g.ravel()
    cdef double[::1] eg = avg_sq_grad.ravel(), ed = avg_sq_delta.ravel()
    cdef Py_ssize_t i, n = pv.shape[0]
    cdef double delta
    for i in range(n):
        eg[i] = rho * eg[i] + (1.0 - rho) * gv[i] * gv[i]
        delta = sqrt(ed[i] + eps) / sqrt(eg[i] + eps) * gv[i]
        ed[i] = rho * ed[i] + (1.0 - rho) * delta * delta
        pv[i] -= lr * delta


def clip_abs(g, double limit):
    cdef double[::1] gv = g.ravel()
    cdef Py_ssize_t i, n = gv.shape[0]
    for i in range(n):
        if gv[i] > limit:
            gv[i] = limit
        elif gv[i] < -limit:
            gv[i] = -limit


def scale(g, double factor):
    cdef double[::1] gv = g.ravel()
    cdef Py_ssize_t i, n = gv.shape[0]
    for i in range(n):
        gv[i] *= factor


def sum_squares(g):
    cdef double[::1] gv = g.ravel()
    cdef Py_ssize_t i, n = gv.shape[0]
    cdef double total = 0.0
    for i in range(n):
        total += gv[i] * gv[i]
    return total
