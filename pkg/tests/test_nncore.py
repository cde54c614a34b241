"""Network core tests: forward/backward against a finite-difference oracle,
clipping semantics, and optimizer recurrences."""

import numpy as np
import pytest

from polylife.exceptions import ConfigurationError
from polylife.nncore import (
    LayerSpec,
    NetworkSpec,
    OptimizerState,
    ParamSet,
    RecurrentState,
    backward,
    clip_gradients,
    forward,
    forward_sequence,
    glorot_init,
    global_norm,
    optimizer_step,
    softmax,
)
from polylife.nncore.network import spec_mlp, spec_recurrent


def finite_difference_grads(spec, params, loss_fn, h=1e-5):
    """Central-difference gradient of loss_fn(params) w.r.t. every parameter."""
    base = params.to_vector()
    grads = np.zeros_like(base)
    for i in range(base.size):
        for sign in (+1, -1):
            vec = base.copy()
            vec[i] += sign * h
            params.from_vector(vec)
            grads[i] += sign * loss_fn(params)
    params.from_vector(base)
    return grads / (2.0 * h)


def relative_errors(a, b, floor=1e-3):
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return np.abs(a - b) / denom


class TestForward:
    def test_zero_weights_give_zero_relu_output(self):
        spec = spec_mlp(4, 8, 2)
        params = ParamSet.zeros(spec)
        out, state, _ = forward(spec, params, np.array([1.0, -2.0, 3.0, 0.5]))
        assert state is None
        assert np.all(out == 0.0)

    def test_identity_linear_layer(self):
        spec = NetworkSpec(2, (LayerSpec("dense-linear", 2),))
        params = ParamSet.zeros(spec)
        params.layers[0]["W"][...] = np.eye(2)
        out, _, _ = forward(spec, params, np.array([1.0, 2.0]))
        assert np.array_equal(out, np.array([1.0, 2.0]))

    def test_forward_is_deterministic(self):
        rng = np.random.default_rng(0)
        spec = spec_mlp(4, 80, 2)
        params = glorot_init(spec, rng)
        x = rng.normal(size=4)
        out1, _, _ = forward(spec, params, x)
        out2, _, _ = forward(spec, params, x)
        assert np.array_equal(out1, out2)

    def test_dimension_mismatch_rejected(self):
        spec = spec_mlp(4, 8, 2)
        params = ParamSet.zeros(spec)
        with pytest.raises(ConfigurationError):
            forward(spec, params, np.zeros(5))

    def test_state_required_iff_recurrent(self):
        rng = np.random.default_rng(1)
        rec = spec_recurrent(4, 8, 2)
        with pytest.raises(ConfigurationError):
            forward(rec, glorot_init(rec, rng), np.zeros(4))
        ff = spec_mlp(4, 8, 2)
        with pytest.raises(ConfigurationError):
            forward(ff, glorot_init(ff, rng), np.zeros(4), RecurrentState.zeros(8))

    def test_softmax_head_outputs_distribution(self):
        rng = np.random.default_rng(2)
        spec = NetworkSpec(
            3, (LayerSpec("dense-relu", 6), LayerSpec("softmax-head", 4))
        )
        params = glorot_init(spec, rng)
        for _ in range(20):
            out, _, _ = forward(spec, params, rng.normal(size=3))
            assert np.all(out >= 0.0)
            assert abs(out.sum() - 1.0) < 1e-9

    def test_invalid_specs_rejected(self):
        with pytest.raises(ConfigurationError):
            NetworkSpec(4, (LayerSpec("softmax-head", 2), LayerSpec("dense-linear", 2)))
        with pytest.raises(ConfigurationError):
            NetworkSpec(4, (LayerSpec("lstm-tanh", 4), LayerSpec("lstm-tanh", 4)))
        with pytest.raises(ConfigurationError):
            NetworkSpec(4, (LayerSpec("dense-relu", 0),))


class TestLstmThreading:
    def test_trace_equals_threaded_single_steps(self):
        rng = np.random.default_rng(3)
        spec = spec_recurrent(4, 8, 2)
        params = glorot_init(spec, rng)
        xs = rng.normal(size=(7, 4))

        ys_seq, state_seq, _ = forward_sequence(
            spec, params, xs, RecurrentState.zeros(8)
        )

        state = RecurrentState.zeros(8)
        ys_threaded = []
        for t in range(7):
            y, state, _ = forward(spec, params, xs[t], state, want_tape=False)
            ys_threaded.append(y)
        ys_threaded = np.stack(ys_threaded)

        assert np.array_equal(ys_seq, ys_threaded)
        assert np.array_equal(state_seq.h, state.h)
        assert np.array_equal(state_seq.c, state.c)


class TestBackward:
    def test_zero_output_gradient_gives_zero_grads(self):
        rng = np.random.default_rng(4)
        spec = spec_mlp(4, 8, 2)
        params = glorot_init(spec, rng)
        _, _, tape = forward(spec, params, rng.normal(size=4))
        grads = backward(tape, np.zeros(2))
        assert all(np.all(a == 0.0) for _, _, a in grads.arrays())

    def test_scalar_chain_rule(self):
        # f(w) = w * x with x = 3: dL/dw = 3 when dL/df = 1
        spec = NetworkSpec(1, (LayerSpec("dense-linear", 1),))
        params = ParamSet.zeros(spec)
        params.layers[0]["W"][...] = 2.0
        _, _, tape = forward(spec, params, np.array([3.0]))
        grads = backward(tape, np.array([1.0]))
        assert grads.layers[0]["W"][0, 0] == 3.0
        assert grads.layers[0]["b"][0] == 1.0

    @pytest.mark.parametrize("case", ["mlp", "lstm"])
    def test_matches_finite_differences(self, case):
        rng = np.random.default_rng(5)
        if case == "mlp":
            spec = spec_mlp(4, 8, 2)
            params = glorot_init(spec, rng)
            x = rng.normal(size=4)
            w = rng.normal(size=2)

            def loss_fn(p):
                out, _, _ = forward(spec, p, x, want_tape=False)
                return float(w @ out)

            _, _, tape = forward(spec, params, x)
            grads = backward(tape, w)
        else:
            spec = spec_recurrent(4, 8, 2)
            params = glorot_init(spec, rng)
            xs = rng.normal(size=(6, 4))
            w = rng.normal(size=(6, 2))

            def loss_fn(p):
                ys, _, _ = forward_sequence(
                    spec, p, xs, RecurrentState.zeros(8), want_tape=False
                )
                return float((w * ys).sum())

            _, _, tape = forward_sequence(spec, params, xs, RecurrentState.zeros(8))
            grads = backward(tape, w)

        fd = finite_difference_grads(spec, params, loss_fn)
        err = relative_errors(grads.to_vector(), fd)
        assert np.mean(err < 1e-4) >= 0.99
        assert err.max() < 1e-3

    def test_gradcheck_random_small_networks(self):
        # Property over a handful of random architectures under 200 parameters.
        rng = np.random.default_rng(6)
        specs = [
            spec_mlp(3, 5, 2),
            spec_mlp(2, 9, 3, n_hidden=1),
            NetworkSpec(3, (LayerSpec("dense-relu", 5), LayerSpec("softmax-head", 3))),
            spec_recurrent(3, 4, 2),
        ]
        for spec in specs:
            params = glorot_init(spec, rng)
            assert params.size <= 200
            if spec.is_recurrent:
                xs = rng.normal(size=(4, spec.input_dim))
                w = rng.normal(size=(4, spec.output_dim))

                def loss_fn(p, xs=xs, w=w, spec=spec):
                    ys, _, _ = forward_sequence(
                        spec, p, xs, RecurrentState.zeros(4), want_tape=False
                    )
                    return float((w * ys).sum())

                _, _, tape = forward_sequence(
                    spec, params, xs, RecurrentState.zeros(4)
                )
                grads = backward(tape, w)
            else:
                x = rng.normal(size=spec.input_dim)
                w = rng.normal(size=spec.output_dim)

                def loss_fn(p, x=x, w=w, spec=spec):
                    out, _, _ = forward(spec, p, x, want_tape=False)
                    return float(w @ out)

                _, _, tape = forward(spec, params, x)
                grads = backward(tape, w)
            err = relative_errors(grads.to_vector(), finite_difference_grads(spec, params, loss_fn))
            assert np.mean(err < 1e-4) >= 0.99
            assert err.max() < 1e-3


class TestClipGradients:
    def _grads(self, values):
        spec = NetworkSpec(len(values), (LayerSpec("dense-linear", 1),))
        g = ParamSet.zeros(spec)
        g.layers[0]["W"][...] = np.asarray(values)[None, :]
        return g

    def test_elementwise_clamp(self):
        g = self._grads([25.0, -3.0])
        clip_gradients(g, "elementwise-abs", 10.0)
        assert np.array_equal(g.layers[0]["W"][0], [10.0, -3.0])

    def test_norm_rescale(self):
        g = self._grads([3.0, 4.0])
        clip_gradients(g, "global-norm", 1.0)
        assert np.allclose(g.layers[0]["W"][0], [0.6, 0.8])

    def test_within_bounds_unchanged(self):
        g = self._grads([0.3, 0.4])
        before = g.layers[0]["W"].copy()
        clip_gradients(g, "global-norm", 1.0)
        assert np.array_equal(g.layers[0]["W"], before)
        clip_gradients(g, "elementwise-abs", 10.0)
        assert np.array_equal(g.layers[0]["W"], before)

    def test_norm_clip_never_increases_norm(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            values = rng.normal(scale=rng.uniform(0.1, 10.0), size=5)
            g = self._grads(values)
            before = global_norm(g)
            clip_gradients(g, "global-norm", 1.0)
            after = global_norm(g)
            assert after <= min(before, 1.0) + 1e-12


class TestOptimizers:
    def _single_param(self):
        spec = NetworkSpec(1, (LayerSpec("dense-linear", 1),))
        params = ParamSet.zeros(spec)
        params.layers[0]["W"][...] = 1.0
        return spec, params

    def test_adam_zero_gradient_keeps_params(self):
        _, params = self._single_param()
        opt = OptimizerState.adam(params)
        grads = ParamSet.zeros_like(params)
        # seed a first moment, then decay it with a zero gradient
        opt.slots["m"].layers[0]["b"][...] = 0.5
        before_m = 0.5
        w_before = params.layers[0]["W"].copy()
        optimizer_step(params, grads, opt)
        assert np.array_equal(params.layers[0]["W"], w_before)
        assert opt.slots["m"].layers[0]["b"][0] == pytest.approx(before_m * 0.9)

    def test_adam_first_step_magnitude_is_learning_rate(self):
        _, params = self._single_param()
        opt = OptimizerState.adam(params, learning_rate=0.00025)
        grads = ParamSet.zeros_like(params)
        grads.layers[0]["W"][...] = 1.0
        optimizer_step(params, grads, opt)
        delta = 1.0 - params.layers[0]["W"][0, 0]
        assert delta == pytest.approx(0.00025, rel=1e-6)

    def test_adadelta_descends_against_gradient(self):
        _, params = self._single_param()
        opt = OptimizerState.adadelta(params, learning_rate=0.1)
        grads = ParamSet.zeros_like(params)
        grads.layers[0]["W"][...] = 1.0
        optimizer_step(params, grads, opt)
        assert params.layers[0]["W"][0, 0] < 1.0
        # hand evaluation: E[g2]=0.05, delta = sqrt(1e-6)/sqrt(0.05+1e-6)
        expected = 0.1 * np.sqrt(1e-6) / np.sqrt(0.05 + 1e-6)
        assert 1.0 - params.layers[0]["W"][0, 0] == pytest.approx(expected, rel=1e-9)

    def test_optimizer_is_deterministic(self):
        for algo in ("adam", "adadelta"):
            results = []
            for _ in range(2):
                _, params = self._single_param()
                opt = (
                    OptimizerState.adam(params)
                    if algo == "adam"
                    else OptimizerState.adadelta(params)
                )
                grads = ParamSet.zeros_like(params)
                grads.layers[0]["W"][...] = 0.37
                for _ in range(5):
                    optimizer_step(params, grads, opt)
                results.append(params.layers[0]["W"][0, 0])
            assert results[0] == results[1]


def test_softmax_helper_is_distribution():
    rng = np.random.default_rng(8)
    z = rng.normal(scale=20.0, size=(50, 5))
    p = softmax(z)
    assert np.all(p >= 0.0)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
