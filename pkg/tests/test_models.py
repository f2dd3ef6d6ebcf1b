import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fluxgrad as fg
from fluxgrad.models import _mlp_forward


def rel_l2(a, b):
    denom = max(np.linalg.norm(b), 1e-300)
    return np.linalg.norm(a - b) / denom


class TestEvaluate:
    def test_linear_dot_product(self):
        m = fg.linear_model([1.0, 2.0], b=0.0)
        assert fg.evaluate(m, [3.0, 4.0]) == 11.0

    def test_quadratic_minimum_at_center(self):
        m = fg.quadratic_model([1.0, 1.0], [0.0, 0.0])
        assert fg.evaluate(m, [0.0, 0.0]) == 0.0

    def test_sigmoid_head_at_zero(self):
        m = fg.linear_model([1.0, 0.0], head=fg.Head("sigmoid"))
        assert fg.evaluate(m, [0.0, 0.0]) == 0.5

    def test_dimension_mismatch(self):
        m = fg.linear_model([1.0, 2.0])
        with pytest.raises(fg.DimensionMismatch):
            fg.evaluate(m, [1.0, 2.0, 3.0])

    def test_non_finite_input(self):
        m = fg.linear_model([1.0, 2.0])
        with pytest.raises(fg.NonFiniteInput):
            fg.evaluate(m, [np.nan, 0.0])


class TestGradient:
    def test_linear_constant_gradient(self):
        m = fg.linear_model([1.0, 2.0])
        for x in ([0.0, 0.0], [5.0, -3.0], [100.0, 7.0]):
            assert np.array_equal(fg.gradient(m, x), [1.0, 2.0])

    def test_quadratic_gradient(self):
        m = fg.quadratic_model([2.0, 3.0])
        assert np.allclose(fg.gradient(m, [1.0, 1.0]), [2.0, 3.0])

    def test_tanh_mlp_matches_finite_differences(self):
        m = fg.random_mlp(4, hidden=(6, 5), activation="tanh", seed=3)
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = rng.standard_normal(4)
            assert rel_l2(fg.gradient(m, x), fg.fd_gradient(m, x, h=1e-5)) < 1e-5

    def test_softmax_head_gradient_matches_fd(self):
        m = fg.random_mlp(3, hidden=(5,), out_dim=4, activation="tanh", seed=1,
                          head=fg.Head("softmax", target=2))
        x = np.array([0.3, -0.7, 0.2])
        assert rel_l2(fg.gradient(m, x), fg.fd_gradient(m, x, h=1e-5)) < 1e-5

    def test_logit_head_gradient_matches_fd(self):
        m = fg.random_mlp(3, hidden=(5,), out_dim=4, activation="tanh", seed=1,
                          head=fg.Head("softmax", target=2, use_logit=True))
        x = np.array([0.3, -0.7, 0.2])
        assert rel_l2(fg.gradient(m, x), fg.fd_gradient(m, x, h=1e-5)) < 1e-5


class TestFdGradient:
    def test_exact_for_linear(self):
        m = fg.linear_model([5.0])
        assert abs(fg.fd_gradient(m, [0.0], h=1e-4)[0] - 5.0) < 1e-10

    def test_exact_for_quadratic(self):
        m = fg.quadratic_model([1.0])
        assert abs(fg.fd_gradient(m, [2.0], h=1e-4)[0] - 2.0) < 1e-7

    def test_gauss_mixture_self_consistency(self):
        m = fg.gauss_mixture_model(
            [1.0, -0.5], [[0.0, 0.0], [1.0, -1.0]], [1.0, 0.7]
        )
        rng = np.random.default_rng(4)
        for _ in range(10):
            x = rng.standard_normal(2)
            assert rel_l2(fg.fd_gradient(m, x, h=1e-5), fg.gradient(m, x)) < 1e-5

    def test_rejects_nonpositive_step(self):
        m = fg.linear_model([1.0])
        with pytest.raises(ValueError):
            fg.fd_gradient(m, [0.0], h=0.0)


def _model_zoo():
    return [
        fg.linear_model([1.0, -2.0, 0.5], b=0.3),
        fg.quadratic_model([1.0, 2.0, 3.0], [0.1, -0.2, 0.0]),
        fg.gauss_mixture_model([1.0, 0.5], [[0.0] * 3, [1.0] * 3], [1.0, 0.5]),
        fg.random_mlp(3, hidden=(6,), activation="softplus", seed=5),
        fg.random_mlp(3, hidden=(6,), activation="tanh", seed=5,
                      head=fg.Head("sigmoid")),
    ]


class TestInvariants:
    @pytest.mark.parametrize("model", _model_zoo())
    def test_gradient_agrees_with_fd_over_random_points(self, model):
        rng = np.random.default_rng(11)
        for _ in range(100):
            x = rng.standard_normal(model.dim)
            assert rel_l2(fg.gradient(model, x), fg.fd_gradient(model, x, 1e-5)) < 1e-4

    def test_relu_mlp_checked_away_from_kinks(self):
        model = fg.random_mlp(3, hidden=(6,), activation="relu", seed=5)
        rng = np.random.default_rng(12)
        checked = 0
        while checked < 100:
            x = rng.standard_normal(3)
            _, pre = _mlp_forward(model.params, x[None, :])
            if all(np.min(np.abs(z)) > 1e-3 for z in pre):
                assert rel_l2(fg.gradient(model, x), fg.fd_gradient(model, x, 1e-5)) < 1e-4
                checked += 1

    @given(st.lists(st.floats(-5, 5), min_size=2, max_size=2))
    @settings(max_examples=50, deadline=None)
    def test_sigmoid_head_output_in_unit_interval(self, x):
        # restricted to |logit| < ~37; beyond that float64 saturates to 0/1
        m = fg.linear_model([3.0, -4.0], head=fg.Head("sigmoid"))
        assert 0.0 < fg.evaluate(m, x) < 1.0

    def test_evaluate_and_gradient_are_pure(self):
        m = fg.random_mlp(4, hidden=(5,), activation="tanh", seed=9)
        x = np.array([0.1, 0.2, -0.3, 0.4])
        assert fg.evaluate(m, x) == fg.evaluate(m, x)
        assert np.array_equal(fg.gradient(m, x), fg.gradient(m, x))


class TestFitToyModel:
    def test_separable_blobs_reach_high_accuracy(self):
        X, y = fg.blob_dataset(200, margin=1.0, seed=3)
        fit = fg.fit_toy_model(X, y, epochs=500)
        assert fit.accuracy >= 0.95
        assert fit.model.head.type == "sigmoid"

    def test_single_sample_repeated_is_memorized(self):
        X = np.tile([0.5, -0.5], (10, 1))
        y = np.ones(10, dtype=int)
        fit = fg.fit_toy_model(X, y, epochs=200)
        assert fit.accuracy == 1.0

    def test_fixed_seed_is_bit_identical(self):
        X, y = fg.blob_dataset(100, seed=1)
        a = fg.fit_toy_model(X, y, seed=7)
        b = fg.fit_toy_model(X, y, seed=7)
        for la, lb in zip(a.model.params.layers, b.model.params.layers):
            assert np.array_equal(la.weight, lb.weight)
            assert np.array_equal(la.bias, lb.bias)

    def test_multiclass_gets_softmax_head(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((60, 2))
        y = rng.integers(0, 3, size=60)
        fit = fg.fit_toy_model(X, y, epochs=50)
        assert fit.model.head.type == "softmax"
        assert 0.0 < fg.evaluate(fit.model, X[0]) < 1.0

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            fg.fit_toy_model(np.empty((0, 2)), np.empty(0, dtype=int))


class TestSerialization:
    @pytest.mark.parametrize("model", _model_zoo())
    def test_json_round_trip(self, model, tmp_path):
        path = tmp_path / "model.json"
        fg.save_model(model, path)
        back = fg.load_model(path)
        rng = np.random.default_rng(2)
        for _ in range(5):
            x = rng.standard_normal(model.dim)
            assert fg.evaluate(back, x) == fg.evaluate(model, x)
            assert np.array_equal(fg.gradient(back, x), fg.gradient(model, x))

    def test_dataset_csv_round_trip(self, tmp_path):
        X, y = fg.blob_dataset(30, seed=2)
        path = tmp_path / "data.csv"
        fg.save_dataset_csv(path, X, y)
        X2, y2 = fg.load_dataset_csv(path)
        assert np.array_equal(X, X2)
        assert np.array_equal(y, y2)
