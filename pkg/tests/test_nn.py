import numpy as np
import pytest

from propall import loss
from propall.datasets import FeatureScaler
from propall.enums import ForwardMode, NormalizeMode
from propall.exceptions import DimensionMismatchError, FormatError, StaleCacheError, ValidationError
from propall.gumbel import RandomSource
from propall.nn import (
    AdamState,
    ArchitectureSpec,
    BatchNorm,
    Linear,
    MlpModel,
    OptimizerState,
    adam_step,
    backward,
    forward,
    init_model,
    load_checkpoint,
    predict,
    predict_logits,
    save_checkpoint,
    sgd_step,
)
from propall.nn.checkpoint import checkpoint_document, model_from_document


def small_model(batch_norm=True, widths=(4, 6, 3), seed=0):
    return init_model(ArchitectureSpec(widths, batch_norm), RandomSource(seed))


def mean_loss(model, x, M):
    logits, _ = forward(model, x, ForwardMode.train)
    return loss.batch_cost(logits, M)[0]


class TestArchitecture:
    def test_parse(self):
        spec = ArchitectureSpec.parse("784,300,301,302,303,10")
        assert spec.widths == (784, 300, 301, 302, 303, 10)
        assert spec.input_width == 784 and spec.num_classes == 10
        assert spec.describe() == "784,300,301,302,303,10"

    @pytest.mark.parametrize("widths", [(5,), (5, 0, 2)])
    def test_invalid(self, widths):
        with pytest.raises(ValidationError):
            ArchitectureSpec(widths)


class TestInit:
    def test_layer_widths(self):
        model = init_model(ArchitectureSpec.parse("784,300,301,302,303,10"), RandomSource(0))
        linears = [layer for layer in model.layers if isinstance(layer, Linear)]
        assert [lin.weight.shape for lin in linears] == [(300, 784), (301, 300), (302, 301), (303, 302), (10, 303)]
        assert sum(isinstance(layer, BatchNorm) for layer in model.layers) == 4
        assert abs(linears[0].weight.mean()) < 0.005
        assert np.abs(linears[0].weight).max() <= np.sqrt(6.0 / 784)

    def test_same_seed_same_parameters(self):
        a, b = small_model(seed=3), small_model(seed=3)
        for (na, pa), (nb, pb) in zip(a.named_parameters(), b.named_parameters()):
            assert na == nb
            np.testing.assert_array_equal(pa, pb)

    def test_linear_model_has_single_layer(self):
        model = small_model(widths=(4, 3))
        assert [layer.kind for layer in model.layers] == ["linear"]


class TestForward:
    def test_identity_linear(self):
        model = MlpModel(ArchitectureSpec((3, 3), False), [Linear(np.eye(3), np.zeros(3))])
        x = np.array([[1.0, -2.0, 0.5], [0.0, 3.0, 4.0]])
        np.testing.assert_array_equal(forward(model, x, ForwardMode.eval)[0], x)

    def test_eval_deterministic(self, rng):
        model = small_model()
        x = rng.normal(size=(8, 4))
        a = forward(model, x, ForwardMode.eval)[0]
        b = forward(model, x, ForwardMode.eval)[0]
        np.testing.assert_array_equal(a, b)

    def test_batch_norm_standardises(self, rng):
        bn = BatchNorm(5)
        x = 3.0 * rng.normal(size=(256, 5)) + 7.0
        out, _ = bn.forward(x, ForwardMode.train)
        assert np.abs(out.mean(axis=0)).max() < 1e-6
        assert np.abs(out.var(axis=0) - 1.0).max() < 1e-4

    def test_batch_norm_running_stats(self, rng):
        bn = BatchNorm(2)
        x = rng.normal(size=(10, 2)) + 4.0
        bn.forward(x, ForwardMode.train)
        np.testing.assert_allclose(bn.running_mean, 0.1 * x.mean(axis=0))
        np.testing.assert_allclose(bn.running_var, 0.9 + 0.1 * x.var(axis=0, ddof=1))
        before = bn.running_mean.copy()
        bn.forward(x, ForwardMode.eval)
        np.testing.assert_array_equal(bn.running_mean, before)

    def test_batch_norm_single_sample(self):
        with pytest.raises(ValidationError):
            BatchNorm(2).forward(np.zeros((1, 2)), ForwardMode.train)

    def test_width_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            forward(small_model(), np.zeros((2, 5)), ForwardMode.eval)


class TestBackward:
    def test_matches_finite_differences(self, rng):
        model = small_model()
        x = rng.normal(size=(5, 4))
        M = np.array([[1, 0, 0], [0, 1, 1], [1, 1, 0], [0, 0, 1], [1, 0, 1]], dtype=bool)
        logits, cache = forward(model, x, ForwardMode.train)
        grads = backward(model, cache, loss.batch_cost(logits, M)[1])

        step = 1e-6
        worst = 0.0
        for name, param in model.named_parameters():
            fd = np.empty_like(param)
            for idx in np.ndindex(param.shape):
                saved = param[idx]
                param[idx] = saved + step
                up = mean_loss(model, x, M)
                param[idx] = saved - step
                down = mean_loss(model, x, M)
                param[idx] = saved
                fd[idx] = (up - down) / (2 * step)
            scale = max(1.0, np.abs(fd).max())
            worst = max(worst, np.abs(grads[name] - fd).max() / scale)
        assert worst < 1e-4

    def test_zero_upstream(self, rng):
        model = small_model()
        logits, cache = forward(model, rng.normal(size=(6, 4)), ForwardMode.train)
        grads = backward(model, cache, np.zeros_like(logits))
        assert all(not g.any() for g in grads.values())

    def test_duplicated_batch(self, rng):
        model = small_model()
        x = rng.normal(size=(6, 4))
        M = rng.random((6, 3)) < 0.5
        M[:, 0] = True
        logits, cache = forward(model, x, ForwardMode.train)
        single = backward(model, cache, loss.batch_cost(logits, M)[1])
        logits2, cache2 = forward(model, np.vstack([x, x]), ForwardMode.train)
        double = backward(model, cache2, loss.batch_cost(logits2, np.vstack([M, M]))[1])
        for name in single:
            np.testing.assert_allclose(double[name], single[name], rtol=1e-9, atol=1e-12)

    def test_stale_cache(self, rng):
        model = small_model(batch_norm=False)
        logits, cache = forward(model, rng.normal(size=(3, 4)), ForwardMode.train)
        grads = backward(model, cache, np.ones_like(logits))
        sgd_step(model, grads, OptimizerState.for_model(model, 0.1))
        with pytest.raises(StaleCacheError):
            backward(model, cache, np.ones_like(logits))


class TestSgd:
    def single_param_model(self, value=1.0):
        return MlpModel(ArchitectureSpec((1, 1), False), [Linear(np.array([[value]]), np.zeros(1))])

    def grads(self, g):
        return {"0.weight": np.array([[g]]), "0.bias": np.zeros(1)}

    def test_plain_step(self):
        model = self.single_param_model(1.0)
        sgd_step(model, self.grads(2.0), OptimizerState.for_model(model, 0.1))
        assert model.layers[0].weight[0, 0] == pytest.approx(0.8)
        assert model.generation == 1

    def test_momentum_unrolled(self):
        model = self.single_param_model(0.0)
        opt = OptimizerState.for_model(model, 0.1, momentum=0.9)
        sgd_step(model, self.grads(1.0), opt)
        sgd_step(model, self.grads(1.0), opt)
        assert model.layers[0].weight[0, 0] == pytest.approx(-0.1 * (1 + 1.9))

    def test_weight_decay_scales(self):
        model = self.single_param_model(2.0)
        sgd_step(model, self.grads(0.0), OptimizerState.for_model(model, 0.1, weight_decay=0.5))
        assert model.layers[0].weight[0, 0] == pytest.approx(2.0 * (1 - 0.1 * 0.5))

    def test_missing_gradient(self):
        model = self.single_param_model()
        with pytest.raises(DimensionMismatchError):
            sgd_step(model, {"0.weight": np.zeros((1, 1))}, OptimizerState.for_model(model, 0.1))

    def test_invalid_rate(self):
        with pytest.raises(ValidationError):
            OptimizerState.for_model(self.single_param_model(), 0.0)

    def test_step_decreases_single_sample_loss(self):
        gen = np.random.default_rng(8)
        for i in range(100):
            model = small_model(batch_norm=False, widths=(5, 8, 3), seed=i)
            x = gen.normal(size=(1, 5))
            mask = gen.random((1, 3)) < 0.5
            mask[0, gen.integers(3)] = True
            logits, cache = forward(model, x, ForwardMode.train)
            before, dlogits = loss.batch_cost(logits, mask)
            sgd_step(model, backward(model, cache, dlogits), OptimizerState.for_model(model, 1e-3))
            after = loss.batch_cost(forward(model, x, ForwardMode.eval)[0], mask)[0]
            assert after < before


class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        model = MlpModel(ArchitectureSpec((1, 1), False), [Linear(np.array([[1.0]]), np.zeros(1))])
        opt = AdamState.for_model(model, 0.01)
        adam_step(model, {"0.weight": np.array([[3.0]]), "0.bias": np.array([-2.0])}, opt)
        assert model.layers[0].weight[0, 0] == pytest.approx(0.99, abs=1e-9)
        assert model.layers[0].bias[0] == pytest.approx(0.01, abs=1e-9)
        assert opt.step == 1 and model.generation == 1


class TestPredict:
    def model_returning(self, logits):
        k = len(logits)
        return MlpModel(ArchitectureSpec((1, k), False), [Linear(np.zeros((k, 1)), np.asarray(logits, dtype=float))])

    def test_argmax(self):
        assert predict(self.model_returning([0.1, 2.0, -1.0]), np.zeros((1, 1))).tolist() == [1]

    def test_tie_goes_to_lowest(self):
        assert predict(self.model_returning([1.0, 1.0, 0.0]), np.zeros((1, 1))).tolist() == [0]

    def test_argmax_of_probabilities(self, rng):
        r = rng.normal(scale=5.0, size=(1000, 6))
        np.testing.assert_array_equal(np.argmax(loss.sigmoid(r), axis=1), np.argmax(r, axis=1))

    def test_threads_match_single_thread(self, rng):
        model = small_model()
        forward(model, rng.normal(size=(32, 4)), ForwardMode.train)
        x = rng.normal(size=(1000, 4))
        single = predict_logits(model, x, threads=1, block=64)
        threaded = predict_logits(model, x, threads=4, block=64)
        np.testing.assert_array_equal(single, threaded)

    def test_empty_input(self):
        assert predict_logits(small_model(), np.zeros((0, 4))).shape == (0, 3)


class TestCheckpoint:
    def test_round_trip_is_bit_identical(self, tmp_path, rng):
        model = small_model()
        for _ in range(3):
            logits, cache = forward(model, rng.normal(size=(16, 4)), ForwardMode.train)
            sgd_step(model, backward(model, cache, np.ones_like(logits)), OptimizerState.for_model(model, 0.01))
        scaler = FeatureScaler.fit(rng.normal(size=(10, 4)), NormalizeMode.zscore)
        path = tmp_path / "checkpoint.json"
        save_checkpoint(model, path, scaler)

        loaded, loaded_scaler = load_checkpoint(path)
        x = rng.normal(size=(50, 4))
        np.testing.assert_array_equal(predict_logits(loaded, x), predict_logits(model, x))
        np.testing.assert_array_equal(loaded_scaler.offset, scaler.offset)
        for (_, a), (_, b) in zip(loaded.named_buffers(), model.named_buffers()):
            np.testing.assert_array_equal(a, b)

    def test_gzip_path(self, tmp_path):
        model = small_model(batch_norm=False)
        save_checkpoint(model, tmp_path / "model.json.gz")
        assert (tmp_path / "model.json.gz").read_bytes()[:2] == b"\x1f\x8b"
        loaded, scaler = load_checkpoint(tmp_path / "model.json.gz")
        assert scaler is None
        assert loaded.arch == model.arch

    def test_wrong_format(self):
        doc = checkpoint_document(small_model())
        doc["version"] = 2
        with pytest.raises(FormatError):
            model_from_document(doc)

    def test_shape_mismatch(self):
        doc = checkpoint_document(small_model())
        doc["layers"][0]["bias"] = [0.0]
        with pytest.raises(FormatError):
            model_from_document(doc)

    @pytest.mark.parametrize("text", ["[]", "3", "null"])
    def test_not_an_object(self, tmp_path, text):
        path = tmp_path / "list.json"
        path.write_text(text)
        with pytest.raises(FormatError):
            load_checkpoint(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("not json")
        with pytest.raises(FormatError):
            load_checkpoint(path)
