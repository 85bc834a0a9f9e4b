import numpy as np
import pytest

from careerkit import neural as N
from careerkit.errors import ShapeError, TrainingError
from careerkit.numerics import SeededRng
from careerkit.textprep import CountVector


def memorizable_fixture():
    """12 documents, 3 classes, strong block structure."""
    x = np.zeros((12, 9))
    for i in range(12):
        c = i // 4
        x[i, c * 3:(c + 1) * 3] = [2, 1, 1]
        x[i, (c * 3 + i) % 9] += 1
    y = np.array([0] * 4 + [1] * 4 + [2] * 4)
    return x, y


class TestReshapeInput:
    def test_dense_expansion(self):
        assert N.reshape_input(CountVector({1: 2}, 4)).tolist() == [0, 2, 0, 0]

    def test_zero_vector(self):
        assert N.reshape_input(CountVector({}, 3)).tolist() == [0, 0, 0]

    def test_round_trip(self):
        cv = CountVector({0: 1, 3: 5}, 5)
        assert np.array_equal(N.reshape_input(cv).reshape(-1), cv.to_dense())


class TestTrain:
    def test_mlp_memorizes_fixture(self):
        x, y = memorizable_fixture()
        _, curve = N.train("mlp", x, y,
                           N.TrainingConfig(epochs=50, batch_size=4, seed=10))
        assert curve.train_loss[-1] < 0.05
        assert curve.train_acc[-1] == 1.0

    def test_single_epoch_single_record(self):
        x, y = memorizable_fixture()
        _, curve = N.train("mlp", x, y,
                           N.TrainingConfig(epochs=1, batch_size=4, seed=1))
        assert len(curve) == 1

    def test_curve_has_one_record_per_epoch(self):
        x, y = memorizable_fixture()
        _, curve = N.train("cnn", x, y,
                           N.TrainingConfig(epochs=7, batch_size=4, seed=1))
        assert len(curve) == 7
        assert all(np.isfinite(v) for v in curve.train_loss + curve.val_loss)

    def test_same_seed_identical_weights_and_curves(self):
        x, y = memorizable_fixture()
        config = N.TrainingConfig(epochs=10, batch_size=4, seed=10)
        m1, c1 = N.train("lstm", x, y, config,
                         model_config=N.LstmConfig(hidden=8, dense=6,
                                                   frame_width=3))
        m2, c2 = N.train("lstm", x, y, config,
                         model_config=N.LstmConfig(hidden=8, dense=6,
                                                   frame_width=3))
        for (_, p1), (_, p2) in zip(m1.param_pairs(), m2.param_pairs()):
            assert np.array_equal(p1, p2)
        assert c1.train_loss == c2.train_loss
        assert c1.val_acc == c2.val_acc

    def test_batch_size_validation(self):
        x, y = memorizable_fixture()
        with pytest.raises(TrainingError):
            N.train("mlp", x, y, N.TrainingConfig(batch_size=100))

    def test_single_class_rejected(self):
        x = np.ones((6, 4))
        with pytest.raises(TrainingError):
            N.train("mlp", x, np.zeros(6, dtype=int))

    def test_curve_csv_round_trip(self, tmp_path):
        x, y = memorizable_fixture()
        _, curve = N.train("mlp", x, y,
                           N.TrainingConfig(epochs=3, batch_size=4, seed=2))
        path = tmp_path / "curve.csv"
        curve.save(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "epoch,train_loss,train_acc,val_loss,val_acc"
        assert len(lines) == 4


class TestForward:
    def test_zeroed_output_layer_gives_uniform(self):
        model = N.build_model("mlp", 6, 4, N.MlpConfig((5, 5, 5, 5),
                                                       (0.0,) * 4),
                              SeededRng(1))
        out_layer = model.layers[-1]
        out_layer.w[...] = 0.0
        out_layer.b[...] = 0.0
        pred = N.forward(model, np.arange(6, dtype=float))
        assert pred.distribution == pytest.approx([0.25] * 4)
        assert pred.label == 0

    def test_distribution_valid_for_all_kinds(self):
        rng = SeededRng(2)
        for kind, cfg in (("mlp", N.MlpConfig((6, 5, 4, 3), (0.1,) * 4)),
                          ("cnn", N.CnnConfig(filters=3, dense=5)),
                          ("lstm", N.LstmConfig(hidden=5, dense=4,
                                                frame_width=4))):
            model = N.build_model(kind, 10, 6, cfg, SeededRng(3))
            for _ in range(5):
                pred = N.forward(model, rng.random_array(10, 0, 4))
                assert abs(pred.distribution.sum() - 1.0) < 1e-9
                assert np.all(pred.distribution > 0)
                assert np.all(pred.distribution < 1)
                assert pred.label == int(np.argmax(pred.distribution))

    def test_memorized_fixture_predicts_every_training_point(self):
        x, y = memorizable_fixture()
        model, _ = N.train("mlp", x, y,
                           N.TrainingConfig(epochs=50, batch_size=4, seed=10))
        preds = [N.forward(model, row).label for row in x]
        assert preds == y.tolist()

    def test_dimension_mismatch(self):
        model = N.build_model("mlp", 6, 3, N.MlpConfig((4, 4, 4, 4),
                                                       (0.0,) * 4),
                              SeededRng(1))
        with pytest.raises(ShapeError):
            N.forward(model, np.zeros(7))


class TestDropout:
    def test_zero_rate_training_equals_inference(self):
        model = N.build_model("mlp", 8, 3,
                              N.MlpConfig((6, 6, 6, 6), (0.0,) * 4),
                              SeededRng(4))
        x = SeededRng(5).random_array((3, 8), 0, 2)
        train_mode = model.forward_batch(x, training=True, rng=SeededRng(6))
        eval_mode = model.forward_batch(x, training=False)
        assert np.max(np.abs(train_mode - eval_mode)) < 1e-12

    def test_inverted_scaling_expectation(self):
        layer = N._Dropout(0.3)
        rng = SeededRng(7)
        x = np.full((1, 50), 2.0)
        total = np.zeros_like(x)
        n = 10_000
        for _ in range(n):
            total += layer.forward(x, training=True, rng=rng)
        mean = total / n
        assert np.abs(mean - x).max() / 2.0 < 0.05
        assert abs(mean.mean() - 2.0) / 2.0 < 0.01

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            N._Dropout(1.0)


class TestLstmInternals:
    def test_gate_ranges_on_extreme_inputs(self):
        layer = N._Lstm(SeededRng(8), n_in=4, hidden=5, name="lstm")
        x = np.array([[[1e4, -1e4, 5e3, -5e3]] * 6], dtype=np.float64)
        layer.forward(x, training=False, rng=None)
        for (_, _, _, gate_i, gate_f, cand, gate_o, _) in layer._cache:
            for gate in (gate_i, gate_f, gate_o):
                assert np.all(gate >= 0.0) and np.all(gate <= 1.0)
            assert np.all(cand >= -1.0) and np.all(cand <= 1.0)

    def test_frame_padding(self):
        model = N.build_model("lstm", 7, 2,
                              N.LstmConfig(hidden=3, dense=3, frame_width=4),
                              SeededRng(9))
        frames = model._pre(np.arange(7, dtype=float)[None, :])
        assert frames.shape == (1, 2, 4)
        assert frames[0, 1].tolist() == [4.0, 5.0, 6.0, 0.0]


class TestGradientChecks:
    def test_mlp(self):
        rng = SeededRng(10)
        err = N.gradient_check(
            "mlp", rng.random_array((2, 6), 0, 3), [0, 2], n_classes=3,
            model_config=N.MlpConfig((5, 4, 4, 3), (0.0,) * 4))
        assert err < 1e-4

    def test_cnn(self):
        rng = SeededRng(11)
        err = N.gradient_check(
            "cnn", rng.random_array((2, 8), 0, 3), [1, 0], n_classes=2,
            model_config=N.CnnConfig(kernel=3, filters=2, pool=2, dropout=0.0,
                                     dense=5))
        assert err < 1e-4

    def test_lstm_through_time(self):
        rng = SeededRng(12)
        err = N.gradient_check(
            "lstm", rng.random_array((2, 6), 0, 3), [1, 0], n_classes=2,
            model_config=N.LstmConfig(hidden=4, dropout=0.0, dense=4,
                                      frame_width=1))
        assert err < 1e-4


class TestOverfitGap:
    def curve(self, train_acc, val_acc, val_loss):
        n = len(train_acc)
        return N.LearningCurve([0.5] * n, list(train_acc), list(val_loss),
                               list(val_acc))

    def test_overfitting_trend(self):
        n = 20
        curve = self.curve([0.99] * n, [0.70] * n,
                           [0.5 + 0.02 * i for i in range(n)])
        diag = N.overfit_gap(curve)
        assert diag.classification == "overfitting-trend"
        assert diag.gap[-1] == pytest.approx(0.29)

    def test_underfitting(self):
        n = 20
        curve = self.curve([0.40] * n, [0.35] * n, [1.0] * n)
        assert N.overfit_gap(curve).classification == "underfitting"

    def test_acceptable(self):
        n = 20
        curve = self.curve([0.88] * n, [0.85] * n,
                           [1.0 - 0.01 * i for i in range(n)])
        assert N.overfit_gap(curve).classification == "acceptable"

    def test_empty_curve_rejected(self):
        with pytest.raises(ValueError):
            N.overfit_gap(N.LearningCurve([], [], [], []))


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        N.build_model("transformer", 4, 2)
