import math
from pathlib import Path

import numpy as np
import pytest
import toml

from src.datadriven import (
    EstimatorConfig,
    FeatureConfig,
    MlpModel,
    Observation,
    bid_table,
    feature_matrix,
    featurize,
    loss_and_gradients,
    predict_bid,
    train,
)
from src.errors import DataError, ParameterError
from src.pricing import BucketSpec

FEATURES = FeatureConfig(capacity=1000.0, horizon=10.0, seasonality_period=52.0, harmonics=2)


def observations(targets, seed: int = 0):
    """Rows spread over buckets, DCPs and departures with the given proxies."""
    rng = np.random.default_rng(seed)
    return [
        Observation(
            bucket_index=int(k),
            dcp=int(rng.integers(1, 11)),
            departure_index=int(rng.integers(0, 365)),
            proxy=float(y),
            breakpoint=100.0 * int(k),
        )
        for k, y in zip(rng.integers(1, 11, size=len(targets)), targets)
    ]


def random_model(config: EstimatorConfig, seed: int) -> MlpModel:
    rng = np.random.default_rng(seed)
    model = MlpModel.initialize(FEATURES.width, config, FEATURES, rng, target_mean=2.0)
    model.weights[-1] = rng.normal(0.0, 0.5, size=model.weights[-1].shape)
    for b in model.biases:
        b += rng.normal(0.0, 0.1, size=b.shape)
    return model


class TestFeatures:
    def test_width(self) -> None:
        assert FEATURES.width == 10
        assert FeatureConfig(capacity=60.0, harmonics=0).width == 2

    def test_first_departure(self) -> None:
        row = featurize(Observation(3, 4, 0, 1.0, 300.0), FEATURES)
        assert row[2::2].tolist() == [0.0, 0.0, 0.0, 0.0]
        assert row[3::2].tolist() == [1.0, 1.0, 1.0, 1.0]

    def test_normalized_bucket_and_dcp(self) -> None:
        row = featurize(Observation(10, 5, 17, 1.0, 1000.0), FEATURES)
        assert row[0] == 1.0
        assert row[1] == 0.5

    def test_harmonics(self) -> None:
        row = featurize(Observation(1, 1, 13, 1.0, 100.0), FEATURES)
        assert row[2] == pytest.approx(1.0)
        assert row[4] == pytest.approx(math.sin(math.pi))
        assert row[6] == pytest.approx(math.sin(2 * math.pi * 13 / 7))

    def test_deterministic(self) -> None:
        obs = Observation(2, 7, 200, 3.0, 200.0)
        assert np.array_equal(featurize(obs, FEATURES), featurize(obs, FEATURES))

    def test_matrix_matches_rows(self) -> None:
        rows = observations(np.ones(20))
        X = feature_matrix(
            [o.breakpoint for o in rows],
            [o.dcp for o in rows],
            [o.departure_index for o in rows],
            FEATURES,
        )
        for x, o in zip(X, rows):
            np.testing.assert_array_equal(x, featurize(o, FEATURES))

    def test_invalid(self) -> None:
        with pytest.raises(ParameterError):
            FeatureConfig(capacity=0.0)
        with pytest.raises(ParameterError):
            FeatureConfig(capacity=10.0, harmonics=-1)


class TestEstimatorConfig:
    def test_defaults(self) -> None:
        config = EstimatorConfig()
        assert config.hidden_layers == (32, 32)
        assert config.activation == "tanh"

    def test_dict_round_trip(self) -> None:
        config = EstimatorConfig(hidden_layers=[16], epochs=5, clip_norm=2.5)
        assert EstimatorConfig.from_dict(config.to_dict()) == config
        assert "clip_norm" not in EstimatorConfig(clip_norm=None).to_dict()

    @pytest.mark.parametrize(
        "settings",
        [
            {"hidden_layers": [0]},
            {"activation": "relu"},
            {"learning_rate": 0.0},
            {"momentum": 1.0},
            {"epochs": 0},
            {"batch_size": 0},
            {"holdout_fraction": 1.0},
            {"clip_norm": -1.0},
            {"dropout": 0.5},
        ],
    )
    def test_invalid(self, settings) -> None:
        with pytest.raises(ParameterError):
            EstimatorConfig.from_dict(settings)


class TestGradients:
    @pytest.mark.parametrize("activation", ["tanh", "sigmoid"])
    def test_matches_finite_differences(self, activation: str) -> None:
        config = EstimatorConfig(hidden_layers=(6, 5), activation=activation)
        model = random_model(config, seed=21)
        rng = np.random.default_rng(5)
        X = rng.uniform(-1.0, 1.0, size=(15, FEATURES.width))
        y = rng.uniform(0.5, 4.0, size=15)
        _, grads = loss_and_gradients(model, X, y)

        params = model.parameters()
        coordinates = []
        for _ in range(100):
            p = int(rng.integers(len(params)))
            coordinates.append((p, tuple(int(rng.integers(n)) for n in params[p].shape)))

        eps = 1e-6
        worst = 0.0
        for p, index in coordinates:
            original = params[p][index]
            params[p][index] = original + eps
            up, _ = loss_and_gradients(model, X, y)
            params[p][index] = original - eps
            down, _ = loss_and_gradients(model, X, y)
            params[p][index] = original
            numeric = (up - down) / (2 * eps)
            analytic = grads[p][index]
            error = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-3)
            worst = max(worst, error)
        assert worst < 1e-4

    def test_gradient_shapes(self) -> None:
        model = random_model(EstimatorConfig(hidden_layers=(4,)), seed=1)
        X = np.zeros((3, FEATURES.width))
        loss, grads = loss_and_gradients(model, X, np.ones(3))
        assert loss >= 0
        assert [g.shape for g in grads] == [p.shape for p in model.parameters()]


class TestModel:
    def test_zero_model_outputs_softplus_of_bias(self) -> None:
        model = MlpModel(
            weights=[np.zeros((FEATURES.width, 3)), np.zeros((3, 1))],
            biases=[np.zeros(3), np.array([0.7])],
            activation="tanh",
            features=FEATURES,
        )
        expected = math.log1p(math.exp(0.7))
        assert predict_bid(model, 300.0, 4, 100) == pytest.approx(expected, rel=1e-12)

    def test_initial_prediction_is_target_mean(self) -> None:
        model = MlpModel.initialize(
            FEATURES.width, EstimatorConfig(), FEATURES, np.random.default_rng(0), target_mean=42.0
        )
        assert predict_bid(model, 500.0, 3, 10) == pytest.approx(42.0, rel=1e-9)

    def test_predictions_non_negative(self) -> None:
        model = random_model(EstimatorConfig(hidden_layers=(8,)), seed=3)
        model.biases[-1][:] = -50.0
        X = np.random.default_rng(2).uniform(-3, 3, size=(500, FEATURES.width))
        assert np.all(model.predict(X) >= 0.0)

    def test_repeated_prediction_is_bitwise_identical(self) -> None:
        model = random_model(EstimatorConfig(hidden_layers=(8,)), seed=4)
        assert predict_bid(model, 700.0, 2, 33) == predict_bid(model, 700.0, 2, 33)

    def test_save_and_load(self, tmp_path: Path) -> None:
        config = EstimatorConfig(hidden_layers=(6,), epochs=3)
        model = train(observations(np.linspace(1, 5, 60)), config, 9, FEATURES)
        path = model.save(tmp_path / "models" / "weight_none.toml")
        loaded = MlpModel.load(path)
        assert loaded.layer_widths == model.layer_widths
        assert loaded.features == model.features
        assert loaded.metadata == model.metadata
        X = feature_matrix([100.0, 900.0], [1, 10], [0, 200], FEATURES)
        np.testing.assert_array_equal(loaded.predict(X), model.predict(X))

    def test_load_missing(self, tmp_path: Path) -> None:
        with pytest.raises(DataError, match="not found"):
            MlpModel.load(tmp_path / "none.toml")

    def test_load_other_format_version(self, tmp_path: Path) -> None:
        model = random_model(EstimatorConfig(hidden_layers=(4,)), seed=1)
        path = model.save(tmp_path / "model.toml")
        document = toml.load(path)
        document["header"]["format_version"] = 99
        with open(path, "w") as f:
            toml.dump(document, f)
        with pytest.raises(DataError, match="format"):
            MlpModel.load(path)

    def test_load_malformed(self, tmp_path: Path) -> None:
        path = tmp_path / "model.toml"
        path.write_text('[header]\nformat_version = 1\nactivation = "tanh"\n')
        with pytest.raises(DataError):
            MlpModel.load(path)


class TestTraining:
    def test_empty(self) -> None:
        with pytest.raises(DataError):
            train([], EstimatorConfig(), 0, FEATURES)

    def test_constant_target(self) -> None:
        config = EstimatorConfig(hidden_layers=(8,), epochs=10)
        model = train(observations(np.full(80, 37.5)), config, 1, FEATURES)
        X = np.random.default_rng(8).uniform(0, 1, size=(50, FEATURES.width))
        np.testing.assert_allclose(model.predict(X), 37.5, rtol=0.01)

    def test_metadata(self) -> None:
        config = EstimatorConfig(hidden_layers=(4,), epochs=4, batch_size=16)
        model = train(observations(np.linspace(0, 3, 50)), config, 12, FEATURES, dimension="volume")
        assert model.dimension == "volume"
        assert model.metadata["seed"] == 12
        assert model.metadata["training_rows"] == 50
        assert len(model.metadata["loss_history"]) == 4
        assert model.metadata["final_loss"] == model.metadata["loss_history"][-1]
        assert "holdout_loss" not in model.metadata

    def test_holdout(self) -> None:
        config = EstimatorConfig(hidden_layers=(4,), epochs=2, holdout_fraction=0.25)
        model = train(observations(np.linspace(0, 3, 40)), config, 2, FEATURES)
        assert model.metadata["training_rows"] == 30
        assert model.metadata["holdout_loss"] >= 0.0

    def test_same_seed_same_model_file(self, tmp_path: Path) -> None:
        rows = observations(np.random.default_rng(4).uniform(0, 20, size=120))
        config = EstimatorConfig(hidden_layers=(8, 8), epochs=5, batch_size=32)
        first = train(rows, config, 77, FEATURES).save(tmp_path / "a.toml")
        second = train(rows, config, 77, FEATURES).save(tmp_path / "b.toml")
        assert first.read_bytes() == second.read_bytes()

    def test_different_seed_different_model(self) -> None:
        rows = observations(np.random.default_rng(4).uniform(0, 20, size=120))
        config = EstimatorConfig(hidden_layers=(8,), epochs=2)
        a = train(rows, config, 1, FEATURES)
        b = train(rows, config, 2, FEATURES)
        assert not np.array_equal(a.weights[0], b.weights[0])

    def test_duplicated_rows_train_the_same_model(self) -> None:
        rows = observations(np.random.default_rng(6).uniform(1, 6, size=40))
        config = EstimatorConfig(hidden_layers=(6,), epochs=20, batch_size=1000)
        single = train(rows, config, 3, FEATURES)
        double = train(rows + rows, config, 3, FEATURES)
        for a, b in zip(single.parameters(), double.parameters()):
            np.testing.assert_allclose(a, b, rtol=1e-7, atol=1e-10)

    def test_full_batch_loss_does_not_increase(self) -> None:
        rows = observations(np.random.default_rng(7).uniform(0.5, 3.0, size=60))
        config = EstimatorConfig(
            hidden_layers=(4,),
            learning_rate=1e-3,
            momentum=0.0,
            epochs=50,
            batch_size=1000,
            clip_norm=None,
        )
        history = train(rows, config, 5, FEATURES).metadata["loss_history"]
        assert np.all(np.diff(history) <= 1e-12)

    def test_fits_a_small_set(self) -> None:
        rows = [
            Observation(k, 5, 0, target, 250.0 * k)
            for k, target in zip(range(1, 5), [14.0, 12.0, 11.0, 10.0])
        ]
        features = FeatureConfig(capacity=1000.0, horizon=10.0, harmonics=0)
        config = EstimatorConfig(
            hidden_layers=(8,), learning_rate=0.01, epochs=3000, batch_size=4, clip_norm=None
        )
        model = train(rows, config, 0, features)
        history = model.metadata["loss_history"]
        assert history[-1] < history[0]
        if history[-1] < 1e-2:
            for row in rows:
                prediction = predict_bid(model, row.breakpoint, row.dcp, row.departure_index)
                assert prediction == pytest.approx(row.proxy, rel=0.05)

    def test_features_derived_when_omitted(self) -> None:
        model = train(observations(np.ones(10)), EstimatorConfig(hidden_layers=(2,), epochs=1), 0)
        assert model.features.capacity == max(o.breakpoint for o in observations(np.ones(10)))


class TestBidTable:
    @pytest.fixture
    def model(self) -> MlpModel:
        rows = observations(np.random.default_rng(9).uniform(0, 10, size=100))
        return train(rows, EstimatorConfig(hidden_layers=(8,), epochs=3), 4, FEATURES)

    def test_shape(self, model: MlpModel) -> None:
        buckets = BucketSpec.uniform(600.0, 100.0)
        table = bid_table(model, buckets, list(range(10, 0, -1)), departure_index=30)
        assert table.values.shape == (6, 10)
        assert table.source == "data_driven"
        assert table.departure_index == 30
        assert table.dimension == "weight"

    def test_entries_match_pointwise_predictions(self, model: MlpModel) -> None:
        buckets = BucketSpec.uniform(1000.0, 250.0)
        dcps = [10, 7, 3, 1]
        table = bid_table(model, buckets, dcps, departure_index=101)
        for k, point in enumerate(buckets.breakpoints):
            for j, dcp in enumerate(dcps):
                expected = predict_bid(model, float(point), dcp, 101)
                assert table.values[k, j] == pytest.approx(expected, rel=1e-12)

    def test_zero_targets_give_zero_table(self) -> None:
        config = EstimatorConfig(hidden_layers=(4,), epochs=5)
        model = train(observations(np.zeros(50)), config, 0, FEATURES)
        table = bid_table(model, BucketSpec.uniform(1000.0, 100.0), [3, 2, 1], 0)
        assert np.all(table.values < 1e-4)
