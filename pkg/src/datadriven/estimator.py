"""
Feed-forward bid-price estimator.

A small fully connected network maps (normalized capacity breakpoint,
normalized DCP, Fourier covariates of the departure date) to a unit bid price.
Hidden layers use a smooth activation; the output goes through softplus so
every prediction is non-negative. Training minimizes mean squared error with
momentum gradient descent on raw currency targets.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import toml
from scipy.special import expit

from ..config import Config, EstimatorDefaults, MarketConfig
from ..errors import DataError, ParameterError
from ..pricing import BidPriceTable, BucketSpec
from .observations import Observation

logger = logging.getLogger(__name__)

FeatureRow = np.ndarray

WEEK_PERIOD = 7.0
ACTIVATIONS = ("tanh", "sigmoid")


@dataclass(frozen=True)
class FeatureConfig:
    """
    Normalization constants and covariate setup; saved with every model.

    Attributes:
        capacity: Capacity of the dimension (largest breakpoint)
        horizon: Largest DCP
        seasonality_period: Period of the yearly covariates, in departures
        harmonics: Number of sin/cos pairs per period
    """

    capacity: float
    horizon: float = float(MarketConfig.HORIZON_DAYS)
    seasonality_period: float = MarketConfig.SEASONALITY_PERIOD
    harmonics: int = EstimatorDefaults.HARMONICS

    def __post_init__(self) -> None:
        if self.capacity <= 0 or self.horizon <= 0 or self.seasonality_period <= 0:
            raise ParameterError("Feature normalization constants must be positive")
        if self.harmonics < 0:
            raise ParameterError(f"harmonics must be >= 0, got {self.harmonics}")

    @property
    def periods(self) -> Tuple[float, float]:
        return (self.seasonality_period, WEEK_PERIOD)

    @property
    def width(self) -> int:
        return 2 + 4 * self.harmonics

    def to_dict(self) -> Dict[str, Any]:
        return {
            "capacity": self.capacity,
            "horizon": self.horizon,
            "seasonality_period": self.seasonality_period,
            "harmonics": self.harmonics,
        }


def feature_matrix(
    breakpoints: Sequence[float],
    dcps: Sequence[float],
    departure_indices: Sequence[float],
    config: FeatureConfig,
) -> np.ndarray:
    """
    Encode rows column-wise.

    Columns: breakpoint / capacity, dcp / horizon, then for each period
    (seasonality, week) and harmonic h: sin(2πhi/P), cos(2πhi/P).
    """
    b = np.asarray(breakpoints, dtype=float)
    d = np.asarray(dcps, dtype=float)
    i = np.asarray(departure_indices, dtype=float)
    columns = [b / config.capacity, d / config.horizon]
    for period in config.periods:
        for h in range(1, config.harmonics + 1):
            phase = 2.0 * math.pi * h * i / period
            columns.append(np.sin(phase))
            columns.append(np.cos(phase))
    return np.column_stack(columns)


def featurize(observation: Observation, config: FeatureConfig) -> FeatureRow:
    return feature_matrix(
        [observation.breakpoint], [observation.dcp], [observation.departure_index], config
    )[0]


@dataclass(frozen=True)
class EstimatorConfig:
    hidden_layers: Tuple[int, ...] = EstimatorDefaults.HIDDEN_LAYERS
    activation: str = EstimatorDefaults.ACTIVATION
    learning_rate: float = EstimatorDefaults.LEARNING_RATE
    momentum: float = EstimatorDefaults.MOMENTUM
    epochs: int = EstimatorDefaults.EPOCHS
    batch_size: int = EstimatorDefaults.BATCH_SIZE
    harmonics: int = EstimatorDefaults.HARMONICS
    holdout_fraction: float = EstimatorDefaults.HOLDOUT_FRACTION
    clip_norm: Optional[float] = EstimatorDefaults.CLIP_NORM

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden_layers", tuple(int(w) for w in self.hidden_layers))
        if any(w < 1 for w in self.hidden_layers):
            raise ParameterError("Hidden layer widths must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise ParameterError(
                f"Unknown activation {self.activation!r}; choose from {', '.join(ACTIVATIONS)}"
            )
        if self.learning_rate <= 0 or not 0 <= self.momentum < 1:
            raise ParameterError("Need learning_rate > 0 and momentum in [0, 1)")
        if self.epochs < 1 or self.batch_size < 1:
            raise ParameterError("epochs and batch_size must be >= 1")
        if not 0 <= self.holdout_fraction < 1:
            raise ParameterError("holdout_fraction must be in [0, 1)")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ParameterError("clip_norm must be positive when set")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EstimatorConfig":
        try:
            return cls(**data)
        except TypeError as e:
            raise ParameterError(f"Unknown estimator setting: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "hidden_layers": list(self.hidden_layers),
            "activation": self.activation,
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "harmonics": self.harmonics,
            "holdout_fraction": self.holdout_fraction,
        }
        if self.clip_norm is not None:
            data["clip_norm"] = self.clip_norm
        return data


def _softplus(z: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, z)


def _inverse_softplus(y: float) -> float:
    return y + math.log(-math.expm1(-y))


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    return expit(z)


def _activation_slope(name: str, a: np.ndarray) -> np.ndarray:
    # Derivative expressed through the activation output
    if name == "tanh":
        return 1.0 - a * a
    return a * (1.0 - a)


@dataclass
class MlpModel:
    """
    Trained network plus everything needed to reproduce its predictions.

    Attributes:
        weights: One (fan_in, fan_out) matrix per layer
        biases: One vector per layer
        activation: Hidden activation name
        features: Normalization constants and covariate setup
        dimension: Capacity dimension the model prices ("weight" or "volume")
        metadata: Training record (epochs, learning rate, seed, losses)
    """

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activation: str
    features: FeatureConfig
    dimension: str = "weight"
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def layer_widths(self) -> List[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    def parameters(self) -> List[np.ndarray]:
        """Interleaved [W1, b1, W2, b2, ...]; arrays are live references."""
        params: List[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def forward(self, X: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray], np.ndarray]:
        """
        Run the network.

        Returns:
            Tuple: predictions, the input of every layer, pre-softplus output
        """
        inputs = []
        a = np.asarray(X, dtype=float)
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            inputs.append(a)
            a = _activate(self.activation, a @ w + b)
        inputs.append(a)
        z = (a @ self.weights[-1] + self.biases[-1])[:, 0]
        return _softplus(z), inputs, z

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.forward(X)[0]

    @classmethod
    def initialize(
        cls,
        n_features: int,
        config: EstimatorConfig,
        features: FeatureConfig,
        rng: np.random.Generator,
        target_mean: float = 0.0,
        dimension: str = "weight",
    ) -> "MlpModel":
        """
        Glorot-uniform hidden layers, zero output weights and an output bias
        that makes the untrained network predict the target mean.
        """
        widths = [n_features, *config.hidden_layers]
        weights, biases = [], []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        weights.append(np.zeros((widths[-1], 1)))
        bias = _inverse_softplus(max(target_mean, EstimatorDefaults.TARGET_FLOOR))
        biases.append(np.array([bias]))
        return cls(weights, biases, config.activation, features, dimension)

    def save(self, path: Path) -> Path:
        """Write the model as a TOML file."""
        document = {
            "header": {
                "format_version": Config.MODEL_FORMAT_VERSION,
                "activation": self.activation,
                "output": "softplus",
                "layer_widths": self.layer_widths,
                "dimension": self.dimension,
            },
            "normalization": self.features.to_dict(),
            "metadata": self.metadata,
            "layers": [
                {"weights": w.tolist(), "bias": b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            toml.dump(document, f)
        return path

    @classmethod
    def load(cls, path: Path) -> "MlpModel":
        """
        Read a model written by save.

        Raises:
            DataError: If the file is missing, malformed or of another format version
        """
        path = Path(path)
        if not path.is_file():
            raise DataError(f"Model file not found: {path}")
        try:
            document = toml.load(path)
            header = document["header"]
            if header["format_version"] != Config.MODEL_FORMAT_VERSION:
                raise DataError(
                    f"{path}: model format {header['format_version']} is not supported"
                )
            layers = document["layers"]
            weights = [np.array(layer["weights"], dtype=float) for layer in layers]
            biases = [np.array(layer["bias"], dtype=float) for layer in layers]
            features = FeatureConfig(**document["normalization"])
            model = cls(
                weights,
                biases,
                header["activation"],
                features,
                header.get("dimension", "weight"),
                dict(document.get("metadata", {})),
            )
        except (toml.TomlDecodeError, KeyError, TypeError, ValueError) as e:
            raise DataError(f"Could not read model {path}: {e}") from e
        if model.layer_widths != list(header["layer_widths"]):
            raise DataError(f"{path}: layer shapes do not match the header")
        return model


def loss_and_gradients(
    model: MlpModel, X: np.ndarray, y: np.ndarray
) -> Tuple[float, List[np.ndarray]]:
    """
    Mean squared error and its gradient for every parameter.

    Returns:
        Tuple[float, List[np.ndarray]]: loss and gradients aligned with model.parameters()
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    prediction, inputs, z = model.forward(X)
    residual = prediction - y
    loss = float(residual @ residual) / n

    delta = (2.0 * residual / n * expit(z))[:, None]
    grads: List[np.ndarray] = []
    for layer in range(len(model.weights) - 1, -1, -1):
        a = inputs[layer]
        grads.append(delta.sum(axis=0))
        grads.append(a.T @ delta)
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * _activation_slope(model.activation, a)
    grads.reverse()
    return loss, grads


def _training_arrays(
    observations: Sequence[Observation], features: FeatureConfig
) -> Tuple[np.ndarray, np.ndarray]:
    X = feature_matrix(
        [o.breakpoint for o in observations],
        [o.dcp for o in observations],
        [o.departure_index for o in observations],
        features,
    )
    y = np.array([o.proxy for o in observations], dtype=float)
    return X, y


def train(
    observations: Sequence[Observation],
    config: EstimatorConfig,
    seed: int,
    features: Optional[FeatureConfig] = None,
    dimension: str = "weight",
) -> MlpModel:
    """
    Fit a bid-price network to observations.

    Args:
        observations: Training rows from build_observations
        config: Network and optimizer settings
        seed: Seed for initialization, shuffling and the holdout split
        features: Normalization constants; derived from the data when omitted
        dimension: Capacity dimension the observations describe

    Returns:
        MlpModel: Trained model with its loss history in metadata

    Raises:
        DataError: If there are no observations
    """
    if not observations:
        raise DataError("Cannot train on an empty observation set")
    if features is None:
        features = FeatureConfig(
            capacity=max(o.breakpoint for o in observations),
            horizon=float(max(o.dcp for o in observations)),
            harmonics=config.harmonics,
        )
    rng = np.random.default_rng(seed)
    X, y = _training_arrays(observations, features)

    X_hold = y_hold = None
    if config.holdout_fraction > 0 and y.size > 1:
        order = rng.permutation(y.size)
        n_hold = min(y.size - 1, max(1, int(round(config.holdout_fraction * y.size))))
        hold, keep = np.sort(order[:n_hold]), np.sort(order[n_hold:])
        X_hold, y_hold = X[hold], y[hold]
        X, y = X[keep], y[keep]

    model = MlpModel.initialize(
        X.shape[1], config, features, rng, float(y.mean()), dimension
    )
    params = model.parameters()
    velocity = [np.zeros_like(p) for p in params]
    n = y.size
    history: List[float] = []
    for epoch in range(config.epochs):
        order = np.arange(n) if config.batch_size >= n else rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            _, grads = loss_and_gradients(model, X[batch], y[batch])
            if config.clip_norm is not None:
                norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
                if norm > config.clip_norm:
                    grads = [g * (config.clip_norm / norm) for g in grads]
            for p, v, g in zip(params, velocity, grads):
                v *= config.momentum
                v -= config.learning_rate * g
                p += v
        loss, _ = loss_and_gradients(model, X, y)
        history.append(loss)
        logger.debug("epoch %d/%d loss %.6g", epoch + 1, config.epochs, loss)

    model.metadata = {
        "seed": int(seed),
        "epochs": config.epochs,
        "learning_rate": config.learning_rate,
        "momentum": config.momentum,
        "batch_size": config.batch_size,
        "training_rows": int(n),
        "final_loss": history[-1],
        "loss_history": history,
    }
    if y_hold is not None:
        model.metadata["holdout_loss"] = loss_and_gradients(model, X_hold, y_hold)[0]
    logger.info(
        "Trained %s estimator on %d rows, final loss %.6g", dimension, n, history[-1]
    )
    return model


def predict_bid(
    model: MlpModel, breakpoint: float, dcp: int, departure_index: int
) -> float:
    """Unit bid price estimate for one capacity breakpoint, DCP and flight."""
    X = feature_matrix([breakpoint], [dcp], [departure_index], model.features)
    return float(model.predict(X)[0])


def bid_table(
    model: MlpModel, buckets: BucketSpec, dcps: Sequence[int], departure_index: int
) -> BidPriceTable:
    """Dense bid-price matrix of one flight over buckets x DCPs."""
    grid_b, grid_d = np.meshgrid(buckets.breakpoints, np.asarray(dcps, dtype=float), indexing="ij")
    X = feature_matrix(
        grid_b.ravel(), grid_d.ravel(), np.full(grid_b.size, departure_index), model.features
    )
    values = model.predict(X).reshape(len(buckets), len(dcps))
    return BidPriceTable(
        dimension=model.dimension,
        buckets=buckets,
        dcps=tuple(dcps),
        values=values,
        source="data_driven",
        departure_index=departure_index,
    )
