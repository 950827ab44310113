class EstimatorDefaults:
    """Fixed network setup for the bid-price estimator."""

    HIDDEN_LAYERS = (32, 32)
    ACTIVATION = "tanh"
    LEARNING_RATE: float = 0.01
    MOMENTUM: float = 0.9
    EPOCHS: int = 60
    BATCH_SIZE: int = 256
    HARMONICS: int = 2
    HOLDOUT_FRACTION: float = 0.0
    # Floor used when seeding the output bias from the target mean
    TARGET_FLOOR: float = 1e-6
    # Global gradient norm cap per update; raw currency targets give large early gradients
    CLIP_NORM: float = 10.0
