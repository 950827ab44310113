class Config:
    DEFAULT_RESULTS_DIR = "results"
    LOG_ENV_VAR = "CARGO_RM_LOG"
    DEFAULT_LOG_LEVEL = "INFO"
    CSV_SCHEMA_VERSION = 1
    MODEL_FORMAT_VERSION = 1
    # Stream phases keep training and evaluation draws independent
    TRAIN_PHASE = 0
    EVAL_PHASE = 1
    MODEL_PHASE = 2
