from .oracle import Oracle, OracleCapabilities, Prediction, StubOracle
from .protocol import (
    PREDICT_BATCH_PATH,
    PREDICT_PATH,
    handle_request,
    load_golden_cases,
    local_transport,
    run_golden_suite,
)
from .remote import ENDPOINT_ENV_VAR, RemoteOracle, default_endpoint, remote_predict
from .toy import (
    PAD_ID,
    ToyClassifierModel,
    ToyConfig,
    ToyOracle,
    encode_batch,
    ground_truth_accuracy,
    load_toy,
    save_toy,
    train_toy,
)
from .truncation import truncation_sweep

__all__ = [
    "Oracle",
    "OracleCapabilities",
    "Prediction",
    "StubOracle",
    "ToyClassifierModel",
    "ToyConfig",
    "ToyOracle",
    "train_toy",
    "save_toy",
    "load_toy",
    "encode_batch",
    "ground_truth_accuracy",
    "truncation_sweep",
    "RemoteOracle",
    "remote_predict",
    "default_endpoint",
    "ENDPOINT_ENV_VAR",
    "PAD_ID",
    "PREDICT_PATH",
    "PREDICT_BATCH_PATH",
    "handle_request",
    "local_transport",
    "load_golden_cases",
    "run_golden_suite",
]
