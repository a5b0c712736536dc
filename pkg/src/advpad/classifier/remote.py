"""HTTP client for remote classifier oracles."""

from __future__ import annotations

import os

import numpy as np
import requests

from ..errors import CapabilityUnsupported, OracleUnavailable, ProtocolError
from .oracle import Oracle, OracleCapabilities, Prediction
from .protocol import PREDICT_BATCH_PATH, PREDICT_PATH

ENDPOINT_ENV_VAR = "ADVPAD_ORACLE_URL"


def default_endpoint() -> str | None:
    return os.environ.get(ENDPOINT_ENV_VAR)


class RemoteOracle(Oracle):
    """Oracle backed by a service speaking the /v1/predict protocol."""

    def __init__(
        self,
        endpoint: str,
        want_distribution: bool = False,
        want_embedding: bool = False,
        timeout: float = 30.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.want_distribution = want_distribution
        self.want_embedding = want_embedding
        self.timeout = timeout
        self.session = session or requests.Session()
        self.capabilities = OracleCapabilities(
            has_distribution=want_distribution, has_embedding=want_embedding
        )

    def _post(self, path: str, body: dict) -> dict:
        try:
            resp = self.session.post(self.endpoint + path, json=body, timeout=self.timeout)
        except requests.RequestException as exc:
            raise OracleUnavailable("oracle at %s unreachable: %s" % (self.endpoint, exc))
        try:
            payload = resp.json()
        except ValueError:
            raise ProtocolError("non-JSON response (status %d)" % resp.status_code)
        if resp.status_code == 501:
            raise CapabilityUnsupported(str(payload.get("error", "capability unsupported")))
        if resp.status_code == 503:
            raise OracleUnavailable(str(payload.get("error", "model not ready")))
        if resp.status_code != 200:
            raise ProtocolError(
                "status %d: %s" % (resp.status_code, payload.get("error", payload))
            )
        if not isinstance(payload, dict):
            raise ProtocolError("response body must be a JSON object")
        return payload

    def _to_prediction(self, label, dist, emb) -> Prediction:
        if not isinstance(label, int):
            raise ProtocolError("label missing or not an integer")
        if self.want_distribution and dist is None:
            raise CapabilityUnsupported("server omitted the requested distribution")
        if self.want_embedding and emb is None:
            raise CapabilityUnsupported("server omitted the requested embedding")
        pred = Prediction(
            label=label,
            distribution=None if dist is None else np.asarray(dist, dtype=np.float64),
            embedding=None if emb is None else np.asarray(emb, dtype=np.float64),
        )
        try:
            pred.validate()
        except ValueError as exc:
            raise ProtocolError(str(exc))
        return pred

    def predict(self, data: bytes) -> Prediction:
        self.check_input(bytes(data))
        body = {
            "bytes_hex": bytes(data).hex(),
            "want_distribution": self.want_distribution,
            "want_embedding": self.want_embedding,
        }
        payload = self._post(PREDICT_PATH, body)
        return self._to_prediction(
            payload.get("label"), payload.get("distribution"), payload.get("embedding")
        )

    def predict_batch(self, batch):
        for data in batch:
            self.check_input(bytes(data))
        body = {
            "bytes_hex": [bytes(b).hex() for b in batch],
            "want_distribution": self.want_distribution,
            "want_embedding": self.want_embedding,
        }
        payload = self._post(PREDICT_BATCH_PATH, body)
        labels = payload.get("labels")
        if not isinstance(labels, list) or len(labels) != len(batch):
            raise ProtocolError("labels missing or wrong length")
        dists = payload.get("distributions") or [None] * len(batch)
        embs = payload.get("embeddings") or [None] * len(batch)
        if len(dists) != len(batch) or len(embs) != len(batch):
            raise ProtocolError("batch array lengths disagree")
        return [self._to_prediction(l, d, e) for l, d, e in zip(labels, dists, embs)]


def remote_predict(
    endpoint: str, data: bytes, want_distribution: bool = False, want_embedding: bool = False
) -> Prediction:
    oracle = RemoteOracle(endpoint, want_distribution, want_embedding)
    return oracle.predict(data)
