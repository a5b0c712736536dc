"""Classifier-oracle contract.

An oracle maps a byte sequence to a Prediction. Black-box oracles expose
labels only; white-box oracles add the output distribution and an
embedding of the input, which the white-box reward consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CapabilityUnsupported, EmptyInput


@dataclass(frozen=True)
class OracleCapabilities:
    has_labels: bool = True
    has_distribution: bool = False
    has_embedding: bool = False


@dataclass
class Prediction:
    label: int
    distribution: np.ndarray | None = None
    embedding: np.ndarray | None = None

    def validate(self) -> "Prediction":
        if self.distribution is not None:
            d = np.asarray(self.distribution, dtype=np.float64)
            if d.min() < 0 or abs(d.sum() - 1.0) > 1e-6:
                raise ValueError("distribution is not a probability vector")
            if int(d.argmax()) != self.label:
                raise ValueError("label disagrees with argmax(distribution)")
        return self


class Oracle:
    """Base oracle. Subclasses implement predict_batch."""

    capabilities = OracleCapabilities()

    def predict(self, data: bytes) -> Prediction:
        return self.predict_batch([data])[0]

    def predict_batch(self, batch: list[bytes]) -> list[Prediction]:
        raise NotImplementedError

    def require(self, *, distribution: bool = False, embedding: bool = False) -> None:
        caps = self.capabilities
        if distribution and not caps.has_distribution:
            raise CapabilityUnsupported("oracle does not expose distributions")
        if embedding and not caps.has_embedding:
            raise CapabilityUnsupported("oracle does not expose embeddings")

    @staticmethod
    def check_input(data: bytes) -> None:
        if len(data) == 0:
            raise EmptyInput("cannot classify an empty byte sequence")


class StubOracle(Oracle):
    """Deterministic oracle for tests: label from a caller-supplied function."""

    def __init__(self, label_fn, n_classes: int = 2, distribution_fn=None, embedding_fn=None):
        self.label_fn = label_fn
        self.n_classes = n_classes
        self.distribution_fn = distribution_fn
        self.embedding_fn = embedding_fn
        self.calls = 0
        self.capabilities = OracleCapabilities(
            has_distribution=distribution_fn is not None,
            has_embedding=embedding_fn is not None,
        )

    def predict_batch(self, batch):
        out = []
        for data in batch:
            self.check_input(bytes(data))
            self.calls += 1
            label = int(self.label_fn(bytes(data)))
            dist = None
            if self.distribution_fn is not None:
                dist = np.asarray(self.distribution_fn(bytes(data)), dtype=np.float64)
            emb = None
            if self.embedding_fn is not None:
                emb = np.asarray(self.embedding_fn(bytes(data)), dtype=np.float64)
            out.append(Prediction(label=label, distribution=dist, embedding=emb))
        return out
