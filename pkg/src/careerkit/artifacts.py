"""Versioned, checksummed model artifacts.

An artifact freezes everything needed to reproduce predictions: the model
kind, the trained parameters, the vocabulary fitted on the training split,
the label coding, and training metadata (seed, config hash, dataset
fingerprint). The on-disk form is canonical JSON: sorted keys, no whitespace,
floats as their shortest exact round-trip decimals, no timestamps, so saving
the same artifact twice is byte-identical and load->save is the identity.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import classical, neural
from .classical import (
    DecisionTreeModel,
    KnnModel,
    LinearSvmModel,
    LogisticRegressionModel,
    MultinomialNbModel,
    Prediction,
    _TreeNode,
)
from .errors import (
    ArtifactChecksumError,
    ArtifactError,
    ArtifactShapeError,
    ArtifactVersionError,
)
from .neural import CnnConfig, LstmConfig, MlpConfig, _NeuralModel, build_model
from .numerics import SeededRng
from .textprep import MASTER_FIELDS, Vocabulary

__all__ = [
    "FORMAT_VERSION",
    "ModelArtifact",
    "artifact_predict",
    "load_artifact",
    "save_artifact",
]

FORMAT_VERSION = 1

CLASSICAL_KINDS = ("dt", "svm", "lr", "knn", "mnb")
ALL_KINDS = CLASSICAL_KINDS + neural.MODEL_KINDS


@dataclass
class ModelArtifact:
    kind: str
    vocabulary: Vocabulary
    labels: list[str]
    model: object
    metadata: dict


def _tree_to_dict(node: _TreeNode) -> dict:
    if node.is_leaf():
        return {"counts": node.counts.tolist()}
    return {"feature": node.feature, "threshold": node.threshold,
            "left": _tree_to_dict(node.left), "right": _tree_to_dict(node.right)}


def _tree_from_dict(data: dict) -> _TreeNode:
    if "counts" in data:
        return _TreeNode(counts=np.asarray(data["counts"], dtype=np.float64))
    return _TreeNode(feature=int(data["feature"]),
                     threshold=float(data["threshold"]),
                     left=_tree_from_dict(data["left"]),
                     right=_tree_from_dict(data["right"]))


def _model_payload(kind: str, model) -> dict:
    if kind == "dt":
        return {"tree": _tree_to_dict(model.root),
                "n_features": model.n_features, "n_classes": model.n_classes,
                "max_depth": model.max_depth,
                "min_samples_split": model.min_samples_split}
    if kind == "knn":
        return {"x": model.x.tolist(), "y": model.y.tolist(), "k": model.k,
                "n_classes": model.n_classes}
    if kind == "mnb":
        return {"log_prior": model.log_prior.tolist(),
                "log_likelihood": model.log_likelihood.tolist(),
                "alpha": model.alpha}
    if kind == "lr":
        return {"weights": model.weights.tolist(), "bias": model.bias.tolist(),
                "seed": model.seed, "lam": model.lam}
    if kind == "svm":
        return {"weights": model.weights.tolist(), "bias": model.bias.tolist(),
                "calibration": model.calibration.tolist(), "lam": model.lam}
    if kind in neural.MODEL_KINDS:
        config = {k: (list(v) if isinstance(v, tuple) else v)
                  for k, v in vars(model.config).items()}
        return {"config": config,
                "n_features": model.n_features, "n_classes": model.n_classes,
                "tensors": {name: p.tolist() for name, p in model.param_pairs()}}
    raise ArtifactError(f"unknown model kind {kind!r}")


_NEURAL_CONFIGS = {"mlp": MlpConfig, "cnn": CnnConfig, "lstm": LstmConfig}


def _model_restore(kind: str, payload: dict):
    try:
        if kind == "dt":
            return DecisionTreeModel(
                _tree_from_dict(payload["tree"]), int(payload["n_features"]),
                int(payload["n_classes"]), payload["max_depth"],
                int(payload["min_samples_split"]))
        if kind == "knn":
            return KnnModel(np.asarray(payload["x"], dtype=np.float64),
                            np.asarray(payload["y"], dtype=np.int64),
                            int(payload["k"]), int(payload["n_classes"]))
        if kind == "mnb":
            return MultinomialNbModel(
                np.asarray(payload["log_prior"], dtype=np.float64),
                np.asarray(payload["log_likelihood"], dtype=np.float64),
                float(payload["alpha"]))
        if kind == "lr":
            return LogisticRegressionModel(
                np.asarray(payload["weights"], dtype=np.float64),
                np.asarray(payload["bias"], dtype=np.float64),
                int(payload["seed"]), float(payload["lam"]))
        if kind == "svm":
            return LinearSvmModel(
                np.asarray(payload["weights"], dtype=np.float64),
                np.asarray(payload["bias"], dtype=np.float64),
                np.asarray(payload["calibration"], dtype=np.float64),
                float(payload["lam"]))
        if kind in neural.MODEL_KINDS:
            raw = dict(payload["config"])
            for key, value in raw.items():
                if isinstance(value, list):
                    raw[key] = tuple(value)
            config = _NEURAL_CONFIGS[kind](**raw)
            model = build_model(kind, int(payload["n_features"]),
                                int(payload["n_classes"]), config, SeededRng(0))
            tensors = payload["tensors"]
            for name, param in model.param_pairs():
                if name not in tensors:
                    raise ArtifactShapeError(f"missing tensor {name!r}")
                values = np.asarray(tensors[name], dtype=np.float64)
                if values.shape != param.shape:
                    raise ArtifactShapeError(
                        f"tensor {name!r} has shape {values.shape}, expected "
                        f"{param.shape}")
                param[...] = values
            return model
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactShapeError(f"malformed {kind} payload: {exc}") from exc
    raise ArtifactError(f"unknown model kind {kind!r}")


def _canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False).encode("utf-8")


def _dimension_of(kind: str, model) -> int:
    if kind == "dt":
        return model.n_features
    if kind == "knn":
        return model.x.shape[1]
    if kind == "mnb":
        return model.log_likelihood.shape[1]
    if kind in ("lr", "svm"):
        return model.weights.shape[1]
    return model.n_features


def save_artifact(artifact: ModelArtifact, path) -> None:
    vocab = artifact.vocabulary
    tokens = vocab.tokens
    payload = {
        "kind": artifact.kind,
        "labels": list(artifact.labels),
        "vocabulary": {
            "tokens": tokens,
            "document_frequency": [vocab.document_frequency[t] for t in tokens],
        },
        "model": _model_payload(artifact.kind, artifact.model),
        "metadata": artifact.metadata,
    }
    body = _canonical_bytes(payload)
    document = {
        "format_version": FORMAT_VERSION,
        "checksum": hashlib.sha256(body).hexdigest(),
        "payload": payload,
    }
    with open(path, "wb") as fh:
        fh.write(_canonical_bytes(document) + b"\n")


def load_artifact(path) -> ModelArtifact:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        document = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: not valid JSON: {exc}") from exc
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactVersionError(
            f"{path}: format version {version!r}, supported {FORMAT_VERSION}")
    payload = document.get("payload")
    body = _canonical_bytes(payload)
    if hashlib.sha256(body).hexdigest() != document.get("checksum"):
        raise ArtifactChecksumError(f"{path}: checksum mismatch")
    if payload.get("labels") != list(MASTER_FIELDS):
        raise ArtifactShapeError(f"{path}: unexpected label set")
    vocab_data = payload["vocabulary"]
    tokens = vocab_data["tokens"]
    if tokens != sorted(tokens):
        raise ArtifactShapeError(f"{path}: vocabulary tokens not sorted")
    vocabulary = Vocabulary(
        {t: i for i, t in enumerate(tokens)},
        dict(zip(tokens, vocab_data["document_frequency"])))
    kind = payload["kind"]
    model = _model_restore(kind, payload["model"])
    if _dimension_of(kind, model) != len(tokens):
        raise ArtifactShapeError(
            f"{path}: vocabulary size {len(tokens)} does not match model "
            f"dimension {_dimension_of(kind, model)}")
    return ModelArtifact(kind, vocabulary, list(payload["labels"]), model,
                         dict(payload["metadata"]))


def artifact_predict(artifact: ModelArtifact, x) -> Prediction:
    """Uniform prediction across classical and neural artifact kinds."""
    if isinstance(artifact.model, _NeuralModel):
        return neural.forward(artifact.model, x)
    return classical.predict(artifact.model, x)
