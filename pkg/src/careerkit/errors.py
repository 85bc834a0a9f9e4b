"""Exception taxonomy for the package.

Every error raised by careerkit derives from :class:`CareerKitError`, so
callers (CLI, HTTP service) can map failures to structured error bodies with
a stable ``error_kind``.
"""

from __future__ import annotations

__all__ = [
    "CareerKitError",
    "SchemaError",
    "EmptyInputError",
    "UnmappedFieldError",
    "EmptyDatasetError",
    "EmptyVocabularyError",
    "LabelCodingError",
    "StratificationError",
    "TrainingError",
    "DivergenceError",
    "ShapeError",
    "UndefinedMetricError",
    "ArtifactError",
    "ArtifactVersionError",
    "ArtifactChecksumError",
    "ArtifactShapeError",
    "StaleArtifactError",
    "ConfigError",
]


class CareerKitError(Exception):
    """Base class; ``error_kind`` is the stable machine-readable name."""

    error_kind = "error"

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.context = context


class SchemaError(CareerKitError):
    error_kind = "schema"


class EmptyInputError(CareerKitError):
    error_kind = "empty_input"


class UnmappedFieldError(CareerKitError):
    error_kind = "unmapped_field"


class EmptyDatasetError(CareerKitError):
    error_kind = "empty_dataset"


class EmptyVocabularyError(CareerKitError):
    error_kind = "empty_vocabulary"


class LabelCodingError(CareerKitError):
    error_kind = "label_coding"


class StratificationError(CareerKitError):
    error_kind = "stratification"


class TrainingError(CareerKitError):
    error_kind = "training"


class DivergenceError(TrainingError):
    error_kind = "divergence"


class ShapeError(CareerKitError):
    error_kind = "shape"


class UndefinedMetricError(CareerKitError):
    error_kind = "undefined_metric"


class ArtifactError(CareerKitError):
    error_kind = "artifact"


class ArtifactVersionError(ArtifactError):
    error_kind = "artifact_version"


class ArtifactChecksumError(ArtifactError):
    error_kind = "artifact_checksum"


class ArtifactShapeError(ArtifactError):
    error_kind = "artifact_shape"


class StaleArtifactError(ArtifactError):
    error_kind = "stale_artifact"


class ConfigError(CareerKitError):
    error_kind = "config"
