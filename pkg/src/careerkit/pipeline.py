"""Pipeline orchestration: configuration, end-to-end training, evaluation,
and single-input prediction responses.

A :class:`PipelineConfig` names the dataset, taxonomy, alias and stop-word
files plus per-model hyperparameters; everything defaults to the bundled
fixtures, so ``train_all(PipelineConfig())`` reproduces the stock run. The
whole pipeline is deterministic: two runs from the same config produce
byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dataclass_field, replace
from pathlib import Path

import numpy as np

from . import classical, data, neural
from .artifacts import ALL_KINDS, ModelArtifact, artifact_predict, save_artifact
from .corpus import CleanDataset, clean, load_survey, load_taxonomy
from .errors import ConfigError, UndefinedMetricError
from .evaluation import EvaluationReport, build_report
from .textprep import (
    MASTER_FIELDS,
    CountVector,
    LabelEncoder,
    StopWordList,
    Vocabulary,
    build_vocabulary,
    normalize,
    stratified_split,
    vectorize,
)

__all__ = [
    "PipelineConfig",
    "PredictionResponse",
    "PreparedData",
    "evaluate_all",
    "predict_text",
    "prepare",
    "train_all",
]

_DEFAULT_MODEL_PARAMS: dict[str, dict] = {
    "dt": {"max_depth": None, "min_samples_split": 2},
    "svm": {"learning_rate": 0.1, "epochs": 1000, "lam": 1e-4},
    "lr": {"learning_rate": 0.1, "max_iters": 2000, "tolerance": 1e-7,
           "lam": 1e-4, "seed": 10},
    "knn": {"k": 3},
    "mnb": {"alpha": 1.0},
    "mlp": {"training": {}, "model": {}},
    "cnn": {"training": {}, "model": {}},
    "lstm": {"training": {}, "model": {}},
}


@dataclass(frozen=True)
class PipelineConfig:
    dataset: Path = dataclass_field(default_factory=lambda: data.path("snapshot.csv"))
    taxonomy: Path = dataclass_field(default_factory=lambda: data.path("taxonomy.txt"))
    aliases: Path = dataclass_field(default_factory=lambda: data.path("skill_aliases.txt"))
    stopwords: Path = dataclass_field(default_factory=lambda: data.path("stopwords.txt"))
    columns: dict = dataclass_field(default_factory=dict)
    delimiter: str = ","
    drop_threshold: float = 0.05
    split_ratio: float = 0.8
    split_seed: int = 10
    models: dict = dataclass_field(default_factory=dict)
    artifacts_dir: Path = Path("artifacts")
    reports_dir: Path = Path("reports")

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        """Load a config file; relative paths resolve against the file."""
        base = Path(path).resolve().parent
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        kwargs: dict = {}
        for key in ("dataset", "taxonomy", "aliases", "stopwords",
                    "artifacts_dir", "reports_dir"):
            if key in raw:
                kwargs[key] = (base / raw.pop(key)).resolve()
        for key in ("columns", "delimiter", "drop_threshold", "split_ratio",
                    "split_seed", "models"):
            if key in raw:
                kwargs[key] = raw.pop(key)
        if raw:
            raise ConfigError(f"{path}: unknown config keys {sorted(raw)}")
        return cls(**kwargs).validated()

    def validated(self) -> "PipelineConfig":
        for name in ("dataset", "taxonomy", "aliases", "stopwords"):
            p = getattr(self, name)
            if not Path(p).is_file():
                raise ConfigError(f"{name} file does not exist: {p}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must be in (0, 1), got {self.split_ratio}")
        if not 0.0 <= self.drop_threshold <= 1.0:
            raise ConfigError("drop_threshold must be in [0, 1]")
        unknown = set(self.models) - set(ALL_KINDS)
        if unknown:
            raise ConfigError(f"unknown model kinds in config: {sorted(unknown)}")
        return self

    def model_params(self, kind: str) -> dict:
        merged = {k: v for k, v in _DEFAULT_MODEL_PARAMS[kind].items()}
        for key, value in self.models.get(kind, {}).items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key] = {**merged[key], **value}
            else:
                merged[key] = value
        return merged

    def with_seed(self, seed: int) -> "PipelineConfig":
        return replace(self, split_seed=int(seed))

    def config_hash(self) -> str:
        semantic = {
            "dataset": str(self.dataset),
            "taxonomy": str(self.taxonomy),
            "aliases": str(self.aliases),
            "stopwords": str(self.stopwords),
            "columns": self.columns,
            "delimiter": self.delimiter,
            "drop_threshold": self.drop_threshold,
            "split_ratio": self.split_ratio,
            "split_seed": self.split_seed,
            "models": {kind: self.model_params(kind) for kind in ALL_KINDS},
        }
        blob = json.dumps(semantic, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class PreparedData:
    dataset: CleanDataset
    encoder: LabelEncoder
    labels: list[int]
    vocabulary: Vocabulary
    vectors: list[CountVector]
    train_indices: list[int]
    test_indices: list[int]
    stops: StopWordList
    fingerprint: str

    @property
    def train_matrix(self) -> np.ndarray:
        return classical.as_matrix([self.vectors[i] for i in self.train_indices])

    @property
    def train_labels(self) -> np.ndarray:
        return np.asarray([self.labels[i] for i in self.train_indices],
                          dtype=np.int64)

    @property
    def test_matrix(self) -> np.ndarray:
        return classical.as_matrix([self.vectors[i] for i in self.test_indices])

    @property
    def test_labels(self) -> np.ndarray:
        return np.asarray([self.labels[i] for i in self.test_indices],
                          dtype=np.int64)


def dataset_fingerprint(dataset: CleanDataset) -> str:
    digest = hashlib.sha256()
    for doc in dataset.documents:
        digest.update(doc.label.encode("utf-8"))
        digest.update(b"\t")
        digest.update(doc.text.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def prepare(config: PipelineConfig) -> PreparedData:
    """Ingest, clean, split, and vectorize. The vocabulary is fitted on the
    training split only; test and inference inputs use it frozen."""
    records, _issues = load_survey(config.dataset, delimiter=config.delimiter,
                                   columns=config.columns)
    taxonomy = load_taxonomy(config.taxonomy, config.aliases)
    dataset = clean(records, taxonomy, config.drop_threshold)
    stops = StopWordList.from_file(config.stopwords)
    encoder = LabelEncoder()
    labels = [encoder.encode(doc.label) for doc in dataset.documents]
    split = stratified_split(labels, config.split_ratio, config.split_seed)
    token_lists = [normalize(doc.text, stops) for doc in dataset.documents]
    vocabulary = build_vocabulary([token_lists[i] for i in split.train_indices])
    vectors = [vectorize(tokens, vocabulary) for tokens in token_lists]
    return PreparedData(dataset, encoder, labels, vocabulary, vectors,
                        split.train_indices, split.test_indices, stops,
                        dataset_fingerprint(dataset))


def _train_one(kind: str, prepared: PreparedData, config: PipelineConfig):
    """Returns (model, curve-or-None)."""
    params = config.model_params(kind)
    x, y = prepared.train_matrix, prepared.train_labels
    n_classes = len(MASTER_FIELDS)
    if kind == "dt":
        return classical.dt_train(x, y, n_classes=n_classes, **params), None
    if kind == "svm":
        return classical.svm_train(x, y, n_classes=n_classes, **params), None
    if kind == "lr":
        return classical.lr_train(x, y, n_classes=n_classes, **params), None
    if kind == "knn":
        return classical.knn_fit(x, y, n_classes=n_classes, **params), None
    if kind == "mnb":
        return classical.mnb_train(x, y, n_classes=n_classes, **params), None
    training = neural.TrainingConfig(**params["training"])
    model_config = neural._CONFIG_TYPES[kind](**{
        k: (tuple(v) if isinstance(v, list) else v)
        for k, v in params["model"].items()})
    return neural.train(kind, x, y, training, n_classes=n_classes,
                        model_config=model_config)


def train_all(config: PipelineConfig, kinds: list[str] | None = None,
              prepared: PreparedData | None = None,
              ) -> dict[str, ModelArtifact]:
    """Train the requested model kinds, write artifacts and learning curves."""
    kinds = list(kinds or ALL_KINDS)
    for kind in kinds:
        if kind not in ALL_KINDS:
            raise ConfigError(f"unknown model kind {kind!r}")
    if prepared is None:
        prepared = prepare(config)
    artifacts_dir = Path(config.artifacts_dir)
    artifacts_dir.mkdir(parents=True, exist_ok=True)
    out: dict[str, ModelArtifact] = {}
    for kind in kinds:
        model, curve = _train_one(kind, prepared, config)
        metadata = {
            "split_ratio": config.split_ratio,
            "split_seed": config.split_seed,
            "config_hash": config.config_hash(),
            "dataset_fingerprint": prepared.fingerprint,
            "params": config.model_params(kind),
        }
        artifact = ModelArtifact(kind, prepared.vocabulary,
                                 list(MASTER_FIELDS), model, metadata)
        save_artifact(artifact, artifacts_dir / f"{kind}.json")
        if curve is not None:
            curve.save(artifacts_dir / f"{kind}.curve.csv")
        out[kind] = artifact
    return out


def evaluate_artifact(artifact: ModelArtifact, prepared: PreparedData,
                      ) -> EvaluationReport:
    if artifact.metadata.get("dataset_fingerprint") != prepared.fingerprint:
        from .errors import StaleArtifactError
        raise StaleArtifactError(
            f"artifact {artifact.kind} was trained on a different dataset "
            "snapshot; retrain before evaluating")
    y_true = prepared.test_labels
    if y_true.size == 0:
        raise UndefinedMetricError("no test documents to evaluate")
    y_pred = np.asarray([
        artifact_predict(artifact, prepared.vectors[i]).label
        for i in prepared.test_indices], dtype=np.int64)
    return build_report(y_true, y_pred, list(MASTER_FIELDS), artifact.kind)


def evaluate_all(config: PipelineConfig,
                 artifacts: dict[str, ModelArtifact],
                 prepared: PreparedData | None = None,
                 write: bool = True) -> dict[str, EvaluationReport]:
    """Emit one report per artifact plus a comparison table."""
    if prepared is None:
        prepared = prepare(config)
    reports = {kind: evaluate_artifact(art, prepared)
               for kind, art in artifacts.items()}
    if write:
        reports_dir = Path(config.reports_dir)
        reports_dir.mkdir(parents=True, exist_ok=True)
        for kind, report in reports.items():
            (reports_dir / f"{kind}.report.json").write_text(
                report.to_json() + "\n", encoding="utf-8")
            (reports_dir / f"{kind}.report.txt").write_text(
                report.to_text(), encoding="utf-8")
        (reports_dir / "comparison.txt").write_text(
            comparison_table(reports), encoding="utf-8")
    return reports


def comparison_table(reports: dict[str, EvaluationReport]) -> str:
    lines = [f"{'model':<6} {'accuracy':>9} {'macro_f1':>9} {'weighted_f1':>12} "
             f"{'tp':>4} {'fp':>4} {'tn':>4} {'fn':>4}"]
    for kind in sorted(reports, key=lambda k: -reports[k].accuracy):
        r = reports[kind]
        lines.append(f"{kind:<6} {r.accuracy:9.4f} {r.macro['f1']:9.4f} "
                     f"{r.weighted['f1']:12.4f} {r.counts.tp:4d} "
                     f"{r.counts.fp:4d} {r.counts.tn:4d} {r.counts.fn:4d}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Prediction responses (the Table-10-shaped interface)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PredictionResponse:
    model: str
    ranking: list[dict]  # [{"label", "percentage", "percent_text"}] descending
    tokens: list[str]
    oov: list[str]
    low_confidence: bool

    def to_dict(self) -> dict:
        return {"model": self.model, "ranking": list(self.ranking),
                "tokens": list(self.tokens), "oov": list(self.oov),
                "low_confidence": self.low_confidence}

    def summary(self) -> str:
        return ", ".join(f"{r['label']}: {r['percent_text']}%"
                         for r in self.ranking)


def _hundredths(distribution: np.ndarray) -> list[int]:
    """Largest-remainder allocation of 10000 hundredth-of-a-percent units, so
    the displayed two-decimal percentages sum to exactly 100.00."""
    d = np.asarray(distribution, dtype=np.float64)
    d = d / d.sum()
    scaled = d * 10000.0
    base = np.floor(scaled).astype(np.int64)
    leftover = 10000 - int(base.sum())
    remainders = scaled - base
    order = sorted(range(len(d)), key=lambda i: (-remainders[i], i))
    for i in order[:leftover]:
        base[i] += 1
    return base.tolist()


def predict_text(artifact: ModelArtifact, stops: StopWordList,
                 skills: str | list[str]) -> PredictionResponse:
    """Normalize free text with the frozen vocabulary and rank all six labels
    by percentage (two decimals, summing to exactly 100)."""
    if isinstance(skills, (list, tuple)):
        skills = " ".join(str(s) for s in skills)
    tokens = normalize(skills, stops)
    vector = vectorize(tokens, artifact.vocabulary)
    oov = [t for t in tokens if t not in artifact.vocabulary.token_to_index]
    prediction = artifact_predict(artifact, vector)
    units = _hundredths(prediction.distribution)
    order = sorted(range(len(MASTER_FIELDS)), key=lambda i: (-units[i], i))
    ranking = [{"label": MASTER_FIELDS[i],
                "percentage": units[i] / 100.0,
                "percent_text": f"{units[i] / 100.0:.2f}"}
               for i in order]
    return PredictionResponse(
        model=artifact.kind, ranking=ranking, tokens=tokens, oov=oov,
        low_confidence=not vector.entries)
