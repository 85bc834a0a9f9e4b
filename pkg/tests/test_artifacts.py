import json

import numpy as np
import pytest

from careerkit import classical as C
from careerkit import neural as N
from careerkit.artifacts import (
    ALL_KINDS,
    ModelArtifact,
    artifact_predict,
    load_artifact,
    save_artifact,
)
from careerkit.errors import (
    ArtifactChecksumError,
    ArtifactShapeError,
    ArtifactVersionError,
    ConfigError,
    StaleArtifactError,
)
from careerkit.numerics import SeededRng
from careerkit.pipeline import (
    PipelineConfig,
    evaluate_all,
    predict_text,
    prepare,
    train_all,
)
from careerkit.textprep import MASTER_FIELDS, Vocabulary, build_vocabulary


def tiny_vocabulary(n):
    tokens = [f"tok{i:02d}" for i in range(n)]
    return Vocabulary({t: i for i, t in enumerate(tokens)},
                      {t: 1 for t in tokens})


def train_kind(kind, x, y):
    if kind == "dt":
        return C.dt_train(x, y, n_classes=6)
    if kind == "knn":
        return C.knn_fit(x, y, k=3, n_classes=6)
    if kind == "mnb":
        return C.mnb_train(x, y, n_classes=6)
    if kind == "lr":
        return C.lr_train(x, y, n_classes=6, max_iters=200)
    if kind == "svm":
        return C.svm_train(x, y, n_classes=6, epochs=150)
    config = {"mlp": N.MlpConfig((8, 6, 6, 4), (0.1,) * 4),
              "cnn": N.CnnConfig(filters=3, dense=6),
              "lstm": N.LstmConfig(hidden=6, dense=5, frame_width=4)}[kind]
    model, _ = N.train(kind, x, y,
                       N.TrainingConfig(epochs=3, batch_size=4, seed=10),
                       n_classes=6, model_config=config)
    return model


@pytest.fixture(scope="module")
def training_data():
    rng = SeededRng(21)
    x = np.array([[rng.below(4) for _ in range(10)] for _ in range(36)],
                 dtype=float)
    y = np.array([i % 6 for i in range(36)])
    return x, y


class TestArtifactRoundTrip:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_predictions_identical_after_reload(self, kind, training_data,
                                                tmp_path):
        x, y = training_data
        model = train_kind(kind, x, y)
        artifact = ModelArtifact(kind, tiny_vocabulary(10),
                                 list(MASTER_FIELDS), model,
                                 {"config_hash": "h", "dataset_fingerprint": "f"})
        path = tmp_path / f"{kind}.json"
        save_artifact(artifact, path)
        loaded = load_artifact(path)
        rng = SeededRng(22)
        for _ in range(100):
            probe = rng.random_array(10, 0, 4).round()
            before = artifact_predict(artifact, probe)
            after = artifact_predict(loaded, probe)
            assert before.label == after.label
            assert np.array_equal(before.distribution, after.distribution)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_resave_is_byte_identical(self, kind, training_data, tmp_path):
        x, y = training_data
        model = train_kind(kind, x, y)
        artifact = ModelArtifact(kind, tiny_vocabulary(10),
                                 list(MASTER_FIELDS), model,
                                 {"config_hash": "h", "dataset_fingerprint": "f"})
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        save_artifact(artifact, first)
        save_artifact(load_artifact(first), second)
        assert first.read_bytes() == second.read_bytes()


class TestArtifactErrors:
    def fixture_path(self, tmp_path, training_data):
        x, y = training_data
        artifact = ModelArtifact("mnb", tiny_vocabulary(10),
                                 list(MASTER_FIELDS), train_kind("mnb", x, y),
                                 {"config_hash": "h", "dataset_fingerprint": "f"})
        path = tmp_path / "mnb.json"
        save_artifact(artifact, path)
        return path

    def test_version_mismatch(self, tmp_path, training_data):
        path = self.fixture_path(tmp_path, training_data)
        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ArtifactVersionError):
            load_artifact(path)

    def test_corrupt_payload_checksum(self, tmp_path, training_data):
        path = self.fixture_path(tmp_path, training_data)
        doc = json.loads(path.read_text())
        doc["payload"]["model"]["alpha"] = 2.0
        path.write_text(json.dumps(doc))
        with pytest.raises(ArtifactChecksumError):
            load_artifact(path)

    def test_shape_inconsistency(self, tmp_path, training_data):
        path = self.fixture_path(tmp_path, training_data)
        doc = json.loads(path.read_text())
        # drop a vocabulary token so the model dimension no longer matches
        vocab = doc["payload"]["vocabulary"]
        vocab["tokens"] = vocab["tokens"][:-1]
        vocab["document_frequency"] = vocab["document_frequency"][:-1]
        import hashlib
        body = json.dumps(doc["payload"], sort_keys=True,
                          separators=(",", ":")).encode()
        doc["checksum"] = hashlib.sha256(body).hexdigest()
        path.write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")))
        with pytest.raises(ArtifactShapeError):
            load_artifact(path)


class TestPipeline:
    def test_prepare_fits_vocabulary_on_train_only(self, mini_config_path):
        config = PipelineConfig.from_json(mini_config_path)
        prepared = prepare(config)
        from careerkit.textprep import normalize
        train_tokens = set()
        for i in prepared.train_indices:
            train_tokens.update(normalize(prepared.dataset.documents[i].text,
                                          prepared.stops))
        assert set(prepared.vocabulary.token_to_index) == train_tokens

    def test_train_all_is_byte_deterministic(self, mini_config_path, tmp_path):
        from dataclasses import replace
        config = PipelineConfig.from_json(mini_config_path)
        run_a = replace(config, artifacts_dir=tmp_path / "a")
        run_b = replace(config, artifacts_dir=tmp_path / "b")
        kinds = ["dt", "mnb", "lr", "mlp"]
        train_all(run_a, kinds=kinds)
        train_all(run_b, kinds=kinds)
        for kind in kinds:
            a = (tmp_path / "a" / f"{kind}.json").read_bytes()
            b = (tmp_path / "b" / f"{kind}.json").read_bytes()
            assert a == b

    def test_learning_curves_written_for_neural_kinds(self, mini_config_path):
        config = PipelineConfig.from_json(mini_config_path)
        train_all(config, kinds=["lstm"])
        curve = config.artifacts_dir / "lstm.curve.csv"
        assert curve.is_file()
        lines = curve.read_text().strip().splitlines()
        assert len(lines) == 1 + 3  # header + epochs

    def test_evaluate_all_writes_reports_and_comparison(self, mini_config_path):
        config = PipelineConfig.from_json(mini_config_path)
        artifacts = train_all(config, kinds=["dt", "mnb"])
        reports = evaluate_all(config, artifacts)
        assert set(reports) == {"dt", "mnb"}
        assert (config.reports_dir / "dt.report.json").is_file()
        assert (config.reports_dir / "comparison.txt").is_file()
        for report in reports.values():
            n = len(prepare(config).test_indices)
            assert report.counts.tp + report.counts.fn == n

    def test_stale_artifact_detected(self, mini_config_path, tmp_path):
        from careerkit.pipeline import evaluate_artifact
        config = PipelineConfig.from_json(mini_config_path)
        artifacts = train_all(config, kinds=["mnb"])
        artifact = artifacts["mnb"]
        artifact.metadata["dataset_fingerprint"] = "something-else"
        with pytest.raises(StaleArtifactError):
            evaluate_artifact(artifact, prepare(config))

    def test_config_validation(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"dataset": "nope.csv"}))
        with pytest.raises(ConfigError):
            PipelineConfig.from_json(bad)
        unknown = tmp_path / "unknown.json"
        unknown.write_text(json.dumps({"surprise": 1}))
        with pytest.raises(ConfigError):
            PipelineConfig.from_json(unknown)

    def test_default_config_points_at_bundled_snapshot(self):
        config = PipelineConfig().validated()
        assert config.dataset.name == "snapshot.csv"
        assert config.dataset.is_file()


@pytest.fixture(scope="module")
def served(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("predict")
    config_path = tmp / "config.json"
    from conftest import FAST_MODELS, write_mini_survey
    from careerkit import data as bundled
    survey = write_mini_survey(tmp / "survey.csv")
    config_path.write_text(json.dumps({
        "dataset": str(survey),
        "taxonomy": str(bundled.path("taxonomy.txt")),
        "aliases": str(bundled.path("skill_aliases.txt")),
        "stopwords": str(bundled.path("stopwords.txt")),
        "models": FAST_MODELS,
        "artifacts_dir": str(tmp / "artifacts"),
        "reports_dir": str(tmp / "reports"),
    }))
    config = PipelineConfig.from_json(config_path)
    artifacts = train_all(config, kinds=["svm"])
    prepared = prepare(config)
    return artifacts["svm"], prepared.stops


class TestPredictText:
    def test_six_labels_descending_and_sum_100(self, served):
        artifact, stops = served
        response = predict_text(artifact, stops, "AI, ML, DS, WD, SDE, GD")
        labels = [r["label"] for r in response.ranking]
        assert sorted(labels) == sorted(MASTER_FIELDS)
        pcts = [r["percentage"] for r in response.ranking]
        assert pcts == sorted(pcts, reverse=True)
        assert abs(sum(pcts) - 100.0) < 0.01
        for r in response.ranking:
            assert r["percent_text"] == f"{r['percentage']:.2f}"

    def test_empty_input_flagged_low_confidence(self, served):
        artifact, stops = served
        response = predict_text(artifact, stops, "")
        assert response.low_confidence
        assert abs(sum(r["percentage"] for r in response.ranking) - 100) < 0.01

    def test_oov_tokens_listed(self, served):
        artifact, stops = served
        response = predict_text(artifact, stops, "quantum basket weaving")
        assert "quantum" in response.oov
        assert response.low_confidence

    def test_deterministic(self, served):
        artifact, stops = served
        a = predict_text(artifact, stops, "web development apis")
        b = predict_text(artifact, stops, "web development apis")
        assert a == b

    def test_list_input(self, served):
        artifact, stops = served
        response = predict_text(artifact, stops, ["WD", "cloud computing"])
        assert "wd" in response.tokens
