"""HTTP prediction service.

Stateless request handling over immutable loaded artifacts. All bodies are
JSON; errors come back as ``{"error_kind", "message", "context"}`` with an
appropriate status code. The SVM artifact answers ``/predict`` unless the
request names another model kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .artifacts import ALL_KINDS, ModelArtifact, load_artifact
from .corpus import MasterFieldTaxonomy, load_taxonomy
from .errors import CareerKitError
from .pipeline import PipelineConfig, predict_text
from .textprep import MASTER_FIELDS, LabelEncoder, StopWordList

__all__ = ["ServedModels", "create_app", "serve"]

DEFAULT_MODEL = "svm"


@dataclass
class ServedModels:
    artifacts: dict[str, ModelArtifact]
    stops: StopWordList
    taxonomy: MasterFieldTaxonomy
    reports: dict[str, dict] = field(default_factory=dict)
    default: str = DEFAULT_MODEL

    @classmethod
    def from_config(cls, config: PipelineConfig) -> "ServedModels":
        artifacts: dict[str, ModelArtifact] = {}
        for kind in ALL_KINDS:
            path = Path(config.artifacts_dir) / f"{kind}.json"
            if path.is_file():
                artifacts[kind] = load_artifact(path)
        if not artifacts:
            raise CareerKitError(
                f"no artifacts found in {config.artifacts_dir}; run "
                "`careerkit train` first")
        reports: dict[str, dict] = {}
        for kind in artifacts:
            report_path = Path(config.reports_dir) / f"{kind}.report.json"
            if report_path.is_file():
                reports[kind] = json.loads(report_path.read_text("utf-8"))
        default = DEFAULT_MODEL if DEFAULT_MODEL in artifacts else sorted(artifacts)[0]
        return cls(artifacts=artifacts,
                   stops=StopWordList.from_file(config.stopwords),
                   taxonomy=load_taxonomy(config.taxonomy, config.aliases),
                   reports=reports, default=default)


def _error_response(status: int, kind: str, message: str, **context):
    return JSONResponse(status_code=status, content={
        "error_kind": kind, "message": message, "context": context})


def create_app(store: ServedModels, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="careerkit", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(CareerKitError)
    async def handle_careerkit_error(_request: Request, exc: CareerKitError):
        return _error_response(400, exc.error_kind, str(exc), **exc.context)

    @app.post("/predict")
    async def predict(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return _error_response(400, "bad_request", "body must be JSON")
        if not isinstance(body, dict) or "skills" not in body:
            return _error_response(400, "bad_request",
                                   'body must be {"skills": ..., "model"?: ...}')
        skills = body["skills"]
        if not isinstance(skills, (str, list)):
            return _error_response(400, "bad_request",
                                   "skills must be a string or list of strings")
        kind = body.get("model") or store.default
        artifact = store.artifacts.get(kind)
        if artifact is None:
            return _error_response(404, "unknown_model",
                                   f"no loaded artifact of kind {kind!r}",
                                   loaded=sorted(store.artifacts))
        response = predict_text(artifact, store.stops, skills)
        return response.to_dict()

    @app.get("/labels")
    async def labels():
        encoder = LabelEncoder()
        return [{"code": encoder.encode(label), "label": label}
                for label in MASTER_FIELDS]

    @app.get("/models")
    async def models():
        out = []
        for kind in sorted(store.artifacts):
            artifact = store.artifacts[kind]
            report = store.reports.get(kind)
            out.append({
                "kind": kind,
                "default": kind == store.default,
                "accuracy": report["accuracy"] if report else None,
                "config_hash": artifact.metadata.get("config_hash"),
                "dataset_fingerprint": artifact.metadata.get("dataset_fingerprint"),
            })
        return out

    @app.get("/report/{kind}")
    async def report(kind: str):
        found = store.reports.get(kind)
        if found is None:
            return _error_response(404, "missing_report",
                                   f"no evaluation report for {kind!r}",
                                   available=sorted(store.reports))
        return found

    @app.get("/taxonomy")
    async def taxonomy():
        return {
            "field_to_master": dict(sorted(store.taxonomy.field_to_master.items())),
            "master_to_skills": {
                master: sorted(skills)
                for master, skills in sorted(store.taxonomy.master_to_skills.items())
            },
        }

    if ui_dir:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def serve(config: PipelineConfig, bind: str = "127.0.0.1:8000",
          ui_dir: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    host, _, port = bind.partition(":")
    store = ServedModels.from_config(config)
    app = create_app(store, ui_dir=ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000),
                log_level="warning")
