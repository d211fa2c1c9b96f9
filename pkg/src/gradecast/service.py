"""HTTP service: dataset upload, training, prediction, what-if, tree export.

Endpoints (JSON bodies unless noted):

    POST /datasets                     CSV body -> {dataset_id, report}
    POST /models                       {dataset_id, hyperparams?, split?}
    GET  /models                       model summaries
    GET  /models/{id}                  stored model detail
    POST /models/{id}/predict          {features: [6 floats]}
    POST /models/{id}/whatif           {features, step?, caps?, mutable?, depth?}
    GET  /models/{id}/export?format=dot|model

Errors come back as {code, message, detail?}. Every payload is the result of
the corresponding library call on the stored artifacts; the service adds no
logic of its own.
"""

from __future__ import annotations

import math
import os

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from . import whatif
from .cart import HyperParams, predict, to_dot
from .errors import ConfigError, GradecastError
from .evaluation import SplitConfig
from .ingest import clean, parse_csv
from .pipeline import train_and_evaluate
from .store import ModelStore, StoredModel

DATA_DIR_ENV = "GRADECAST_DATA_DIR"
ADDR_ENV = "GRADECAST_ADDR"
DEFAULT_DATA_DIR = "gradecast-data"
DEFAULT_ADDR = "127.0.0.1:8000"


class HyperParamsBody(BaseModel):
    criterion: str = "gini"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def to_params(self) -> HyperParams:
        params = HyperParams(
            criterion=self.criterion,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
        )
        params.validate()
        return params


class SplitBody(BaseModel):
    test_fraction: float = 0.25
    seed: int = 0
    shuffle: bool = True

    def to_config(self) -> SplitConfig:
        config = SplitConfig(
            test_fraction=self.test_fraction, seed=self.seed, shuffle=self.shuffle
        )
        config.validate()
        return config


class TrainRequest(BaseModel):
    dataset_id: str
    hyperparams: HyperParamsBody = Field(default_factory=HyperParamsBody)
    split: SplitBody = Field(default_factory=SplitBody)


class FeatureBody(BaseModel):
    features: list[float]

    @field_validator("features")
    @classmethod
    def _six_finite(cls, v: list[float]) -> list[float]:
        if len(v) != 6:
            raise ValueError(f"exactly 6 feature values required, got {len(v)}")
        if not all(math.isfinite(f) for f in v):
            raise ValueError("feature values must be finite")
        return v


class WhatIfBody(FeatureBody):
    step: float = 1.0
    caps: list[float] | None = None
    mutable: list[int] | None = None
    depth: int = 1

    def to_config(self) -> whatif.WhatIfConfig:
        return whatif.WhatIfConfig(
            step=self.step,
            caps=tuple(self.caps) if self.caps is not None else None,
            mutable=tuple(self.mutable) if self.mutable is not None else None,
            depth=self.depth,
        )


def _error_body(code: str, message: str, detail: dict | None = None) -> dict:
    body: dict = {"code": code, "message": message}
    if detail:
        body["detail"] = detail
    return body


def _prediction_payload(pred) -> dict:
    return {
        "label": pred.label,
        "pass_probability": pred.pass_probability,
        "leaf": pred.leaf,
        "path": [
            {
                "node": step.node,
                "feature": step.feature,
                "threshold": step.threshold,
                "went_left": step.went_left,
            }
            for step in pred.path
        ],
    }


def whatif_payload(stored: StoredModel, features: list[float], config: whatif.WhatIfConfig) -> dict:
    """The what-if response body; also used verbatim by differential tests."""
    result = whatif.suggest(stored.tree, features, config)
    return {
        "already_pass": result.already_pass,
        "reachable": result.reachable,
        "base": _prediction_payload(result.base),
        "rows": whatif.render_rows(result, features, stored.tree.feature_names),
    }


def create_app(store: ModelStore) -> FastAPI:
    app = FastAPI(title="gradecast", version="0.1.0")

    @app.exception_handler(GradecastError)
    async def _gradecast_error(_request: Request, exc: GradecastError):
        return JSONResponse(
            status_code=400, content=_error_body(exc.code, exc.message, exc.detail())
        )

    @app.exception_handler(KeyError)
    async def _not_found(_request: Request, exc: KeyError):
        return JSONResponse(
            status_code=404,
            content=_error_body("not_found", f"no such id: {exc.args[0]}"),
        )

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content=_error_body("invalid_value", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ()))
        return JSONResponse(
            status_code=400,
            content=_error_body(
                "validation_error", first.get("msg", "invalid request"), {"field": field}
            ),
        )

    @app.post("/datasets")
    async def upload_dataset(request: Request, validate_range: bool = False):
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            return JSONResponse(
                status_code=400,
                content=_error_body("parse_error", f"body is not valid UTF-8: {exc}"),
            )
        source = request.headers.get("x-source-name", "upload")
        dataset, report = clean(parse_csv(text, source=source), validate_range=validate_range)
        dataset_id = store.save_dataset(dataset, report, source)
        return {"dataset_id": dataset_id, "report": report.as_dict()}

    @app.post("/models")
    async def train_model(req: TrainRequest):
        stored = store.load_dataset(req.dataset_id)
        params = req.hyperparams.to_params()
        split = req.split.to_config()
        tree, report = train_and_evaluate(stored.dataset, params, split)
        model_id = store.save_model(tree, report, req.dataset_id, split)
        return {"model_id": model_id, "evaluation": report.as_dict()}

    @app.get("/models")
    async def list_models():
        return {"models": store.list_models()}

    @app.get("/models/{model_id}")
    async def get_model(model_id: str):
        stored = store.load_model(model_id)
        return {
            "model_id": stored.model_id,
            "dataset_id": stored.dataset_id,
            "created_at": stored.created_at,
            "split": {
                "test_fraction": stored.split.test_fraction,
                "seed": stored.split.seed,
                "shuffle": stored.split.shuffle,
            },
            "evaluation": stored.evaluation.as_dict(),
            "feature_names": list(stored.tree.feature_names),
            "n_nodes": len(stored.tree.nodes),
        }

    @app.post("/models/{model_id}/predict")
    async def predict_endpoint(model_id: str, body: FeatureBody):
        stored = store.load_model(model_id)
        return _prediction_payload(predict(stored.tree, body.features))

    @app.post("/models/{model_id}/whatif")
    async def whatif_endpoint(model_id: str, body: WhatIfBody):
        stored = store.load_model(model_id)
        return whatif_payload(stored, body.features, body.to_config())

    @app.get("/models/{model_id}/export")
    async def export_tree(model_id: str, format: str = "dot"):
        stored = store.load_model(model_id)
        if format == "dot":
            return Response(content=to_dot(stored.tree), media_type="text/vnd.graphviz")
        if format == "model":
            return Response(content=stored.tree_text, media_type="application/json")
        return JSONResponse(
            status_code=400,
            content=_error_body(
                "unsupported_format",
                f"format must be 'dot' or 'model', got {format!r}",
                {"field": "format"},
            ),
        )

    return app


def resolve_settings(
    data_dir: str | None = None, addr: str | None = None
) -> tuple[str, str, int]:
    """Fold CLI flags and environment variables into (data_dir, host, port)."""
    directory = data_dir or os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR
    address = addr or os.environ.get(ADDR_ENV) or DEFAULT_ADDR
    host, _, port_text = address.partition(":")
    if not host or not port_text or not port_text.isdigit():
        raise ConfigError(f"address must look like host:port, got {address!r}")
    return directory, host, int(port_text)


def run(data_dir: str | None = None, addr: str | None = None) -> None:
    import uvicorn

    directory, host, port = resolve_settings(data_dir, addr)
    app = create_app(ModelStore(directory))
    uvicorn.run(app, host=host, port=port, log_level="info")
