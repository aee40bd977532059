"""HTTP analysis service.

Endpoints:
  POST /api/analyze   lint a spec document, plot source, or chart image
  GET  /api/rules     the active rulebook
  GET  /healthz       liveness probe

Status codes: 400 for malformed requests and invalid mode/backend
combinations, 422 for spec documents that parse but violate the schema or
chart invariants, 502 when the model backend is unreachable or returns
unusable output.

The analyze handler is synchronous on purpose: FastAPI runs it in a worker
thread pool, and every code path under it is either pure or guarded, so
concurrent requests cannot interfere.
"""

from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .core import VizlintError
from .llm import (
    Backend,
    BackendUnavailable,
    EmptyCorrectionError,
    MalformedIssueListError,
    MockBackend,
    RemoteBackend,
    UnknownChartTypeError,
)
from .rulebook import Rulebook, default_rulebook, load_rulebook, rulebook_to_dict
from .specfmt import (
    InvalidIRError,
    SpecSchemaError,
    SpecSyntaxError,
    SpecVersionError,
)
from .workflows import analyze_spec_text, analyze_with_backend, outcome_to_dict


@dataclass(frozen=True)
class ServiceSettings:
    backend_name: str = "deterministic"
    mock_fixtures_path: Optional[Path] = None
    rulebook_path: Optional[Path] = None
    backend_url: Optional[str] = None
    frontend_dist: Optional[Path] = None


def _build_backend(settings: ServiceSettings) -> Optional[Backend]:
    if settings.backend_name == "deterministic":
        return None
    if settings.backend_name == "mock":
        if settings.mock_fixtures_path is None:
            raise VizlintError("mock backend requires a fixtures file")
        return MockBackend.from_file(settings.mock_fixtures_path)
    if settings.backend_name == "remote":
        if not settings.backend_url:
            raise VizlintError("remote backend requires a base URL")
        return RemoteBackend(base_url=settings.backend_url)
    raise VizlintError(f"unknown backend: {settings.backend_name!r}")


def _error(status: int, message: str, details: Optional[list] = None) -> JSONResponse:
    body: dict = {"error": message}
    if details:
        body["details"] = details
    return JSONResponse(status_code=status, content=body)


def create_app(settings: Optional[ServiceSettings] = None) -> FastAPI:
    cfg = settings or ServiceSettings()
    backend = _build_backend(cfg)
    rulebook: Rulebook = (
        load_rulebook(cfg.rulebook_path)
        if cfg.rulebook_path is not None
        else default_rulebook()
    )
    app = FastAPI(title="vizlint", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "backend": cfg.backend_name}

    @app.get("/api/rules")
    def rules() -> dict:
        return rulebook_to_dict(rulebook)

    @app.post("/api/analyze")
    async def analyze_route(request: Request):
        raw = await request.body()
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return _error(400, "request body must be a JSON object")
        if not isinstance(doc, dict):
            return _error(400, "request body must be a JSON object")

        mode = doc.get("mode")
        if mode not in ("spec", "code", "image"):
            return _error(400, 'mode must be one of "spec", "code", "image"')
        payload = doc.get("payload")
        if not isinstance(payload, str) or not payload:
            return _error(400, "payload must be a non-empty string")
        item_id = doc.get("item_id")
        if item_id is not None and not isinstance(item_id, str):
            return _error(400, "item_id must be a string")
        include_transcript = bool(doc.get("include_transcript", False))
        with_correction = bool(doc.get("with_correction", True))

        if mode == "spec":
            try:
                outcome = analyze_spec_text(payload, rulebook)
            except (SpecSyntaxError, SpecVersionError) as exc:
                return _error(422, f"spec does not parse: {exc}")
            except SpecSchemaError as exc:
                return _error(422, f"spec violates the schema: {exc}")
            except InvalidIRError as exc:
                return _error(422, "chart violates invariants", list(exc.violations))
            return JSONResponse(outcome_to_dict(outcome, include_transcript))

        if backend is None:
            return _error(
                400, f"{mode} input requires the service to run a model backend"
            )
        if mode == "image":
            try:
                data: bytes | str = base64.b64decode(payload, validate=True)
            except (binascii.Error, ValueError):
                return _error(400, "image payload must be base64")
        else:
            data = payload
        try:
            outcome = analyze_with_backend(
                data,
                mode,
                backend,
                rulebook,
                item_id=item_id,
                with_correction=with_correction,
            )
        except BackendUnavailable as exc:
            return _error(502, str(exc))
        except (
            UnknownChartTypeError,
            MalformedIssueListError,
            EmptyCorrectionError,
        ) as exc:
            return _error(502, f"backend produced unusable output: {exc}")
        return JSONResponse(outcome_to_dict(outcome, include_transcript))

    dist = cfg.frontend_dist
    if dist is None:
        candidate = Path.cwd() / "frontend" / "dist"
        dist = candidate if candidate.is_dir() else None
    if dist is not None and Path(dist).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(dist), html=True), name="ui")

    return app
