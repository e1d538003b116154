"""HTTP facade over the engine: create/train/classify/inspect models and
persist them to a models directory.

JSON in, JSON out; every error body is {"code": ..., "message": ...}.
Request bodies are parsed by hand so the error contract stays exact.
Writers (train, delete, save, load) take the model's lock exclusively, so
a classification never observes a half-applied training pass.
"""

from __future__ import annotations

import base64
import json
import os
import random
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .core import (
    BinaryPattern,
    ClassificationOutcome,
    WisardModel,
    deserialize_model,
    serialize_model,
)
from .errors import (
    DimensionMismatchError,
    ModelFormatError,
    PgmError,
    UnknownLabelError,
)
from .imaging import BinarizeConfig, binarize, load_pgm, render_mental_image, write_pgm

DEFAULT_WIDTH = 32
DEFAULT_HEIGHT = 32
DEFAULT_TUPLE_SIZE = 16
DEFAULT_THRESHOLD = 128


class ApiError(Exception):
    """Maps one failure to one HTTP status and machine code."""

    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass
class ServiceDefaults:
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    tuple_size: int = DEFAULT_TUPLE_SIZE
    threshold: int = DEFAULT_THRESHOLD


@dataclass
class ModelEntry:
    id: str
    name: str
    created_at: str
    threshold: int
    model: WisardModel
    lock: threading.Lock = field(default_factory=threading.Lock)


class ModelRegistry:
    """In-memory id->model map backed by a models directory.

    Models persist in the engine's file format as {id}.json; the registry
    is rebuilt from the directory at startup (names default to the id).
    """

    def __init__(self, models_dir: str | Path, defaults: ServiceDefaults | None = None):
        self.models_dir = Path(models_dir)
        self.defaults = defaults or ServiceDefaults()
        self._entries: dict[str, ModelEntry] = {}
        self._lock = threading.Lock()
        self.models_dir.mkdir(parents=True, exist_ok=True)
        for path in sorted(self.models_dir.glob("*.json")):
            try:
                model = deserialize_model(path.read_bytes())
            except (ModelFormatError, OSError):
                continue  # leave unreadable files alone rather than fail startup
            self._entries[path.stem] = ModelEntry(
                id=path.stem,
                name=path.stem,
                created_at=_now(),
                threshold=self.defaults.threshold,
                model=model,
            )

    def create(self, name, width, height, tuple_size, seed, threshold) -> ModelEntry:
        model = WisardModel(width, height, tuple_size=tuple_size, seed=seed)
        entry = ModelEntry(
            id=_fresh_id(),
            name=name,
            created_at=_now(),
            threshold=threshold,
            model=model,
        )
        with self._lock:
            self._entries[entry.id] = entry
        return entry

    def get(self, model_id: str) -> ModelEntry:
        with self._lock:
            entry = self._entries.get(model_id)
        if entry is None:
            raise ApiError(404, "model_not_found", f"no model with id {model_id!r}")
        return entry

    def list(self) -> list[ModelEntry]:
        with self._lock:
            return sorted(self._entries.values(), key=lambda e: e.id)

    def delete(self, model_id: str) -> None:
        entry = self.get(model_id)
        with entry.lock:
            with self._lock:
                self._entries.pop(model_id, None)
            path = self.models_dir / f"{model_id}.json"
            if path.exists():
                path.unlink()

    def save(self, model_id: str) -> str:
        entry = self.get(model_id)
        with entry.lock:
            filename = f"{entry.id}.json"
            _atomic_write(self.models_dir / filename, serialize_model(entry.model))
        return filename

    def load(self, filename: str) -> ModelEntry:
        if Path(filename).name != filename or not filename.endswith(".json"):
            raise ApiError(400, "invalid_filename", "file must be a bare *.json name")
        path = self.models_dir / filename
        if not path.exists():
            raise ApiError(404, "file_not_found", f"no model file {filename!r}")
        model_id = path.stem
        with self._lock:
            if model_id in self._entries:
                raise ApiError(409, "model_exists", f"model {model_id!r} is already loaded")
        try:
            model = deserialize_model(path.read_bytes())
        except ModelFormatError as exc:
            raise ApiError(422, exc.code, str(exc))
        except OSError as exc:
            raise ApiError(500, "io_error", str(exc))
        entry = ModelEntry(
            id=model_id,
            name=model_id,
            created_at=_now(),
            threshold=self.defaults.threshold,
            model=model,
        )
        with self._lock:
            self._entries[model_id] = entry
        return entry

    def save_all(self) -> None:
        """Flush every registered model to the models directory."""
        for entry in self.list():
            with entry.lock:
                _atomic_write(
                    self.models_dir / f"{entry.id}.json", serialize_model(entry.model)
                )


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _fresh_id() -> str:
    return "".join(random.choices("0123456789abcdef", k=12))


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _entry_summary(entry: ModelEntry) -> dict:
    return {
        "id": entry.id,
        "name": entry.name,
        "width": entry.model.width,
        "height": entry.model.height,
        "tuple_size": entry.model.tuple_size,
        "labels": entry.model.label_counts(),
    }


def _entry_detail(entry: ModelEntry) -> dict:
    doc = _entry_summary(entry)
    doc.update(
        seed=entry.model.seed,
        threshold=entry.threshold,
        created_at=entry.created_at,
        num_tuples=entry.model.num_tuples,
    )
    return doc


def _outcome_document(outcome: ClassificationOutcome) -> dict:
    return {
        "decision": outcome.decision if outcome.decision is not None else "unknown",
        "unknown": outcome.is_unknown,
        "final_bleach": outcome.final_bleach,
        "scores": outcome.scores,
        "tie_broken": outcome.tie_broken,
        "trace": [{"bleach": b, "scores": s} for b, s in outcome.trace],
    }


async def _json_body(request: Request) -> dict:
    try:
        body = json.loads(await request.body() or b"{}")
    except json.JSONDecodeError:
        raise ApiError(400, "invalid_json", "request body is not valid JSON")
    if not isinstance(body, dict):
        raise ApiError(400, "invalid_json", "request body must be a JSON object")
    return body


def _int_field(body: dict, name: str, default=None) -> int:
    value = body.get(name)
    if value is None:  # absent and explicit null both mean "use the default"
        value = default
    if value is None:
        raise ApiError(400, "missing_field", f"field {name!r} is required")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ApiError(400, "invalid_field", f"field {name!r} must be an integer")
    return value


def _decode_image(body: dict, entry: ModelEntry) -> BinaryPattern:
    """Accept {"pgm_base64": ...} (binarized under the model's config) or
    {"bits": [...], "width": w, "height": h} (raw retina bits, no
    binarization)."""
    image = body.get("image")
    if not isinstance(image, dict):
        raise ApiError(422, "invalid_image", "field 'image' must be an object")
    model = entry.model
    if "pgm_base64" in image:
        try:
            raw = base64.b64decode(image["pgm_base64"], validate=True)
        except Exception:
            raise ApiError(422, "invalid_image", "pgm_base64 is not valid base64")
        try:
            gray = load_pgm(raw)
        except PgmError as exc:
            raise ApiError(422, "invalid_image", str(exc))
        cfg = BinarizeConfig(
            target_width=model.width,
            target_height=model.height,
            threshold=entry.threshold,
        )
        return binarize(gray, cfg)
    if "bits" in image:
        width = image.get("width", model.width)
        height = image.get("height", model.height)
        if width != model.width or height != model.height:
            raise ApiError(
                422,
                "invalid_image",
                f"raw bits must be {model.width}x{model.height} for this model",
            )
        try:
            return BinaryPattern(model.width, model.height, image["bits"])
        except (ValueError, TypeError) as exc:
            raise ApiError(422, "invalid_image", str(exc))
    raise ApiError(422, "invalid_image", "image needs 'pgm_base64' or 'bits'")


def create_app(
    models_dir: str | Path | None = None,
    defaults: ServiceDefaults | None = None,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    """Build the service around a registry rooted at models_dir (defaults
    to $WISARD_MODELS_DIR or ./models)."""
    if models_dir is None:
        models_dir = os.environ.get("WISARD_MODELS_DIR", "models")
    registry = ModelRegistry(models_dir, defaults)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        registry.save_all()  # SIGINT and test-client shutdown both land here

    app = FastAPI(title="wisardlab service", openapi_url=None, lifespan=lifespan)
    app.state.registry = registry
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.post("/models", status_code=201)
    async def create_model(request: Request):
        body = await _json_body(request)
        name = body.get("name") or "untitled"
        if not isinstance(name, str):
            raise ApiError(400, "invalid_field", "field 'name' must be a string")
        d = registry.defaults
        width = _int_field(body, "width", d.width)
        height = _int_field(body, "height", d.height)
        tuple_size = _int_field(body, "tuple_size", d.tuple_size)
        threshold = _int_field(body, "threshold", d.threshold)
        seed = _int_field(body, "seed", random.getrandbits(63))
        if not 0 <= threshold <= 255:
            raise ApiError(400, "invalid_field", "threshold must be within 0..255")
        try:
            entry = registry.create(name, width, height, tuple_size, seed, threshold)
        except ValueError as exc:
            raise ApiError(400, "invalid_model_config", str(exc))
        return JSONResponse(status_code=201, content=_entry_detail(entry))

    @app.get("/models")
    def list_models():
        return [_entry_summary(e) for e in registry.list()]

    @app.get("/models/{model_id}")
    def get_model(model_id: str):
        return _entry_detail(registry.get(model_id))

    @app.delete("/models/{model_id}", status_code=204)
    def delete_model(model_id: str):
        registry.delete(model_id)
        return Response(status_code=204)

    @app.post("/models/{model_id}/train")
    async def train(model_id: str, request: Request):
        entry = registry.get(model_id)
        body = await _json_body(request)
        label = body.get("label")
        if not isinstance(label, str) or not label:
            raise ApiError(422, "invalid_label", "field 'label' must be a non-empty string")
        pattern = _decode_image(body, entry)
        with entry.lock:
            try:
                entry.model.train(pattern, label)
            except DimensionMismatchError as exc:
                raise ApiError(422, "invalid_image", str(exc))
            counts = entry.model.label_counts()
        return counts

    @app.post("/models/{model_id}/classify")
    async def classify(model_id: str, request: Request):
        entry = registry.get(model_id)
        body = await _json_body(request)
        pattern = _decode_image(body, entry)
        with entry.lock:
            try:
                outcome = entry.model.classify(pattern)
            except DimensionMismatchError as exc:
                raise ApiError(422, "invalid_image", str(exc))
        return _outcome_document(outcome)

    @app.get("/models/{model_id}/labels")
    def labels(model_id: str):
        entry = registry.get(model_id)
        with entry.lock:
            return entry.model.label_counts()

    @app.get("/models/{model_id}/mental-image/{label}")
    def mental_image(model_id: str, label: str):
        entry = registry.get(model_id)
        with entry.lock:
            try:
                mi = entry.model.mental_image(label)
            except UnknownLabelError as exc:
                raise ApiError(404, "label_not_found", str(exc))
        pgm = write_pgm(render_mental_image(mi))
        return {
            "label": label,
            "width": mi.width,
            "height": mi.height,
            "counts": list(mi.counts),
            "max_count": mi.max_count,
            "pgm_base64": base64.b64encode(pgm).decode("ascii"),
        }

    @app.get("/models/{model_id}/neurons/{label}")
    def neurons(model_id: str, label: str):
        """Sparse neuron dump with addresses as fixed-width binary strings,
        ready for a step-by-step inspection view."""
        entry = registry.get(model_id)
        with entry.lock:
            disc = entry.model.discriminators.get(label)
            if disc is None:
                raise ApiError(404, "label_not_found", f"no discriminator for label {label!r}")
            tuples = [list(t) for t in entry.model.mapping.tuples]
            dump = [
                {
                    format(addr, f"0{len(tup)}b"): count
                    for addr, count in sorted(neuron.items())
                }
                for tup, neuron in zip(entry.model.mapping.tuples, disc.neurons)
            ]
            examples = disc.examples_trained
        return {
            "label": label,
            "examples_trained": examples,
            "tuples": tuples,
            "neurons": dump,
        }

    @app.post("/models/{model_id}/save")
    def save(model_id: str):
        try:
            filename = registry.save(model_id)
        except OSError as exc:
            raise ApiError(500, "io_error", str(exc))
        return {"file": filename}

    @app.post("/models/load")
    async def load(request: Request):
        body = await _json_body(request)
        filename = body.get("file")
        if not isinstance(filename, str) or not filename:
            raise ApiError(400, "missing_field", "field 'file' is required")
        entry = registry.load(filename)
        return JSONResponse(status_code=201, content=_entry_detail(entry))

    return app


def serve(
    port: int,
    models_dir: str | Path,
    defaults: ServiceDefaults | None = None,
    host: str = "127.0.0.1",
) -> None:
    """Run the service until interrupted; models are flushed on shutdown."""
    import uvicorn

    app = create_app(models_dir, defaults)
    uvicorn.run(app, host=host, port=port, log_level="warning")
