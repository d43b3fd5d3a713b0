"""Session-oriented HTTP API for live labeling.

One json file per session under the data directory; state is persisted after
every accepted mutation, so a restarted server resumes exactly where the
annotator left off. Per-session requests are serialized with a lock;
different sessions proceed concurrently.
"""

from __future__ import annotations

import dataclasses
import json
import os
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel, Field

from .errors import FormatError, ValidationError
from .pool import SyntheticSpec, generate_synthetic, load_pool, split_pool
from .session import (
    AWAITING,
    SessionConfig,
    SessionState,
    start_session,
    state_from_dict,
    state_to_dict,
    submit_labels,
)
from .strategies import ACTION_SPACE, lambda_name

DATA_DIR_ENV = "DISPLAYLAB_DATA_DIR"


class SyntheticBody(BaseModel):
    n_samples: int = 2000
    positive_fraction: float = 0.02
    n_modes_per_class: int = 3
    feature_dim: int = 8
    mode_spread: float = 6.0
    within_mode_noise: float = 1.0
    seed: int = 0


class DatasetBody(BaseModel):
    path: str
    format: Optional[str] = None


class ConfigBody(BaseModel):
    strategy: str = "rl"
    display_size: int = 8
    iterations: int = 10
    n_clusters: Optional[int] = None
    seed: int = 0
    evaluation_enabled: Optional[bool] = None  # None: enabled iff labels allow


class CreateSessionBody(BaseModel):
    dataset: Optional[DatasetBody] = None
    synthetic: Optional[SyntheticBody] = None
    config: ConfigBody = Field(default_factory=ConfigBody)
    train_fraction: float = 0.5


class LabelBody(BaseModel):
    id: str
    label: int


def _error(status: int, code: str, message: str, details: Optional[dict] = None):
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or {}},
    )


class SessionStore:
    """Disk-backed registry of live sessions."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._states: dict[str, SessionState] = {}
        self._meta: dict[str, dict] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, state: SessionState, config_echo: dict) -> dict:
        session_id = uuid.uuid4().hex[:12]
        meta = {
            "session_id": session_id,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "config": config_echo,
        }
        with self._registry_lock:
            self._states[session_id] = state
            self._meta[session_id] = meta
        self.persist(session_id)
        return meta

    def get(self, session_id: str) -> Optional[SessionState]:
        with self._registry_lock:
            if session_id in self._states:
                return self._states[session_id]
        path = self._path(session_id)
        if not path.exists():
            return None
        doc = json.loads(path.read_text())
        state = state_from_dict(doc)
        meta = {
            "session_id": session_id,
            "created_at": doc.get("created_at"),
            "config": doc.get("config_echo", {}),
        }
        with self._registry_lock:
            self._states.setdefault(session_id, state)
            self._meta.setdefault(session_id, meta)
            return self._states[session_id]

    def meta(self, session_id: str) -> dict:
        with self._registry_lock:
            return self._meta.get(session_id, {"session_id": session_id})

    def persist(self, session_id: str) -> None:
        state = self._states[session_id]
        meta = self.meta(session_id)
        doc = state_to_dict(state)
        doc["created_at"] = meta.get("created_at")
        doc["config_echo"] = meta.get("config", {})
        path = self._path(session_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc))
        os.replace(tmp, path)


def _display_payload(state: SessionState) -> dict:
    items = []
    for sid in state.current_display:
        sample = state.pool.samples[state.pool.index_of(sid)]
        items.append(
            {
                "id": sid,
                "image_refs": list(sample.image_refs) if sample.image_refs else None,
                "features": list(sample.features),
            }
        )
    return {
        "iteration": state.iteration,
        "status": state.status,
        "display_size": state.config.display_size,
        "total_iterations": state.config.iterations,
        "items": items,
    }


def _metrics_payload(state: SessionState) -> dict:
    eval_on = state.config.evaluation_enabled
    history = []
    for rec in state.history:
        row = rec.to_dict()
        if not eval_on:
            row.pop("eer_percent", None)
            row.pop("eer_sweep_percent", None)
        history.append(row)
    payload: dict = {
        "iteration": state.iteration,
        "status": state.status,
        "strategy": state.config.strategy,
        "evaluation_enabled": eval_on,
        "history": history,
        "sampling_rates": [rec.sampling_percent for rec in state.history],
        "action_history": [
            {"iteration": rec.iteration, "action": list(rec.action) if rec.action else None}
            for rec in state.history
        ],
    }
    if eval_on:
        payload["eer_curve"] = [rec.eer_percent for rec in state.history]
    if state.qtable is not None:
        payload["q_values"] = [
            {
                "action": list(action.as_tuple()),
                "name": lambda_name(action),
                "q": state.qtable.q[i],
                "count": state.qtable.counts[i],
            }
            for i, action in enumerate(ACTION_SPACE)
        ]
        payload["epsilon"] = state.qtable.epsilon
    return payload


def create_app(data_dir: Optional[str | Path] = None) -> FastAPI:
    root = Path(data_dir or os.environ.get(DATA_DIR_ENV, "displaylab_data"))
    store = SessionStore(root)
    files_root = root / "files"

    app = FastAPI(title="displaylab", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.exception_handler(ValidationError)
    def _validation(_, exc: ValidationError):
        return _error(422, "validation_error", str(exc))

    @app.exception_handler(FormatError)
    def _format(_, exc: FormatError):
        return _error(422, "format_error", str(exc))

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if (body.dataset is None) == (body.synthetic is None):
            return _error(
                422,
                "validation_error",
                "provide exactly one of 'dataset' or 'synthetic'",
            )
        if body.dataset is not None:
            path = Path(body.dataset.path)
            if not path.exists():
                return _error(404, "dataset_not_found", f"no dataset at {path}")
            pool = load_pool(path, body.dataset.format)
        else:
            spec = SyntheticSpec(**body.synthetic.model_dump())
            pool = generate_synthetic(spec)
        pool = split_pool(pool, body.train_fraction, seed=body.config.seed)

        eval_enabled = body.config.evaluation_enabled
        if eval_enabled is None:
            test_idx = pool.test_indices
            labels = {pool.samples[i].truth_label for i in test_idx}
            eval_enabled = pool.has_labels(test_idx) and len(labels) >= 2

        config = SessionConfig(
            strategy=body.config.strategy,
            display_size=body.config.display_size,
            iterations=body.config.iterations,
            n_clusters=body.config.n_clusters,
            seed=body.config.seed,
            evaluation_enabled=eval_enabled,
        )
        state = start_session(pool, config)
        meta = store.create(state, dataclasses.asdict(config))
        return meta

    @app.get("/sessions/{session_id}/display")
    def get_display(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            return _display_payload(state)

    @app.post("/sessions/{session_id}/labels")
    def post_labels(session_id: str, labels: list[LabelBody]):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            if state.status != AWAITING:
                return _error(410, "session_finished", "all displays already labeled")
            bad = [item.id for item in labels if item.label not in (0, 1)]
            if bad:
                return _error(
                    422, "validation_error", f"labels must be 0 or 1: {bad}"
                )
            pairs = [(item.id, item.label) for item in labels]
            try:
                submit_labels(state, pairs)
            except ValidationError as exc:
                got = {item.id for item in labels}
                want = set(state.current_display)
                return _error(
                    409,
                    "label_mismatch",
                    str(exc),
                    details={
                        "missing": sorted(want - got),
                        "extra": sorted(got - want),
                    },
                )
            store.persist(session_id)
            return {
                "accepted": True,
                "iteration": state.iteration,
                "status": state.status,
                "metrics": _metrics_payload(state),
            }

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            return _metrics_payload(state)

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with store.lock(session_id):
            doc = state_to_dict(state)
            doc.update(store.meta(session_id))
            return doc

    @app.get("/files/{ref:path}")
    def get_file(ref: str):
        target = (files_root / ref).resolve()
        files_root.mkdir(parents=True, exist_ok=True)
        if not target.is_relative_to(files_root.resolve()):
            return _error(404, "not_found", "no such file")
        if not target.is_file():
            return _error(404, "not_found", f"no file {ref}")
        return FileResponse(target)

    return app
