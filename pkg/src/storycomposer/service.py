"""HTTP service hosting concurrent composition sessions.

All endpoints live under /api/v1. Sentence posts to the same session are
serialized in arrival order by a per-session lock; sessions are isolated
and share only the immutable models.
"""

from __future__ import annotations

import base64
import threading
import uuid

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from . import session as sess
from .search import ScorerBundle
from .session import SeedLibrary, SessionConfig
from .story import StoryClassifier


class SessionCreateRequest(BaseModel):
    beam_size: int | None = Field(default=None, ge=1)
    expansion_k: int | None = Field(default=None, ge=1, le=314)
    timestep_rate: int | None = Field(default=None, ge=1)
    sentence_seconds: float | None = Field(default=None, gt=0)
    rng_seed: int | None = None


class SentenceRequest(BaseModel):
    text: str
    duration_seconds: float | None = Field(default=None, gt=0)
    emotion_override: dict[str, int] | None = None


class _Session:
    def __init__(self, state):
        self.state = state
        self.lock = threading.Lock()


def create_app(
    bundle: ScorerBundle,
    classifier: StoryClassifier,
    library: SeedLibrary,
    defaults: SessionConfig | None = None,
    fixed_rng_seed: int | None = None,
) -> FastAPI:
    """Build the service around one immutable model set.

    ``fixed_rng_seed`` pins every new session's RNG (CI mode); by default
    each session gets fresh randomness.
    """
    app = FastAPI(title="storycomposer")
    defaults = defaults or SessionConfig()
    sessions: dict[str, _Session] = {}

    def get_session(session_id: str) -> _Session:
        entry = sessions.get(session_id)
        if entry is None:
            raise HTTPException(
                status_code=404,
                detail={"code": "unknown_session", "message": f"no session {session_id}"},
            )
        return entry

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(req: SessionCreateRequest | None = None):
        req = req or SessionCreateRequest()
        config = SessionConfig(
            beam_size=req.beam_size or defaults.beam_size,
            expansion_k=req.expansion_k or defaults.expansion_k,
            timestep_rate=req.timestep_rate or defaults.timestep_rate,
            sentence_seconds=req.sentence_seconds or defaults.sentence_seconds,
            max_new_tokens=defaults.max_new_tokens,
            rng_seed=req.rng_seed if req.rng_seed is not None else fixed_rng_seed,
        )
        state = sess.new_session(bundle, classifier, library, config)
        session_id = uuid.uuid4().hex
        sessions[session_id] = _Session(state)
        return {"session_id": session_id}

    @app.post("/api/v1/sessions/{session_id}/sentences")
    def post_sentence(session_id: str, req: SentenceRequest):
        entry = get_session(session_id)
        override = None
        if req.emotion_override is not None:
            try:
                override = (int(req.emotion_override["v"]), int(req.emotion_override["a"]))
            except KeyError:
                raise HTTPException(
                    status_code=422,
                    detail={"code": "bad_override", "message": "emotion_override needs v and a"},
                )
            if override[0] not in (0, 1) or override[1] not in (0, 1):
                raise HTTPException(
                    status_code=422,
                    detail={"code": "bad_override", "message": "v and a must be 0 or 1"},
                )
        with entry.lock:
            record = sess.process_sentence(
                entry.state, req.text, req.duration_seconds, override
            )
            midi = sess.excerpt_midi(entry.state, record)
        return {
            "valence": record.valence,
            "arousal": record.arousal,
            "label": record.label,
            "confidence_v": record.confidence[0],
            "confidence_a": record.confidence[1],
            "reseeded": record.reseeded,
            "short": record.short,
            "excerpt_midi_b64": base64.b64encode(midi).decode("ascii"),
            "excerpt_seconds": record.seconds,
        }

    @app.get("/api/v1/sessions/{session_id}")
    def get_summary(session_id: str):
        entry = get_session(session_id)
        with entry.lock:
            state = entry.state
            return {
                "session_id": session_id,
                "total_seconds": state.total_seconds,
                "sentences": [
                    {
                        "text": r.text,
                        "valence": r.valence,
                        "arousal": r.arousal,
                        "label": r.label,
                        "reseeded": r.reseeded,
                        "short": r.short,
                        "seconds": r.seconds,
                    }
                    for r in state.sentence_log
                ],
            }

    @app.get("/api/v1/sessions/{session_id}/piece")
    def get_piece(session_id: str):
        entry = get_session(session_id)
        with entry.lock:
            midi = sess.export_piece(entry.state)
        return Response(content=midi, media_type="audio/midi")

    @app.delete("/api/v1/sessions/{session_id}")
    def delete_session(session_id: str):
        entry = get_session(session_id)
        with entry.lock:
            log_text = sess.session_log_text(entry.state)
        del sessions[session_id]
        return {"finalized": True, "log": log_text}

    return app
