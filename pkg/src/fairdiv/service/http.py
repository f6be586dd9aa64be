"""HTTP+JSON session API.

POST /sessions, GET /sessions/{id}, GET /sessions/{id}/queries?agent=A,
POST /sessions/{id}/answers, GET /sessions/{id}/result.
400 bad input, 404 unknown, 409 conflicting resubmission.
"""
from __future__ import annotations

import json
import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from ..division import InvalidAnswer
from .sessions import (
    BadConfig,
    ConflictingAnswer,
    SessionStore,
    StaleQuery,
    UnknownAgent,
    UnknownSession,
)


def create_app(data_dir: str | None = None, max_pieces: int | None = None) -> FastAPI:
    data_dir = data_dir if data_dir is not None else os.environ.get("DATA_DIR")
    if max_pieces is None:
        max_pieces = int(os.environ.get("MAX_PIECES", "8"))
    store = SessionStore(data_dir)
    app = FastAPI(title="fairdiv sessions")
    app.state.store = store

    def bad(reason: str, status: int = 400) -> JSONResponse:
        return JSONResponse({"error": reason}, status_code=status)

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return bad("body must be JSON")
        try:
            session = store.create(payload, max_pieces)
        except BadConfig as exc:
            return bad(str(exc))
        return JSONResponse({"id": session.id, "state": session.state}, status_code=201)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            session = store.get(session_id)
        except UnknownSession:
            return bad("unknown session", 404)
        with session.lock:
            return JSONResponse(session.summary())

    @app.get("/sessions/{session_id}/queries")
    def get_queries(session_id: str, agent: int):
        try:
            session = store.get(session_id)
        except UnknownSession:
            return bad("unknown session", 404)
        with session.lock:
            try:
                queries = session.queries_payload(agent)
            except UnknownAgent as exc:
                return bad(str(exc), 404)
            return JSONResponse({"agent": agent, "queries": queries,
                                 "state": session.state})

    @app.post("/sessions/{session_id}/answers")
    async def post_answer(session_id: str, request: Request):
        try:
            session = store.get(session_id)
        except UnknownSession:
            return bad("unknown session", 404)
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return bad("body must be JSON")
        try:
            agent = int(payload["agent"])
            division = payload["division"]
            preferred = payload["preferred"]
        except (KeyError, TypeError, ValueError):
            return bad("need agent, division, preferred")
        with session.lock:
            try:
                verdict = session.submit(agent, division, preferred)
            except UnknownAgent as exc:
                return bad(str(exc), 404)
            except ConflictingAnswer as exc:
                return bad(str(exc), 409)
            except (StaleQuery, InvalidAnswer, ValueError) as exc:
                return bad(str(exc))
            store.persist(session)
            return JSONResponse({"status": verdict, "state": session.state})

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str):
        try:
            session = store.get(session_id)
        except UnknownSession:
            return bad("unknown session", 404)
        with session.lock:
            if session.state == "failed":
                return JSONResponse({"state": "failed", "failure": session.failure})
            if session.state != "done":
                return JSONResponse({"state": session.state})
            return Response(session.result_json(), media_type="application/json")

    return app
