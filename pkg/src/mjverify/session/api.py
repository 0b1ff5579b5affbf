"""HTTP/JSON API over proof sessions.

All mutating responses include the current open-goal set so clients stay
consistent; errors carry a machine-readable code plus a human message.
Long-running macros return a job id that can be polled and cancelled.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from ..frontend import FrontendError
from .manager import Session, SessionError, SessionStore
from .persistence import PersistenceError, RestoreDivergence


class CreateSession(BaseModel):
    source: str
    path: str = "input.mjava"


class StartProof(BaseModel):
    method: str


class SelectGoal(BaseModel):
    goalId: int


class CommandBody(BaseModel):
    name: str
    positional: list[str] = []
    options: dict[str, str] = {}


class RuleBody(BaseModel):
    rule: str
    side: str
    index: int
    path: list[int] = []


class MacroBody(BaseModel):
    kind: str = "FullAuto"
    goalId: Optional[int] = None
    maxRuleApps: Optional[int] = None


class ReplayBody(BaseModel):
    script: str
    goalId: Optional[int] = None


class PruneBody(BaseModel):
    nodeId: int


class LoadBody(BaseModel):
    document: dict


def create_app(webui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="mjverify", version="0.1.0")
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(SessionError)
    async def _session_error(request: Request, exc: SessionError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RestoreDivergence)
    async def _divergence(request: Request, exc: RestoreDivergence):
        return JSONResponse(
            status_code=422,
            content={
                "code": "replay_divergence",
                "message": str(exc),
                "step": exc.step,
                "sourceChanged": exc.source_changed,
            },
        )

    @app.exception_handler(PersistenceError)
    async def _persistence(request: Request, exc: PersistenceError):
        return JSONResponse(
            status_code=422, content={"code": "bad_document", "message": str(exc)}
        )

    @app.post("/sessions")
    def create_session(body: CreateSession):
        try:
            session = store.create(body.source, body.path)
        except FrontendError as e:
            return JSONResponse(
                status_code=422,
                content={
                    "code": "frontend_error",
                    "message": "source has errors",
                    "diagnostics": [str(d) for d in e.diagnostics],
                },
            )
        return {"sessionId": session.id, "methods": session.methods()}

    def _sess(sid: str) -> Session:
        return store.get(sid)

    @app.get("/sessions/{sid}/methods")
    def methods(sid: str):
        return {"methods": _sess(sid).methods()}

    @app.post("/sessions/{sid}/proofs")
    def start_proof(sid: str, body: StartProof):
        s = _sess(sid)
        with s.lock:
            return s.start_proof(body.method)

    @app.get("/sessions/{sid}/tree")
    def tree(sid: str):
        s = _sess(sid)
        with s.lock:
            return s.tree_json()

    @app.post("/sessions/{sid}/select")
    def select(sid: str, body: SelectGoal):
        s = _sess(sid)
        with s.lock:
            return s.select_goal(body.goalId)

    @app.get("/sessions/{sid}/goals/{gid}/view")
    def view(sid: str, gid: int):
        s = _sess(sid)
        with s.lock:
            return s.view_json(gid)

    @app.get("/sessions/{sid}/goals/{gid}/sequent")
    def sequent(sid: str, gid: int):
        s = _sess(sid)
        with s.lock:
            return s.sequent_json(gid)

    @app.get("/sessions/{sid}/goals/{gid}/applicable")
    def applicable(sid: str, gid: int, side: str = "succ", index: int = 0,
                   path: str = ""):
        s = _sess(sid)
        parsed = [int(p) for p in path.split(".") if p != ""]
        with s.lock:
            return s.applicable_json(gid, side, index, parsed)

    @app.post("/sessions/{sid}/goals/{gid}/command")
    def command(sid: str, gid: int, body: CommandBody):
        s = _sess(sid)
        with s.lock:
            return s.command(gid, body.name, body.positional, body.options)

    @app.post("/sessions/{sid}/goals/{gid}/rule")
    def rule(sid: str, gid: int, body: RuleBody):
        s = _sess(sid)
        with s.lock:
            return s.apply_rule_at(gid, body.rule, body.side, body.index, body.path)

    @app.post("/sessions/{sid}/macro")
    def macro(sid: str, body: MacroBody):
        s = _sess(sid)
        with s.lock:
            return s.start_macro(body.goalId, body.kind, body.maxRuleApps)

    @app.get("/sessions/{sid}/jobs/{jid}")
    def job(sid: str, jid: str):
        s = _sess(sid)
        with s.lock:
            return s.job_json(jid)

    @app.post("/sessions/{sid}/jobs/{jid}/cancel")
    def cancel(sid: str, jid: str):
        s = _sess(sid)
        return s.cancel_job(jid)

    @app.post("/sessions/{sid}/replay")
    def replay_script(sid: str, body: ReplayBody):
        s = _sess(sid)
        with s.lock:
            return s.replay_script(body.script, body.goalId)

    @app.get("/sessions/{sid}/record")
    def record_script(sid: str, goalId: int = 0):
        s = _sess(sid)
        with s.lock:
            return s.record_script(goalId)

    @app.post("/sessions/{sid}/prune")
    def prune(sid: str, body: PruneBody):
        s = _sess(sid)
        with s.lock:
            return s.prune(body.nodeId)

    @app.post("/sessions/{sid}/save")
    def save(sid: str):
        s = _sess(sid)
        with s.lock:
            return s.save()

    @app.post("/sessions/{sid}/load")
    def load(sid: str, body: LoadBody):
        s = _sess(sid)
        with s.lock:
            return s.load(body.document)

    if webui_dir is not None and webui_dir.exists():
        from fastapi.staticfiles import StaticFiles

        @app.get("/")
        def index():
            return FileResponse(webui_dir / "index.html")

        app.mount("/ui", StaticFiles(directory=str(webui_dir)), name="ui")

    return app
