"""HTTP facade for live round-by-round advising.

Sessions are in-memory: POST an instance document to open one, feed real
match outcomes as they happen, and read back the residual bracket, its
exact optimal value and the recommended strategy profile.  All rationals
travel as canonical strings; trees use the instance-file node grammar.
Responses are pure functions of (instance, outcome history).
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .engine import (
    IncompleteRound,
    RoundState,
    UnknownWinner,
    advance_state,
    current_pairings,
    initial_state,
)
from .model import (
    Instance,
    InstanceSyntaxError,
    ValidationError,
    _tree_to_json,
    format_rational,
    parse_instance,
)
from .solver import best_response_for, optimal_value_for


@dataclass
class Session:
    id: str
    instance: Instance
    state: RoundState
    history: list[list[str]] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _state_document(session: Session) -> dict:
    inst = session.instance
    state = session.state
    names = [p.name for p in inst.players]
    pairings = [
        [names[g.player_a], names[g.player_b]] for g in current_pairings(state.tree)
    ]
    value = optimal_value_for(
        state.tree, inst.matrix, inst.coalition, inst.favorite
    ).t_opt
    return {
        "id": session.id,
        "round": state.round_number,
        "finished": state.finished,
        "winner": names[state.winner] if state.finished else None,
        "favorite": names[inst.favorite],
        "coalition": sorted(names[c] for c in inst.coalition),
        "tree": _tree_to_json(state.tree, names),
        "pairings": pairings,
        "eliminated": sorted(names[p] for p in state.eliminated),
        "t_opt": format_rational(value),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="cupfix advisor")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session | None:
        with registry_lock:
            return sessions.get(session_id)

    @app.post("/api/instances", status_code=201)
    async def create_session(request: Request):
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            instance = parse_instance(text)
        except InstanceSyntaxError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        except ValidationError as exc:
            return JSONResponse(
                status_code=400,
                content={
                    "detail": "invalid instance",
                    "report": [
                        {"code": v.code, "detail": v.detail} for v in exc.report
                    ],
                },
            )
        session = Session(
            id=uuid.uuid4().hex[:12],
            instance=instance,
            state=initial_state(instance.tree),
        )
        with registry_lock:
            sessions[session.id] = session
        return {"id": session.id}

    @app.get("/api/instances/{session_id}")
    def get_state(session_id: str):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        return _state_document(session)

    @app.get("/api/instances/{session_id}/best-response")
    def get_best_response(session_id: str):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        if session.state.finished:
            return JSONResponse(status_code=409, content={"detail": "finished"})
        inst = session.instance
        response = best_response_for(
            session.state.tree, inst.matrix, inst.coalition, inst.favorite
        )
        return {
            "profile": {
                inst.name_of(p): action.value for p, action in response.profile.actions
            },
            "value": format_rational(response.value),
        }

    @app.post("/api/instances/{session_id}/outcomes")
    async def post_outcomes(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        body = await request.json()
        winners = body.get("winners") if isinstance(body, dict) else None
        if not isinstance(winners, list) or not all(
            isinstance(w, str) for w in winners
        ):
            return JSONResponse(
                status_code=422, content={"detail": "body must be {'winners': [name, ...]}"}
            )
        inst = session.instance
        with session.lock:
            games = current_pairings(session.state.tree)
            if len(winners) != len(games):
                return JSONResponse(
                    status_code=422,
                    content={
                        "detail": f"IncompleteRound: expected {len(games)} winners, "
                        f"got {len(winners)}"
                    },
                )
            try:
                ids = {i: inst.id_of(name) for i, name in enumerate(winners)}
            except KeyError as exc:
                return JSONResponse(
                    status_code=422,
                    content={"detail": f"UnknownWinner: unknown player {exc}"},
                )
            try:
                session.state = advance_state(session.state, ids)
            except (UnknownWinner, IncompleteRound) as exc:
                return JSONResponse(
                    status_code=422,
                    content={"detail": f"{type(exc).__name__}: {exc}"},
                )
            session.history.append(list(winners))
        return _state_document(session)

    @app.delete("/api/instances/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with registry_lock:
            if session_id not in sessions:
                return JSONResponse(
                    status_code=404, content={"detail": "unknown session"}
                )
            del sessions[session_id]

    return app
