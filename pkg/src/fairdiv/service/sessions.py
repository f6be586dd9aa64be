"""Interactive division sessions: a deterministic state machine over an
ordered answer log, persisted as newline-delimited JSON events.

Replaying a session's event log reconstructs its state bit for bit: the
engine generators consume answers in log order and nothing else feeds them.
"""
from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from ..division import (
    Division,
    InteractiveAgent,
    InvalidAnswer,
    Query,
    ScriptedAgent,
    agent_from_spec,
    cake_engine,
    rent_engine,
    secret_engine,
    validate_answer,
)
from ..io import division_from_list, division_to_list
from ..kkm.strong import RootNotFound
from ..rationals import frac


class BadConfig(Exception):
    pass


class UnknownSession(KeyError):
    pass


class UnknownAgent(Exception):
    pass


class StaleQuery(Exception):
    pass


class ConflictingAnswer(Exception):
    pass


DEFAULT_MAX_PIECES = 8


@dataclass(frozen=True)
class SessionConfig:
    mode: str
    agents: tuple  # raw agent specs (dicts)
    eps: Fraction
    secret: bool = False
    query_grid: int = 6

    @staticmethod
    def from_request(data: dict, max_pieces: int = DEFAULT_MAX_PIECES) -> "SessionConfig":
        mode = data.get("mode")
        if mode not in ("cake", "rent"):
            raise BadConfig(f"mode must be cake or rent, got {mode!r}")
        agents = data.get("agents")
        if not isinstance(agents, list) or not agents:
            raise BadConfig("agents must be a nonempty list")
        secret = bool(data.get("secret", False))
        pieces = len(agents) + 1 if secret else len(agents)
        if pieces < 2:
            raise BadConfig(f"need at least 2 pieces, got {pieces}")
        if pieces > max_pieces:
            raise BadConfig(f"{pieces} pieces exceed the configured max {max_pieces}")
        try:
            eps = frac(data.get("eps", "1/100"))
        except (ValueError, TypeError) as exc:
            raise BadConfig(f"bad eps: {exc}")
        if eps <= 0:
            raise BadConfig("eps must be positive")
        try:
            for spec in agents:
                agent_from_spec(spec)
        except Exception as exc:
            raise BadConfig(f"bad agent spec: {exc}")
        grid = int(data.get("query_grid", 6))
        if not 2 <= grid <= 24:
            raise BadConfig("query_grid must be in 2..24")
        return SessionConfig(mode, tuple(json.loads(json.dumps(a)) for a in agents),
                             eps, secret, grid)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "agents": list(self.agents),
            "eps": f"{self.eps.numerator}/{self.eps.denominator}",
            "secret": self.secret,
            "query_grid": self.query_grid,
        }


def _canonical(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


@dataclass
class Session:
    """One division process; all mutation goes through submit()/pump()."""

    id: str
    config: SessionConfig
    events: list = field(default_factory=list)
    state: str = "collecting"
    failure: str = ""
    pending: list = field(default_factory=list)  # outstanding Query batch
    result: Optional[dict] = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self._agents = [agent_from_spec(s) for s in self.config.agents]
        self._answered: dict[tuple, frozenset] = {}
        self._batch_answers: dict[tuple, frozenset] = {}
        self._engine = self._make_engine()
        if not self.events:
            self.events.append({"seq": 0, "type": "created",
                                "config": self.config.to_json()})
        self._pump(None)

    def _make_engine(self):
        cfg = self.config
        if cfg.secret:
            return secret_engine(self._agents, cfg.eps, cfg.mode, cfg.query_grid)
        if cfg.mode == "cake":
            return cake_engine(self._agents, cfg.eps)
        return rent_engine(self._agents, cfg.eps, cfg.query_grid)

    # -- engine driving -----------------------------------------------------

    def _pump(self, send_value):
        self.state = "refining"
        try:
            if send_value is None:
                batch = next(self._engine)
            else:
                batch = self._engine.send(send_value)
            self.pending = list(batch)
            self._batch_answers = {}
            self.state = "collecting"
        except StopIteration as stop:
            self._finish(stop.value)
        except (InvalidAnswer, RootNotFound) as exc:
            self.state = "failed"
            self.failure = str(exc)
            self.pending = []

    def _finish(self, engine_result):
        self.state = "done"
        self.pending = []
        result = {
            "division": division_to_list(engine_result.division.lengths),
            "mode": engine_result.division.mode,
            "queries": engine_result.queries_asked,
            "mesh": engine_result.mesh,
        }
        if engine_result.assignment is not None:
            result["assignment"] = {str(k): v for k, v in
                                    sorted(engine_result.assignment.items())}
        if engine_result.pick_table is not None:
            result["pick_table"] = {
                str(pick): {str(a): piece for a, piece in sorted(row.items())}
                for pick, row in sorted(engine_result.pick_table.rows.items())
            }
        self.result = result

    # -- public API ----------------------------------------------------------

    def pending_for(self, agent: int) -> list[Query]:
        return [q for q in self.pending if q.agent == agent
                and (q.agent, q.division.lengths) not in self._batch_answers]

    def queries_payload(self, agent: int) -> list[dict]:
        if not 0 <= agent < len(self._agents):
            raise UnknownAgent(f"agent {agent} out of range")
        return [{"agent": q.agent, "division": division_to_list(q.division.lengths)}
                for q in self.pending_for(agent)]

    def submit(self, agent: int, division_values, preferred) -> str:
        if not 0 <= agent < len(self._agents):
            raise UnknownAgent(f"agent {agent} out of range")
        if not isinstance(self._agents[agent], InteractiveAgent):
            raise UnknownAgent(f"agent {agent} is scripted")
        lengths = division_from_list(division_values)
        preferred = frozenset(int(p) for p in preferred)
        key = (agent, lengths)
        if key in self._answered:
            if self._answered[key] == preferred:
                return "accepted"
            raise ConflictingAnswer(f"agent {agent} already answered differently")
        division = Division(lengths, self.config.mode)
        reason = validate_answer(self.config.mode, division, preferred)
        if reason:
            raise InvalidAnswer(agent, reason)
        if not any(q.agent == agent and q.division.lengths == lengths
                   for q in self.pending):
            raise StaleQuery(f"division not in agent {agent}'s pending set")
        self._record_answer(agent, lengths, preferred)
        return "accepted"

    def _record_answer(self, agent: int, lengths, preferred: frozenset):
        self.events.append({
            "seq": len(self.events),
            "type": "answer",
            "agent": agent,
            "division": division_to_list(lengths),
            "preferred": sorted(preferred),
        })
        self._answered[(agent, lengths)] = preferred
        self._batch_answers[(agent, lengths)] = preferred
        missing = [q for q in self.pending
                   if (q.agent, q.division.lengths) not in self._batch_answers]
        if not missing:
            answers = [self._batch_answers[(q.agent, q.division.lengths)]
                       for q in self.pending]
            self._pump(answers)

    def summary(self) -> dict:
        answered = sum(1 for e in self.events if e["type"] == "answer")
        return {
            "id": self.id,
            "mode": self.config.mode,
            "secret": self.config.secret,
            "state": self.state,
            "failure": self.failure,
            "agents": [
                {"index": i,
                 "kind": "interactive" if isinstance(a, InteractiveAgent) else "scripted",
                 "name": getattr(a, "name", "")}
                for i, a in enumerate(self._agents)
            ],
            "pieces": len(self._agents) + (1 if self.config.secret else 0),
            "pending": {str(i): len(self.pending_for(i)) for i in range(len(self._agents))},
            "answered": answered,
            "events": self.events,
        }

    def result_json(self) -> str:
        if self.result is None:
            raise ValueError("session is not done")
        return _canonical(self.result)


def replay(events: list, session_id: str = "replay") -> Session:
    """Rebuild a session from its event log; byte-identical results."""
    created = events[0]
    assert created["type"] == "created"
    config = SessionConfig.from_request(created["config"], max_pieces=64)
    session = Session(session_id, config, events=[created])
    for event in events[1:]:
        if event["type"] == "answer":
            session._record_answer(event["agent"],
                                   division_from_list(event["division"]),
                                   frozenset(event["preferred"]))
    return session


class SessionStore:
    """Registry plus append-only NDJSON persistence per session."""

    def __init__(self, data_dir: Optional[str] = None):
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self._flushed: dict[str, int] = {}
        self._lock = threading.Lock()

    def create(self, request: dict, max_pieces: int = DEFAULT_MAX_PIECES) -> Session:
        config = SessionConfig.from_request(request, max_pieces)
        session_id = secrets.token_hex(16)
        session = Session(session_id, config)
        with self._lock:
            self.sessions[session_id] = session
        self._flush(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self.sessions:
                return self.sessions[session_id]
        if self.data_dir:
            path = self.data_dir / f"{session_id}.ndjson"
            if path.exists():
                events = [json.loads(line) for line in path.read_text().splitlines() if line]
                session = replay(events, session_id)
                with self._lock:
                    self.sessions[session_id] = session
                    self._flushed[session_id] = len(session.events)
                return session
        raise UnknownSession(session_id)

    def persist(self, session: Session):
        self._flush(session)

    def _flush(self, session: Session):
        if not self.data_dir:
            return
        done = self._flushed.get(session.id, 0)
        if done >= len(session.events):
            return
        path = self.data_dir / f"{session.id}.ndjson"
        with path.open("a") as fh:
            for event in session.events[done:]:
                fh.write(_canonical(event) + "\n")
        self._flushed[session.id] = len(session.events)
