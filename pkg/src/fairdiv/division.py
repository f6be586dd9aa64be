"""Envy-free cake and rent division over preference oracles.

Divisions of the unit cake into d+1 pieces (or of unit rent over d+1 rooms)
live on the d-simplex.  Scripted agents answer from a step-function density:
argmax piece value for cake, best price-to-value ratio for rent; both rules
satisfy the hungry / free-room axioms by construction.  Interactive agents
answer through queries surfaced by the engine generators; every consumed
answer lands in the trace.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable, Optional, Sequence

from .kkm.covers import Cell, Cover, partition_by_functions
from .kkm.grid import KuhnWalk
from .kkm.strong import RootNotFound, strong_colorful_kkm
from .rationals import frac


class InvalidAnswer(Exception):
    def __init__(self, agent, reason: str):
        self.agent = agent
        self.reason = reason
        super().__init__(f"agent {agent}: {reason}")


class OracleAgent(Exception):
    """Interactive agents cannot be scored by envy_report."""


class ValuationError(Exception):
    pass


@dataclass(frozen=True)
class Division:
    lengths: tuple[Fraction, ...]
    mode: str = "cake"

    def __post_init__(self):
        if any(c < 0 for c in self.lengths) or sum(self.lengths) != 1:
            raise ValueError(f"not a simplex point: {self.lengths}")
        if self.mode not in ("cake", "rent"):
            raise ValueError(f"unknown mode {self.mode}")

    @property
    def pieces(self) -> int:
        return len(self.lengths)

    def support(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.lengths) if c > 0)

    def cuts(self) -> list[Fraction]:
        out = []
        acc = Fraction(0)
        for c in self.lengths[:-1]:
            acc += c
            out.append(acc)
        return out


@dataclass(frozen=True)
class PreferenceAnswer:
    agent: int
    division: Division
    preferred: frozenset


@dataclass(frozen=True)
class PickTable:
    """For each possible first pick i, an envy-free assignment of the known
    agents onto the remaining pieces."""

    rows: dict  # pick i -> {agent index -> piece}

    def __post_init__(self):
        for pick, row in self.rows.items():
            if pick in row.values():
                raise ValueError(f"row {pick} assigns the picked piece")


def validate_answer(mode: str, division: Division, preferred: Iterable[int]) -> Optional[str]:
    """Hungry / free-room admissibility; None when the answer is acceptable."""
    preferred = set(preferred)
    if not preferred:
        return "empty preference set"
    if not preferred <= set(range(division.pieces)):
        return "preference outside piece range"
    if mode == "cake":
        nonempty = division.support()
        if nonempty and not preferred <= nonempty:
            return "hungry condition: an empty piece was preferred while a nonempty one exists"
    else:
        free = {i for i, c in enumerate(division.lengths) if c == 0}
        if free and not (preferred & free):
            return "free-room condition: no free room among the preferred"
    return None


# ---------------------------------------------------------------------------
# Agent profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScriptedAgent:
    """Step-function density on [0,1] with unit mass; exact arithmetic."""

    breakpoints: tuple[Fraction, ...]  # starts of constant segments, first is 0
    values: tuple[Fraction, ...]

    @staticmethod
    def from_density(pairs: Sequence[Sequence]) -> "ScriptedAgent":
        bps = [frac(p[0]) for p in pairs]
        vals = [frac(p[1]) for p in pairs]
        if not bps or bps[0] != 0 or bps != sorted(bps) or len(set(bps)) != len(bps):
            raise ValuationError(f"breakpoints must start at 0 and increase: {bps}")
        if any(v < 0 for v in vals):
            raise ValuationError("density must be nonnegative")
        agent = ScriptedAgent(tuple(bps), tuple(vals))
        if agent.prefix(Fraction(1)) != 1:
            raise ValuationError(f"total mass {agent.prefix(Fraction(1))} != 1")
        return agent

    @staticmethod
    def uniform() -> "ScriptedAgent":
        return ScriptedAgent((Fraction(0),), (Fraction(1),))

    def prefix(self, t: Fraction) -> Fraction:
        """Integral of the density over [0, t]."""
        total = Fraction(0)
        bounds = list(self.breakpoints) + [Fraction(1)]
        for lo, hi, v in zip(bounds, bounds[1:], self.values):
            if t <= lo:
                break
            total += v * (min(t, hi) - lo)
        return total

    @property
    def max_density(self) -> Fraction:
        return max(self.values)

    def piece_values(self, division: Division) -> list[Fraction]:
        cuts = [Fraction(0)] + division.cuts() + [Fraction(1)]
        return [self.prefix(b) - self.prefix(a) for a, b in zip(cuts, cuts[1:])]

    def room_values(self, pieces: int) -> list[Fraction]:
        return [self.prefix(Fraction(k + 1, pieces)) - self.prefix(Fraction(k, pieces))
                for k in range(pieces)]

    def preferred(self, division: Division, mode: str) -> frozenset:
        if mode == "cake":
            vals = self.piece_values(division)
            top = max(vals)
            return frozenset(i for i, v in enumerate(vals) if v == top)
        rooms = self.room_values(division.pieces)
        if any(v <= 0 for v in rooms):
            raise ValuationError("rent preferences need positive value for every room")
        ratios = [x / v for x, v in zip(division.lengths, rooms)]
        low = min(ratios)
        return frozenset(i for i, r in enumerate(ratios) if r == low)


@dataclass(frozen=True)
class InteractiveAgent:
    name: str = ""


AgentProfile = ScriptedAgent | InteractiveAgent


def agent_from_spec(spec: dict) -> AgentProfile:
    kind = spec.get("kind")
    if kind == "scripted":
        return ScriptedAgent.from_density(spec["density"])
    if kind == "interactive":
        return InteractiveAgent(spec.get("name", ""))
    raise ValueError(f"unknown agent kind {kind!r}")


def preference_cover(agent: ScriptedAgent, mode: str, pieces: int) -> Cover:
    """Partition-backed cover of the division simplex labeled by the agent's
    preferred pieces; exact, with the dual flag set for rent."""
    d = pieces - 1
    if mode == "cake":
        def scores(x):
            return _piece_values_at(agent, x)

        breakfns = []
        for i in range(d):
            for bp in agent.breakpoints[1:]:
                breakfns.append(lambda x, i=i, bp=bp: sum(x[:i + 1], Fraction(0)) - bp)
        cells = partition_by_functions(d, scores, breakfns)

        def evaluator(i, x):
            vals = _piece_values_at(agent, x)
            return vals[i] == max(vals)

        evaluator.exact = True
        return Cover(d, tuple(range(pieces)), dual=False, cells=cells, evaluator=evaluator)

    rooms = agent.room_values(pieces)
    if any(v <= 0 for v in rooms):
        raise ValuationError("rent cover needs positive value for every room")

    def scores(x):
        return [-x[k] / rooms[k] for k in range(pieces)]

    cells = partition_by_functions(d, scores)

    def evaluator(i, x):
        ratios = [x[k] / rooms[k] for k in range(pieces)]
        return ratios[i] == min(ratios)

    evaluator.exact = True
    return Cover(d, tuple(range(pieces)), dual=True, cells=cells, evaluator=evaluator)


def _piece_values_at(agent: ScriptedAgent, x: Sequence[Fraction]) -> list[Fraction]:
    cuts = [Fraction(0)]
    for c in x[:-1]:
        cuts.append(cuts[-1] + c)
    cuts.append(Fraction(1))
    return [agent.prefix(b) - agent.prefix(a) for a, b in zip(cuts, cuts[1:])]


# ---------------------------------------------------------------------------
# Division engines (generators yielding query batches for interactive agents)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Query:
    agent: int
    division: Division


@dataclass
class EngineResult:
    division: Division
    assignment: Optional[dict] = None
    pick_table: Optional[PickTable] = None
    trace: list = field(default_factory=list)
    queries_asked: int = 0
    mesh: int = 0
    residual: float = 0.0


class _NeedAnswer(Exception):
    def __init__(self, agent: int, division: Division):
        self.agent = agent
        self.division = division


def cake_engine(agents: Sequence[AgentProfile], eps, budget: int = 5_000_000):
    """Generator: envy-free cake division by a chromatic Sperner walk.

    Vertex ownership interleaves the agents over the grid so every facet
    queries each agent once; a fully labeled facet hands every owner a piece
    they preferred within the facet's diameter.
    """
    d = len(agents) - 1
    eps = Fraction(eps)
    m = _resolution(d, eps)
    answers: dict[tuple, frozenset] = {}
    trace: list[PreferenceAnswer] = []

    def owner(a) -> int:
        return sum(i * c for i, c in enumerate(a)) % (d + 1)

    def preferred_at(a) -> frozenset:
        if a in answers:
            return answers[a]
        division = Division(tuple(Fraction(c, m) for c in a), "cake")
        who = owner(a)
        agent = agents[who]
        if isinstance(agent, ScriptedAgent):
            pref = agent.preferred(division, "cake")
        else:
            raise _NeedAnswer(who, division)
        answers[a] = pref
        trace.append(PreferenceAnswer(who, division, pref))
        return pref

    def label(a) -> int:
        return min(preferred_at(a) & frozenset(i for i, c in enumerate(a) if c > 0))

    while True:
        try:
            facet = KuhnWalk(d, m, label, budget).run()
            break
        except _NeedAnswer as need:
            received = yield [Query(need.agent, need.division)]
            pref = frozenset(received[0])
            reason = validate_answer("cake", need.division, pref)
            if reason:
                raise InvalidAnswer(need.agent, reason)
            key = tuple(int(c * m) for c in need.division.lengths)
            answers[key] = pref
            trace.append(PreferenceAnswer(need.agent, need.division, pref))

    assignment = {}
    points = []
    for a in facet:
        division = Division(tuple(Fraction(c, m) for c in a), "cake")
        points.append(division.lengths)
        assignment[owner(a)] = label(a)
    x = tuple(sum(col, Fraction(0)) / len(points) for col in zip(*points))
    return EngineResult(Division(x, "cake"), assignment=assignment,
                        trace=trace, queries_asked=len(trace), mesh=m)


def _resolution(d: int, eps: Fraction) -> int:
    m = Fraction(d, 1) / eps
    return max(1, int(m) + (0 if m.denominator == 1 else 1))


def _kuhn_cells(d: int, g: int) -> list[tuple]:
    """Materialized Kuhn facets of the resolution-g grid (vertex tuples)."""
    from .kkm.grid import facet_vertices, _valid_vertex

    cells = []
    for base in _compositions(g, d + 1):
        for perm in itertools.permutations(range(1, d + 1)):
            verts = facet_vertices((base, perm))
            if all(_valid_vertex(v) for v in verts):
                cells.append(tuple(verts))
    return cells


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def secret_engine(known_agents: Sequence[AgentProfile], eps, mode: str,
                  query_grid: int = 6):
    """Generator: division point plus pick table via the strong colorful
    machinery; scripted agents contribute their exact preference covers,
    interactive ones an empirical cover sampled on a query grid."""
    d = len(known_agents)
    pieces = d + 1
    eps = Fraction(eps)
    trace: list[PreferenceAnswer] = []
    covers = []
    for idx, agent in enumerate(known_agents):
        if isinstance(agent, ScriptedAgent):
            covers.append(preference_cover(agent, mode, pieces))
            continue
        grid_points = [tuple(Fraction(c, query_grid) for c in comp)
                       for comp in _compositions(query_grid, pieces)]
        batch = [Query(idx, Division(p, mode)) for p in grid_points]
        received = yield batch
        answers = {}
        for query, pref in zip(batch, received):
            pref = frozenset(pref)
            reason = validate_answer(mode, query.division, pref)
            if reason:
                raise InvalidAnswer(idx, reason)
            answers[query.division.lengths] = pref
            trace.append(PreferenceAnswer(idx, query.division, pref))
        cells = []
        for verts in _kuhn_cells(d, query_grid):
            pts = tuple(tuple(Fraction(c, query_grid) for c in v) for v in verts)
            labels = frozenset(itertools.chain.from_iterable(answers[p] for p in pts))
            cells.append(Cell(pts, labels))
        covers.append(Cover(d, tuple(range(pieces)), dual=(mode == "rent"), cells=cells))
    result = strong_colorful_kkm(covers, eps, dual=(mode == "rent"))
    division = Division(result.x, mode)
    rows = {pick: {j - 1: piece for j, piece in table.items()}
            for pick, table in result.pick_tables.items()}
    return EngineResult(division, pick_table=PickTable(rows), trace=trace,
                        queries_asked=len(trace), mesh=query_grid,
                        residual=result.residual)


def rent_engine(agents: Sequence[AgentProfile], eps, query_grid: int = 6):
    """Generator: full rent division; the trailing d agents define the dual
    covers and the first agent picks their favorite room at the solved
    prices, completing the assignment from the matching pick-table row."""
    result = yield from secret_engine(list(agents[1:]), eps, "rent", query_grid)
    division = result.division
    picker = agents[0]
    if isinstance(picker, ScriptedAgent):
        pref = picker.preferred(division, "rent")
    else:
        received = yield [Query(0, division)]
        pref = frozenset(received[0])
        reason = validate_answer("rent", division, pref)
        if reason:
            raise InvalidAnswer(0, reason)
    result.trace.append(PreferenceAnswer(0, division, pref))
    pick = min(pref)
    assignment = {0: pick}
    for agent_idx, piece in result.pick_table.rows[pick].items():
        assignment[agent_idx + 1] = piece
    return EngineResult(division, assignment=assignment, pick_table=result.pick_table,
                        trace=result.trace, queries_asked=len(result.trace),
                        mesh=result.mesh, residual=result.residual)


def run_scripted(generator):
    """Drive an engine whose agents are all scripted."""
    try:
        next(generator)
    except StopIteration as stop:
        return stop.value
    raise RuntimeError("engine asked a query but every agent is scripted")


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def envy_free_division(agents: Sequence[AgentProfile], eps, mode: str = "cake"):
    """Division plus assignment making every agent's piece preferred within
    eps; agents must be scripted (sessions drive interactive ones)."""
    if not all(isinstance(a, ScriptedAgent) for a in agents):
        raise OracleAgent("library entry point needs scripted agents")
    if mode == "cake":
        result = run_scripted(cake_engine(agents, eps))
    else:
        result = run_scripted(rent_engine(agents, eps))
    return result.division, result.assignment, result.trace


def secret_preference_division(known_agents: Sequence[AgentProfile], eps,
                               mode: str = "cake"):
    """Division plus a pick table covering every choice of the secret agent."""
    if not all(isinstance(a, ScriptedAgent) for a in known_agents):
        raise OracleAgent("library entry point needs scripted agents")
    result = run_scripted(secret_engine(list(known_agents), eps, mode))
    return result.division, result.pick_table, result.trace


def envy_report(division: Division, assignment: dict,
                agents: Sequence[AgentProfile], mode: str = "cake") -> Fraction:
    """Max envy over agents; zero means envy-free.

    Cake: best piece value minus assigned piece value.  Rent: price-to-value
    ratio of the assigned room minus the best available ratio (the miserly
    preference the solver optimizes; quasi-linear regret is incompatible
    with the free-room axiom).
    """
    worst = Fraction(0)
    for agent_idx, piece in assignment.items():
        agent = agents[agent_idx]
        if not isinstance(agent, ScriptedAgent):
            raise OracleAgent(f"agent {agent_idx} is interactive")
        if mode == "cake":
            vals = agent.piece_values(division)
            worst = max(worst, max(vals) - vals[piece])
        else:
            rooms = agent.room_values(division.pieces)
            ratios = [x / v for x, v in zip(division.lengths, rooms)]
            worst = max(worst, ratios[piece] - min(ratios))
    return worst
