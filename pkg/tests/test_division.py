from __future__ import annotations

import random
from fractions import Fraction

import pytest

from fairdiv.division import (
    Division,
    InteractiveAgent,
    InvalidAnswer,
    OracleAgent,
    PickTable,
    Query,
    ScriptedAgent,
    ValuationError,
    agent_from_spec,
    cake_engine,
    envy_free_division,
    envy_report,
    preference_cover,
    rent_engine,
    run_scripted,
    secret_engine,
    secret_preference_division,
    validate_answer,
)
from fairdiv.kkm import check_cover

F = Fraction
EPS = F(1, 1000)

UNIFORM = ScriptedAgent.uniform()
EARLY = ScriptedAgent.from_density([[0, F(3, 2)], [F(1, 2), F(1, 2)]])
LATE = ScriptedAgent.from_density([[0, F(1, 2)], [F(1, 2), F(3, 2)]])
THIRDS = [
    ScriptedAgent.from_density([[0, 3], [F(1, 3), 0]]),
    ScriptedAgent.from_density([[0, 0], [F(1, 3), 3], [F(2, 3), 0]]),
    ScriptedAgent.from_density([[0, 0], [F(2, 3), 3]]),
]


class TestAgents:
    def test_density_must_normalize(self):
        with pytest.raises(ValuationError):
            ScriptedAgent.from_density([[0, 2]])

    def test_piece_values(self):
        division = Division((F(1, 4), F(1, 4), F(1, 2)), "cake")
        assert UNIFORM.piece_values(division) == [F(1, 4), F(1, 4), F(1, 2)]
        assert sum(THIRDS[0].piece_values(division)) == 1

    def test_preferred_cake_is_argmax(self):
        division = Division((F(1, 2), F(1, 4), F(1, 4)), "cake")
        assert UNIFORM.preferred(division, "cake") == {0}

    def test_preferred_rent_contains_free_room(self):
        division = Division((F(0), F(1, 2), F(1, 2)), "rent")
        for agent in (UNIFORM, EARLY, LATE):
            assert 0 in agent.preferred(division, "rent")

    def test_agent_from_spec(self):
        assert isinstance(agent_from_spec({"kind": "interactive"}), InteractiveAgent)
        agent = agent_from_spec({"kind": "scripted", "density": [[0, 1]]})
        assert isinstance(agent, ScriptedAgent)


class TestValidateAnswer:
    def test_hungry_rejects_empty_piece(self):
        division = Division((F(0), F(1, 2), F(1, 2)), "cake")
        assert validate_answer("cake", division, {0}) is not None
        assert validate_answer("cake", division, {1}) is None

    def test_free_room_required(self):
        division = Division((F(0), F(1, 2), F(1, 2)), "rent")
        assert validate_answer("rent", division, {1}) is not None
        assert validate_answer("rent", division, {0, 1}) is None

    def test_empty_set_rejected(self):
        division = Division((F(1, 2), F(1, 2)), "cake")
        assert validate_answer("cake", division, set()) is not None


class TestPreferenceCover:
    def test_uniform_cake_d1(self):
        cover = preference_cover(UNIFORM, "cake", 2)
        assert check_cover(cover).ok
        assert cover.membership(0, (F(3, 5), F(2, 5)))
        assert cover.membership(1, (F(1, 2), F(1, 2)))
        assert not cover.membership(1, (F(3, 5), F(2, 5)))

    def test_uniform_rent_d1_is_dual(self):
        cover = preference_cover(UNIFORM, "rent", 2)
        assert cover.dual
        assert check_cover(cover).ok
        # prefer the cheaper room
        assert cover.membership(0, (F(1, 4), F(3, 4)))

    def test_thirds_cover_checks(self):
        for agent in THIRDS:
            assert check_cover(preference_cover(agent, "cake", 3)).ok

    def test_rent_cover_needs_positive_values(self):
        with pytest.raises(ValuationError):
            preference_cover(THIRDS[0], "rent", 3)


class TestCake:
    def test_two_uniform(self):
        division, assignment, trace = envy_free_division([UNIFORM, UNIFORM], EPS)
        assert abs(division.lengths[0] - F(1, 2)) <= F(1, 100)
        assert sorted(assignment.values()) == [0, 1]
        assert envy_report(division, assignment, [UNIFORM] * 2) <= 2 * EPS

    def test_three_uniform_near_barycenter(self):
        agents = [UNIFORM] * 3
        division, assignment, _ = envy_free_division(agents, EPS)
        assert all(abs(c - F(1, 3)) <= F(1, 50) for c in division.lengths)
        assert envy_report(division, assignment, agents) <= 2 * EPS

    def test_thirds_zero_envy(self):
        division, assignment, _ = envy_free_division(THIRDS, EPS)
        assert envy_report(division, assignment, THIRDS) <= 3 * EPS

    def test_deliberate_swap_has_envy(self):
        division = Division((F(1, 3), F(1, 3), F(1, 3)), "cake")
        swapped = {0: 1, 1: 0, 2: 2}
        assert envy_report(division, swapped, THIRDS) == 1

    def test_trace_covers_all_queries(self):
        division, assignment, trace = envy_free_division([UNIFORM, UNIFORM], F(1, 100))
        assert len(trace) > 0
        assert {answer.agent for answer in trace} <= {0, 1}

    def test_determinism(self):
        first = envy_free_division(THIRDS, EPS)
        second = envy_free_division(THIRDS, EPS)
        assert first[0] == second[0] and first[1] == second[1]


class TestRent:
    AGENTS = [UNIFORM, EARLY, LATE]

    def test_three_agents(self):
        division, assignment, _ = envy_free_division(self.AGENTS, EPS, "rent")
        assert sorted(assignment.values()) == [0, 1, 2]
        limit = 2 * EPS / min(min(a.room_values(3)) for a in self.AGENTS[1:])
        assert envy_report(division, assignment, self.AGENTS, "rent") <= limit

    def test_envy_zero_for_picker(self):
        division, assignment, _ = envy_free_division(self.AGENTS, EPS, "rent")
        picker = self.AGENTS[0]
        rooms = picker.room_values(3)
        ratios = [x / v for x, v in zip(division.lengths, rooms)]
        assert ratios[assignment[0]] == min(ratios)


class TestSecret:
    def test_cut_and_choose(self):
        division, table, _ = secret_preference_division([UNIFORM], EPS, "cake")
        assert abs(division.lengths[0] - F(1, 2)) <= F(1, 100)
        assert set(table.rows) == {0, 1}
        assert table.rows[0] == {0: 1} and table.rows[1] == {0: 0}

    def test_two_known_uniform(self):
        division, table, _ = secret_preference_division([UNIFORM, UNIFORM], EPS, "cake")
        assert set(table.rows) == {0, 1, 2}
        for pick, row in table.rows.items():
            assert pick not in row.values()
            for agent_idx, piece in row.items():
                vals = UNIFORM.piece_values(division)
                assert max(vals) - vals[piece] <= 3 * EPS

    def test_secret_rent_rows(self):
        agents = [EARLY, LATE]
        division, table, _ = secret_preference_division(agents, EPS, "rent")
        assert len(table.rows) == 3
        limit = 2 * EPS / min(min(a.room_values(3)) for a in agents)
        for pick, row in table.rows.items():
            for agent_idx, piece in row.items():
                rooms = agents[agent_idx].room_values(3)
                ratios = [x / v for x, v in zip(division.lengths, rooms)]
                assert ratios[piece] - min(ratios) <= limit

    def test_pick_table_shape_validation(self):
        with pytest.raises(ValueError):
            PickTable({0: {0: 0}})


class TestInteractiveEngines:
    def test_cake_engine_queries_interactive(self):
        engine = cake_engine([UNIFORM, InteractiveAgent("h")], F(1, 20))
        batch = next(engine)
        assert all(q.agent == 1 for q in batch)
        # answer in uniform style until done
        result = None
        try:
            while True:
                answers = [UNIFORM.preferred(q.division, "cake") for q in batch]
                batch = engine.send(answers)
        except StopIteration as stop:
            result = stop.value
        assert result.assignment is not None
        assert any(answer.agent == 1 for answer in result.trace)

    def test_invalid_answer_raises(self):
        # the walk starts at the corner division (1, 0), owned by agent 0
        engine = cake_engine([InteractiveAgent("h"), UNIFORM], F(1, 20))
        batch = next(engine)
        q = batch[0]
        empty = [i for i, c in enumerate(q.division.lengths) if c == 0]
        assert empty, "corner query must have an empty piece"
        with pytest.raises(InvalidAnswer):
            engine.send([frozenset({empty[0]})])

    def test_secret_engine_batches_grid(self):
        engine = secret_engine([InteractiveAgent("a"), UNIFORM], F(1, 50), "cake",
                               query_grid=4)
        batch = next(engine)
        assert len(batch) == 15  # C(4+2, 2) grid points
        answers = [UNIFORM.preferred(q.division, "cake") for q in batch]
        try:
            engine.send(answers)
        except StopIteration as stop:
            result = stop.value
        assert result.pick_table is not None

    def test_oracle_agents_rejected_by_library_calls(self):
        with pytest.raises(OracleAgent):
            envy_free_division([UNIFORM, InteractiveAgent("x")], EPS)
        with pytest.raises(OracleAgent):
            envy_report(Division((F(1, 2), F(1, 2)), "cake"), {0: 0, 1: 1},
                        [UNIFORM, InteractiveAgent("x")])
