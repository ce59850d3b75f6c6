"""Strategy search, witness verification, induced plays, ATL fixpoints."""

import pytest

from tlcga.checking import check, extension_of
from tlcga.corpus import example_a, example_b, example_b_gamma_prime, password
from tlcga.formulas import Globally, Next, Prop, Strategic, Until
from tlcga.parser import parse_path_formula, parse_state_formula
from tlcga.strategies import (
    FiniteStrategyProfile,
    InvalidWitnessError,
    Lasso,
    MemoryMode,
    PartialStrategyError,
    POSITIONAL,
    atl_check,
    atl_holds,
    eval_on_lasso,
    find_witness,
    initial_memory,
    memory_sort_key,
    parse_memory_mode,
    play_lasso,
    render_memory,
    update_memory,
    verify_witness,
)


def assignment_of(case, name):
    formula = parse_state_formula(case.formulas[name])
    assert isinstance(formula, Strategic)
    return formula.assignment


class TestMemoryModes:
    def test_parsing(self):
        assert parse_memory_mode("positional") == POSITIONAL
        assert parse_memory_mode("path:3") == MemoryMode("path", 3)
        assert parse_memory_mode("play:2") == MemoryMode("play", 2)
        for bad in ("path", "play:x", "path:0", "total"):
            with pytest.raises(ValueError):
                parse_memory_mode(bad)

    def test_path_memory_keeps_a_state_window(self):
        mode = MemoryMode("path", 2)
        memory = initial_memory("s")
        memory = update_memory(mode, memory, ("a1", "b"), "s1")
        assert memory == ("s", "s1")
        memory = update_memory(mode, memory, ("a", "b"), "s")
        assert memory == ("s1", "s")

    def test_positional_memory_is_the_current_state(self):
        memory = initial_memory("s")
        memory = update_memory(POSITIONAL, memory, ("a1", "b"), "s1")
        assert memory == ("s1",)

    def test_play_memory_keeps_the_profiles(self):
        mode = MemoryMode("play", 2)
        memory = initial_memory("s")
        memory = update_memory(mode, memory, ("a1", "b"), "s1")
        assert memory == ("s", ("a1", "b"), "s1")
        memory = update_memory(mode, memory, ("a", "b"), "s")
        assert memory == ("s1", ("a", "b"), "s")

    def test_rendering(self):
        assert render_memory(("s", ("a1", "b"), "s1")) == "s [a1,b] s1"
        assert render_memory(("s", "s1")) == "s s1"

    def test_sort_key_orders_by_length_then_content(self):
        memories = [("s", "s1"), ("s",), ("s", "s2")]
        ordered = sorted(memories, key=memory_sort_key)
        assert ordered == [("s",), ("s", "s1"), ("s", "s2")]


class TestVerifyWitness:
    def test_the_recorded_two_round_witness(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        mode = MemoryMode("path", 3)
        profile = FiniteStrategyProfile(
            mode,
            {
                "a": {
                    ("s",): "a1",
                    ("s", "s1"): "a",
                    ("s", "s1", "s"): "a2",
                    ("s1", "s", "s2"): "a",
                    ("s", "s2", "s"): "a2",
                    ("s2", "s", "s2"): "a",
                    ("s2", "s", "s1"): "a",
                    ("s1", "s", "s1"): "a",
                    ("s", "s2"): "a",
                },
                "b": {},
            },
        )
        # Agent b has a single action everywhere; fill its table from
        # the closure the verifier walks.
        tables = dict(profile.tables)
        tables["b"] = {memory: "b" for memory in profile.tables["a"]}
        profile = FiniteStrategyProfile(mode, tables)
        ok, failures = verify_witness(case.model, "s", profile, gamma)
        assert ok, failures

    def test_positional_failure_is_reported(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        profile = FiniteStrategyProfile(
            POSITIONAL,
            {
                "a": {("s",): "a1", ("s1",): "a", ("s2",): "a"},
                "b": {("s",): "b", ("s1",): "b", ("s2",): "b"},
            },
        )
        ok, failures = verify_witness(case.model, "s", profile, gamma)
        assert not ok
        assert any("eventuality" in failure for failure in failures)

    def test_partial_tables_are_rejected(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        profile = FiniteStrategyProfile(POSITIONAL, {"a": {("s",): "a1"}, "b": {}})
        with pytest.raises(PartialStrategyError):
            verify_witness(case.model, "s", profile, gamma)

    def test_unavailable_actions_are_rejected(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        profile = FiniteStrategyProfile(
            POSITIONAL,
            {
                "a": {("s",): "zz", ("s1",): "a", ("s2",): "a"},
                "b": {("s",): "b", ("s1",): "b", ("s2",): "b"},
            },
        )
        with pytest.raises(InvalidWitnessError):
            verify_witness(case.model, "s", profile, gamma)


class TestFindWitness:
    def test_no_positional_witness_in_the_circling_model(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        result = find_witness(case.model, "s", gamma, POSITIONAL)
        assert result.witness is None
        assert result.exact is True
        assert result.outcome == "none (exact)"

    def test_path_memory_of_three_wins(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        result = find_witness(case.model, "s", gamma, MemoryMode("path", 3))
        assert result.outcome == "witness"
        ok, failures = verify_witness(case.model, "s", result.witness, gamma)
        assert ok, failures

    def test_play_memory_of_three_wins(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        result = find_witness(case.model, "s", gamma, MemoryMode("play", 3))
        assert result.outcome == "witness"
        ok, failures = verify_witness(case.model, "s", result.witness, gamma)
        assert ok, failures

    def test_state_histories_cannot_tell_deviators_apart(self):
        case = example_b()
        gamma = assignment_of(case, "gammaB")
        result = find_witness(case.model, "s", gamma, MemoryMode("path", 2))
        assert result.outcome == "none (exact)"

    def test_one_round_of_play_memory_wins(self):
        case = example_b()
        gamma = assignment_of(case, "gammaB")
        result = find_witness(case.model, "s", gamma, MemoryMode("play", 2))
        assert result.outcome == "witness"
        ok, failures = verify_witness(case.model, "s", result.witness, gamma)
        assert ok, failures
        # The witness must react to the deviator revealed by the taken
        # profile at s2.
        table = result.witness.tables["1"]
        assert table[("s", ("a1", "a2", "b3"), "s2")] == "ap"
        assert table[("s", ("a1", "b2", "a3"), "s2")] == "aq"

    def test_the_strengthened_assignment_has_a_path_witness(self):
        case = example_b_gamma_prime()
        gamma = assignment_of(case, "gammaBprime")
        result = find_witness(case.model, "s", gamma, MemoryMode("path", 2))
        assert result.outcome == "witness"
        ok, failures = verify_witness(case.model, "s", result.witness, gamma)
        assert ok, failures

    def test_search_is_deterministic(self):
        case = example_b()
        gamma = assignment_of(case, "gammaB")
        first = find_witness(case.model, "s", gamma, MemoryMode("play", 2))
        second = find_witness(case.model, "s", gamma, MemoryMode("play", 2))
        assert first.witness == second.witness
        assert first.explored == second.explored

    def test_step_budget_reports_bounded_absence(self):
        case = example_b()
        gamma = assignment_of(case, "gammaB")
        result = find_witness(case.model, "s", gamma, MemoryMode("path", 2), limit=2)
        assert result.witness is None
        assert result.exact is False
        assert result.outcome == "none (bounded)"

    def test_password_exchange_has_a_positional_witness(self):
        case = password()
        gamma = assignment_of(case, "exchange")
        result = find_witness(case.model, "s00", gamma, POSITIONAL)
        assert result.outcome == "witness"
        assert result.witness.tables["A"][("s00",)] == "send"
        assert result.witness.tables["B"][("s00",)] == "send"

    def test_password_protection_has_no_positional_witness(self):
        case = password()
        gamma = assignment_of(case, "protective")
        result = find_witness(case.model, "s00", gamma, POSITIONAL)
        assert result.outcome == "none (exact)"

    def test_unknown_state_is_rejected(self):
        case = example_a()
        gamma = assignment_of(case, "gammaA")
        with pytest.raises(ValueError, match="unknown state"):
            find_witness(case.model, "nowhere", gamma, POSITIONAL)


class TestOracleAgreesWithChecker:
    def test_witnesses_imply_checker_truth(self):
        queries = [
            (example_a(), "gammaA", "play:3"),
            (example_b(), "gammaB", "play:2"),
            (example_b_gamma_prime(), "gammaBprime", "path:2"),
            (password(), "exchange", "positional"),
        ]
        for case, name, mode_text in queries:
            gamma = assignment_of(case, name)
            result = find_witness(
                case.model, case.start, gamma, parse_memory_mode(mode_text)
            )
            assert result.outcome == "witness", (case.name, name)
            formula = parse_state_formula(case.formulas[name])
            assert check(case.model, case.start, formula) is True


class TestInducedPlay:
    def test_lasso_of_a_positional_profile(self):
        case = example_a()
        profile = FiniteStrategyProfile(
            POSITIONAL,
            {
                "a": {("s",): "a1", ("s1",): "a", ("s2",): "a"},
                "b": {("s",): "b", ("s1",): "b", ("s2",): "b"},
            },
        )
        lasso = play_lasso(case.model, "s", profile)
        assert lasso.states == ("s", "s1")
        assert lasso.cycle_start == 0
        assert lasso.state_at(5) == "s1"

    def test_goal_evaluation_on_the_lasso(self):
        case = example_a()
        profile = FiniteStrategyProfile(
            POSITIONAL,
            {
                "a": {("s",): "a1", ("s1",): "a", ("s2",): "a"},
                "b": {("s",): "b", ("s1",): "b", ("s2",): "b"},
            },
        )
        lasso = play_lasso(case.model, "s", profile)
        assert eval_on_lasso(case.model, lasso, parse_path_formula("(p U q)"))
        assert eval_on_lasso(case.model, lasso, parse_path_formula("X q"))
        assert not eval_on_lasso(case.model, lasso, parse_path_formula("G p"))
        assert eval_on_lasso(case.model, lasso, parse_path_formula("G (p | q)"))
        assert not eval_on_lasso(
            case.model, lasso, parse_path_formula("(true U !(p | q))")
        )

    def test_memoryful_lassos_unroll_before_looping(self):
        case = example_a()
        mode = MemoryMode("path", 3)
        table_a = {
            ("s",): "a1",
            ("s", "s1"): "a",
            ("s", "s1", "s"): "a2",
            ("s1", "s", "s2"): "a",
            ("s", "s2", "s"): "a2",
            ("s2", "s", "s2"): "a",
            ("s2", "s", "s1"): "a",
            ("s1", "s", "s1"): "a",
            ("s", "s2"): "a",
        }
        profile = FiniteStrategyProfile(
            mode,
            {"a": table_a, "b": {memory: "b" for memory in table_a}},
        )
        lasso = play_lasso(case.model, "s", profile)
        assert lasso.states[:4] == ("s", "s1", "s", "s2")
        assert eval_on_lasso(
            case.model, lasso, parse_path_formula("(true U !(p | q))")
        )


class TestAtlFixpoints:
    def test_one_step_force(self):
        model = example_b().model
        assert atl_check(model, ["1"], Next(Prop("p"))) == {"s", "s1", "s2", "s31"}
        assert atl_check(model, [], Next(Prop("p"))) == {"s", "s1", "s31"}

    def test_invariants_match_the_checker(self):
        model = example_b().model
        assert atl_check(model, ["1"], Globally(Prop("p"))) == extension_of(
            model, parse_state_formula("<< {1} -> G p >>")
        )

    def test_eventualities_match_the_checker(self):
        model = password().model
        goal = Until(parse_state_formula("true"), parse_state_formula("H_A & H_B"))
        assert atl_check(model, ["A", "B"], goal) == extension_of(
            model, parse_state_formula("<< {A,B} -> (true U (H_A & H_B)) >>")
        )
        assert atl_holds(model, "s00", ["A", "B"], goal)

    def test_conjunction_goals_are_rejected(self):
        model = example_b().model
        with pytest.raises(ValueError):
            atl_check(model, ["1"], parse_path_formula("X p && G q"))
