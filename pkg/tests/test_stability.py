"""Solution-concept constructors: goal algebra, partitions, stability."""

import pytest

from tlcga.checking import check
from tlcga.formulas import (
    And,
    Coalition,
    GoalAssignment,
    Globally,
    Next,
    Not,
    Prop,
    TRIVIAL_GOAL,
    TRUE,
    Until,
    make_path_and,
    strategic,
)
from tlcga.models import ConcurrentGameModel
from tlcga.stability import (
    GoalNegationError,
    OutcomePartition,
    check_coequilibrium,
    coalitional_ga,
    coequilibrium_ga,
    core_membership_formula,
    deviation_ga,
    has_beneficial_deviation,
    has_unilateral_improvement,
    individual_goals,
    merge_goals,
    nash_ga,
    negate_goal,
    partition_outcomes,
    strong_ga,
)
from tlcga.strategies import (
    FiniteStrategyProfile,
    MemoryMode,
    POSITIONAL,
    verify_witness,
)

P = Prop("p")
Q = Prop("q")
WA = Prop("wa")
WB = Prop("wb")


def one_shot(win_a, win_b):
    """Two agents pick h or t once, then the play parks in a terminal."""
    states = ["s", "hh", "ht", "th", "tt"]
    actions = {"s": {"a": ("h", "t"), "b": ("h", "t")}}
    outcome = {}
    for x in "ht":
        for y in "ht":
            outcome[("s", (x, y))] = x + y
    for term in states[1:]:
        actions[term] = {"a": ("z",), "b": ("z",)}
        outcome[(term, ("z", "z"))] = term
    return ConcurrentGameModel(
        agents=["a", "b"],
        states=states,
        actions=actions,
        outcome=outcome,
        valuation={"wa": win_a, "wb": win_b},
    )


def full_positional(model, **initial):
    """Positional profile: chosen actions at s, the only action elsewhere."""
    tables = {}
    for agent in model.agents:
        table = {}
        for state in model.states:
            acts = model.actions_of(state, agent)
            table[(state,)] = initial[agent] if len(acts) > 1 else acts[0]
        tables[agent] = table
    return FiniteStrategyProfile(POSITIONAL, tables)


def safety_walk():
    """Agent a keeps the play at g (where p holds) or drops it to d.

    q holds everywhere, so b's invariant goal is free; a's holds only
    on the g-loop.
    """
    return ConcurrentGameModel(
        agents=["a", "b"],
        states=["g", "d"],
        actions={
            "g": {"a": ("stay", "go"), "b": ("w",)},
            "d": {"a": ("idle",), "b": ("w",)},
        },
        outcome={
            ("g", ("stay", "w")): "g",
            ("g", ("go", "w")): "d",
            ("d", ("idle", "w")): "d",
        },
        valuation={"p": ["g"], "q": ["g", "d"]},
    )


COORDINATION = GoalAssignment({("a",): Next(WA), ("b",): Next(WB)})


class TestGoalAlgebra:
    def test_negating_a_nexttime_goal_negates_the_body(self):
        assert negate_goal(Next(P)) == Next(Not(P))
        assert negate_goal(Next(Not(P))) == Next(P)

    def test_negating_an_invariant_gives_an_eventuality(self):
        assert negate_goal(Globally(P)) == Until(TRUE, Not(P))

    def test_negating_an_until_is_rejected(self):
        with pytest.raises(GoalNegationError):
            negate_goal(Until(P, Q))

    def test_negating_a_homogeneous_conjunction_merges_first(self):
        goal = make_path_and((Next(P), Next(Q)))
        assert negate_goal(goal) == Next(Not(And(P, Q)))

    def test_negating_a_mixed_conjunction_is_rejected(self):
        with pytest.raises(GoalNegationError):
            negate_goal(make_path_and((Next(P), Globally(Q))))

    def test_merge_distributes_over_like_connectives(self):
        assert merge_goals([]) == TRIVIAL_GOAL
        assert merge_goals([Next(P)]) == Next(P)
        assert merge_goals([Next(P), Next(Q)]) == Next(And(P, Q))
        assert merge_goals([Globally(P), Globally(Q)]) == Globally(And(P, Q))

    def test_mixed_merge_stays_a_conjunction(self):
        merged = merge_goals([Next(P), Globally(Q)])
        assert merged == make_path_and((Next(P), Globally(Q)))

    def test_individual_goals_requires_singletons(self):
        with pytest.raises(ValueError):
            individual_goals(GoalAssignment({("a", "b"): Next(P)}))
        assert individual_goals(COORDINATION) == {"a": Next(WA), "b": Next(WB)}


class TestPartition:
    def test_winners_and_losers_on_the_induced_play(self):
        model = one_shot(win_a=["hh", "tt"], win_b=["hh", "tt"])
        profile = full_positional(model, a="h", b="t")
        part = partition_outcomes(model, "s", profile, COORDINATION)
        assert part.winners == frozenset()
        assert part.losers == frozenset({"a", "b"})
        profile = full_positional(model, a="h", b="h")
        part = partition_outcomes(model, "s", profile, COORDINATION)
        assert part.winners == frozenset({"a", "b"})
        assert part.losing_coalitions == ()

    def test_only_singleton_supports_classify_agents(self):
        model = safety_walk()
        gamma = GoalAssignment({("a", "b"): Globally(P)})
        profile = full_positional(model, a="stay", b="w")
        part = partition_outcomes(model, "g", profile, gamma)
        assert part.winning_coalitions == (Coalition(("a", "b")),)
        assert part.winners == frozenset()
        assert part.losers == frozenset()

    def test_long_term_goals_follow_the_lasso(self):
        model = safety_walk()
        gamma = GoalAssignment({("a",): Globally(P), ("b",): Globally(Q)})
        dropping = full_positional(model, a="go", b="w")
        part = partition_outcomes(model, "g", dropping, gamma)
        assert part.winners == frozenset({"b"})
        assert part.losers == frozenset({"a"})


class TestNashAssignment:
    def test_both_winners_pin_the_play_only(self):
        part = OutcomePartition(
            (Coalition("a"), Coalition("b")),
            (),
            frozenset({"a", "b"}),
            frozenset(),
        )
        nash = nash_ga(COORDINATION, part, ("a", "b"))
        assert nash == GoalAssignment({("a", "b"): Next(And(WA, WB))})

    def test_single_loser_gets_a_blocking_entry(self):
        part = OutcomePartition(
            (Coalition("a"),),
            (Coalition("b"),),
            frozenset({"a"}),
            frozenset({"b"}),
        )
        nash = nash_ga(COORDINATION, part, ("a", "b"))
        assert nash == GoalAssignment(
            {
                ("a", "b"): Next(And(WA, Not(WB))),
                ("a",): Next(Not(WB)),
            }
        )

    def test_two_losers_get_one_blocking_entry_each(self):
        part = OutcomePartition(
            (),
            (Coalition("a"), Coalition("b")),
            frozenset(),
            frozenset({"a", "b"}),
        )
        nash = nash_ga(COORDINATION, part, ("a", "b"))
        assert nash == GoalAssignment(
            {
                ("a", "b"): Next(And(Not(WA), Not(WB))),
                ("b",): Next(Not(WA)),
                ("a",): Next(Not(WB)),
            }
        )

    def test_losing_until_goals_are_rejected(self):
        gamma = GoalAssignment({("a",): Until(P, Q), ("b",): Next(WB)})
        part = OutcomePartition(
            (Coalition("b"),),
            (Coalition("a"),),
            frozenset({"b"}),
            frozenset({"a"}),
        )
        with pytest.raises(GoalNegationError):
            nash_ga(gamma, part, ("a", "b"))


class TestStrongAssignment:
    def test_every_losing_group_is_blocked(self):
        gamma = GoalAssignment(
            {("a",): Next(P), ("b",): Next(Q), ("c",): Next(WA)}
        )
        part = OutcomePartition(
            (Coalition("a"),),
            (Coalition("b"), Coalition("c")),
            frozenset({"a"}),
            frozenset({"b", "c"}),
        )
        strong = strong_ga(gamma, part, ("a", "b", "c"))
        assert strong == GoalAssignment(
            {
                ("a", "b", "c"): Next(P),
                ("a", "c"): Next(Not(Q)),
                ("a", "b"): Next(Not(WA)),
                ("a",): Next(Not(And(Q, WA))),
            }
        )


class TestCoalitionalAssignment:
    def test_losing_coalitions_are_blocked_by_their_complements(self):
        gamma = GoalAssignment(
            {("x", "y"): Globally(P), ("x", "z"): Globally(Q)}
        )
        part = OutcomePartition(
            (Coalition(("x", "y")),),
            (Coalition(("x", "z")),),
            frozenset(),
            frozenset(),
        )
        built = coalitional_ga(gamma, part, ("x", "y", "z"))
        assert built == GoalAssignment(
            {
                ("x", "y", "z"): Globally(P),
                ("y",): Until(TRUE, Not(Q)),
            }
        )

    def test_colliding_entries_are_conjoined(self):
        gamma = GoalAssignment({(): Next(P), ("a", "b"): Next(Q)})
        part = OutcomePartition(
            (Coalition(("a", "b")),),
            (Coalition(()),),
            frozenset(),
            frozenset(),
        )
        built = coalitional_ga(gamma, part, ("a", "b"))
        assert built == GoalAssignment({("a", "b"): Next(And(Q, Not(P)))})


class TestCoequilibrium:
    def test_restriction_keeps_singletons_and_the_grand_coalition(self):
        gamma = GoalAssignment(
            {
                ("a",): Next(P),
                ("b",): Next(Q),
                ("a", "b"): Globally(P),
                ("a", "c"): Next(WA),
                ("a", "b", "c"): Globally(Q),
            }
        )
        kept = coequilibrium_ga(gamma, ("a", "b", "c"))
        assert kept == GoalAssignment(
            {
                ("a",): Next(P),
                ("b",): Next(Q),
                ("a", "b", "c"): Globally(Q),
            }
        )

    def test_pair_entries_survive_only_as_the_grand_coalition(self):
        gamma = GoalAssignment({("a", "b"): Globally(P)})
        assert coequilibrium_ga(gamma, ("a", "b")) == gamma
        assert coequilibrium_ga(gamma, ("a", "b", "c")) == GoalAssignment()

    def test_checking_the_safety_walk(self):
        model = safety_walk()
        gamma = GoalAssignment({("a",): Globally(P), ("b",): Globally(Q)})
        assert check_coequilibrium(model, "g", gamma)
        assert not check_coequilibrium(model, "d", gamma)


class TestCore:
    def test_membership_formula_lists_every_losing_group(self):
        gamma = COORDINATION
        phi = core_membership_formula(gamma, ["a", "b"])
        solo_a = Not(strategic(GoalAssignment({("a",): Next(WA)})))
        solo_b = Not(strategic(GoalAssignment({("b",): Next(WB)})))
        pair = Not(
            strategic(GoalAssignment({("a", "b"): Next(And(WA, WB))}))
        )
        assert phi == And(And(solo_a, solo_b), pair)

    def test_no_losers_means_membership_is_trivial(self):
        assert core_membership_formula(COORDINATION, []) == TRUE

    def test_matching_pennies_losers_cannot_force_a_win(self):
        model = one_shot(win_a=["hh", "tt"], win_b=["ht", "th"])
        gamma = COORDINATION
        assert not has_beneficial_deviation(model, "s", Coalition("a"), gamma)
        assert check(model, "s", core_membership_formula(gamma, ["a"]))

    def test_a_forcing_loser_breaks_membership(self):
        model = one_shot(win_a=["hh", "ht"], win_b=[])
        gamma = COORDINATION
        assert has_beneficial_deviation(model, "s", Coalition("a"), gamma)
        assert not check(model, "s", core_membership_formula(gamma, ["a"]))

    def test_deviation_goal_requires_individual_goals(self):
        with pytest.raises(ValueError):
            deviation_ga(COORDINATION, Coalition(("a", "c")))


class TestUnilateralImprovement:
    def test_matching_pennies_has_no_equilibrium(self):
        model = one_shot(win_a=["hh", "tt"], win_b=["ht", "th"])
        for x in "ht":
            for y in "ht":
                profile = full_positional(model, a=x, b=y)
                improver = has_unilateral_improvement(
                    model, "s", profile, COORDINATION
                )
                assert improver in ("a", "b")

    def test_coordination_is_stable_exactly_when_matched(self):
        model = one_shot(win_a=["hh", "tt"], win_b=["hh", "tt"])
        for x in "ht":
            for y in "ht":
                profile = full_positional(model, a=x, b=y)
                improver = has_unilateral_improvement(
                    model, "s", profile, COORDINATION
                )
                assert (improver is None) == (x == y)

    def test_positional_swaps_cover_invariant_goals(self):
        model = safety_walk()
        gamma = GoalAssignment({("a",): Globally(P), ("b",): Globally(Q)})
        dropping = full_positional(model, a="go", b="w")
        assert has_unilateral_improvement(model, "g", dropping, gamma) == "a"
        staying = full_positional(model, a="stay", b="w")
        assert has_unilateral_improvement(model, "g", staying, gamma) is None

    def test_long_term_deviations_need_a_positional_profile(self):
        model = safety_walk()
        gamma = GoalAssignment({("a",): Globally(P), ("b",): Globally(Q)})
        mode = MemoryMode("path", 2)
        tables = {
            "a": {("g",): "go", ("g", "d"): "idle", ("d", "d"): "idle"},
            "b": {("g",): "w", ("g", "d"): "w", ("d", "d"): "w"},
        }
        profile = FiniteStrategyProfile(mode, tables)
        with pytest.raises(ValueError):
            has_unilateral_improvement(model, "g", profile, gamma)


class TestCharacterizationCoherence:
    """The derived assignment agrees with the direct deviation search."""

    def sweep(self, model, gamma):
        seen = {}
        for x in "ht":
            for y in "ht":
                profile = full_positional(model, a=x, b=y)
                part = partition_outcomes(model, "s", profile, gamma)
                nash = nash_ga(gamma, part, model.agents)
                stable = (
                    has_unilateral_improvement(model, "s", profile, gamma)
                    is None
                )
                ok, failures = verify_witness(model, "s", profile, nash)
                assert ok == stable, failures
                seen.setdefault(part, False)
                seen[part] = seen[part] or stable
        for part, stable in seen.items():
            nash = nash_ga(gamma, part, model.agents)
            assert check(model, "s", strategic(nash)) == stable

    def test_matching_pennies(self):
        self.sweep(
            one_shot(win_a=["hh", "tt"], win_b=["ht", "th"]), COORDINATION
        )

    def test_coordination(self):
        self.sweep(
            one_shot(win_a=["hh", "tt"], win_b=["hh", "tt"]), COORDINATION
        )

    def test_dictator(self):
        self.sweep(one_shot(win_a=["hh", "ht"], win_b=[]), COORDINATION)

    def test_invariant_goals_on_the_safety_walk(self):
        model = safety_walk()
        gamma = GoalAssignment({("a",): Globally(P), ("b",): Globally(Q)})
        for choice in ("stay", "go"):
            profile = full_positional(model, a=choice, b="w")
            part = partition_outcomes(model, "g", profile, gamma)
            nash = nash_ga(gamma, part, model.agents)
            stable = (
                has_unilateral_improvement(model, "g", profile, gamma) is None
            )
            assert stable == (choice == "stay")
            assert check(model, "g", strategic(nash)) == stable