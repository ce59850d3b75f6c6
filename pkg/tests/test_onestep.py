"""One-step satisfiability: redistributions, the decision, witnesses."""

import pytest

from tlcga.formulas import Coalition, GoalAssignment
from tlcga.onestep import (
    GameFormAction,
    OneStepGameForm,
    OneStepSequent,
    OneStepShapeError,
    Redistribution,
    SatConstraint,
    brute_force_satisfiable,
    forced,
    forced_against,
    formula_satisfiable,
    redistributions,
    sequent_from_formulas,
    sequent_satisfiable,
    validate_game_form,
    witness_game_form,
)
from tlcga.parser import parse_state_formula


def phi(text):
    return parse_state_formula(text)


def mixed_sequent():
    """Two solo positives plus a veto on blocking r, over a and b."""
    return sequent_from_formulas(
        [
            phi("<< {a} -> X p >>"),
            phi("<< {b} -> X q >>"),
            phi("!<< {b} -> X !r >>"),
        ],
        variables=["p", "q", "r"],
    )


def constraint(*members):
    return SatConstraint.over(["p", "q", "r"], members)


class TestSequentConstruction:
    def test_reads_polarities_and_universes(self):
        sequent = mixed_sequent()
        assert sequent.agents == ("a", "b")
        assert sequent.variables == ("p", "q", "r")
        assert len(sequent.positives) == 2
        assert len(sequent.negatives) == 1

    def test_duplicates_collapse(self):
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>"), phi("<< {a} -> X p >>")]
        )
        assert len(sequent.positives) == 1

    def test_wrong_polarity_is_rejected(self):
        with pytest.raises(OneStepShapeError, match="X !p"):
            sequent_from_formulas([phi("!<< {a} -> X p >>")])
        with pytest.raises(OneStepShapeError, match="X p"):
            sequent_from_formulas([phi("<< {a} -> X !p >>")])

    def test_long_term_goal_is_rejected(self):
        with pytest.raises(OneStepShapeError):
            sequent_from_formulas([phi("<< {a} -> G p >>")])

    def test_empty_coalition_is_rejected(self):
        with pytest.raises(OneStepShapeError, match="non-empty"):
            sequent_from_formulas([phi("<< {} -> X p >>")])

    def test_undeclared_variable_is_rejected(self):
        with pytest.raises(ValueError, match="undeclared"):
            sequent_from_formulas([phi("<< {a} -> X p >>")], variables=["q"])

    def test_stray_agent_is_rejected(self):
        with pytest.raises(ValueError, match="agent set"):
            sequent_from_formulas([phi("<< {a,b} -> X p >>")], agents=["a"])


class TestRedistributions:
    def test_single_agent_count_matches_the_map_formula(self):
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>"), phi("<< {a} -> X q >>")]
        )
        found = redistributions(sequent)
        assert len(found) == (2 + 1) ** 2
        assert len(set(found)) == len(found)

    def test_two_agents_skip_overlapping_maps(self):
        sequent = sequent_from_formulas([phi("<< {a,b} -> X p >>")])
        found = redistributions(sequent)
        assert len(found) == 10
        assert len(found) < (1 + 1) ** 4
        for redistribution in found:
            coalitions = [pair[0] for pair in redistribution.pairs]
            for i in range(len(coalitions)):
                for j in range(i + 1, len(coalitions)):
                    assert not coalitions[i] & coalitions[j]

    def test_forced_collects_goals_inside_backing_cells(self):
        sequent = mixed_sequent()
        split = Redistribution(
            ((Coalition(["a"]), 0), (Coalition(["b"]), 1))
        )
        assert forced(sequent, split) == {"p", "q"}
        assert forced(sequent, Redistribution(())) == frozenset()

    def test_forced_against_adds_the_blocked_variable(self):
        sequent = mixed_sequent()
        split = Redistribution(
            ((Coalition(["a"]), 0), (Coalition(["b"]), 1))
        )
        negative = sequent.negatives[0]
        assert forced_against(
            sequent, split, negative, Coalition(["b"])
        ) == {"q", "r"}

    def test_forced_against_requires_a_supported_coalition(self):
        sequent = mixed_sequent()
        with pytest.raises(ValueError, match="no goal"):
            forced_against(
                sequent,
                Redistribution(()),
                sequent.negatives[0],
                Coalition(["a"]),
            )


class TestSequentSatisfiable:
    def test_satisfiable_family(self):
        verdict = sequent_satisfiable(
            mixed_sequent(), constraint(["p", "q"], ["q", "r"])
        )
        assert verdict.satisfiable
        assert verdict.certificate is None

    def test_unsatisfiable_family_names_the_blocked_need(self):
        verdict = sequent_satisfiable(
            mixed_sequent(), constraint(["p", "q"], ["p", "r"])
        )
        assert not verdict.satisfiable
        certificate = verdict.certificate
        assert certificate.negative == mixed_sequent().negatives[0]
        needs = {need for _, need in certificate.required}
        assert frozenset({"q", "r"}) in needs
        assert "q,r" in str(certificate)

    def test_empty_sequent_with_empty_member(self):
        sequent = OneStepSequent(("a",), (), (), ())
        family = SatConstraint.over([], [[]])
        assert sequent_satisfiable(sequent, family).satisfiable

    def test_empty_family_rejects_even_the_empty_sequent(self):
        sequent = OneStepSequent(("a",), (), (), ())
        family = SatConstraint((), ())
        verdict = sequent_satisfiable(sequent, family)
        assert not verdict.satisfiable
        assert verdict.certificate.negative is None

    def test_trivial_negative_is_unsatisfiable(self):
        sequent = OneStepSequent(("a",), ("p",), (), (GoalAssignment(),))
        family = SatConstraint.over(["p"], [["p"]])
        assert not sequent_satisfiable(sequent, family).satisfiable

    def test_universe_mismatch(self):
        with pytest.raises(ValueError, match="differ"):
            sequent_satisfiable(
                mixed_sequent(), SatConstraint.over(["p", "q"], [["p"]])
            )


class TestFormulaSatisfiable:
    def test_disjunct_can_carry_the_day(self):
        formula = phi("<< {a} -> X p >> | << {a} -> X q >>")
        family = SatConstraint.over(["p", "q"], [["q"]])
        assert formula_satisfiable(formula, family)

    def test_conjunction_with_grand_coalition_veto(self):
        formula = phi("<< {a} -> X p >> & !<< {a} -> X !p >>")
        family = SatConstraint.over(["p"], [["p"]])
        assert formula_satisfiable(formula, family)

    def test_single_atom_with_superset_member(self):
        formula = phi("<< {a} -> X p >>")
        family = SatConstraint.over(["p", "q"], [["p", "q"]])
        assert formula_satisfiable(formula, family)

    def test_split_family_still_serves_two_solo_claims(self):
        """One agent cannot back both claims in one profile, so each
        claim gets its own realizing action and a split family works."""
        formula = phi("<< {a} -> X p >> & << {a} -> X q >>")
        family = SatConstraint.over(["p", "q"], [["p"], ["q"]])
        assert formula_satisfiable(formula, family)
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>"), phi("<< {a} -> X q >>")]
        )
        mismatched = SatConstraint.over(["p", "q"], [["p"], ["q"]])
        assert brute_force_satisfiable(sequent, mismatched)

    def test_uncoverable_forced_set_is_unsatisfiable(self):
        formula = phi("<< {a} -> X p >> & << {b} -> X q >>")
        family = SatConstraint.over(["p", "q"], [["p"], ["q"]])
        assert not formula_satisfiable(formula, family)
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>"), phi("<< {b} -> X q >>")]
        )
        assert not brute_force_satisfiable(sequent, family)

    def test_non_one_step_shapes_are_rejected(self):
        family = SatConstraint.over(["p"], [["p"]])
        with pytest.raises(OneStepShapeError):
            formula_satisfiable(phi("p"), family)
        with pytest.raises(OneStepShapeError):
            formula_satisfiable(phi("<< {a} -> G p >>"), family)


class TestWitnessGameForm:
    def test_witness_for_the_mixed_sequent_validates(self):
        sequent = mixed_sequent()
        family = constraint(["p", "q"], ["q", "r"])
        form = witness_game_form(sequent, family)
        assert validate_game_form(form, sequent, family) == []

    def test_single_positive_single_member_needs_one_action(self):
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>")], agents=["a", "b"]
        )
        family = SatConstraint.over(["p"], [["p"]])
        form = witness_game_form(sequent, family)
        assert len(form.actions) == 1
        assert validate_game_form(form, sequent, family) == []

    def test_grand_coalition_veto_witness(self):
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>"), phi("!<< {a} -> X !p >>")]
        )
        family = SatConstraint.over(["p"], [["p"]])
        form = witness_game_form(sequent, family)
        assert validate_game_form(form, sequent, family) == []

    def test_unsatisfiable_input_is_rejected(self):
        with pytest.raises(ValueError, match="not satisfiable"):
            witness_game_form(
                mixed_sequent(), constraint(["p", "q"], ["p", "r"])
            )

    def test_corrupted_outcome_is_reported(self):
        sequent = sequent_from_formulas(
            [phi("<< {a} -> X p >>")], agents=["a"]
        )
        family = SatConstraint.over(["p"], [["p"]])
        broken = OneStepGameForm(
            agents=("a",),
            actions=(GameFormAction(claim=None, planner=0, bet=0),),
            planners=({Redistribution(()): frozenset({"q"})},),
            sequent=sequent,
        )
        report = validate_game_form(broken, sequent, family)
        assert any("escapes the constraint" in line for line in report)


class TestBruteForceOracle:
    def test_agrees_on_the_satisfiable_family(self):
        assert brute_force_satisfiable(
            mixed_sequent(), constraint(["p", "q"], ["q", "r"])
        )

    def test_agrees_on_the_unsatisfiable_family(self):
        assert not brute_force_satisfiable(
            mixed_sequent(), constraint(["p", "q"], ["p", "r"])
        )

    def test_found_witnesses_imply_the_decision(self):
        families = [
            constraint(["p", "q"], ["q", "r"]),
            constraint(["p"], ["q"], ["r"]),
            constraint(["p", "q", "r"]),
            constraint([]),
        ]
        for family in families:
            decided = bool(sequent_satisfiable(mixed_sequent(), family))
            searched = brute_force_satisfiable(mixed_sequent(), family)
            if searched:
                assert decided
            if decided:
                form = witness_game_form(mixed_sequent(), family)
                assert validate_game_form(form, mixed_sequent(), family) == []
