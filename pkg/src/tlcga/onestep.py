"""One-step coalition satisfiability over a variable constraint family.

A one-step sequent collects positive claims (a goal assignment whose
goals all have the form X p) and negative claims (all goals X !p). The
sequent is satisfiable relative to a family of allowed variable sets S
when some finite game form realizes every positive claim, blocks every
negative one, keeps every outcome inside some member of S, and reaches
below every member of S. The decision procedure reduces this to two
combinatorial conditions over redistributions: ways of handing each of
a few pairwise disjoint coalitions one positive assignment to act on.

Coalitions in sequent supports must be non-empty: an empty coalition
would force its variable into every outcome, which the redistribution
conditions cannot see. An empty constraint family rejects every
sequent, since even the empty redistribution needs a covering member.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .formulas import (
    And,
    Coalition,
    GoalAssignment,
    Next,
    Not,
    Or,
    Prop,
    StateFormula,
    Strategic,
)


class OneStepShapeError(ValueError):
    """Raised when input is not in the one-step fragment."""


def _goal_variable(goal, negative: bool) -> str:
    if negative:
        if (
            isinstance(goal, Next)
            and isinstance(goal.body, Not)
            and isinstance(goal.body.body, Prop)
        ):
            return goal.body.body.name
        raise OneStepShapeError(
            "negative one-step goals must look like X !p, got %s" % goal
        )
    if isinstance(goal, Next) and isinstance(goal.body, Prop):
        return goal.body.name
    raise OneStepShapeError(
        "positive one-step goals must look like X p, got %s" % goal
    )


def _check_assignment(assignment: GoalAssignment, negative: bool) -> set[str]:
    used = set()
    for coalition, goal in assignment:
        if not coalition:
            raise OneStepShapeError(
                "one-step goal assignments need non-empty coalitions"
            )
        used.add(_goal_variable(goal, negative))
    return used


@dataclass(frozen=True)
class OneStepSequent:
    """Positive and negative one-step claims over a shared vocabulary."""

    agents: tuple[str, ...]
    variables: tuple[str, ...]
    positives: tuple[GoalAssignment, ...]
    negatives: tuple[GoalAssignment, ...]

    def __post_init__(self) -> None:
        mentioned: set[str] = set()
        for assignment in self.positives:
            mentioned |= _check_assignment(assignment, negative=False)
        for assignment in self.negatives:
            mentioned |= _check_assignment(assignment, negative=True)
        stray = mentioned - set(self.variables)
        if stray:
            raise ValueError(
                "goals mention undeclared variables: %s"
                % ", ".join(sorted(stray))
            )
        agents = set(self.agents)
        for assignment in self.positives + self.negatives:
            for coalition, _ in assignment:
                if not coalition <= agents:
                    raise ValueError(
                        "coalition %s is not part of the agent set" % coalition
                    )


def sequent_from_formulas(
    formulas: Iterable[StateFormula],
    agents: Optional[Iterable[str]] = None,
    variables: Optional[Iterable[str]] = None,
) -> OneStepSequent:
    """Read a sequent off formulas of the shapes <<..>> and !<<..>>.

    The agent and variable universes default to exactly the names
    mentioned; pass them explicitly when the surrounding context is
    larger, since both universes affect satisfiability.
    """
    positives: list[GoalAssignment] = []
    negatives: list[GoalAssignment] = []
    for phi in formulas:
        if isinstance(phi, Strategic):
            positives.append(phi.assignment)
        elif isinstance(phi, Not) and isinstance(phi.body, Strategic):
            negatives.append(phi.body.assignment)
        else:
            raise OneStepShapeError(
                "sequent members must be <<..>> or !<<..>>, got %s" % phi
            )
    mentioned_agents: set[str] = set()
    mentioned_vars: set[str] = set()
    for assignment, negative in [(a, False) for a in positives] + [
        (a, True) for a in negatives
    ]:
        for coalition, goal in assignment:
            mentioned_agents |= coalition
            mentioned_vars.add(_goal_variable(goal, negative))
    return OneStepSequent(
        agents=tuple(sorted(agents)) if agents else tuple(sorted(mentioned_agents)),
        variables=tuple(sorted(variables))
        if variables
        else tuple(sorted(mentioned_vars)),
        positives=tuple(dict.fromkeys(positives)),
        negatives=tuple(dict.fromkeys(negatives)),
    )


@dataclass(frozen=True)
class SatConstraint:
    """The family of allowed outcome variable sets."""

    variables: tuple[str, ...]
    family: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        declared = set(self.variables)
        for member in self.family:
            if not member <= declared:
                raise ValueError(
                    "constraint member {%s} leaves the declared variables"
                    % ",".join(sorted(member))
                )

    @staticmethod
    def over(
        variables: Iterable[str], family: Iterable[Iterable[str]]
    ) -> "SatConstraint":
        members = tuple(
            dict.fromkeys(frozenset(member) for member in family)
        )
        return SatConstraint(tuple(sorted(variables)), members)

    def covering(self, needed: frozenset[str]) -> Optional[frozenset[str]]:
        for member in self.family:
            if needed <= member:
                return member
        return None


@dataclass(frozen=True)
class Redistribution:
    """Pairwise disjoint coalitions, each backing one positive claim.

    Pairs hold indices into the sequent's positive list and are kept in
    canonical coalition order.
    """

    pairs: tuple[tuple[Coalition, int], ...]

    def resolve(
        self, sequent: OneStepSequent
    ) -> tuple[tuple[Coalition, GoalAssignment], ...]:
        return tuple(
            (coalition, sequent.positives[index])
            for coalition, index in self.pairs
        )

    def __str__(self) -> str:
        if not self.pairs:
            return "(empty)"
        return "; ".join(
            "%s backs positive %d" % (coalition, index)
            for coalition, index in self.pairs
        )


def _all_coalitions(agents: Sequence[str]) -> list[Coalition]:
    return [
        Coalition(members)
        for size in range(len(agents) + 1)
        for members in itertools.combinations(agents, size)
    ]


def redistributions(sequent: OneStepSequent) -> list[Redistribution]:
    """Every redistribution, enumerated canonically and duplicate-free.

    Represented as maps from coalitions to a positive claim or a pass
    marker; maps where two backed coalitions overlap are skipped.
    """
    subsets = _all_coalitions(sequent.agents)
    options: list[Optional[int]] = [None] + list(range(len(sequent.positives)))
    found = []
    for choice in itertools.product(options, repeat=len(subsets)):
        pairs = [
            (subsets[i], index)
            for i, index in enumerate(choice)
            if index is not None
        ]
        ok = True
        for (first, _), (second, _) in itertools.combinations(pairs, 2):
            if first & second:
                ok = False
                break
        if ok:
            found.append(Redistribution(tuple(pairs)))
    return found


def forced(sequent: OneStepSequent, redistribution: Redistribution) -> frozenset[str]:
    """Variables some backed coalition is strong enough to guarantee."""
    result = set()
    for coalition, index in redistribution.pairs:
        for supported, goal in sequent.positives[index]:
            if supported <= coalition:
                result.add(_goal_variable(goal, negative=False))
    return frozenset(result)


def forced_against(
    sequent: OneStepSequent,
    redistribution: Redistribution,
    negative: GoalAssignment,
    blocked: Coalition,
) -> frozenset[str]:
    """Variables unavoidable when the rest block the coalition's X !q.

    Collects what the backed coalitions still force using only members
    inside the blocked coalition, plus the blocked variable itself.
    """
    goal = dict(iter(negative)).get(blocked)
    if goal is None:
        raise ValueError(
            "coalition %s carries no goal in the negative assignment" % blocked
        )
    result = {_goal_variable(goal, negative=True)}
    for coalition, index in redistribution.pairs:
        reachable = coalition & blocked
        for supported, positive_goal in sequent.positives[index]:
            if supported <= reachable:
                result.add(_goal_variable(positive_goal, negative=False))
    return frozenset(result)


@dataclass(frozen=True)
class SatCertificate:
    """Why a sequent fails: the redistribution nobody can cover.

    For a coverage failure (condition 1) required holds the single
    forced set. For a blocking failure (condition 2) negative names the
    offending claim and required lists, per candidate blocked
    coalition, the set that no constraint member covers; the grand
    coalition candidate appears when its variable misses some member.
    """

    pairs: tuple[tuple[Coalition, GoalAssignment], ...]
    negative: Optional[GoalAssignment]
    required: tuple[tuple[Optional[Coalition], frozenset[str]], ...]

    def __str__(self) -> str:
        backing = (
            "; ".join(
                "%s backs %s" % (coalition, assignment)
                for coalition, assignment in self.pairs
            )
            or "the empty redistribution"
        )
        needs = "; ".join(
            "%s needs {%s}"
            % (
                "every member" if coalition is None else "blocking %s" % coalition,
                ",".join(sorted(variables)),
            )
            for coalition, variables in self.required
        )
        if self.negative is None:
            return "no constraint member covers %s (%s)" % (backing, needs)
        return "cannot block %s under %s (%s)" % (
            self.negative,
            backing,
            needs,
        )


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    certificate: Optional[SatCertificate]

    def __bool__(self) -> bool:
        return self.satisfiable


def _require_same_universe(
    sequent: OneStepSequent, constraint: SatConstraint
) -> None:
    if set(sequent.variables) != set(constraint.variables):
        raise ValueError(
            "sequent variables {%s} differ from constraint variables {%s}"
            % (
                ",".join(sequent.variables),
                ",".join(constraint.variables),
            )
        )


def sequent_satisfiable(
    sequent: OneStepSequent, constraint: SatConstraint
) -> SatResult:
    """Decide satisfiability by the two redistribution conditions.

    Condition 1: every redistribution's forced set fits inside some
    constraint member. Condition 2: for every redistribution and every
    negative claim, some coalition of the claim can be blocked -- the
    grand coalition when its variable is in every member, any other
    when the combined forced set fits some member.
    """
    _require_same_universe(sequent, constraint)
    grand = Coalition(sequent.agents)
    for redistribution in redistributions(sequent):
        needed = forced(sequent, redistribution)
        if constraint.covering(needed) is None:
            return SatResult(
                False,
                SatCertificate(
                    pairs=redistribution.resolve(sequent),
                    negative=None,
                    required=((None, needed),),
                ),
            )
        for negative in sequent.negatives:
            failures: list[tuple[Optional[Coalition], frozenset[str]]] = []
            blocked_somewhere = False
            for blocked, goal in negative:
                if blocked == grand:
                    variable = _goal_variable(goal, negative=True)
                    if all(variable in member for member in constraint.family):
                        blocked_somewhere = True
                        break
                    failures.append((None, frozenset({variable})))
                    continue
                needed = forced_against(
                    sequent, redistribution, negative, blocked
                )
                if constraint.covering(needed) is not None:
                    blocked_somewhere = True
                    break
                failures.append((blocked, needed))
            if not blocked_somewhere:
                return SatResult(
                    False,
                    SatCertificate(
                        pairs=redistribution.resolve(sequent),
                        negative=negative,
                        required=tuple(failures),
                    ),
                )
    return SatResult(True, None)


def _dnf(phi: StateFormula) -> list[list[StateFormula]]:
    if isinstance(phi, Or):
        return _dnf(phi.left) + _dnf(phi.right)
    if isinstance(phi, And):
        return [
            left + right
            for left in _dnf(phi.left)
            for right in _dnf(phi.right)
        ]
    if isinstance(phi, Strategic) or (
        isinstance(phi, Not) and isinstance(phi.body, Strategic)
    ):
        return [[phi]]
    raise OneStepShapeError(
        "one-step formulas allow only <<..>>, !<<..>>, & and |, got %s" % phi
    )


def formula_satisfiable(
    phi: StateFormula,
    constraint: SatConstraint,
    agents: Optional[Iterable[str]] = None,
) -> bool:
    """Satisfiability of an and/or combination of one-step claims.

    Expands to disjunctive normal form and accepts when any branch's
    sequent is satisfiable. The agent universe defaults to every agent
    the whole formula mentions, so all branches share it.
    """
    branches = _dnf(phi)
    if agents is None:
        mentioned: set[str] = set()
        for branch in branches:
            for member in branch:
                assignment = (
                    member.assignment
                    if isinstance(member, Strategic)
                    else member.body.assignment
                )
                for coalition, _ in assignment:
                    mentioned |= coalition
        agents = sorted(mentioned)
    agents = tuple(agents)
    for branch in branches:
        sequent = sequent_from_formulas(
            branch, agents=agents, variables=constraint.variables
        )
        if sequent_satisfiable(sequent, constraint):
            return True
    return False


@dataclass(frozen=True)
class GameFormAction:
    """A vote: a positive claim to act on, a planner, and a bet.

    claim is an index into the sequent's positives or None for pass;
    planner indexes the game form's choice functions; bet feeds the
    modular vote that picks whose planner resolves the outcome.
    """

    claim: Optional[int]
    planner: int
    bet: int

    def __str__(self) -> str:
        first = "*" if self.claim is None else "g%d" % self.claim
        return "(%s,f%d,k%d)" % (first, self.planner, self.bet)


@dataclass(frozen=True)
class OneStepGameForm:
    """An explicit game form whose outcomes are variable sets.

    Every agent shares the same action list. The outcome of a profile
    is computed from which coalitions formed behind which positive
    claim: the planner of the betting winner maps that formation to a
    constraint member.
    """

    agents: tuple[str, ...]
    actions: tuple[GameFormAction, ...]
    planners: tuple[Mapping[Redistribution, frozenset[str]], ...]
    sequent: OneStepSequent

    def profiles(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(
            range(len(self.actions)), repeat=len(self.agents)
        )

    def formation(self, profile: tuple[int, ...]) -> Redistribution:
        behind: dict[int, set[str]] = {}
        for agent, action_index in zip(self.agents, profile):
            claim = self.actions[action_index].claim
            if claim is not None:
                behind.setdefault(claim, set()).add(agent)
        pairs = sorted(
            ((Coalition(members), claim) for claim, members in behind.items()),
            key=lambda pair: (len(pair[0]), pair[0].sorted_members()),
        )
        return Redistribution(tuple(pairs))

    def outcome(self, profile: tuple[int, ...]) -> frozenset[str]:
        total = sum(self.actions[index].bet for index in profile)
        winner = profile[total % len(self.agents)]
        planner = self.planners[self.actions[winner].planner]
        return planner[self.formation(profile)]


def validate_game_form(
    form: OneStepGameForm,
    sequent: OneStepSequent,
    constraint: SatConstraint,
) -> list[str]:
    """Check the four satisfaction clauses directly, by enumeration.

    Returns human-readable violations; an empty list means the form
    witnesses satisfiability of the sequent under the constraint.
    """
    return _validate(
        sequent,
        constraint,
        agents=form.agents,
        action_count=len(form.actions),
        outcome=form.outcome,
    )


def _validate(
    sequent: OneStepSequent,
    constraint: SatConstraint,
    agents: tuple[str, ...],
    action_count: int,
    outcome: Callable[[tuple[int, ...]], frozenset[str]],
) -> list[str]:
    all_profiles = list(
        itertools.product(range(action_count), repeat=len(agents))
    )

    def agreeing(profile: tuple[int, ...], coalition: Coalition):
        slots = [
            (profile[i],) if agents[i] in coalition else range(action_count)
            for i in range(len(agents))
        ]
        return itertools.product(*slots)

    violations = []
    for number, positive in enumerate(sequent.positives):
        wanted = {
            coalition: _goal_variable(goal, negative=False)
            for coalition, goal in positive
        }
        ok = any(
            all(
                all(
                    variable in outcome(other)
                    for other in agreeing(profile, coalition)
                )
                for coalition, variable in wanted.items()
            )
            for profile in all_profiles
        )
        if not ok:
            violations.append(
                "no profile realizes positive %d %s" % (number, positive)
            )
    for number, negative in enumerate(sequent.negatives):
        blocked = {
            coalition: _goal_variable(goal, negative=True)
            for coalition, goal in negative
        }
        for profile in all_profiles:
            ok = any(
                any(
                    variable in outcome(other)
                    for other in agreeing(profile, coalition)
                )
                for coalition, variable in blocked.items()
            )
            if not ok:
                violations.append(
                    "profile %s defeats negative %d %s"
                    % (profile, number, negative)
                )
                break
    for profile in all_profiles:
        if constraint.covering(outcome(profile)) is None:
            violations.append(
                "outcome {%s} of profile %s escapes the constraint"
                % (",".join(sorted(outcome(profile))), profile)
            )
    for member in constraint.family:
        if not any(outcome(profile) <= member for profile in all_profiles):
            violations.append(
                "no profile stays inside constraint member {%s}"
                % ",".join(sorted(member))
            )
    return violations


def witness_game_form(
    sequent: OneStepSequent, constraint: SatConstraint
) -> OneStepGameForm:
    """Build an explicit witness for a satisfiable sequent.

    Follows the voting construction: actions pick a positive claim (or
    pass), a planner mapping coalition formations to covering
    constraint members, and a bet deciding whose planner applies. The
    planner list holds one default plan plus one override per blocking
    scenario that the default does not already serve. The result always
    passes validate_game_form; unsatisfiable input is rejected.

    When there are no negative claims and the constraint family is a
    single member, one action per agent suffices: its outcome is that
    member, which covers everything any positive forces.
    """
    verdict = sequent_satisfiable(sequent, constraint)
    if not verdict:
        raise ValueError(
            "sequent is not satisfiable under the constraint: %s"
            % verdict.certificate
        )
    grand = Coalition(sequent.agents)
    every = redistributions(sequent)

    if not sequent.negatives and len(constraint.family) == 1:
        member = constraint.family[0]
        planner = {redistribution: member for redistribution in every}
        return OneStepGameForm(
            agents=sequent.agents,
            actions=(GameFormAction(claim=None, planner=0, bet=0),),
            planners=(planner,),
            sequent=sequent,
        )

    default = {}
    for redistribution in every:
        default[redistribution] = constraint.covering(
            forced(sequent, redistribution)
        )

    planners: list[dict] = [default]
    seen_overrides: dict[tuple[Redistribution, frozenset[str]], int] = {}
    idle = Redistribution(())
    for member in constraint.family:
        if default[idle] != member:
            key = (idle, member)
            plan = dict(default)
            plan[idle] = member
            seen_overrides[key] = len(planners)
            planners.append(plan)
    for redistribution in every:
        for negative in sequent.negatives:
            for blocked, goal in negative:
                if blocked == grand:
                    variable = _goal_variable(goal, negative=True)
                    if all(
                        variable in member for member in constraint.family
                    ):
                        break
                    continue
                needed = forced_against(
                    sequent, redistribution, negative, blocked
                )
                member = constraint.covering(needed)
                if member is None:
                    continue
                trimmed = []
                for coalition, index in redistribution.pairs:
                    kept = coalition & blocked
                    if kept:
                        trimmed.append((Coalition(kept), index))
                trimmed.sort(
                    key=lambda pair: (len(pair[0]), pair[0].sorted_members())
                )
                residue = Redistribution(tuple(trimmed))
                if default[residue] == member:
                    break
                key = (residue, member)
                if key not in seen_overrides:
                    plan = dict(default)
                    plan[residue] = member
                    seen_overrides[key] = len(planners)
                    planners.append(plan)
                break

    actions = tuple(
        GameFormAction(claim=claim, planner=planner, bet=bet)
        for claim in [None] + list(range(len(sequent.positives)))
        for planner in range(len(planners))
        for bet in range(len(sequent.agents))
    )
    return OneStepGameForm(
        agents=sequent.agents,
        actions=actions,
        planners=tuple(planners),
        sequent=sequent,
    )


def brute_force_satisfiable(
    sequent: OneStepSequent,
    constraint: SatConstraint,
    max_actions: int = 2,
) -> bool:
    """Search exhaustively for a game form within an action budget.

    Enumerates outcome tables over the downward closure of the
    constraint family and checks the four satisfaction clauses
    directly. Finding a witness proves satisfiability outright; finding
    none only rules out witnesses within the budget, so a negative
    answer is evidence, not proof, when the budget is small.
    """
    _require_same_universe(sequent, constraint)
    closure: list[frozenset[str]] = []
    seen = set()
    for member in constraint.family:
        names = sorted(member)
        for size in range(len(names) + 1):
            for subset in itertools.combinations(names, size):
                candidate = frozenset(subset)
                if candidate not in seen:
                    seen.add(candidate)
                    closure.append(candidate)
    if not closure:
        return False
    for action_count in range(1, max_actions + 1):
        all_profiles = list(
            itertools.product(range(action_count), repeat=len(sequent.agents))
        )
        for table in itertools.product(closure, repeat=len(all_profiles)):
            outcome_map = dict(zip(all_profiles, table))
            violations = _validate(
                sequent,
                constraint,
                agents=sequent.agents,
                action_count=action_count,
                outcome=outcome_map.__getitem__,
            )
            if not violations:
                return True
    return False
