"""Bisimulation for concurrent game models, and distinguishing formulas.

Two states are bisimilar when they satisfy the same atoms and every
profile of one can be answered by a profile of the other so that, for
every coalition, each outcome of the answering block is covered by a
related outcome of the challenging block, in both directions. Bisimilar
states satisfy the same formulas; for non-bisimilar states a
level-indexed characteristic formula separates them.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Optional

from .checking import Evaluator
from .formulas import (
    And,
    Coalition,
    FALSE,
    GoalAssignment,
    Next,
    Not,
    Or,
    Prop,
    StateFormula,
    TRUE,
    strategic,
)
from .models import ConcurrentGameModel, disjoint_union
from .transforms import to_mu


class _OutSets:
    """Per-state, per-coalition outcome sets of every action block."""

    def __init__(self, model: ConcurrentGameModel) -> None:
        self.model = model
        count = len(model.agents)
        self.coalitions = [
            tuple(indices)
            for size in range(count + 1)
            for indices in combinations(range(count), size)
        ]
        self._blocks: dict = {}
        for state in model.states:
            profiles = model.profiles(state)
            for coalition in self.coalitions:
                blocks: dict[tuple[str, ...], set[str]] = {}
                for profile in profiles:
                    restriction = tuple(profile[i] for i in coalition)
                    blocks.setdefault(restriction, set()).add(
                        model.out(state, profile)
                    )
                self._blocks[(state, coalition)] = blocks

    def outcomes(
        self, state: str, coalition: tuple[int, ...], profile: tuple[str, ...]
    ) -> set[str]:
        restriction = tuple(profile[i] for i in coalition)
        return self._blocks[(state, coalition)][restriction]


def _covers(
    outs: _OutSets,
    big_state: str,
    big_profile: tuple[str, ...],
    small_state: str,
    small_profile: tuple[str, ...],
    related: frozenset,
) -> bool:
    for coalition in outs.coalitions:
        big_out = outs.outcomes(big_state, coalition, big_profile)
        for small in outs.outcomes(small_state, coalition, small_profile):
            if not any((big, small) in related for big in big_out):
                return False
    return True


def _pair_ok(
    outs: _OutSets, s1: str, s2: str, related: frozenset
) -> bool:
    model = outs.model
    for challenger in model.profiles(s1):
        if not any(
            _covers(outs, s1, challenger, s2, answer, related)
            for answer in model.profiles(s2)
        ):
            return False
    for challenger in model.profiles(s2):
        if not any(
            _covers(outs, s2, challenger, s1, answer, related)
            for answer in model.profiles(s1)
        ):
            return False
    return True


def _atom_pairs(model: ConcurrentGameModel) -> frozenset:
    return frozenset(
        (s1, s2)
        for s1 in model.states
        for s2 in model.states
        if model.props_at(s1) == model.props_at(s2)
    )


def _refine(outs: _OutSets, related: frozenset) -> frozenset:
    return frozenset(
        pair for pair in related if _pair_ok(outs, pair[0], pair[1], related)
    )


def greatest_bisimulation(model: ConcurrentGameModel) -> frozenset:
    """The largest bisimulation, as a symmetric set of state pairs."""
    outs = _OutSets(model)
    related = _atom_pairs(model)
    while True:
        refined = _refine(outs, related)
        if refined == related:
            return related
        related = refined


def bisimulation_levels(model: ConcurrentGameModel) -> list[frozenset]:
    """The refinement sequence from atom equivalence to the fixpoint."""
    outs = _OutSets(model)
    levels = [_atom_pairs(model)]
    while True:
        refined = _refine(outs, levels[-1])
        if refined == levels[-1]:
            return levels
        levels.append(refined)


def are_bisimilar(
    left: ConcurrentGameModel,
    left_state: str,
    right: ConcurrentGameModel,
    right_state: str,
) -> bool:
    """Bisimilarity across two models over the same agents."""
    union, left_map, right_map = disjoint_union(left, right)
    related = greatest_bisimulation(union)
    return (left_map[left_state], right_map[right_state]) in related


def hm_agreement(
    model: ConcurrentGameModel, formulas: Iterable[StateFormula]
) -> list[tuple[str, str, StateFormula]]:
    """Violations of formula-invariance over the greatest bisimulation.

    Returns every (state, state, formula) where a bisimilar pair
    disagrees; sound semantics yield an empty list.
    """
    related = greatest_bisimulation(model)
    evaluator = Evaluator(model)
    violations = []
    for phi in formulas:
        extension = evaluator.extension(to_mu(phi))
        for s1, s2 in sorted(related):
            if s1 < s2 and (s1 in extension) != (s2 in extension):
                violations.append((s1, s2, phi))
    return violations


def _disjoin(parts: list[StateFormula]) -> StateFormula:
    if not parts:
        return FALSE
    result = parts[0]
    for part in parts[1:]:
        result = Or(result, part)
    return result


def _conjoin(parts: list[StateFormula]) -> StateFormula:
    if not parts:
        return TRUE
    result = parts[0]
    for part in parts[1:]:
        result = And(result, part)
    return result


class _Characteristics:
    """Level-indexed characteristic formulas per refinement class."""

    def __init__(self, model: ConcurrentGameModel) -> None:
        self.model = model
        self.outs = _OutSets(model)
        self.levels = bisimulation_levels(model)
        self.position = {state: i for i, state in enumerate(model.states)}
        self._memo: dict[tuple[int, str], StateFormula] = {}
        self._names = {
            i: Coalition(model.agents[k] for k in indices)
            for i, indices in enumerate(self.outs.coalitions)
        }

    def representative(self, level: int, state: str) -> str:
        related = self.levels[level]
        cls = [t for t in self.model.states if (state, t) in related]
        return min(cls, key=self.position.__getitem__)

    def formula(self, level: int, state: str) -> StateFormula:
        rep = self.representative(level, state)
        key = (level, rep)
        if key in self._memo:
            return self._memo[key]
        result = self._build(level, rep)
        self._memo[key] = result
        return result

    def _atoms(self, state: str) -> StateFormula:
        parts: list[StateFormula] = []
        here = self.model.props_at(state)
        for prop in self.model.props_used():
            parts.append(Prop(prop) if prop in here else Not(Prop(prop)))
        return _conjoin(parts)

    def _build(self, level: int, state: str) -> StateFormula:
        if level == 0:
            return self._atoms(state)
        parts: list[StateFormula] = [self._atoms(state)]
        for profile in self.model.profiles(state):
            entries = []
            for index, indices in enumerate(self.outs.coalitions):
                outcomes = self.outs.outcomes(state, indices, profile)
                reps = sorted(
                    {self.representative(level - 1, u) for u in outcomes},
                    key=self.position.__getitem__,
                )
                body = _disjoin([self.formula(level - 1, rep) for rep in reps])
                entries.append((self._names[index], Next(body)))
            parts.append(strategic(GoalAssignment(entries)))
        return _conjoin(parts)


def distinguishing_formula(
    model: ConcurrentGameModel, s1: str, s2: str
) -> Optional[StateFormula]:
    """A formula true at s1 and false at s2, when they are not bisimilar.

    Built from level-indexed characteristic formulas and verified
    against the evaluator before being returned; None when the states
    are bisimilar.
    """
    chars = _Characteristics(model)
    if (s1, s2) in chars.levels[-1]:
        return None
    first_split = next(
        k for k, related in enumerate(chars.levels) if (s1, s2) not in related
    )
    evaluator = Evaluator(model)
    for level in range(first_split, len(chars.levels)):
        for positive, negative in ((s1, s2), (s2, s1)):
            candidate = chars.formula(level, positive)
            extension = evaluator.extension(to_mu(candidate))
            if positive in extension and negative not in extension:
                if positive == s1:
                    return candidate
                return Not(candidate)
    raise AssertionError(
        "no characteristic formula separates %s and %s" % (s1, s2)
    )
