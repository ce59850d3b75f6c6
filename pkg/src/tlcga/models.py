"""Finite concurrent game models.

A model fixes a set of agents, a finite state space, a non-empty list of
actions per state and agent, a total deterministic outcome function over
action profiles, and a valuation of atomic propositions. Profiles are
tuples aligned with the model's canonical (sorted) agent order.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from typing import Iterable, Mapping


class InvalidModelError(ValueError):
    """Raised when loading or using a structurally broken model."""


class ResourceLimitError(RuntimeError):
    """Raised when a construction or search exceeds its configured budget."""


def format_profile(agents: tuple[str, ...], profile: tuple[str, ...]) -> str:
    """Render a profile as agent=action pairs in agent order."""
    return "(" + ", ".join(
        "%s=%s" % (agent, action) for agent, action in zip(agents, profile)
    ) + ")"


class ConcurrentGameModel:
    """Immutable finite concurrent game model."""

    __slots__ = (
        "agents",
        "states",
        "actions",
        "outcome",
        "valuation",
        "_state_set",
        "_props_at",
        "_profiles",
    )

    def __init__(
        self,
        agents: Iterable[str],
        states: Iterable[str],
        actions: Mapping[str, Mapping[str, Iterable[str]]],
        outcome: Mapping[tuple[str, tuple[str, ...]], str],
        valuation: Mapping[str, Iterable[str]],
    ) -> None:
        agent_list = list(agents)
        if len(set(agent_list)) != len(agent_list):
            raise InvalidModelError("duplicate agent names")
        object.__setattr__(self, "agents", tuple(sorted(agent_list)))
        state_list = list(states)
        if len(set(state_list)) != len(state_list):
            raise InvalidModelError("duplicate state ids")
        object.__setattr__(self, "states", tuple(state_list))
        object.__setattr__(self, "_state_set", frozenset(state_list))
        object.__setattr__(
            self,
            "actions",
            {
                state: {
                    agent: tuple(acts)
                    for agent, acts in actions.get(state, {}).items()
                }
                for state in state_list
            },
        )
        object.__setattr__(self, "outcome", dict(outcome))
        object.__setattr__(
            self,
            "valuation",
            {prop: frozenset(where) for prop, where in valuation.items()},
        )
        props_at: dict[str, frozenset[str]] = {}
        for state in state_list:
            props_at[state] = frozenset(
                prop for prop, where in self.valuation.items() if state in where
            )
        object.__setattr__(self, "_props_at", props_at)
        object.__setattr__(self, "_profiles", {})

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("ConcurrentGameModel is immutable")

    def has_state(self, state: str) -> bool:
        return state in self._state_set

    def props_at(self, state: str) -> frozenset[str]:
        return self._props_at[state]

    def props_used(self) -> tuple[str, ...]:
        return tuple(sorted(self.valuation))

    def actions_of(self, state: str, agent: str) -> tuple[str, ...]:
        return self.actions[state].get(agent, ())

    def profiles(self, state: str) -> tuple[tuple[str, ...], ...]:
        """All locally available action profiles, in canonical order."""
        cached = self._profiles.get(state)
        if cached is None:
            cached = tuple(
                itertools.product(
                    *(self.actions_of(state, agent) for agent in self.agents)
                )
            )
            self._profiles[state] = cached
        return cached

    def out(self, state: str, profile: tuple[str, ...]) -> str:
        try:
            return self.outcome[(state, profile)]
        except KeyError:
            raise InvalidModelError(
                "no outcome at %s for profile %s"
                % (state, format_profile(self.agents, profile))
            ) from None

    def successors(self, state: str) -> frozenset[str]:
        return frozenset(self.out(state, profile) for profile in self.profiles(state))

    def profile_as_mapping(self, profile: tuple[str, ...]) -> dict[str, str]:
        return dict(zip(self.agents, profile))

    def restrict_profile(
        self, profile: tuple[str, ...], coalition: Iterable[str]
    ) -> tuple[tuple[str, str], ...]:
        """The joint action of `coalition` induced by a full profile."""
        members = frozenset(coalition)
        return tuple(
            (agent, action)
            for agent, action in zip(self.agents, profile)
            if agent in members
        )

    def agreeing_profiles(
        self, state: str, coalition: Iterable[str], joint: Mapping[str, str]
    ) -> tuple[tuple[str, ...], ...]:
        """All full profiles at `state` that agree with `joint` on the coalition."""
        members = frozenset(coalition)
        for agent in members:
            if agent not in joint:
                raise InvalidModelError(
                    "joint action misses coalition member %s" % agent
                )
            if joint[agent] not in self.actions_of(state, agent):
                raise InvalidModelError(
                    "action %s of agent %s unavailable at %s"
                    % (joint[agent], agent, state)
                )
        return tuple(
            profile
            for profile in self.profiles(state)
            if all(
                action == joint[agent]
                for agent, action in zip(self.agents, profile)
                if agent in members
            )
        )

    def out_set(
        self, state: str, coalition: Iterable[str], joint: Mapping[str, str]
    ) -> frozenset[str]:
        """Outcomes of all profiles extending the coalition's joint action."""
        return frozenset(
            self.out(state, profile)
            for profile in self.agreeing_profiles(state, coalition, joint)
        )

    def validate(self) -> list[str]:
        """Well-formedness violations, as human-readable strings."""
        problems: list[str] = []
        if not self.states:
            problems.append("model has no states")
        for state in self.states:
            for agent in self.agents:
                acts = self.actions_of(state, agent)
                if not acts:
                    problems.append(
                        "empty action set for agent %s at state %s" % (agent, state)
                    )
                elif len(set(acts)) != len(acts):
                    problems.append(
                        "duplicate actions for agent %s at state %s" % (agent, state)
                    )
        for state in self.states:
            if any(not self.actions_of(state, agent) for agent in self.agents):
                continue
            for profile in self.profiles(state):
                target = self.outcome.get((state, profile))
                if target is None:
                    problems.append(
                        "outcome not total: state %s has no transition for %s"
                        % (state, format_profile(self.agents, profile))
                    )
                elif target not in self._state_set:
                    problems.append(
                        "transition from %s via %s targets unknown state %s"
                        % (state, format_profile(self.agents, profile), target)
                    )
        for (state, profile), target in sorted(self.outcome.items()):
            if state not in self._state_set:
                problems.append("transition from unknown state %s" % state)
                continue
            if profile not in set(self.profiles(state)):
                problems.append(
                    "transition from %s uses unavailable profile %s"
                    % (state, format_profile(self.agents, profile))
                )
        for prop, where in sorted(self.valuation.items()):
            for state in sorted(where - self._state_set):
                problems.append(
                    "valuation of %s mentions unknown state %s" % (prop, state)
                )
        return problems

    def is_injective(self) -> bool:
        """Whether distinct profiles always lead to distinct outcomes."""
        for state in self.states:
            profiles = self.profiles(state)
            targets = {self.out(state, profile) for profile in profiles}
            if len(targets) != len(profiles):
                return False
        return True

    def scos(self) -> tuple["ConcurrentGameModel", dict[str, tuple[str, ...]]]:
        """State-copying and outcome-splitting transformation.

        Returns an injective model together with the map from original
        state to its copies. Each state gets as many copies as the
        maximal number of profiles leading to it from any single source;
        profile i (in canonical enumeration order per source) is
        redirected to copy i. Copy 0 is the designated representative.
        """
        incoming_rank: dict[tuple[str, tuple[str, ...]], int] = {}
        copy_count: dict[str, int] = {state: 1 for state in self.states}
        for source in self.states:
            per_target: dict[str, int] = {}
            for profile in self.profiles(source):
                target = self.out(source, profile)
                rank = per_target.get(target, 0)
                incoming_rank[(source, profile)] = rank
                per_target[target] = rank + 1
            for target, count in per_target.items():
                if count > copy_count[target]:
                    copy_count[target] = count

        taken = set(self._state_set)
        copy_names: dict[str, tuple[str, ...]] = {}
        for state in self.states:
            names = []
            for index in range(copy_count[state]):
                name = "%s#%d" % (state, index)
                while name in taken:
                    name += "'"
                taken.add(name)
                names.append(name)
            copy_names[state] = tuple(names)

        new_states = [name for state in self.states for name in copy_names[state]]
        new_actions = {
            name: {
                agent: self.actions_of(state, agent) for agent in self.agents
            }
            for state in self.states
            for name in copy_names[state]
        }
        new_outcome: dict[tuple[str, tuple[str, ...]], str] = {}
        for source in self.states:
            for profile in self.profiles(source):
                target = self.out(source, profile)
                redirected = copy_names[target][incoming_rank[(source, profile)]]
                for copy in copy_names[source]:
                    new_outcome[(copy, profile)] = redirected
        new_valuation = {
            prop: frozenset(
                name for state in where for name in copy_names[state]
            )
            for prop, where in self.valuation.items()
        }
        model = ConcurrentGameModel(
            self.agents, new_states, new_actions, new_outcome, new_valuation
        )
        return model, copy_names

    def to_json_dict(self) -> dict:
        return {
            "agents": list(self.agents),
            "states": [
                {"id": state, "props": sorted(self.props_at(state))}
                for state in self.states
            ],
            "actions": {
                state: {
                    agent: list(self.actions_of(state, agent))
                    for agent in self.agents
                }
                for state in self.states
            },
            "transitions": {
                state: [
                    {
                        "profile": self.profile_as_mapping(profile),
                        "to": self.out(state, profile),
                    }
                    for profile in self.profiles(state)
                ]
                for state in self.states
            },
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def from_json_dict(data: Mapping) -> ConcurrentGameModel:
    """Build and fully check a model from the JSON document structure."""
    try:
        agents = list(data["agents"])
        state_entries = list(data["states"])
        actions = data["actions"]
        transitions = data["transitions"]
    except (KeyError, TypeError) as exc:
        raise InvalidModelError("missing model section: %s" % exc) from None
    if not agents:
        raise InvalidModelError("model declares no agents")
    agent_order = tuple(sorted(agents))

    states = []
    valuation: dict[str, set[str]] = {}
    for entry in state_entries:
        state = entry["id"]
        states.append(state)
        for prop in entry.get("props", []):
            valuation.setdefault(prop, set()).add(state)
    state_set = set(states)
    if len(state_set) != len(states):
        raise InvalidModelError("duplicate state ids")

    action_table: dict[str, dict[str, tuple[str, ...]]] = {}
    for state in states:
        per_state = actions.get(state)
        if per_state is None:
            raise InvalidModelError("no actions declared for state %s" % state)
        action_table[state] = {}
        for agent in agents:
            acts = per_state.get(agent)
            if not acts:
                raise InvalidModelError(
                    "empty action set for agent %s at state %s" % (agent, state)
                )
            action_table[state][agent] = tuple(acts)
    unknown = set(actions) - state_set
    if unknown:
        raise InvalidModelError(
            "actions declared for unknown state %s" % sorted(unknown)[0]
        )

    outcome: dict[tuple[str, tuple[str, ...]], str] = {}
    for state in states:
        declared = transitions.get(state, [])
        expected = set(
            itertools.product(*(action_table[state][agent] for agent in agent_order))
        )
        for item in declared:
            mapping = item["profile"]
            missing = [agent for agent in agent_order if agent not in mapping]
            if missing:
                raise InvalidModelError(
                    "transition at %s omits agent %s" % (state, missing[0])
                )
            extra = set(mapping) - set(agent_order)
            if extra:
                raise InvalidModelError(
                    "transition at %s names unknown agent %s"
                    % (state, sorted(extra)[0])
                )
            profile = tuple(mapping[agent] for agent in agent_order)
            if profile not in expected:
                raise InvalidModelError(
                    "transition at %s uses unavailable profile %s"
                    % (state, format_profile(agent_order, profile))
                )
            if (state, profile) in outcome:
                raise InvalidModelError(
                    "duplicate transition at %s for profile %s"
                    % (state, format_profile(agent_order, profile))
                )
            target = item["to"]
            if target not in state_set:
                raise InvalidModelError(
                    "transition from %s targets unknown state %s" % (state, target)
                )
            outcome[(state, profile)] = target
        missing_profiles = expected - {
            profile for (st, profile) in outcome if st == state
        }
        if missing_profiles:
            raise InvalidModelError(
                "no transition at %s for profile %s"
                % (state, format_profile(agent_order, min(missing_profiles)))
            )
    unknown = set(transitions) - state_set
    if unknown:
        raise InvalidModelError(
            "transitions declared for unknown state %s" % sorted(unknown)[0]
        )

    return ConcurrentGameModel(agents, states, action_table, outcome, valuation)


def load_model(path: str) -> ConcurrentGameModel:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise InvalidModelError("not valid JSON: %s" % exc) from None
    return from_json_dict(data)


def save_model(model: ConcurrentGameModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model.to_json_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def disjoint_union(
    left: ConcurrentGameModel, right: ConcurrentGameModel
) -> tuple[ConcurrentGameModel, dict[str, str], dict[str, str]]:
    """Combine two models over the same agents into one.

    Returns the union model and the state renamings applied to each
    side. Only used for cross-model bisimulation queries; the union has
    no transitions between the two sides.
    """
    if left.agents != right.agents:
        raise InvalidModelError(
            "agent universes differ: %s vs %s" % (left.agents, right.agents)
        )
    left_map = {state: "L:" + state for state in left.states}
    right_map = {state: "R:" + state for state in right.states}
    states = [left_map[s] for s in left.states] + [right_map[s] for s in right.states]
    actions = {}
    outcome: dict[tuple[str, tuple[str, ...]], str] = {}
    for model, renaming in ((left, left_map), (right, right_map)):
        for state in model.states:
            actions[renaming[state]] = {
                agent: model.actions_of(state, agent) for agent in model.agents
            }
            for profile in model.profiles(state):
                outcome[(renaming[state], profile)] = renaming[
                    model.out(state, profile)
                ]
    valuation: dict[str, set[str]] = {}
    for model, renaming in ((left, left_map), (right, right_map)):
        for prop, where in model.valuation.items():
            valuation.setdefault(prop, set()).update(
                renaming[state] for state in where
            )
    union = ConcurrentGameModel(left.agents, states, actions, outcome, valuation)
    return union, left_map, right_map
