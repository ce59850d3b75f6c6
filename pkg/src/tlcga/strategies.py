"""Finite-memory strategy profiles: search, verification, induced plays.

A strategy profile fixes, per agent, an action for every memory value it
can reach. Memory modes cover positional play, bounded suffixes of the
visited states, and bounded suffixes of the full play including the
action profiles taken. The search enumerates assignments lazily along
the memories its own choices make reachable, so reported absence is
exact for the whole memory class unless the step budget interrupts it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .checking import extension_of
from .formulas import (
    GoalAssignment,
    Globally,
    Next,
    PathFormula,
    StateFormula,
    Until,
    path_conjuncts,
)
from .models import ConcurrentGameModel


class PartialStrategyError(ValueError):
    """A strategy table misses a reachable memory value."""


class InvalidWitnessError(ValueError):
    """A strategy table prescribes an unavailable action."""


@dataclass(frozen=True)
class MemoryMode:
    """How much of the history an agent's choices may depend on.

    kind "path" keeps the last `depth` visited states, kind "play" keeps
    them together with the action profiles taken in between, and
    "positional" is path with depth one.
    """

    kind: str
    depth: int

    def __post_init__(self) -> None:
        if self.kind not in ("positional", "path", "play"):
            raise ValueError("unknown memory kind %r" % self.kind)
        if self.kind == "positional" and self.depth != 1:
            raise ValueError("positional memory has depth 1")
        if self.depth < 1:
            raise ValueError("memory depth must be at least 1")

    def __str__(self) -> str:
        if self.kind == "positional":
            return "positional"
        return "%s:%d" % (self.kind, self.depth)


POSITIONAL = MemoryMode("positional", 1)


def parse_memory_mode(text: str) -> MemoryMode:
    if text == "positional":
        return POSITIONAL
    for kind in ("path", "play"):
        prefix = kind + ":"
        if text.startswith(prefix):
            try:
                depth = int(text[len(prefix):])
            except ValueError:
                raise ValueError("bad memory depth in %r" % text) from None
            return MemoryMode(kind, depth)
    raise ValueError(
        "memory mode must be positional, path:K, or play:K, got %r" % text
    )


def initial_memory(state: str) -> tuple:
    return (state,)


def update_memory(
    mode: MemoryMode, memory: tuple, profile: tuple[str, ...], target: str
) -> tuple:
    if mode.kind == "play":
        extended = memory + (profile, target)
        while (len(extended) + 1) // 2 > mode.depth:
            extended = extended[2:]
        return extended
    extended = memory + (target,)
    return extended[-mode.depth:]


def memory_state(memory: tuple) -> str:
    return memory[-1]


def render_memory(memory: tuple) -> str:
    """Human-readable memory: states bare, profiles in brackets."""
    parts = [
        "[%s]" % ",".join(item) if isinstance(item, tuple) else item
        for item in memory
    ]
    return " ".join(parts)


def memory_sort_key(memory: tuple):
    return (
        len(memory),
        tuple("\x00".join(item) if isinstance(item, tuple) else item for item in memory),
    )


@dataclass(frozen=True)
class FiniteStrategyProfile:
    """Explicit per-agent action tables over memory values."""

    mode: MemoryMode
    tables: Mapping[str, Mapping[tuple, str]]

    def action(self, agent: str, memory: tuple) -> str:
        table = self.tables.get(agent)
        if table is None or memory not in table:
            raise PartialStrategyError(
                "agent %s has no action for memory %s"
                % (agent, render_memory(memory))
            )
        return table[memory]

    def to_json_dict(self) -> dict:
        return {
            "mode": str(self.mode),
            "tables": {
                agent: [
                    {"memory": render_memory(memory), "action": action}
                    for memory, action in sorted(
                        table.items(), key=lambda kv: memory_sort_key(kv[0])
                    )
                ]
                for agent, table in sorted(self.tables.items())
            },
        }

    def render(self) -> str:
        lines = []
        for agent, table in sorted(self.tables.items()):
            lines.append("agent %s:" % agent)
            for memory, action in sorted(
                table.items(), key=lambda kv: memory_sort_key(kv[0])
            ):
                lines.append("  %s -> %s" % (render_memory(memory), action))
        return "\n".join(lines)


def parse_rendered_memory(text: str) -> tuple:
    """Invert render_memory: bare tokens are states, bracketed profiles."""
    parts: list = []
    for token in text.split():
        if token.startswith("[") and token.endswith("]"):
            parts.append(tuple(token[1:-1].split(",")))
        else:
            parts.append(token)
    return tuple(parts)


def profile_from_json_dict(data) -> FiniteStrategyProfile:
    try:
        mode = parse_memory_mode(data["mode"])
        tables = {
            agent: {
                parse_rendered_memory(entry["memory"]): entry["action"]
                for entry in entries
            }
            for agent, entries in data["tables"].items()
        }
    except (KeyError, TypeError) as exc:
        raise ValueError("malformed strategy profile: %s" % exc) from None
    return FiniteStrategyProfile(mode, tables)


def _goal_extensions(
    model: ConcurrentGameModel, assignment: GoalAssignment
) -> dict[StateFormula, frozenset[str]]:
    extensions: dict[StateFormula, frozenset[str]] = {}

    def record(phi: StateFormula) -> None:
        if phi not in extensions:
            extensions[phi] = extension_of(model, phi)

    for _, goal in assignment:
        for part in path_conjuncts(goal):
            if isinstance(part, Next):
                record(part.body)
            elif isinstance(part, Until):
                record(part.left)
                record(part.right)
            elif isinstance(part, Globally):
                record(part.body)
    return extensions


def _coalition_closure(
    model: ConcurrentGameModel,
    start: str,
    mode: MemoryMode,
    coalition: Iterable[str],
    lookup: Callable[[str, tuple], str],
):
    """Memories reachable when the coalition follows `lookup`.

    Returns (nodes in first-seen order, edges as node -> ordered
    targets). Raises whatever `lookup` raises on a missing entry.
    """
    members = sorted(coalition)
    root = initial_memory(start)
    order = [root]
    edges: dict[tuple, list[tuple]] = {}
    seen = {root}
    queue = [root]
    while queue:
        memory = queue.pop(0)
        state = memory_state(memory)
        joint = {}
        for agent in members:
            action = lookup(agent, memory)
            if action not in model.actions_of(state, agent):
                raise InvalidWitnessError(
                    "action %s of agent %s unavailable at %s"
                    % (action, agent, state)
                )
            joint[agent] = action
        targets = []
        for profile in model.agreeing_profiles(state, members, joint):
            target = update_memory(
                mode, memory, profile, model.out(state, profile)
            )
            targets.append(target)
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
        edges[memory] = targets
    return order, edges


def _check_goal_on_product(
    goal: PathFormula,
    root: tuple,
    order: list[tuple],
    edges: dict[tuple, list[tuple]],
    extensions: Mapping[StateFormula, frozenset[str]],
) -> list[str]:
    failures = []
    for part in path_conjuncts(goal):
        if isinstance(part, Next):
            target_set = extensions[part.body]
            for successor in edges[root]:
                if memory_state(successor) not in target_set:
                    failures.append(
                        "one-step goal X %s fails toward %s"
                        % (part.body, memory_state(successor))
                    )
                    break
        elif isinstance(part, Globally):
            target_set = extensions[part.body]
            for memory in order:
                if memory_state(memory) not in target_set:
                    failures.append(
                        "invariant goal G %s fails at %s"
                        % (part.body, render_memory(memory))
                    )
                    break
        elif isinstance(part, Until):
            left_set = extensions[part.left]
            right_set = extensions[part.right]
            satisfied: set[tuple] = set()
            changed = True
            while changed:
                changed = False
                for memory in order:
                    if memory in satisfied:
                        continue
                    state = memory_state(memory)
                    if state in right_set or (
                        state in left_set
                        and all(t in satisfied for t in edges[memory])
                    ):
                        satisfied.add(memory)
                        changed = True
            if root not in satisfied:
                failures.append("eventuality goal (%s U %s) fails" % (part.left, part.right))
        else:
            raise TypeError("not a path goal: %r" % (part,))
    return failures


def verify_witness(
    model: ConcurrentGameModel,
    state: str,
    profile: FiniteStrategyProfile,
    assignment: GoalAssignment,
) -> tuple[bool, list[str]]:
    """Check a strategy profile against every supported coalition's goal.

    For each coalition the profile's actions are fixed on its members
    while everyone else ranges over all actions; the goal must hold on
    every play of that restricted system.
    """
    extensions = _goal_extensions(model, assignment)
    return _verify(model, state, profile.mode, profile.action, assignment, extensions)


def _verify(model, state, mode, lookup, assignment, extensions):
    failures: list[str] = []
    for coalition, goal in assignment:
        order, edges = _coalition_closure(model, state, mode, coalition, lookup)
        root = initial_memory(state)
        for failure in _check_goal_on_product(goal, root, order, edges, extensions):
            failures.append("coalition %s: %s" % (coalition, failure))
    return not failures, failures


@dataclass(frozen=True)
class WitnessSearchResult:
    witness: Optional[FiniteStrategyProfile]
    exact: bool
    explored: int

    @property
    def outcome(self) -> str:
        if self.witness is not None:
            return "witness"
        return "none (exact)" if self.exact else "none (bounded)"


class _MissingEntry(Exception):
    def __init__(self, agent: str, memory: tuple) -> None:
        self.agent = agent
        self.memory = memory


def find_witness(
    model: ConcurrentGameModel,
    state: str,
    assignment: GoalAssignment,
    mode: MemoryMode,
    limit: int = 100000,
) -> WitnessSearchResult:
    """Search the memory class for a verifying strategy profile.

    Decisions are made lazily at the first reachable memory that lacks
    one, in a fixed canonical order, and actions are tried in their
    declared order, so the found witness is deterministic. When the
    search space is exhausted without success the absence is exact for
    the whole class; when the step budget runs out first it is only
    bounded.
    """
    if not model.has_state(state):
        raise ValueError("unknown state %s" % state)
    extensions = _goal_extensions(model, assignment)
    support = assignment.support()
    agents_involved = sorted({a for c in support for a in c})
    decisions: dict[tuple[str, tuple], str] = {}
    steps = 0
    exhausted = True

    def lookup(agent: str, memory: tuple) -> str:
        key = (agent, memory)
        if key in decisions:
            return decisions[key]
        available = model.actions_of(memory_state(memory), agent)
        if len(available) == 1:
            return available[0]
        raise _MissingEntry(agent, memory)

    def first_missing():
        for coalition in support:
            try:
                _coalition_closure(model, state, mode, coalition, lookup)
            except _MissingEntry as missing:
                return missing
        return None

    def assemble() -> FiniteStrategyProfile:
        tables: dict[str, dict[tuple, str]] = {a: {} for a in agents_involved}
        for coalition in support:
            order, _ = _coalition_closure(model, state, mode, coalition, lookup)
            for memory in order:
                for agent in sorted(coalition):
                    tables[agent].setdefault(memory, lookup(agent, memory))
        return FiniteStrategyProfile(mode, tables)

    def search() -> Optional[FiniteStrategyProfile]:
        nonlocal steps, exhausted
        if steps >= limit:
            exhausted = False
            return None
        steps += 1
        missing = first_missing()
        if missing is None:
            candidate = assemble()
            ok, _ = _verify(
                model, state, mode, candidate.action, assignment, extensions
            )
            return candidate if ok else None
        key = (missing.agent, missing.memory)
        for action in model.actions_of(memory_state(missing.memory), missing.agent):
            decisions[key] = action
            found = search()
            if found is not None:
                return found
            del decisions[key]
            if not exhausted:
                return None
        return None

    witness = search()
    return WitnessSearchResult(witness, exhausted if witness is None else True, steps)


@dataclass(frozen=True)
class Lasso:
    """The single play induced when every agent follows the profile."""

    states: tuple[str, ...]
    profiles: tuple[tuple[str, ...], ...]
    cycle_start: int

    def state_at(self, position: int) -> str:
        if position < len(self.states):
            return self.states[position]
        cycle = self.states[self.cycle_start:]
        offset = (position - self.cycle_start) % len(cycle)
        return cycle[offset]


def play_lasso(
    model: ConcurrentGameModel, state: str, profile: FiniteStrategyProfile
) -> Lasso:
    """Follow the full profile until the joint memory repeats."""
    memory = initial_memory(state)
    visited: dict[tuple, int] = {}
    states: list[str] = []
    profiles: list[tuple[str, ...]] = []
    while memory not in visited:
        visited[memory] = len(states)
        current = memory_state(memory)
        states.append(current)
        joint = tuple(
            profile.action(agent, memory) for agent in model.agents
        )
        for agent, action in zip(model.agents, joint):
            if action not in model.actions_of(current, agent):
                raise InvalidWitnessError(
                    "action %s of agent %s unavailable at %s"
                    % (action, agent, current)
                )
        profiles.append(joint)
        memory = update_memory(profile.mode, memory, joint, model.out(current, joint))
    return Lasso(tuple(states), tuple(profiles), visited[memory])


def eval_on_lasso(
    model: ConcurrentGameModel, lasso: Lasso, goal: PathFormula
) -> bool:
    """Truth of a path goal on the ultimately periodic play."""
    cache: dict[StateFormula, frozenset[str]] = {}

    def holds(phi: StateFormula, position: int) -> bool:
        if phi not in cache:
            cache[phi] = extension_of(model, phi)
        return lasso.state_at(position) in cache[phi]

    horizon = len(lasso.states)
    for part in path_conjuncts(goal):
        if isinstance(part, Next):
            if not holds(part.body, 1):
                return False
        elif isinstance(part, Globally):
            if not all(holds(part.body, i) for i in range(horizon)):
                return False
        elif isinstance(part, Until):
            for position in range(horizon):
                if holds(part.right, position):
                    break
                if not holds(part.left, position):
                    return False
            else:
                return False
        else:
            raise TypeError("not a path goal: %r" % (part,))
    return True


def atl_force(
    model: ConcurrentGameModel,
    coalition: Iterable[str],
    targets: frozenset[str],
) -> frozenset[str]:
    """States where the coalition has a one-step action into `targets`."""
    members = frozenset(coalition)
    agent_index = {a: i for i, a in enumerate(model.agents)}
    indices = tuple(sorted(agent_index[a] for a in members))
    result = set()
    for state in model.states:
        block_ok: dict[tuple[str, ...], bool] = {}
        for profile in model.profiles(state):
            restriction = tuple(profile[i] for i in indices)
            previous = block_ok.get(restriction, True)
            if previous and model.out(state, profile) not in targets:
                previous = False
            block_ok[restriction] = previous
        if any(block_ok.values()):
            result.add(state)
    return frozenset(result)


def atl_check(
    model: ConcurrentGameModel,
    coalition: Iterable[str],
    goal: PathFormula,
) -> frozenset[str]:
    """Classic coalition-logic extension of a single path goal.

    Uses the effectivity fixpoints directly, independent of the
    translation pipeline; conjunction goals are not supported here.
    """
    if isinstance(goal, Next):
        return atl_force(model, coalition, extension_of(model, goal.body))
    if isinstance(goal, Until):
        left = extension_of(model, goal.left)
        right = extension_of(model, goal.right)
        current: frozenset[str] = frozenset()
        while True:
            updated = right | (left & atl_force(model, coalition, current))
            if updated == current:
                return current
            current = updated
    if isinstance(goal, Globally):
        body = extension_of(model, goal.body)
        current = frozenset(model.states)
        while True:
            updated = body & atl_force(model, coalition, current)
            if updated == current:
                return current
            current = updated
    raise ValueError("one path goal at a time; conjunctions are not supported")


def atl_holds(
    model: ConcurrentGameModel,
    state: str,
    coalition: Iterable[str],
    goal: PathFormula,
) -> bool:
    return state in atl_check(model, coalition, goal)
