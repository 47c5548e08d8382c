"""Concurrent game structures with imperfect information"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple

JointAction = Tuple[str, ...]  # one action per agent, in ICGS.agents order


@dataclass(frozen=True)
class ICGS:
    """
    Immutable game structure.

    `indistinguishability` stores, per agent, a partition of the states;
    `transition` is keyed by (state, joint action) with joint actions ordered
    like `agents`. Identifiers are opaque strings; `index` interns states to
    dense integers for the fixpoint code.
    """

    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    states: Tuple[str, ...]
    initial_state: str
    actions: Mapping[str, Tuple[str, ...]]
    indistinguishability: Mapping[str, Tuple[FrozenSet[str], ...]]
    protocol: Mapping[Tuple[str, str], FrozenSet[str]]
    transition: Mapping[Tuple[str, JointAction], str]
    labeling: Mapping[str, FrozenSet[str]]

    @cached_property
    def index(self) -> Dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def _class_lookup(self) -> Dict[Tuple[str, str], FrozenSet[str]]:
        lookup = {}
        for agent, classes in self.indistinguishability.items():
            for cls in classes:
                for s in cls:
                    lookup[(agent, s)] = cls
        return lookup

    def class_of(self, agent: str, state: str) -> FrozenSet[str]:
        """Equivalence class of `state` under the agent's relation"""
        return self._class_lookup.get((agent, state), frozenset({state}))

    def enabled(self, agent: str, state: str) -> FrozenSet[str]:
        return self.protocol.get((agent, state), frozenset())

    def label(self, state: str) -> FrozenSet[str]:
        return self.labeling.get(state, frozenset())

    def joint_actions(self) -> Iterator[JointAction]:
        """Every joint action in ACT (the full product of action sets)"""
        return product(*(self.actions[a] for a in self.agents))

    @cached_property
    def moves(self) -> Dict[str, List[Tuple[JointAction, str]]]:
        """Enabled joint actions with their successor, per state"""
        table: Dict[str, List[Tuple[JointAction, str]]] = {s: [] for s in self.states}
        for (s, act), t in self.transition.items():
            if s in table:
                table[s].append((act, t))
        for s in table:
            table[s].sort()
        return table

    def successors(self, state: str) -> FrozenSet[str]:
        return frozenset(t for _, t in self.moves.get(state, ()))

    def reachable(self, start: Optional[str] = None) -> FrozenSet[str]:
        """States reachable from `start` (default the initial state)"""
        start = self.initial_state if start is None else start
        seen = {start}
        stack = [start]
        while stack:
            s = stack.pop()
            for t in self.successors(s):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    @property
    def is_perfect_information(self) -> bool:
        return all(len(cls) == 1 for classes in self.indistinguishability.values() for cls in classes)


@dataclass(frozen=True)
class History:
    """Nonempty finite sequence of states"""

    states: Tuple[str, ...]

    def __post_init__(self):
        if not self.states:
            raise ValueError("A history must contain at least one state")

    def __len__(self) -> int:
        return len(self.states)

    def prefix(self, i: int) -> "History":
        return History(self.states[:i])


@dataclass(frozen=True)
class Trace:
    """
    Finite sequence of events (sets of atoms).

    `states` optionally records the history that produced the events, as
    emitted by the simulator; it lets the runtime engine read derived labels
    directly instead of estimating the visited states.
    """

    events: Tuple[FrozenSet[str], ...]
    states: Optional[Tuple[str, ...]] = None

    def __len__(self) -> int:
        return len(self.events)

    @property
    def atoms(self) -> FrozenSet[str]:
        found: set = set()
        for event in self.events:
            found |= event
        return frozenset(found)


@dataclass(frozen=True)
class Violation:
    """One violated structural condition"""

    kind: str
    message: str
    agent: Optional[str] = None
    state: Optional[str] = None
    action: Optional[str] = None

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> List[str]:
        return [v.kind for v in self.violations]
