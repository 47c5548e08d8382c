"""Büchi automata and three-valued monitors"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Tuple

from app.models.formula import Formula


class Verdict(str, Enum):
    TOP = "top"
    BOTTOM = "bottom"
    UNKNOWN = "unknown"

    @property
    def symbol(self) -> str:
        return {"top": "⊤", "bottom": "⊥", "unknown": "?"}[self.value]

    @property
    def conclusive(self) -> bool:
        return self is not Verdict.UNKNOWN


@dataclass(frozen=True)
class BuchiTransition:
    """
    Guarded edge: enabled on letters containing every `positive` atom and no
    `negative` atom. `accepting` lists the acceptance sets the edge visits.
    """

    positive: FrozenSet[str]
    negative: FrozenSet[str]
    target: int
    accepting: FrozenSet[int]

    def enabled_on(self, event: FrozenSet[str]) -> bool:
        return self.positive <= event and not (self.negative & event)


@dataclass(frozen=True)
class BuchiAutomaton:
    """
    Generalized Büchi automaton with transition-based acceptance.

    States are sets of pending obligations; there is one acceptance set per
    until-subformula, and a run is accepting when it visits every set
    infinitely often. With no untils every infinite run is accepting.
    """

    formula: Formula
    atoms: Tuple[str, ...]
    obligations: Tuple[FrozenSet[Formula], ...]
    initial: int
    transitions: Tuple[Tuple[BuchiTransition, ...], ...]
    acceptance_sets: Tuple[Formula, ...]

    @property
    def state_count(self) -> int:
        return len(self.obligations)


@dataclass(frozen=True)
class Monitor:
    """
    Deterministic Moore machine over letters 2^atoms.

    Letters are bitmasks: bit j is set when `atoms[j]` holds. `transitions[q]`
    is indexed by letter.
    """

    formula: Formula
    atoms: Tuple[str, ...]
    initial: int
    transitions: Tuple[Tuple[int, ...], ...]
    outputs: Tuple[Verdict, ...]

    @property
    def state_count(self) -> int:
        return len(self.outputs)

    def letter(self, event: Iterable[str]) -> int:
        """Project an event onto the tracked atoms"""
        present = set(event)
        return sum(1 << j for j, a in enumerate(self.atoms) if a in present)

    def step(self, state: int, event: Iterable[str]) -> int:
        return self.transitions[state][self.letter(event)]


@dataclass(frozen=True)
class MonitorRun:
    verdict: Verdict
    verdicts: Tuple[Verdict, ...]
    steps: int
