"""
Brute-force evaluator used to cross-check the static checker and the pipeline.

Strategies are enumerated explicitly. Memoryless profiles are checked with
path fixpoints of their own; bounded-recall ones on products with the Büchi
automata of `monitor_service`.
"""
import logging
from enum import Enum
from itertools import product
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from app.config import settings
from app.core.exceptions import FragmentError, InputError, OracleScaleError
from app.models.formula import (
    FALSE, TRUE, And, Atom, Exists, ForAll, Formula, Next, Not, Or, Release, Strategic, Until,
)
from app.models.icgs import ICGS
from app.services.formula_service import is_atl_state
from app.services.monitor_service import accepts_some_path, ltl_to_buchi

logger = logging.getLogger(__name__)


class Recall(str, Enum):
    MEMORYLESS = "memoryless"
    BOUNDED = "bounded"


# ---------------------------------------------------------------------------
# Path semantics on ultimately periodic words
# ---------------------------------------------------------------------------

def evaluate_lasso(
    f: Formula,
    length: int,
    loop_start: int,
    holds: Callable[[Formula, int], bool],
) -> FrozenSet[int]:
    """
    Positions of the lasso word w[0..length-1] (w[length-1] followed by
    w[loop_start]) at which `f` holds.

    `holds(node, i)` decides atoms and strategic nodes at position i.
    """
    if length < 1 or not 0 <= loop_start < length:
        raise InputError("A lasso needs a nonempty word and a loop start inside it")
    positions = frozenset(range(length))

    def succ(i: int) -> int:
        return i + 1 if i + 1 < length else loop_start

    def pre(z: FrozenSet[int]) -> FrozenSet[int]:
        return frozenset(i for i in positions if succ(i) in z)

    def ev(g: Formula) -> FrozenSet[int]:
        if g == TRUE:
            return positions
        if g == FALSE:
            return frozenset()
        if isinstance(g, (Atom, Exists, ForAll)):
            return frozenset(i for i in positions if holds(g, i))
        if isinstance(g, Not):
            return positions - ev(g.operand)
        if isinstance(g, And):
            return ev(g.left) & ev(g.right)
        if isinstance(g, Or):
            return ev(g.left) | ev(g.right)
        if isinstance(g, Next):
            return pre(ev(g.operand))
        if isinstance(g, Until):
            a, b = ev(g.left), ev(g.right)
            z: FrozenSet[int] = frozenset()
            while True:
                nxt = b | (a & pre(z))
                if nxt == z:
                    return z
                z = nxt
        if isinstance(g, Release):
            a, b = ev(g.left), ev(g.right)
            z = positions
            while True:
                nxt = b & (a | pre(z))
                if nxt == z:
                    return z
                z = nxt
        raise TypeError(f"Unknown formula node: {g!r}")

    return ev(f)


def word_satisfies(f: Formula, stem: Sequence[FrozenSet[str]], loop: Sequence[FrozenSet[str]]) -> bool:
    """LTL satisfaction of the word stem . loop^omega at its first position"""
    if not loop:
        raise InputError("The loop of a lasso word must be nonempty")
    word = list(stem) + list(loop)
    return 0 in evaluate_lasso(f, len(word), len(stem), lambda g, i: isinstance(g, Atom) and g.name in word[i])


# ---------------------------------------------------------------------------
# Evaluator
# ---------------------------------------------------------------------------

class StrategyOracle:
    """
    Exhaustive evaluation of a formula on a small model.

    `memoryless`: uniform memoryless strategies (one action per agent and
    equivalence class), for any coalition and the ATL fragment.
    `bounded`: uniform strategies that see the last k visited states, for any
    coalition and full ATL*. Path formulas are decided on the product of the
    outcome graph with a Büchi automaton. For the empty and grand coalitions
    this is exact perfect recall and k plays no role.
    """

    def __init__(self, m: ICGS, recall: Recall = Recall.MEMORYLESS, k: Optional[int] = None):
        if len(m.states) > settings.ORACLE_MAX_STATES:
            raise OracleScaleError(f"Oracle handles at most {settings.ORACLE_MAX_STATES} states, got {len(m.states)}")
        if len(m.agents) > settings.ORACLE_MAX_AGENTS:
            raise OracleScaleError(f"Oracle handles at most {settings.ORACLE_MAX_AGENTS} agents, got {len(m.agents)}")
        widest = max((len(acts) for acts in m.actions.values()), default=0)
        if widest > settings.ORACLE_MAX_ACTIONS:
            raise OracleScaleError(f"Oracle handles at most {settings.ORACLE_MAX_ACTIONS} actions per agent")
        self.model = m
        self.recall = Recall(recall)
        self.k = len(m.states) if k is None else k
        if self.k < 1:
            raise InputError(f"Recall bound must be at least 1, got {self.k}")
        self.n = len(m.states)
        self.full = (1 << self.n) - 1
        self._memo: Dict[Formula, int] = {}

    # Sets of states are bitmasks over m.states indices.

    def _mask(self, states) -> int:
        return sum(1 << self.model.index[s] for s in states)

    def satisfying(self, f: Formula) -> FrozenSet[str]:
        if self.recall is Recall.MEMORYLESS and not is_atl_state(f):
            raise FragmentError(f"Memoryless oracle evaluates ATL formulas only: {f}")
        mask = self._eval(f)
        return frozenset(s for i, s in enumerate(self.model.states) if mask >> i & 1)

    def holds(self, f: Formula, s: str) -> bool:
        return s in self.satisfying(f)

    def _eval(self, f: Formula) -> int:
        if f not in self._memo:
            self._memo[f] = self._compute(f)
        return self._memo[f]

    def _compute(self, f: Formula) -> int:
        m = self.model
        if f == TRUE:
            return self.full
        if f == FALSE:
            return 0
        if isinstance(f, Atom):
            return self._mask(s for s in m.states if f.name in m.label(s))
        if isinstance(f, Not):
            return self.full & ~self._eval(f.operand)
        if isinstance(f, And):
            return self._eval(f.left) & self._eval(f.right)
        if isinstance(f, Or):
            return self._eval(f.left) | self._eval(f.right)
        if isinstance(f, Strategic):
            if self.recall is Recall.MEMORYLESS:
                return self._memoryless(f)
            return self._bounded(f)
        raise FragmentError(f"Path formula outside a strategic quantifier: {f}")

    # -- memoryless uniform strategies ------------------------------------

    def _classes(self, agent: str) -> List[Tuple[str, ...]]:
        m = self.model
        seen: Set[str] = set()
        classes = []
        for s in m.states:
            if s not in seen:
                cls = tuple(t for t in m.states if t in m.class_of(agent, s))
                seen.update(cls)
                classes.append(cls)
        return classes

    def strategies(self, coalition: FrozenSet[str]) -> Iterator[Dict[Tuple[str, str], str]]:
        """Uniform memoryless profiles of the coalition: (agent, state) -> action"""
        m = self.model
        slots = []
        for agent in m.agents:
            if agent in coalition:
                for cls in self._classes(agent):
                    slots.append((agent, cls, sorted(m.enabled(agent, cls[0]))))
        for choice in product(*(options for _, _, options in slots)):
            profile = {}
            for (agent, cls, _), action in zip(slots, choice):
                for s in cls:
                    profile[(agent, s)] = action
            yield profile

    def _successor_masks(self, coalition: FrozenSet[str], profile: Dict[Tuple[str, str], str]) -> List[int]:
        m = self.model
        masks = []
        for s in m.states:
            mask = 0
            for joint, t in m.moves[s]:
                if all(profile[(a, s)] == x for a, x in zip(m.agents, joint) if a in coalition):
                    mask |= 1 << m.index[t]
            masks.append(mask)
        return masks

    def _path_fixpoint(self, body: Formula, succ: List[int], universal: bool) -> int:
        """Starts from which all (universal) or some successor paths satisfy `body`"""

        def pre(z: int) -> int:
            out = 0
            for i, mask in enumerate(succ):
                if (mask & ~z == 0) if universal else (mask & z):
                    out |= 1 << i
            return out

        if isinstance(body, Next):
            return pre(self._eval(body.operand))
        a, b = self._eval(body.left), self._eval(body.right)
        if isinstance(body, Until):
            z = 0
            while True:
                nxt = b | (a & pre(z))
                if nxt == z:
                    return z
                z = nxt
        if isinstance(body, Release):
            z = self.full
            while True:
                nxt = b & (a | pre(z))
                if nxt == z:
                    return z
                z = nxt
        raise FragmentError(f"Memoryless oracle evaluates ATL formulas only: {body}")

    def _memoryless(self, f: Formula) -> int:
        exists = isinstance(f, Exists)
        result = 0 if exists else self.full
        for profile in self.strategies(f.coalition):
            succ = self._successor_masks(f.coalition, profile)
            if exists:
                result |= self._path_fixpoint(f.body, succ, universal=True)
            else:
                result &= self._path_fixpoint(f.body, succ, universal=False)
        return result

    # -- perfect and bounded recall -----------------------------------------

    def _path_automata(self, body: Formula):
        """Büchi automata of the body and its negation over placeholder atoms, plus a state -> letter map"""
        m = self.model
        placeholders: Dict[Formula, str] = {}

        def abstract(g: Formula) -> Formula:
            if g in (TRUE, FALSE):
                return g
            if isinstance(g, (Atom, Strategic)):
                return Atom(placeholders.setdefault(g, f"v{len(placeholders)}"))
            if isinstance(g, (Not, Next)):
                return type(g)(abstract(g.operand))
            return type(g)(abstract(g.left), abstract(g.right))

        word = abstract(body)
        masks = {name: self._eval(g) for g, name in placeholders.items()}
        letters = {
            s: frozenset(name for name, mask in masks.items() if mask >> m.index[s] & 1) for s in m.states
        }
        return ltl_to_buchi(word), ltl_to_buchi(Not(word)), letters

    def _bounded(self, f: Formula) -> int:
        m = self.model
        satisfy, violate, letters = self._path_automata(f.body)
        exists = isinstance(f, Exists)
        result = 0

        if not f.coalition or f.coalition == frozenset(m.agents):
            # every path is the outcome of some uniform profile of Ag, and <<>> quantifies over all paths
            some_path = exists == bool(f.coalition)
            for i, s in enumerate(m.states):
                if some_path:
                    holds = accepts_some_path(satisfy, s, m.successors, letters.__getitem__)
                else:
                    holds = not accepts_some_path(violate, s, m.successors, letters.__getitem__)
                if holds:
                    result |= 1 << i
            return result

        for i, s in enumerate(m.states):
            outcomes = (
                accepts_some_path(
                    violate if exists else satisfy, (s,), succ, lambda w: letters[w[-1]],
                )
                for succ in self._window_outcomes(f.coalition, s)
            )
            holds = (not all(outcomes)) if exists else all(outcomes)
            if holds:
                result |= 1 << i
        return result

    def _window(self, w: Tuple[str, ...], t: str) -> Tuple[str, ...]:
        return (w + (t,))[-self.k:]

    def _observation(self, agent: str, w: Tuple[str, ...]) -> Tuple[FrozenSet[str], ...]:
        return tuple(self.model.class_of(agent, s) for s in w)

    def _window_outcomes(self, coalition: FrozenSet[str], start: str) -> Iterator[Callable]:
        """
        Outcome graphs over windows (the last k visited states) from `start`,
        one per uniform k-recall profile of the coalition.
        """
        m = self.model
        windows = [(start,)]
        seen = {(start,)}
        for w in windows:
            for t in sorted(m.successors(w[-1]), key=m.index.__getitem__):
                nxt = self._window(w, t)
                if nxt not in seen:
                    seen.add(nxt)
                    windows.append(nxt)

        slots: Dict[Tuple[str, Tuple], List[str]] = {}
        for w in windows:
            for agent in m.agents:
                if agent in coalition:
                    slots.setdefault((agent, self._observation(agent, w)), sorted(m.enabled(agent, w[-1])))
        keys = list(slots)
        count = 1
        for key in keys:
            count *= len(slots[key])
        if count > settings.ORACLE_MAX_PROFILES:
            raise OracleScaleError(
                f"{count} uniform {self.k}-recall profiles from {start} exceed {settings.ORACLE_MAX_PROFILES}"
            )

        for choice in product(*(slots[key] for key in keys)):
            profile = dict(zip(keys, choice))

            def succ(w: Tuple[str, ...], profile=profile) -> List[Tuple[str, ...]]:
                return [
                    self._window(w, t)
                    for joint, t in m.moves[w[-1]]
                    if all(
                        profile[(a, self._observation(a, w))] == x
                        for a, x in zip(m.agents, joint) if a in coalition
                    )
                ]

            yield succ


def oracle_evaluate(
    m: ICGS,
    f: Formula,
    s: str,
    recall: Recall = Recall.MEMORYLESS,
    k: Optional[int] = None,
) -> bool:
    """Truth of `f` at `s` by strategy enumeration"""
    if s not in m.index:
        raise InputError(f"Unknown state: {s!r}")
    return StrategyOracle(m, recall, k).holds(f, s)
