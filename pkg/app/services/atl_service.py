"""
Perfect-information ATL model checking and the sub-formula checking pass
"""
import hashlib
import logging
from typing import Dict, FrozenSet, Iterable, List, Set, Tuple

from app.core.exceptions import FragmentError, InputError
from app.models.formula import (
    CONSTANTS, FALSE, TRUE, And, Atom, Exists, ForAll, Formula, Next, Not, Or, Release, Strategic, Until,
)
from app.models.icgs import ICGS
from app.models.results import CheckedFormula, CheckEntry, CheckResult, Tag
from app.models.submodel import SubmodelPair
from app.services.formula_service import fresh_name, is_atl_state, replace_subformula, subformulas

logger = logging.getLogger(__name__)

StateSet = FrozenSet[int]


class FixpointChecker:
    """
    Explicit-state checker over a perfect-information model.

    States are interned to integers; for each coalition the enabled joint
    actions of a state are grouped by the coalition's choice, so a pre-image
    is one pass over the groups.
    """

    def __init__(self, m: ICGS):
        if not m.is_perfect_information:
            raise InputError("ATL fixpoint checking requires a perfect-information model")
        self.model = m
        self.n = len(m.states)
        self.all: StateSet = frozenset(range(self.n))
        self.labels: List[Set[str]] = [set(m.label(s)) for s in m.states]
        self._moves = [
            [(joint, m.index[t]) for joint, t in m.moves[s]]
            for s in m.states
        ]
        self._groups: Dict[FrozenSet[str], List[List[FrozenSet[int]]]] = {}
        self._memo: Dict[Formula, StateSet] = {}

    def add_label(self, atom: str, states: Iterable[str]) -> None:
        """Label extra states with a new atom"""
        for s in states:
            self.labels[self.model.index[s]].add(atom)
        self._memo.clear()

    def groups(self, coalition: FrozenSet[str]) -> List[List[FrozenSet[int]]]:
        """Per state: for each coalition choice, the successors it may lead to"""
        coalition = frozenset(coalition)
        if coalition not in self._groups:
            positions = [i for i, a in enumerate(self.model.agents) if a in coalition]
            table = []
            for moves in self._moves:
                by_choice: Dict[Tuple[str, ...], Set[int]] = {}
                for joint, t in moves:
                    by_choice.setdefault(tuple(joint[i] for i in positions), set()).add(t)
                table.append([frozenset(succ) for _, succ in sorted(by_choice.items())])
            self._groups[coalition] = table
        return self._groups[coalition]

    def pre(self, coalition: FrozenSet[str], targets: StateSet) -> StateSet:
        """Some coalition choice forces the successor into `targets`"""
        return frozenset(
            s for s, choices in enumerate(self.groups(coalition))
            if any(succ <= targets for succ in choices)
        )

    def dual_pre(self, coalition: FrozenSet[str], targets: StateSet) -> StateSet:
        """Every coalition choice admits a successor in `targets`"""
        return frozenset(
            s for s, choices in enumerate(self.groups(coalition))
            if choices and all(succ & targets for succ in choices)
        )

    def until_chain(self, coalition, a: StateSet, b: StateSet, dual: bool = False) -> List[StateSet]:
        """Increasing iterates of Z = b | (a & pre(Z)), starting from the empty set"""
        pre = self.dual_pre if dual else self.pre
        chain = [frozenset()]
        while True:
            nxt = b | (a & pre(coalition, chain[-1]))
            if nxt == chain[-1]:
                return chain
            chain.append(nxt)

    def release_chain(self, coalition, a: StateSet, b: StateSet, dual: bool = False) -> List[StateSet]:
        """Decreasing iterates of Z = b & (a | pre(Z)), starting from every state"""
        pre = self.dual_pre if dual else self.pre
        chain = [self.all]
        while True:
            nxt = b & (a | pre(coalition, chain[-1]))
            if nxt == chain[-1]:
                return chain
            chain.append(nxt)

    def sat(self, f: Formula) -> StateSet:
        if f in self._memo:
            return self._memo[f]
        result = self._sat(f)
        self._memo[f] = result
        return result

    def _sat(self, f: Formula) -> StateSet:
        if f == TRUE:
            return self.all
        if f == FALSE:
            return frozenset()
        if isinstance(f, Atom):
            return frozenset(i for i in range(self.n) if f.name in self.labels[i])
        if isinstance(f, Not):
            return self.all - self.sat(f.operand)
        if isinstance(f, And):
            return self.sat(f.left) & self.sat(f.right)
        if isinstance(f, Or):
            return self.sat(f.left) | self.sat(f.right)
        if isinstance(f, Strategic):
            dual = isinstance(f, ForAll)
            body = f.body
            if isinstance(body, Next):
                pre = self.dual_pre if dual else self.pre
                return pre(f.coalition, self.sat(body.operand))
            if isinstance(body, Until):
                return self.until_chain(f.coalition, self.sat(body.left), self.sat(body.right), dual)[-1]
            if isinstance(body, Release):
                return self.release_chain(f.coalition, self.sat(body.left), self.sat(body.right), dual)[-1]
        raise FragmentError(f"Formula is outside the ATL fragment: {f}")

    def states(self, f: Formula) -> FrozenSet[str]:
        if not is_atl_state(f):
            raise FragmentError(f"Formula is outside the ATL fragment: {f}")
        return frozenset(self.model.states[i] for i in self.sat(f))


def coalition_pre(m: ICGS, coalition: Iterable[str], targets: Iterable[str]) -> FrozenSet[str]:
    checker = FixpointChecker(m)
    target_ids = frozenset(m.index[s] for s in targets)
    return frozenset(m.states[i] for i in checker.pre(frozenset(coalition), target_ids))


def check_atl(m: ICGS, f: Formula) -> FrozenSet[str]:
    """States of a perfect-information model satisfying an ATL formula"""
    return FixpointChecker(m).states(f)


# ---------------------------------------------------------------------------
# Sub-formula checking on a candidate pair
# ---------------------------------------------------------------------------

def atom_id(prefix: str, f: Formula, taken: Iterable[str]) -> str:
    """`natom_<hash>` / `patom_<hash>`, suffixed if the name is taken"""
    digest = hashlib.sha1(str(f).encode("utf-8")).hexdigest()[:8]
    return fresh_name(f"{prefix}_{digest}", taken)


def substitute_checked(f: Formula, checked: Iterable[CheckedFormula]) -> Formula:
    """Replace checked forms by their atoms, in checking (innermost-first) order"""
    for c in checked:
        f = replace_subformula(f, c.checked_form, c.atom)
    return f


def check_subformulas(pair: SubmodelPair, f: Formula) -> CheckResult:
    """
    Check every strategic ATL subformula of `f` bottom-up on both sub-models.

    Negative entries mark core states where the subformula surely holds in the
    source model. Positive entries mark core states where it may hold, and
    every source state outside the core.
    """
    negative = FixpointChecker(pair.negative)
    positive = FixpointChecker(pair.positive)
    outside = [s for s in pair.source_states if s not in pair.core_states]
    core = pair.ordered_core

    taken = set(pair.negative.atoms) | set(pair.positive.atoms) | set(CONSTANTS)
    checked: Dict[Tag, List[CheckedFormula]] = {Tag.NEGATIVE: [], Tag.POSITIVE: []}
    entries: List[CheckEntry] = []

    for g in subformulas(f):
        if not isinstance(g, Strategic):
            continue
        form_n = substitute_checked(g, checked[Tag.NEGATIVE])
        form_p = substitute_checked(g, checked[Tag.POSITIVE])
        if not (is_atl_state(form_n) and is_atl_state(form_p)):
            logger.debug(f"[CheckSubformulas] Leaving {g} to runtime verification")
            continue

        natom = atom_id("natom", g, taken)
        taken.add(natom)
        patom = atom_id("patom", g, taken)
        taken.add(patom)

        sat_n = negative.states(form_n)
        sat_p = positive.states(form_p)
        n_states = [s for s in core if s in sat_n]
        p_states = [s for s in core if s in sat_p] + outside

        entries.extend(CheckEntry(s, g, Tag.NEGATIVE, natom) for s in n_states)
        entries.extend(CheckEntry(s, g, Tag.POSITIVE, patom) for s in p_states)
        negative.add_label(natom, n_states)
        positive.add_label(patom, [s for s in core if s in sat_p] + [pair.top_sink])

        checked[Tag.NEGATIVE].append(CheckedFormula(g, form_n, Tag.NEGATIVE, natom))
        checked[Tag.POSITIVE].append(CheckedFormula(g, form_p, Tag.POSITIVE, patom))

    ordered_checked = tuple(c for pair_ in zip(checked[Tag.NEGATIVE], checked[Tag.POSITIVE]) for c in pair_)
    logger.debug(
        f"[CheckSubformulas] Core of {len(core)} state(s): {len(ordered_checked) // 2} subformula(s) checked, "
        f"{len(entries)} entries"
    )
    return CheckResult(entries=tuple(entries), checked=ordered_checked)
