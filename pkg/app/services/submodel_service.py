"""
Candidate enumeration and negative/positive sub-model construction
"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from app.config import settings
from app.core.exceptions import InputError
from app.models.formula import Formula
from app.models.icgs import ICGS, JointAction
from app.models.submodel import SubmodelPair
from app.services.formula_service import fresh_name

logger = logging.getLogger(__name__)

BOTTOM_SINK = "s_bot"
TOP_SINK = "s_top"


def _build_submodel(m: ICGS, core: Iterable[str], sink: str, sink_label: FrozenSet[str]) -> ICGS:
    core = frozenset(core)
    if m.initial_state not in core:
        raise InputError(f"Core must contain the initial state {m.initial_state}")
    unknown = core - set(m.states)
    if unknown:
        raise InputError(f"Core mentions unknown state(s): {', '.join(sorted(unknown))}")

    kept = tuple(s for s in m.states if s in core)
    transition: Dict[Tuple[str, JointAction], str] = {}
    for (s, joint), t in m.transition.items():
        if s in core:
            transition[(s, joint)] = t if t in core else sink
    for joint in m.joint_actions():
        transition[(sink, joint)] = sink

    protocol = {(a, s): m.enabled(a, s) for a in m.agents for s in kept}
    protocol.update({(a, sink): frozenset(m.actions[a]) for a in m.agents})

    partitions = {
        a: tuple(cls & core for cls in classes if len(cls & core) > 1)
        for a, classes in m.indistinguishability.items()
    }
    labeling = {s: m.label(s) for s in kept}
    labeling[sink] = sink_label

    return ICGS(
        agents=m.agents,
        atoms=m.atoms,
        states=kept + (sink,),
        initial_state=m.initial_state,
        actions=m.actions,
        indistinguishability=partitions,
        protocol=protocol,
        transition=transition,
        labeling=labeling,
    )


def build_negative(m: ICGS, core: Iterable[str]) -> ICGS:
    """Restriction to `core`; transitions leaving it go to an all-false sink"""
    return _build_submodel(m, core, fresh_name(BOTTOM_SINK, m.states), frozenset())


def build_positive(m: ICGS, core: Iterable[str]) -> ICGS:
    """Restriction to `core`; transitions leaving it go to an all-true sink"""
    return _build_submodel(m, core, fresh_name(TOP_SINK, m.states), frozenset(m.atoms))


def build_pair(m: ICGS, core: Iterable[str]) -> SubmodelPair:
    core = frozenset(core)
    return SubmodelPair(
        core_states=core,
        source_states=m.states,
        negative=build_negative(m, core),
        positive=build_positive(m, core),
        bottom_sink=fresh_name(BOTTOM_SINK, m.states),
        top_sink=fresh_name(TOP_SINK, m.states),
    )


def _conflicts(m: ICGS) -> Dict[str, FrozenSet[str]]:
    """States some agent cannot tell apart from each state"""
    table = {}
    for s in m.states:
        found = set()
        for a in m.agents:
            found |= m.class_of(a, s)
        found.discard(s)
        table[s] = frozenset(found)
    return table


def _grow(
    m: ICGS,
    core: FrozenSet[str],
    excluded: FrozenSet[str],
    conflicts: Dict[str, FrozenSet[str]],
) -> Tuple[FrozenSet[str], FrozenSet[str], Optional[str]]:
    """
    Extend `core` along transitions as far as no choice is needed.

    Returns the grown core, the excluded states and the first frontier state
    that needs a branching decision (None once the core is maximal).
    """
    core, excluded = set(core), set(excluded)
    changed = True
    while changed:
        changed = False
        frontier = sorted(
            {t for s in core for t in m.successors(s)} - core - excluded,
            key=m.index.__getitem__,
        )
        for t in frontier:
            if conflicts[t] & core:
                excluded.add(t)
                changed = True
            elif conflicts[t] <= excluded:
                core.add(t)
                changed = True
            else:
                return frozenset(core), frozenset(excluded), t
    return frozenset(core), frozenset(excluded), None


def enumerate_cores(m: ICGS, limit: int) -> List[FrozenSet[str]]:
    """
    Perfect-information cores reachable from the initial state.

    Depth-first over branching decisions, keeping a confused state before
    dropping it, so the first cores are the largest ones in state order.
    """
    conflicts = _conflicts(m)
    start = frozenset({m.initial_state})
    stack = [(start, conflicts[m.initial_state])]
    cores: List[FrozenSet[str]] = []
    seen = set()
    while stack and len(cores) < limit:
        core, excluded = stack.pop()
        core, excluded, branch = _grow(m, core, excluded, conflicts)
        if branch is None:
            if core not in seen:
                seen.add(core)
                cores.append(core)
            continue
        stack.append((core, excluded | {branch}))
        stack.append((core | {branch}, excluded | conflicts[branch]))
    if stack:
        logger.info(f"[Submodels] Candidate limit {limit} reached, {len(stack)} branches left unexplored")
    return cores


def find_submodels(m: ICGS, f: Optional[Formula] = None, limit: Optional[int] = None) -> List[SubmodelPair]:
    """Candidate sub-model pairs, in a deterministic order, at most `limit` of them"""
    limit = settings.MAX_CANDIDATES if limit is None else limit
    if limit < 1:
        raise InputError("Candidate limit must be at least 1")
    cores = enumerate_cores(m, limit)
    logger.debug(f"[Submodels] {len(cores)} candidate(s) for {f if f is not None else 'model'}")
    return [build_pair(m, core) for core in cores]
