"""
Game structure service: validation, execution, loading and simulation
"""
import json
import logging
from itertools import product
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.config import settings
from app.core.exceptions import InputError, ModelValidationError, ProtocolError
from app.models.formula import CONSTANTS
from app.models.icgs import ICGS, History, JointAction, Trace, ValidationReport, Violation
from app.schemas.model import ModelDocument, TransitionSpec

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_model(m: ICGS) -> ValidationReport:
    """
    List every violated structural condition. An empty report means the
    structure is a legal game structure.
    """
    violations: List[Violation] = []
    states = set(m.states)
    atoms = set(m.atoms)

    if not m.states:
        violations.append(Violation("empty-states", "Model has no states"))
    if len(states) != len(m.states):
        violations.append(Violation("duplicate-state", "State identifiers are not unique"))
    if len(set(m.agents)) != len(m.agents):
        violations.append(Violation("duplicate-agent", "Agent identifiers are not unique"))
    if not m.agents:
        violations.append(Violation("empty-agents", "Model has no agents"))
    if m.initial_state not in states:
        violations.append(Violation(
            "initial-state", f"Initial state {m.initial_state!r} is not a state", state=m.initial_state,
        ))
    reserved = atoms & CONSTANTS
    for atom in sorted(reserved):
        violations.append(Violation("reserved-atom", f"Atom name {atom!r} is reserved"))

    for agent in m.agents:
        if not m.actions.get(agent):
            violations.append(Violation("empty-actions", f"Agent {agent} has no actions", agent=agent))

    for s in m.states:
        for atom in sorted(m.label(s) - atoms):
            violations.append(Violation(
                "labeling-atom", f"State {s} is labelled with unknown atom {atom!r}", state=s,
            ))
    for s in m.labeling:
        if s not in states:
            violations.append(Violation("labeling-state", f"Labelling mentions unknown state {s!r}", state=s))

    # Partitions
    for agent, classes in m.indistinguishability.items():
        if agent not in m.agents:
            violations.append(Violation(
                "unknown-agent", f"Indistinguishability given for unknown agent {agent!r}", agent=agent,
            ))
            continue
        seen: Dict[str, int] = {}
        for k, cls in enumerate(classes):
            for s in sorted(cls):
                if s not in states:
                    violations.append(Violation(
                        "partition", f"Class of agent {agent} mentions unknown state {s!r}", agent=agent, state=s,
                    ))
                elif s in seen and seen[s] != k:
                    violations.append(Violation(
                        "partition", f"State {s} lies in two classes of agent {agent}", agent=agent, state=s,
                    ))
                seen[s] = k

    # Protocol
    for (agent, s), enabled in sorted(m.protocol.items()):
        if agent not in m.agents or s not in states:
            violations.append(Violation(
                "protocol-key", f"Protocol entry for unknown agent/state ({agent}, {s})", agent=agent, state=s,
            ))
            continue
        for a in sorted(enabled - set(m.actions.get(agent, ()))):
            violations.append(Violation(
                "protocol-action", f"Protocol of agent {agent} at {s} allows unknown action {a!r}",
                agent=agent, state=s, action=a,
            ))
    for agent in m.agents:
        for s in m.states:
            if not m.enabled(agent, s):
                violations.append(Violation(
                    "protocol-empty", f"Agent {agent} has no enabled action at {s}", agent=agent, state=s,
                ))
        for cls in m.indistinguishability.get(agent, ()):
            members = [s for s in m.states if s in cls]
            if len({m.enabled(agent, s) for s in members}) > 1:
                violations.append(Violation(
                    "protocol-uniformity",
                    f"Agent {agent} has different protocols on indistinguishable states {', '.join(members)}",
                    agent=agent, state=members[0],
                ))

    # Transitions
    for s in m.states:
        for joint in product(*(sorted(m.enabled(a, s)) for a in m.agents)):
            target = m.transition.get((s, joint))
            if target is None:
                violations.append(Violation(
                    "totality", f"No transition from {s} on enabled joint action {format_joint(joint)}", state=s,
                ))
            elif target not in states:
                violations.append(Violation(
                    "transition-target", f"Transition from {s} leads to unknown state {target!r}", state=s,
                ))
    for (s, joint), _ in m.transition.items():
        if s not in states:
            violations.append(Violation("transition-source", f"Transition from unknown state {s!r}", state=s))
            continue
        if len(joint) != len(m.agents):
            violations.append(Violation(
                "transition-arity", f"Joint action {format_joint(joint)} at {s} has wrong arity", state=s,
            ))
            continue
        for agent, a in zip(m.agents, joint):
            if a not in m.enabled(agent, s):
                violations.append(Violation(
                    "transition-not-enabled",
                    f"Transition from {s} on {format_joint(joint)} uses action {a!r} not enabled for agent {agent}",
                    agent=agent, state=s, action=a,
                ))
                break

    return ValidationReport(tuple(violations))


def ensure_valid(m: ICGS) -> ICGS:
    report = validate_model(m)
    if not report.valid:
        raise ModelValidationError(report)
    return m


def format_joint(joint: JointAction) -> str:
    return "(" + ",".join(joint) + ")"


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _require_state(m: ICGS, s: str) -> None:
    if s not in m.index:
        raise InputError(f"Unknown state: {s!r}")


def enabled_joint_actions(m: ICGS, s: str) -> FrozenSet[JointAction]:
    _require_state(m, s)
    return frozenset(product(*(m.enabled(a, s) for a in m.agents)))


def step(m: ICGS, s: str, joint: JointAction) -> str:
    _require_state(m, s)
    if len(joint) != len(m.agents):
        raise InputError(f"Joint action {format_joint(joint)} must give one action per agent")
    for agent, a in zip(m.agents, joint):
        if a not in m.enabled(agent, s):
            raise ProtocolError(f"Action {a!r} of agent {agent} is not enabled at {s}", agent=agent)
    try:
        return m.transition[(s, tuple(joint))]
    except KeyError:
        raise InputError(f"No transition from {s} on {format_joint(joint)}")


def is_valid_history(m: ICGS, h: History) -> bool:
    if any(s not in m.index for s in h.states):
        return False
    return all(t in m.successors(s) for s, t in zip(h.states, h.states[1:]))


def histories_indistinguishable(m: ICGS, agent: str, h1: History, h2: History) -> bool:
    """Synchronous, pointwise indistinguishability"""
    if len(h1) != len(h2):
        return False
    return all(t in m.class_of(agent, s) for s, t in zip(h1.states, h2.states))


def confused_states(m: ICGS) -> FrozenSet[str]:
    """States lying in a nontrivial class for at least one agent"""
    return frozenset(
        s for classes in m.indistinguishability.values() for cls in classes if len(cls) > 1 for s in cls
    )


def imperfect_information_degree(m: ICGS) -> float:
    if not m.states:
        return 0.0
    return len(confused_states(m) & set(m.states)) / len(m.states)


# ---------------------------------------------------------------------------
# Loading and dumping
# ---------------------------------------------------------------------------

def close_partition(states: Tuple[str, ...], groups: List[List[str]]) -> Tuple[FrozenSet[str], ...]:
    """Union-find closure of overlapping groups; only nontrivial classes are kept"""
    parent = {s: s for s in states}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for group in groups:
        for s in group:
            if s not in parent:
                raise InputError(f"Indistinguishability mentions unknown state {s!r}")
        for s, t in zip(group, group[1:]):
            rs, rt = find(s), find(t)
            if rs != rt:
                parent[rt] = rs

    classes: Dict[str, List[str]] = {}
    for s in states:
        classes.setdefault(find(s), []).append(s)
    return tuple(frozenset(members) for members in classes.values() if len(members) > 1)


def model_from_document(doc: ModelDocument) -> ICGS:
    agents = tuple(doc.agents)
    states = tuple(doc.states)
    if len(states) > settings.MAX_MODEL_STATES:
        raise InputError(f"Model has {len(states)} states, more than the limit of {settings.MAX_MODEL_STATES}")
    unknown_agents = (set(doc.actions) | set(doc.indistinguishability) | set(doc.protocol)) - set(agents)
    if unknown_agents:
        raise InputError(f"Unknown agent(s): {', '.join(sorted(unknown_agents))}")
    missing = [a for a in agents if a not in doc.actions]
    if missing:
        raise InputError(f"No actions declared for agent(s): {', '.join(missing)}")

    actions = {a: tuple(doc.actions[a]) for a in agents}
    partitions = {
        a: close_partition(states, doc.indistinguishability.get(a, []))
        for a in agents
    }
    protocol = {}
    for a in agents:
        declared = doc.protocol.get(a, {})
        for s in declared:
            if s not in states:
                raise InputError(f"Protocol of agent {a} mentions unknown state {s!r}")
        for s in states:
            protocol[(a, s)] = frozenset(declared[s]) if s in declared else frozenset(actions[a])

    transition: Dict[Tuple[str, JointAction], str] = {}
    for spec in doc.transitions:
        if set(spec.act) != set(agents):
            raise InputError(
                f"Transition from {spec.from_} must give exactly one action per agent, got {sorted(spec.act)}"
            )
        joint = tuple(spec.act[a] for a in agents)
        key = (spec.from_, joint)
        if key in transition and transition[key] != spec.to:
            raise InputError(f"Conflicting transitions from {spec.from_} on {format_joint(joint)}")
        transition[key] = spec.to

    labeling = {s: frozenset(doc.labeling.get(s, ())) for s in states}
    for s in doc.labeling:
        if s not in states:
            raise InputError(f"Labelling mentions unknown state {s!r}")

    return ICGS(
        agents=agents,
        atoms=tuple(doc.atoms),
        states=states,
        initial_state=doc.initial,
        actions=actions,
        indistinguishability=partitions,
        protocol=protocol,
        transition=transition,
        labeling=labeling,
    )


def load_model(source: Union[str, Path, Mapping[str, Any], ModelDocument], validate: bool = True) -> ICGS:
    """Load a model from a path, a parsed JSON object or a document"""
    if isinstance(source, ModelDocument):
        doc = source
    else:
        if isinstance(source, (str, Path)):
            try:
                data = json.loads(Path(source).read_text(encoding="utf-8"))
            except OSError as e:
                raise InputError(f"Cannot read model file {source}: {e}")
            except json.JSONDecodeError as e:
                raise InputError(f"Model file {source} is not valid JSON: {e}")
        else:
            data = source
        try:
            doc = ModelDocument.model_validate(data)
        except ValidationError as e:
            raise InputError(f"Model does not match the schema: {e}")

    m = model_from_document(doc)
    if validate:
        ensure_valid(m)
    logger.debug(f"[Model] Loaded {len(m.states)} states, {len(m.agents)} agents, {len(m.transition)} transitions")
    return m


def to_document(m: ICGS) -> ModelDocument:
    """Canonical document: declared orders kept, everything else sorted by them"""
    state_order = m.index
    transitions = sorted(
        m.transition.items(),
        key=lambda item: (
            state_order.get(item[0][0], len(state_order)),
            tuple(m.actions[a].index(x) if x in m.actions[a] else len(m.actions[a])
                  for a, x in zip(m.agents, item[0][1])),
        ),
    )

    def ordered(items, order) -> List[str]:
        return sorted(items, key=lambda x: (order.index(x) if x in order else len(order), x))

    return ModelDocument(
        agents=list(m.agents),
        atoms=list(m.atoms),
        states=list(m.states),
        initial=m.initial_state,
        actions={a: list(m.actions[a]) for a in m.agents},
        indistinguishability={
            a: sorted(
                (ordered(cls, m.states) for cls in m.indistinguishability.get(a, ()) if len(cls) > 1),
                key=lambda members: state_order.get(members[0], 0),
            )
            for a in m.agents
            if any(len(cls) > 1 for cls in m.indistinguishability.get(a, ()))
        },
        protocol={a: {s: ordered(m.enabled(a, s), m.actions[a]) for s in m.states} for a in m.agents},
        transitions=[
            TransitionSpec(**{"from": s, "act": dict(zip(m.agents, joint)), "to": t})
            for (s, joint), t in transitions
        ],
        labeling={s: ordered(m.label(s), m.atoms) for s in m.states},
    )


def dump_model(m: ICGS) -> Dict[str, Any]:
    return to_document(m).model_dump(by_alias=True)


def dumps_model(m: ICGS) -> str:
    return to_document(m).model_dump_json(by_alias=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def simulate(m: ICGS, steps: int, seed: int = 0) -> Trace:
    """
    Random run from the initial state: `steps` visited states, each followed
    by a uniformly chosen enabled joint action.
    """
    if steps < 0:
        raise InputError("Number of steps must be non-negative")
    rng = np.random.default_rng(seed)
    visited: List[str] = []
    s = m.initial_state
    for _ in range(steps):
        visited.append(s)
        options = sorted(enabled_joint_actions(m, s))
        joint = options[int(rng.integers(len(options)))]
        s = step(m, s, joint)
    events = tuple(m.label(v) for v in visited)
    return Trace(events=events, states=tuple(visited))
