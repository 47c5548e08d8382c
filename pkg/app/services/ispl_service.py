"""
ISPL export of perfect-information models for cross-checking with an
interpreted-systems model checker
"""
import logging
import re
from typing import Dict, Iterable, List, Optional, Tuple

from app.core.exceptions import FragmentError, InputError
from app.models.formula import FALSE, TRUE, And, Atom, Exists, ForAll, Formula, Next, Not, Or, Release, Until
from app.models.icgs import ICGS
from app.services.formula_service import fresh_name, is_atl_state
from app.services.icgs_service import ensure_valid
from app.utils.templates import render

logger = logging.getLogger(__name__)

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_RESERVED = {"Agent", "Environment", "Other", "Action", "state", "dead", "idle", "true", "false", "none", "and", "or"}


def _identifiers(names: Iterable[str], prefix: str) -> Dict[str, str]:
    """Map arbitrary identifiers to unique ISPL identifiers"""
    taken = set(_RESERVED)
    mapping: Dict[str, str] = {}
    for name in names:
        base = name if _IDENT.match(name) and name not in _RESERVED else prefix + re.sub(r"\W", "_", name)
        ident = fresh_name(base, taken)
        taken.add(ident)
        mapping[name] = ident
    return mapping


class _FormulaWriter:
    """Renders ATL state formulas in ISPL syntax, collecting coalition groups"""

    def __init__(self, agents: Dict[str, str], atoms: Dict[str, str]):
        self.agents = agents
        self.atoms = atoms
        self.groups: Dict[Tuple[str, ...], str] = {}

    def group(self, coalition) -> str:
        members = tuple(sorted(self.agents[a] for a in coalition))
        if members not in self.groups:
            self.groups[members] = f"g{len(self.groups) + 1}"
        return self.groups[members]

    def write(self, f: Formula) -> str:
        if f == TRUE:
            return "!dead"
        if f == FALSE:
            return "dead"
        if isinstance(f, Atom):
            return self.atoms[f.name]
        if isinstance(f, Not):
            return f"!({self.write(f.operand)})"
        if isinstance(f, And):
            return f"({self.write(f.left)} and {self.write(f.right)})"
        if isinstance(f, Or):
            return f"({self.write(f.left)} or {self.write(f.right)})"
        if isinstance(f, ForAll):
            return self._dual(f)
        if isinstance(f, Exists):
            return self._temporal(self._quantifier(f.coalition, existential=True), f.body)
        raise FragmentError(f"Cannot export {f} to ISPL")

    def _quantifier(self, coalition, existential: bool) -> str:
        # In deterministic game structures the empty coalition is the universal
        # path quantifier and its complement the existential one.
        if not coalition:
            return "A" if existential else "E"
        return f"<{self.group(coalition)}>"

    def _temporal(self, q: str, body: Formula) -> str:
        if isinstance(body, Next):
            return f"{q}X({self.write(body.operand)})"
        if isinstance(body, Until):
            if body.left == TRUE:
                return f"{q}F({self.write(body.right)})"
            return f"{q}({self.write(body.left)} U {self.write(body.right)})"
        if isinstance(body, Release) and body.left == FALSE:
            return f"{q}G({self.write(body.right)})"
        raise FragmentError(f"ISPL has no operator for {body}")

    def _dual(self, f: ForAll) -> str:
        if not f.coalition:
            return self._temporal(self._quantifier(f.coalition, existential=False), f.body)
        body = f.body
        q = self._quantifier(f.coalition, existential=True)
        if isinstance(body, Next):
            return f"!({q}X(!({self.write(body.operand)})))"
        if isinstance(body, Until) and body.left == TRUE:
            return f"!({q}G(!({self.write(body.right)})))"
        if isinstance(body, Release) and body.left == FALSE:
            return f"!({q}F(!({self.write(body.right)})))"
        raise FragmentError(f"ISPL has no dual operator for {f}")


def export_ispl(m: ICGS, f: Optional[Formula] = None) -> str:
    """Render a perfect-information model, and optionally an ATL formula, as ISPL"""
    ensure_valid(m)
    if not m.is_perfect_information:
        raise InputError("ISPL export supports perfect-information models only")
    if f is not None and not is_atl_state(f):
        raise FragmentError(f"ISPL export needs an ATL formula, got {f}")

    states = _identifiers(m.states, "s_")
    agent_names = _identifiers(m.agents, "Agent")
    atoms = _identifiers(m.atoms, "p_")

    evolution = []
    for s in m.states:
        for joint, t in m.moves[s]:
            evolution.append({
                "source": states[s],
                "target": states[t],
                "actions": [(agent_names[a], act) for a, act in zip(m.agents, joint)],
            })

    agents = [
        {
            "name": agent_names[a],
            "actions": list(m.actions[a]),
            "protocol": [(states[s], sorted(m.enabled(a, s))) for s in m.states],
        }
        for a in m.agents
    ]

    evaluation: List[Dict[str, str]] = []
    for atom in m.atoms:
        holding = [states[s] for s in m.states if atom in m.label(s)]
        condition = " or ".join(f"Environment.state = {s}" for s in holding) or "Environment.dead = true"
        evaluation.append({"name": atoms[atom], "condition": condition})
    evaluation.append({"name": "dead", "condition": "Environment.dead = true"})

    writer = _FormulaWriter(agent_names, atoms)
    formula = writer.write(f) if f is not None else None
    groups = [(name, list(members)) for members, name in writer.groups.items()]

    logger.debug(f"[ISPL] Exported {len(m.states)} state(s), {len(evolution)} evolution rule(s)")
    return render(
        "model.ispl.j2",
        title=f"{len(m.states)} states, {len(m.agents)} agents",
        states=[states[s] for s in m.states],
        initial=states[m.initial_state],
        evolution=evolution,
        agents=agents,
        evaluation=evaluation,
        groups=groups,
        formula=formula,
    )
