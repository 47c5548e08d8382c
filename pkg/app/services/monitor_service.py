"""
Three-valued LTL monitors.

A formula and its negation are translated to generalized Büchi automata by a
tableau; states with an accepting continuation are found on the SCC graph;
both automata are determinized together over letters of the formula's atoms,
and the resulting Moore machine is minimized and renumbered canonically.
"""
import json
import logging
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from app.config import settings
from app.core.exceptions import FragmentError, InputError
from app.models.automata import BuchiAutomaton, BuchiTransition, Monitor, MonitorRun, Verdict
from app.models.formula import FALSE, TRUE, And, Atom, Formula, Next, Not, Or, Release, Strategic, Until
from app.models.icgs import Trace
from app.schemas.monitor import MonitorDocument, MonitorStateDocument, MonitorTransitionDocument
from app.services.formula_service import atoms_of, has_strategic, to_nnf, walk
from app.utils.templates import render

logger = logging.getLogger(__name__)

# (positive atoms, negative atoms, next obligations, postponed untils)
Cover = Tuple[FrozenSet[str], FrozenSet[str], FrozenSet[Formula], FrozenSet[Formula]]


# ---------------------------------------------------------------------------
# Tableau
# ---------------------------------------------------------------------------

def _expand(obligations: Iterable[Formula]) -> Set[Cover]:
    """All ways of meeting `obligations` at the current position"""
    covers: Set[Cover] = set()

    def go(todo: Tuple[Formula, ...], pos, neg, nxt, postponed) -> None:
        if not todo:
            covers.add((frozenset(pos), frozenset(neg), frozenset(nxt), frozenset(postponed)))
            return
        g, rest = todo[0], todo[1:]
        if g == TRUE:
            go(rest, pos, neg, nxt, postponed)
        elif g == FALSE:
            return
        elif isinstance(g, Atom):
            if g.name not in neg:
                go(rest, pos | {g.name}, neg, nxt, postponed)
        elif isinstance(g, Not):
            if not isinstance(g.operand, Atom):
                raise FragmentError(f"Formula is not in negation normal form: {g}")
            if g.operand == FALSE:
                go(rest, pos, neg, nxt, postponed)
            elif g.operand != TRUE and g.operand.name not in pos:
                go(rest, pos, neg | {g.operand.name}, nxt, postponed)
        elif isinstance(g, And):
            go((g.left, g.right) + rest, pos, neg, nxt, postponed)
        elif isinstance(g, Or):
            go((g.left,) + rest, pos, neg, nxt, postponed)
            go((g.right,) + rest, pos, neg, nxt, postponed)
        elif isinstance(g, Next):
            go(rest, pos, neg, nxt if g.operand == TRUE else nxt | {g.operand}, postponed)
        elif isinstance(g, Until):
            go((g.right,) + rest, pos, neg, nxt, postponed)
            go((g.left,) + rest, pos, neg, nxt | {g}, postponed | {g})
        elif isinstance(g, Release):
            go((g.left, g.right) + rest, pos, neg, nxt, postponed)
            go((g.right,) + rest, pos, neg, nxt | {g}, postponed)
        elif isinstance(g, Strategic):
            raise FragmentError(f"Monitors handle LTL formulas only: {g}")
        else:
            raise TypeError(f"Unknown formula node: {g!r}")

    go(tuple(obligations), frozenset(), frozenset(), frozenset(), frozenset())
    return covers


def monitorable(f: Formula) -> Formula:
    """`f` itself, if it is an LTL formula"""
    if has_strategic(f):
        raise FragmentError(f"Monitors handle LTL formulas only, strip the strategic operators of {f} first")
    return f


def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    """Generalized Büchi automaton accepting exactly the words satisfying `f`"""
    if has_strategic(f):
        raise FragmentError(f"Monitors handle LTL formulas only: {f}")
    f = to_nnf(f)
    untils = tuple(sorted({g for g in walk(f) if isinstance(g, Until)}, key=str))
    until_index = {u: i for i, u in enumerate(untils)}

    start = frozenset({f}) - {TRUE}
    ids: Dict[FrozenSet[Formula], int] = {start: 0}
    obligations: List[FrozenSet[Formula]] = [start]
    transitions: List[Tuple[BuchiTransition, ...]] = []
    i = 0
    while i < len(obligations):
        edges = []
        covers = sorted(
            _expand(obligations[i]),
            key=lambda c: (sorted(c[0]), sorted(c[1]), sorted(map(str, c[2])), sorted(map(str, c[3]))),
        )
        for pos, neg, nxt, postponed in covers:
            if nxt not in ids:
                ids[nxt] = len(obligations)
                obligations.append(nxt)
            accepting = frozenset(until_index[u] for u in untils if u not in postponed)
            edges.append(BuchiTransition(pos, neg, ids[nxt], accepting))
        transitions.append(tuple(edges))
        i += 1

    return BuchiAutomaton(
        formula=f,
        atoms=tuple(sorted(atoms_of(f))),
        obligations=tuple(obligations),
        initial=0,
        transitions=tuple(transitions),
        acceptance_sets=untils,
    )


def _edge_graph(automaton: BuchiAutomaton) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(automaton.state_count))
    for q, edges in enumerate(automaton.transitions):
        for edge in edges:
            if graph.has_edge(q, edge.target):
                graph[q][edge.target]["accepting"] |= edge.accepting
            else:
                graph.add_edge(q, edge.target, accepting=set(edge.accepting))
    return graph


def _accepting_cycles(graph: nx.DiGraph, required: int) -> Set:
    """Nodes of SCCs that can visit every acceptance set infinitely often"""
    good: Set = set()
    for component in nx.strongly_connected_components(graph):
        internal = graph.subgraph(component).edges(data="accepting")
        marks: Set[int] = set()
        has_edge = False
        for _, _, accepting in internal:
            has_edge = True
            marks |= accepting
        if has_edge and len(marks) == required:
            good |= component
    return good


def live_states(automaton: BuchiAutomaton) -> FrozenSet[int]:
    """States from which some infinite word is accepted"""
    graph = _edge_graph(automaton)
    good = _accepting_cycles(graph, len(automaton.acceptance_sets))
    live = set(good)
    for q in good:
        live |= nx.ancestors(graph, q)
    return frozenset(live)


def accepts_some_path(
    automaton: BuchiAutomaton,
    start: Hashable,
    successors: Callable[[Hashable], Iterable[Hashable]],
    letter: Callable[[Hashable], FrozenSet[str]],
) -> bool:
    """
    Whether some infinite path of a finite graph, read as the word of its
    node letters, is accepted (reachable accepting SCC of the product).
    """
    graph = nx.DiGraph()
    root = (automaton.initial, start)
    graph.add_node(root)
    frontier = [root]
    while frontier:
        q, node = frontier.pop()
        event = letter(node)
        targets = list(successors(node))
        for edge in automaton.transitions[q]:
            if not edge.enabled_on(event):
                continue
            for nxt in targets:
                product_node = (edge.target, nxt)
                new = product_node not in graph
                if graph.has_edge((q, node), product_node):
                    graph[(q, node)][product_node]["accepting"] |= edge.accepting
                else:
                    graph.add_edge((q, node), product_node, accepting=set(edge.accepting))
                if new:
                    frontier.append(product_node)
    return bool(_accepting_cycles(graph, len(automaton.acceptance_sets)))


def accepts_lasso(automaton: BuchiAutomaton, stem: Sequence[FrozenSet[str]], loop: Sequence[FrozenSet[str]]) -> bool:
    """Whether the automaton accepts stem . loop^omega (product with the lasso)"""
    if not loop:
        raise InputError("The loop of a lasso word must be nonempty")
    word = list(stem) + list(loop)
    length, loop_start = len(word), len(stem)
    return accepts_some_path(
        automaton, 0,
        lambda i: (i + 1 if i + 1 < length else loop_start,),
        word.__getitem__,
    )


# ---------------------------------------------------------------------------
# Monitor synthesis
# ---------------------------------------------------------------------------

def _letter_table(automaton: BuchiAutomaton, atoms: Tuple[str, ...]) -> List[List[Tuple[int, int, int]]]:
    bit = {a: 1 << j for j, a in enumerate(atoms)}
    return [
        [(sum(bit[a] for a in e.positive), sum(bit[a] for a in e.negative), e.target) for e in edges]
        for edges in automaton.transitions
    ]


def _successors(table, live: FrozenSet[int], current: FrozenSet[int], letter: int) -> FrozenSet[int]:
    return frozenset(
        target
        for q in current
        for pos, neg, target in table[q]
        if pos & ~letter == 0 and neg & letter == 0 and target in live
    )


def _minimize(
    initial: int, delta: List[List[int]], outputs: List[Verdict], letters: int,
) -> Tuple[int, Tuple[Tuple[int, ...], ...], Tuple[Verdict, ...]]:
    """Partition refinement on outputs, then breadth-first canonical numbering"""
    order = [Verdict.TOP, Verdict.BOTTOM, Verdict.UNKNOWN]
    block = [order.index(o) for o in outputs]
    count = len(set(block))
    while True:
        signatures: Dict[Tuple, int] = {}
        refined = []
        for q in range(len(delta)):
            sig = (block[q],) + tuple(block[delta[q][x]] for x in range(letters))
            refined.append(signatures.setdefault(sig, len(signatures)))
        block = refined
        if len(signatures) == count:
            break
        count = len(signatures)

    representative: Dict[int, int] = {}
    for q, b in enumerate(block):
        representative.setdefault(b, q)

    numbering = {block[initial]: 0}
    queue = [block[initial]]
    for b in queue:
        q = representative[b]
        for x in range(letters):
            nb = block[delta[q][x]]
            if nb not in numbering:
                numbering[nb] = len(numbering)
                queue.append(nb)

    transitions = []
    out = []
    for b in queue:
        q = representative[b]
        transitions.append(tuple(numbering[block[delta[q][x]]] for x in range(letters)))
        out.append(outputs[q])
    return 0, tuple(transitions), tuple(out)


def _build_monitor(f: Formula) -> Monitor:
    if has_strategic(f):
        raise FragmentError(f"Monitors handle LTL formulas only: {f}")
    atoms = tuple(sorted(atoms_of(f)))
    positive = ltl_to_buchi(f)
    negative = ltl_to_buchi(Not(f))
    pos_table, neg_table = _letter_table(positive, atoms), _letter_table(negative, atoms)
    pos_live, neg_live = live_states(positive), live_states(negative)
    letters = 1 << len(atoms)

    start = (
        frozenset({positive.initial}) & pos_live,
        frozenset({negative.initial}) & neg_live,
    )
    ids = {start: 0}
    pairs = [start]
    delta: List[List[int]] = []
    for pair in pairs:
        row = []
        for x in range(letters):
            nxt = (
                _successors(pos_table, pos_live, pair[0], x),
                _successors(neg_table, neg_live, pair[1], x),
            )
            if nxt not in ids:
                ids[nxt] = len(pairs)
                pairs.append(nxt)
            row.append(ids[nxt])
        delta.append(row)

    outputs = []
    for can_satisfy, can_violate in pairs:
        if not can_violate:
            outputs.append(Verdict.TOP)
        elif not can_satisfy:
            outputs.append(Verdict.BOTTOM)
        else:
            outputs.append(Verdict.UNKNOWN)

    initial, transitions, minimized = _minimize(0, delta, outputs, letters)
    logger.debug(
        f"[Monitor] {f}: Büchi {positive.state_count}/{negative.state_count} states, "
        f"{len(pairs)} subset pairs, {len(minimized)} after minimization"
    )
    return Monitor(formula=f, atoms=atoms, initial=initial, transitions=transitions, outputs=minimized)


@lru_cache(maxsize=settings.MONITOR_CACHE_SIZE)
def build_monitor(f: Formula) -> Monitor:
    """Three-valued monitor for an LTL formula (cached per formula)"""
    return _build_monitor(f)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

class OnlineMonitor:
    """Cursor over a monitor; one instance per trace stream. Without a universe any atom is accepted."""

    def __init__(self, monitor: Monitor, universe: Optional[Iterable[str]] = None):
        self.monitor = monitor
        self.universe = frozenset(universe) if universe is not None else None
        self.state = monitor.initial
        self.steps = 0

    @property
    def verdict(self) -> Verdict:
        return self.monitor.outputs[self.state]

    def step(self, event: Iterable[str]) -> Verdict:
        event = frozenset(event)
        unknown = sorted(event - self.universe) if self.universe is not None else ()
        if unknown:
            raise InputError(f"Event mentions unknown atom {unknown[0]!r}")
        self.state = self.monitor.step(self.state, event)
        self.steps += 1
        return self.verdict

    def reset(self) -> None:
        self.state = self.monitor.initial
        self.steps = 0


def monitor_run(mon: Monitor, trace: Trace, universe: Optional[Iterable[str]] = None) -> MonitorRun:
    """Fold the monitor over the events; the verdict is the final state's output"""
    cursor = OnlineMonitor(mon, universe)
    verdicts = tuple(cursor.step(event) for event in trace.events)
    return MonitorRun(verdict=cursor.verdict, verdicts=verdicts, steps=cursor.steps)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def letter_atoms(mon: Monitor, letter: int) -> List[str]:
    return [a for j, a in enumerate(mon.atoms) if letter >> j & 1]


def _format_letter(atoms: List[str]) -> str:
    return "{" + ",".join(atoms) + "}"


def monitor_to_document(mon: Monitor) -> MonitorDocument:
    return MonitorDocument(
        formula=str(mon.formula),
        atoms=list(mon.atoms),
        initial=mon.initial,
        states=[MonitorStateDocument(id=q, verdict=v) for q, v in enumerate(mon.outputs)],
        transitions=[
            MonitorTransitionDocument(source=q, letter=letter_atoms(mon, x), target=t)
            for q, row in enumerate(mon.transitions)
            for x, t in enumerate(row)
        ],
    )


def monitor_to_json(mon: Monitor) -> str:
    return json.dumps(monitor_to_document(mon).model_dump(mode="json", by_alias=True), indent=2) + "\n"


def monitor_to_dot(mon: Monitor) -> str:
    edges: Dict[Tuple[int, int], List[str]] = {}
    for q, row in enumerate(mon.transitions):
        for x, t in enumerate(row):
            edges.setdefault((q, t), []).append(_format_letter(letter_atoms(mon, x)))
    return render(
        "monitor.dot.j2",
        formula=str(mon.formula).replace('"', '\\"'),
        initial=mon.initial,
        states=[
            {"id": q, "symbol": v.symbol, "conclusive": v.conclusive}
            for q, v in enumerate(mon.outputs)
        ],
        edges=[
            {"source": q, "target": t, "label": " | ".join(labels)}
            for (q, t), labels in edges.items()
        ],
    )
