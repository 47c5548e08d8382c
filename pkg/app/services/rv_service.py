"""
Runtime verification of a formula against a trace, given static checking results
"""
import dataclasses
import logging
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from app.core.exceptions import SoundnessError
from app.models.automata import Verdict
from app.models.formula import CONSTANTS, Atom, Formula
from app.models.icgs import ICGS, Trace
from app.models.results import CheckResult, Outcome, Tag
from app.services.atl_service import substitute_checked
from app.services.formula_service import fresh_name, map_formula, strip_strategic, subformulas
from app.services.monitor_service import build_monitor, monitor_run
from app.services.trace_service import check_trace_atoms

logger = logging.getLogger(__name__)


def resolve_atom_collisions(m: ICGS, results: CheckResult) -> Tuple[CheckResult, Dict[str, str]]:
    """Rename result atoms that clash with model atoms; returns the renaming"""
    taken = set(m.atoms) | set(CONSTANTS) | set(results.atoms)
    renames: Dict[str, str] = {}
    for atom in results.atoms:
        if atom in m.atoms:
            renames[atom] = fresh_name(atom, taken)
            taken.add(renames[atom])
    if not renames:
        return results, renames

    def rename(f: Formula) -> Formula:
        return map_formula(f, lambda n: Atom(renames[n.name]) if isinstance(n, Atom) and n.name in renames else n)

    logger.warning(f"[RV] Result atoms collide with model atoms, renamed: {renames}")
    return CheckResult(
        entries=tuple(dataclasses.replace(e, atom=renames.get(e.atom, e.atom)) for e in results.entries),
        checked=tuple(
            dataclasses.replace(c, checked_form=rename(c.checked_form), atom=renames.get(c.atom, c.atom))
            for c in results.checked
        ),
    ), renames


def update_model(m: ICGS, results: CheckResult) -> ICGS:
    """Add result atoms to AP and to the labelling of the states they were attached to"""
    results, _ = resolve_atom_collisions(m, results)
    if not results.checked and not results.entries:
        return m
    extra: Dict[str, set] = {}
    for e in results.entries:
        extra.setdefault(e.state, set()).add(e.atom)
    new_atoms = tuple(a for a in dict.fromkeys(results.atoms) if a not in m.atoms)
    return dataclasses.replace(
        m,
        atoms=tuple(m.atoms) + new_atoms,
        labeling={s: m.label(s) | frozenset(extra.get(s, ())) for s in m.states},
    )


def build_variants(f: Formula, results: CheckResult) -> Tuple[Formula, Formula]:
    """f with negatively / positively checked subformulas replaced by their atoms"""
    return (
        substitute_checked(f, results.for_tag(Tag.NEGATIVE)),
        substitute_checked(f, results.for_tag(Tag.POSITIVE)),
    )


@dataclasses.dataclass(frozen=True)
class LabelledTrace:
    trace: Trace
    generated: bool


def label_trace(
    m: ICGS,
    trace: Trace,
    results: CheckResult,
    observable: Optional[Iterable[str]] = None,
    negations: Optional[Mapping[str, str]] = None,
) -> LabelledTrace:
    """
    Add derived atoms to every event.

    `negations` maps each derived not_q atom to q; it holds exactly when q
    is absent. Result atoms come from the recorded states when the trace
    carries a valid history. Otherwise the states consistent with the
    observations so far are tracked: a negative atom is added when all of
    them carry it, a positive atom when any does. When no state is
    consistent the trace was not produced by the model; negative atoms are
    then left out and positive atoms added everywhere.
    """
    negations = dict(negations or {})
    result_atoms = set(results.atoms)
    if observable is None:
        observable = set(m.atoms) - result_atoms - set(negations)
    observable = frozenset(observable)
    check_trace_atoms(trace, set(m.atoms) | result_atoms | observable | set(negations))

    attached: Dict[str, FrozenSet[str]] = {s: results.result(s) for s in m.states}
    n_atoms = frozenset(c.atom for c in results.for_tag(Tag.NEGATIVE))
    p_atoms = frozenset(c.atom for c in results.for_tag(Tag.POSITIVE))

    observed = [event & observable for event in trace.events]
    base = [
        obs | frozenset(x for x, q in negations.items() if q not in obs)
        for obs in observed
    ]

    def matches(s: str, j: int) -> bool:
        return m.label(s) & observable == observed[j]

    if trace.states is not None:
        states = trace.states
        valid = (
            len(states) == len(observed)
            and all(s in m.index for s in states)
            and (not states or states[0] == m.initial_state)
            and all(t in m.successors(s) for s, t in zip(states, states[1:]))
            and all(matches(s, j) for j, s in enumerate(states))
        )
        if valid:
            events = tuple(base[j] | attached[s] for j, s in enumerate(states))
            return LabelledTrace(Trace(events=events, states=states), generated=True)
        logger.warning("[RV] Recorded states do not match the model, estimating states instead")

    events: List[FrozenSet[str]] = []
    consistent: FrozenSet[str] = frozenset()
    for j in range(len(observed)):
        if j == 0:
            candidates = {m.initial_state}
        else:
            candidates = {t for s in consistent for t in m.successors(s)}
        consistent = frozenset(s for s in candidates if matches(s, j))
        if consistent:
            surely = frozenset.intersection(*(attached[s] for s in consistent)) & n_atoms
            maybe = frozenset.union(*(attached[s] for s in consistent)) & p_atoms
        else:
            surely, maybe = frozenset(), p_atoms
        events.append(base[j] | surely | maybe)

    generated = not observed or bool(consistent)
    if not generated:
        logger.info("[RV] Trace is not a run of the model")
    return LabelledTrace(Trace(events=tuple(events)), generated=generated)


def runtime_verification(
    m: ICGS,
    f: Formula,
    h: Trace,
    results: CheckResult,
    observable: Optional[Iterable[str]] = None,
    negations: Optional[Mapping[str, str]] = None,
) -> Outcome:
    """
    Monitor the stripped variants of `f` on the trace and sort the
    subformulas into statically checked, conclusively monitored and
    unchecked ones.
    """
    results, renames = resolve_atom_collisions(m, results)
    updated = update_model(m, results)

    checked = results.checked_subformulas
    all_subformulas = subformulas(f)
    phi_mc = tuple(g for g in all_subformulas if g in checked)
    candidates = [g for g in all_subformulas if g not in checked]

    psi_n, psi_p = build_variants(f, results)
    phi_n, phi_p = strip_strategic(psi_n), strip_strategic(psi_p)

    labelled = label_trace(m, h, results, observable, negations)
    universe = updated.atoms
    negative_verdict = monitor_run(build_monitor(phi_n), labelled.trace, universe).verdict
    positive_verdict = monitor_run(build_monitor(phi_p), labelled.trace, universe).verdict

    satisfied = negative_verdict is Verdict.TOP
    violated = positive_verdict is Verdict.BOTTOM
    literal = Verdict.BOTTOM if violated else (Verdict.TOP if satisfied else Verdict.UNKNOWN)
    conflict = satisfied and violated
    if conflict:
        if labelled.generated:
            raise SoundnessError(
                f"Monitors for {phi_n} and {phi_p} reached opposite verdicts on a run of the model"
            )
        logger.warning(f"[RV] Opposite verdicts on a trace the model cannot produce; reporting unknown for {f}")
        verdict = Verdict.UNKNOWN
    elif satisfied:
        verdict = Verdict.TOP
    elif violated:
        verdict = Verdict.BOTTOM
    else:
        verdict = Verdict.UNKNOWN

    phi_rv: List[Formula] = []
    phi_unchk: List[Formula] = []
    per_subformula = []
    for g in candidates:
        sub_verdict = monitor_run(build_monitor(strip_strategic(g)), labelled.trace, universe).verdict
        per_subformula.append((g, sub_verdict))
        (phi_rv if sub_verdict.conclusive else phi_unchk).append(g)

    return Outcome(
        verdict=verdict,
        phi_mc=phi_mc,
        phi_rv=tuple(phi_rv),
        phi_unchk=tuple(phi_unchk),
        negative_formula=phi_n,
        positive_formula=phi_p,
        negative_verdict=negative_verdict,
        positive_verdict=positive_verdict,
        literal_verdict=literal,
        conflict=conflict,
        generated=labelled.generated,
        renamed_atoms=renames,
        subformula_verdicts=tuple(per_subformula),
    )
