import pytest

from app.core.exceptions import SoundnessError
from app.models.automata import Verdict
from app.models.formula import Atom
from app.models.results import CheckedFormula, CheckEntry, CheckResult, Tag
from app.services.formula_service import parse
from app.services.rv_service import (
    build_variants, label_trace, resolve_atom_collisions, runtime_verification, update_model,
)

G = parse("<<1>> F p")


def results_with(n_states, p_states, natom="natom_x", patom="patom_x"):
    return CheckResult(
        entries=tuple(CheckEntry(s, G, Tag.NEGATIVE, natom) for s in n_states)
        + tuple(CheckEntry(s, G, Tag.POSITIVE, patom) for s in p_states),
        checked=(CheckedFormula(G, G, Tag.NEGATIVE, natom), CheckedFormula(G, G, Tag.POSITIVE, patom)),
    )


class TestModelUpdate:
    def test_result_atoms_are_added_to_labels(self, confused_model):
        m = update_model(confused_model, results_with(["s1"], ["s1", "s2"]))
        assert m.atoms == ("p", "q", "natom_x", "patom_x")
        assert m.label("s1") == {"p", "natom_x", "patom_x"}
        assert m.label("s0") == frozenset()

    def test_collisions_are_renamed(self, confused_model):
        results, renames = resolve_atom_collisions(confused_model, results_with(["s1"], [], natom="q"))
        assert renames == {"q": "q_1"}
        assert results.atoms == ("q_1", "patom_x")
        assert {e.atom for e in results.entries} == {"q_1"}

    def test_variants(self):
        assert build_variants(G, results_with([], [])) == (Atom("natom_x"), Atom("patom_x"))


class TestLabelling:
    def test_recorded_states_are_used(self, confused_model, trace_of):
        trace = trace_of("", "p", states=["s0", "s1"])
        labelled = label_trace(confused_model, trace, results_with(["s1"], ["s1"]))
        assert labelled.generated
        assert labelled.trace.events == (frozenset(), frozenset({"p", "natom_x", "patom_x"}))

    def test_mismatching_recorded_states_fall_back_to_estimation(self, confused_model, trace_of):
        trace = trace_of("", "p", states=["s0", "s2"])
        labelled = label_trace(confused_model, trace, results_with(["s1"], ["s1"]))
        assert labelled.generated
        assert labelled.trace.states is None
        assert labelled.trace.events[1] == {"p", "natom_x", "patom_x"}

    def test_ambiguous_states(self, confused_model, trace_of):
        # Nothing observable: after one step the run is in s1 or s2.
        labelled = label_trace(confused_model, trace_of("", ""), results_with(["s1"], ["s1"]), observable=[])
        assert labelled.trace.events[1] == {"patom_x"}

    def test_trace_outside_the_model(self, confused_model, trace_of):
        labelled = label_trace(confused_model, trace_of("q"), results_with(["s0"], ["s0"]))
        assert not labelled.generated
        assert labelled.trace.events[0] == {"q", "patom_x"}

    def test_negated_atoms_follow_observations(self, confused_model, trace_of):
        labelled = label_trace(
            confused_model, trace_of("", "p"), CheckResult(), negations={"not_p": "p"},
        )
        assert labelled.trace.events == (frozenset({"not_p"}), frozenset({"p"}))


class TestRuntimeVerification:
    def test_conclusive_top(self, confused_model, trace_of):
        outcome = runtime_verification(confused_model, G, trace_of("", "p"), results_with(["s0", "s1"], ["s0", "s1", "s2"]))
        assert outcome.verdict is Verdict.TOP
        assert outcome.phi_mc == (G,)
        assert outcome.phi_rv == (Atom("p"), Atom("true"), parse("F p"))
        assert outcome.phi_unchk == ()

    def test_both_monitors_inconclusive(self, confused_model, trace_of):
        outcome = runtime_verification(confused_model, G, trace_of("", "p"), results_with([], ["s0"]))
        assert outcome.negative_verdict is Verdict.BOTTOM
        assert outcome.positive_verdict is Verdict.TOP
        assert outcome.verdict is Verdict.UNKNOWN
        assert outcome.literal_verdict is Verdict.UNKNOWN

    def test_opposite_verdicts_on_a_run_of_the_model(self, confused_model, trace_of):
        trace = trace_of("", "p", states=["s0", "s1"])
        with pytest.raises(SoundnessError):
            runtime_verification(confused_model, G, trace, results_with(["s0"], []))

    def test_opposite_verdicts_on_a_foreign_trace(self, confused_model, trace_of):
        outcome = runtime_verification(confused_model, G, trace_of("", "p,q"), results_with(["s0"], []))
        assert not outcome.generated
        assert outcome.conflict
        assert outcome.verdict is Verdict.UNKNOWN
        assert outcome.literal_verdict is Verdict.BOTTOM
