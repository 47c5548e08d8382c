import pytest

from app.core.exceptions import InputError, ModelValidationError, ProtocolError
from app.models.icgs import History
from app.services.icgs_service import (
    close_partition, dump_model, enabled_joint_actions, histories_indistinguishable, imperfect_information_degree,
    is_valid_history, load_model, simulate, step, validate_model,
)


class TestValidation:
    def test_valid_model(self, confused_model):
        assert validate_model(confused_model).valid
        assert not confused_model.is_perfect_information

    def test_missing_transition_breaks_totality(self, confused_doc):
        confused_doc["transitions"] = confused_doc["transitions"][1:]
        report = validate_model(load_model(confused_doc, validate=False))
        assert report.kinds() == ["totality"]

    def test_protocol_must_be_uniform_on_classes(self, confused_doc):
        confused_doc["protocol"] = {"1": {"s1": ["a"]}}
        report = validate_model(load_model(confused_doc, validate=False))
        assert "protocol-uniformity" in report.kinds()
        assert "transition-not-enabled" in report.kinds()

    def test_reserved_atom(self, confused_doc):
        confused_doc["atoms"] = ["p", "q", "true"]
        assert "reserved-atom" in validate_model(load_model(confused_doc, validate=False)).kinds()

    def test_unknown_initial_state(self, confused_doc):
        confused_doc["initial"] = "s9"
        with pytest.raises(ModelValidationError) as excinfo:
            load_model(confused_doc)
        assert excinfo.value.report.kinds() == ["initial-state"]

    def test_unknown_agent_in_document(self, confused_doc):
        confused_doc["actions"]["3"] = ["x"]
        with pytest.raises(InputError, match="Unknown agent"):
            load_model(confused_doc)

    def test_schema_mismatch(self):
        with pytest.raises(InputError, match="schema"):
            load_model({"agents": ["1"]})


class TestPartitions:
    def test_overlapping_groups_are_merged(self):
        classes = close_partition(("s0", "s1", "s2", "s3"), [["s0", "s1"], ["s1", "s2"]])
        assert classes == (frozenset({"s0", "s1", "s2"}),)

    def test_degree(self, confused_model, chain_model):
        assert imperfect_information_degree(confused_model) == pytest.approx(2 / 3)
        assert imperfect_information_degree(chain_model) == 0.0


class TestExecution:
    def test_enabled_joint_actions(self, confused_model):
        assert enabled_joint_actions(confused_model, "s0") == {("a", "c"), ("b", "c")}

    def test_step(self, confused_model):
        assert step(confused_model, "s0", ("a", "c")) == "s1"
        assert step(confused_model, "s1", ("b", "c")) == "s0"

    def test_step_rejects_disabled_action(self, confused_model):
        with pytest.raises(ProtocolError) as excinfo:
            step(confused_model, "s0", ("x", "c"))
        assert excinfo.value.agent == "1"

    def test_step_rejects_wrong_arity(self, confused_model):
        with pytest.raises(InputError):
            step(confused_model, "s0", ("a",))

    def test_histories(self, confused_model):
        assert is_valid_history(confused_model, History(("s0", "s1", "s0")))
        assert not is_valid_history(confused_model, History(("s0", "s0")))
        h1, h2 = History(("s0", "s1")), History(("s0", "s2"))
        assert histories_indistinguishable(confused_model, "1", h1, h2)
        assert not histories_indistinguishable(confused_model, "2", h1, h2)

    def test_empty_history(self):
        with pytest.raises(ValueError):
            History(())


class TestSimulation:
    def test_run_follows_transitions(self, confused_model):
        trace = simulate(confused_model, 20, seed=3)
        assert len(trace) == 20
        assert trace.states[0] == "s0"
        assert is_valid_history(confused_model, History(trace.states))
        assert all(e == confused_model.label(s) for e, s in zip(trace.events, trace.states))

    def test_seeded(self, confused_model):
        assert simulate(confused_model, 15, seed=7) == simulate(confused_model, 15, seed=7)

    def test_negative_steps(self, confused_model):
        with pytest.raises(InputError):
            simulate(confused_model, -1)


def test_canonical_document_reloads_to_the_same_model(confused_model):
    assert load_model(dump_model(confused_model)) == confused_model
