import pytest

from app.core.exceptions import InputError
from app.services.icgs_service import validate_model
from app.services.submodel_service import build_negative, find_submodels


def test_candidates_of_the_confused_model(confused_model):
    pairs = find_submodels(confused_model)
    assert [pair.ordered_core for pair in pairs] == [("s0", "s1"), ("s0", "s2")]


def test_sub_models_are_perfect_information_with_sinks(confused_model):
    pair = find_submodels(confused_model)[0]
    assert pair.negative.states == ("s0", "s1", "s_bot")
    assert pair.positive.states == ("s0", "s1", "s_top")
    assert pair.negative.transition[("s0", ("b", "c"))] == "s_bot"
    assert pair.positive.transition[("s0", ("b", "c"))] == "s_top"
    assert pair.negative.label("s_bot") == frozenset()
    assert pair.positive.label("s_top") == frozenset({"p", "q"})
    for sub in (pair.negative, pair.positive):
        assert sub.is_perfect_information
        assert validate_model(sub).valid


def test_sinks_loop_on_themselves(confused_model):
    pair = find_submodels(confused_model)[1]
    assert pair.negative.successors("s_bot") == {"s_bot"}
    assert pair.positive.successors("s_top") == {"s_top"}
    assert pair.negative.transition[("s0", ("a", "c"))] == "s_bot"


def test_perfect_information_model_has_one_full_candidate(chain_model):
    pairs = find_submodels(chain_model)
    assert len(pairs) == 1
    assert pairs[0].ordered_core == ("s0", "s1", "s2")


def test_limit(confused_model):
    assert len(find_submodels(confused_model, limit=1)) == 1
    with pytest.raises(InputError):
        find_submodels(confused_model, limit=0)


def test_core_must_contain_initial_state(confused_model):
    with pytest.raises(InputError, match="initial state"):
        build_negative(confused_model, ["s1"])


@pytest.mark.parametrize("seed", range(8))
def test_cores_are_conflict_free_and_distinct(make_model, seed):
    m = make_model(seed, info_ratio=0.6)
    pairs = find_submodels(m)
    assert pairs
    cores = [pair.core_states for pair in pairs]
    assert len(set(cores)) == len(cores)
    for core in cores:
        assert m.initial_state in core
        for agent in m.agents:
            for s in core:
                assert m.class_of(agent, s) & core == {s}
