import pytest
from pydantic import ValidationError

from app.core.exceptions import GenerationError
from app.schemas.experiment import GeneratorConfig
from app.services.generator_service import atom_names, confused_count, generate_random_icgs
from app.services.icgs_service import imperfect_information_degree, validate_model


def test_atom_names():
    assert atom_names(3) == ["p", "q", "r"]
    names = atom_names(27)
    assert len(set(names)) == 27
    assert names[-1] == "p1"


@pytest.mark.parametrize("n, ratio, expected", [(5, 0.4, 2), (10, 0.5, 5), (20, 0.05, 0), (4, 1.0, 4)])
def test_confused_count(n, ratio, expected):
    assert confused_count(n, ratio) == expected


@pytest.mark.parametrize("n, ratio", [(5, 0.2), (1, 0.5)])
def test_unreachable_ratio(n, ratio):
    with pytest.raises(GenerationError):
        confused_count(n, ratio)


def test_same_seed_same_model():
    cfg = GeneratorConfig(state_count=8, info_ratio=0.5, seed=11)
    assert generate_random_icgs(cfg) == generate_random_icgs(cfg)


def test_different_seeds_differ():
    models = {
        str(sorted(generate_random_icgs(GeneratorConfig(state_count=8, seed=seed)).transition.items()))
        for seed in range(5)
    }
    assert len(models) > 1


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("ratio", [0.0, 0.4, 1.0])
def test_generated_models_are_valid_and_reachable(seed, ratio):
    m = generate_random_icgs(GeneratorConfig(state_count=5, agent_count=2, info_ratio=ratio, seed=seed))
    assert validate_model(m).valid
    assert m.reachable() == set(m.states)
    assert imperfect_information_degree(m) == pytest.approx(confused_count(5, ratio) / 5)
    assert m.initial_state == "s0"


def test_configuration_bounds():
    with pytest.raises(ValidationError):
        GeneratorConfig(state_count=0)
    with pytest.raises(ValidationError):
        GeneratorConfig(info_ratio=1.5)
