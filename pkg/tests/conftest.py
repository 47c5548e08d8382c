"""
Shared fixtures: small hand-checked models and seeded factories
"""
import json
from pathlib import Path

import pytest

from app.models.formula import FALSE, TRUE, And, Atom, Exists, ForAll, Next, Not, Or, Release, Until
from app.models.icgs import Trace
from app.schemas.experiment import GeneratorConfig
from app.services.generator_service import generate_random_icgs
from app.services.icgs_service import load_model
from app.services.monitor_service import build_monitor

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


@pytest.fixture(autouse=True)
def clear_monitor_cache():
    yield
    build_monitor.cache_clear()


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def confused_doc() -> dict:
    """Two agents; agent 1 cannot tell s1 from s2"""
    return json.loads((SAMPLES / "confused.json").read_text())


@pytest.fixture
def confused_model(confused_doc):
    return load_model(confused_doc)


@pytest.fixture
def chain_doc() -> dict:
    """One agent walking s0 -> s1 -> s2 with `a`, back to s0 with `b`"""
    return json.loads((SAMPLES / "chain.json").read_text())


@pytest.fixture
def chain_model(chain_doc):
    return load_model(chain_doc)


@pytest.fixture
def self_loop_model():
    return load_model({
        "agents": ["1"],
        "atoms": ["p"],
        "states": ["s0"],
        "initial": "s0",
        "actions": {"1": ["a"]},
        "transitions": [{"from": "s0", "act": {"1": "a"}, "to": "s0"}],
        "labeling": {"s0": ["p"]},
    })


@pytest.fixture
def make_model():
    """Seeded random model factory"""

    def factory(seed: int = 0, **overrides):
        cfg = GeneratorConfig(**{"state_count": 5, "agent_count": 2, "actions_per_agent": 2, "seed": seed, **overrides})
        return generate_random_icgs(cfg)

    return factory


@pytest.fixture
def trace_of():
    """Trace from comma-separated event strings: trace_of("", "p", "p,q")"""

    def build(*names, states=None):
        return Trace(
            events=tuple(frozenset(a for a in e.split(",") if a) for e in names),
            states=tuple(states) if states is not None else None,
        )

    return build


@pytest.fixture
def stutter_model():
    """One agent that can wait in s0 (q) before moving to s1 (p) for good"""
    return load_model({
        "agents": ["1"],
        "atoms": ["p", "q"],
        "states": ["s0", "s1"],
        "initial": "s0",
        "actions": {"1": ["a", "b"]},
        "transitions": [
            {"from": "s0", "act": {"1": "a"}, "to": "s0"},
            {"from": "s0", "act": {"1": "b"}, "to": "s1"},
            {"from": "s1", "act": {"1": "a"}, "to": "s1"},
            {"from": "s1", "act": {"1": "b"}, "to": "s1"},
        ],
        "labeling": {"s0": ["q"], "s1": ["p"]},
    })


def _grow(rng, size, atoms, agents):
    if size <= 1:
        if rng.random() < 0.1:
            return TRUE if rng.random() < 0.5 else FALSE
        return Atom(atoms[int(rng.integers(len(atoms)))])
    unary = [Not, Next] + ([Exists, ForAll] if agents else [])
    binary = [And, Or, Until, Release] if size >= 3 else []
    kinds = unary + binary
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind in (Exists, ForAll):
        coalition = frozenset(a for a in agents if rng.random() < 0.5)
        return kind(coalition, _grow(rng, size - 1, atoms, agents))
    if kind in (Not, Next):
        return kind(_grow(rng, size - 1, atoms, agents))
    left = int(rng.integers(1, size - 1))
    return kind(_grow(rng, left, atoms, agents), _grow(rng, size - 1 - left, atoms, agents))


@pytest.fixture
def random_formula():
    """Seeded random ASTs of at most `size` nodes; quantifiers only when agents are given"""

    def build(rng, size, atoms=("p", "q"), agents=()):
        return _grow(rng, int(rng.integers(1, size + 1)), tuple(atoms), tuple(agents))

    return build


@pytest.fixture
def random_lasso():
    """Seeded random ultimately periodic word over the given atoms: (stem, loop)"""

    def build(rng, atoms=("p", "q"), max_stem=3, max_loop=3):
        def letter():
            return frozenset(a for a in atoms if rng.random() < 0.5)

        stem = [letter() for _ in range(int(rng.integers(0, max_stem + 1)))]
        loop = [letter() for _ in range(int(rng.integers(1, max_loop + 1)))]
        return stem, loop

    return build
