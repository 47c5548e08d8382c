"""
Random game structures for experiments and randomized tests
"""
import logging
import string
from itertools import product
from typing import Dict, List, Tuple

import numpy as np

from app.config import settings
from app.core.exceptions import GenerationError
from app.models.icgs import ICGS, JointAction
from app.schemas.experiment import GeneratorConfig
from app.services.icgs_service import imperfect_information_degree, validate_model

logger = logging.getLogger(__name__)


def atom_names(count: int) -> List[str]:
    """p, q, r, ... then p1, p2, ... once the letters run out"""
    letters = list(string.ascii_lowercase[15:]) + list(string.ascii_lowercase[:15])
    if count <= len(letters):
        return letters[:count]
    return letters + [f"p{i}" for i in range(1, count - len(letters) + 1)]


def confused_count(n: int, ratio: float) -> int:
    """Number of confused states closest to ratio * n; a lone confused state is impossible"""
    options = [0] + list(range(2, n + 1))
    best = min(options, key=lambda c: (abs(c / n - ratio), c))
    if abs(best / n - ratio) > settings.INFO_RATIO_TOLERANCE + 1e-9:
        raise GenerationError(
            f"Cannot reach imperfect-information ratio {ratio} with {n} state(s) "
            f"(closest is {best / n:.3f})"
        )
    return best


def _split_classes(rng: np.random.Generator, members: List[str]) -> List[List[str]]:
    """Random partition of `members` into blocks of at least two states"""
    blocks: List[List[str]] = []
    rest = list(members)
    while rest:
        if len(rest) <= 3:
            blocks.append(rest)
            break
        size = int(rng.integers(2, len(rest) - 1)) if len(rest) > 4 else 2
        blocks.append(rest[:size])
        rest = rest[size:]
    return blocks


def _enabled_subset(rng: np.random.Generator, actions: Tuple[str, ...], density: float) -> frozenset:
    chosen = [a for a in actions if rng.random() < density]
    if not chosen:
        chosen = [actions[int(rng.integers(len(actions)))]]
    return frozenset(chosen)


def _build(cfg: GeneratorConfig, rng: np.random.Generator) -> ICGS:
    n = cfg.state_count
    states = tuple(f"s{i}" for i in range(n))
    agents = tuple(str(i) for i in range(1, cfg.agent_count + 1))
    atoms = tuple(atom_names(cfg.atom_count))
    actions = {a: tuple(f"act{k}" for k in range(cfg.actions_per_agent)) for a in agents}

    c = confused_count(n, cfg.info_ratio)
    confused = sorted(rng.choice(n, size=c, replace=False).tolist()) if c else []
    order = [states[i] for i in confused]
    rng.shuffle(order)
    partitions: Dict[str, List[frozenset]] = {a: [] for a in agents}
    for block in _split_classes(rng, order):
        owner = agents[int(rng.integers(len(agents)))]
        partitions[owner].append(frozenset(block))

    protocol = {}
    for a in agents:
        for cls in partitions[a]:
            enabled = _enabled_subset(rng, actions[a], cfg.density)
            for s in cls:
                protocol[(a, s)] = enabled
        for s in states:
            if (a, s) not in protocol:
                protocol[(a, s)] = _enabled_subset(rng, actions[a], cfg.density)

    slots: List[Tuple[str, JointAction]] = []
    per_state: Dict[str, List[JointAction]] = {}
    for s in states:
        per_state[s] = list(product(*(sorted(protocol[(a, s)]) for a in agents)))

    transition: Dict[Tuple[str, JointAction], str] = {}
    # Spanning tree first, so every state is reachable from s0.
    slots.extend((states[0], joint) for joint in per_state[states[0]])
    for target in states[1:]:
        pick = int(rng.integers(len(slots)))
        source, joint = slots.pop(pick)
        transition[(source, joint)] = target
        slots.extend((target, j) for j in per_state[target])
    for source, joint in slots:
        transition[(source, joint)] = states[int(rng.integers(n))]

    labels = rng.random((n, len(atoms))) < 0.5
    labeling = {s: frozenset(a for j, a in enumerate(atoms) if labels[i, j]) for i, s in enumerate(states)}

    return ICGS(
        agents=agents,
        atoms=atoms,
        states=states,
        initial_state=states[0],
        actions=actions,
        indistinguishability={a: tuple(partitions[a]) for a in agents},
        protocol=protocol,
        transition=transition,
        labeling=labeling,
    )


def generate_random_icgs(cfg: GeneratorConfig) -> ICGS:
    """
    Deterministic for a fixed seed. Every state is reachable from s0 and
    protocols are uniform on each class by construction.
    """
    rng = np.random.default_rng(cfg.seed)
    for attempt in range(settings.GENERATOR_MAX_RETRIES):
        m = _build(cfg, rng)
        report = validate_model(m)
        if report.valid and len(m.reachable()) == len(m.states):
            logger.debug(
                f"[Generator] seed={cfg.seed} states={len(m.states)} "
                f"degree={imperfect_information_degree(m):.2f} after {attempt + 1} attempt(s)"
            )
            return m
        logger.debug(f"[Generator] Attempt {attempt + 1} rejected: {report.kinds()}")
    raise GenerationError(f"No valid model after {settings.GENERATOR_MAX_RETRIES} attempts for {cfg}")
