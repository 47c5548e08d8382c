"""Negative/positive perfect-information sub-models"""
from dataclasses import dataclass
from typing import FrozenSet, Tuple

from app.models.icgs import ICGS


@dataclass(frozen=True)
class SubmodelPair:
    """
    Candidate <negative, positive> over a shared core of states.

    `negative` redirects every transition leaving the core to an all-false
    sink, `positive` to an all-true sink.
    """

    core_states: FrozenSet[str]
    source_states: Tuple[str, ...]
    negative: ICGS
    positive: ICGS
    bottom_sink: str
    top_sink: str

    @property
    def ordered_core(self) -> Tuple[str, ...]:
        """Core states in the order of the source model"""
        return tuple(s for s in self.negative.states if s in self.core_states)
