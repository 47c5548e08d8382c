"""ATL*/ATL/LTL abstract syntax"""
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Tuple


class FragmentClass(str, Enum):
    ATL = "ATL"
    ATL_STAR = "ATL*"
    LTL = "LTL"


@dataclass(frozen=True)
class Formula:
    """Base node; subclasses are immutable values compared structurally"""

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        from app.services.formula_service import format_formula
        return format_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Exists(Formula):
    """<<coalition>> body"""

    coalition: FrozenSet[str]
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class ForAll(Formula):
    """[[coalition]] body"""

    coalition: FrozenSet[str]
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


TRUE = Atom("true")
FALSE = Atom("false")
CONSTANTS = frozenset({"true", "false"})

Strategic = (Exists, ForAll)
Temporal = (Next, Until, Release)


def Eventually(operand: Formula) -> Formula:
    return Until(TRUE, operand)


def Globally(operand: Formula) -> Formula:
    return Release(FALSE, operand)
