"""Model AST for linear hybrid automata.

Every node is a frozen dataclass holding tuples, so two models compare equal
exactly when they have the same structure.  Comments attached by the
generators are excluded from equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class Interval:
    """Rational interval; ``None`` ends are infinite (and always open)."""

    lower: Optional[Fraction]
    upper: Optional[Fraction]
    lower_open: bool = False
    upper_open: bool = False

    @classmethod
    def point(cls, c) -> "Interval":
        c = Fraction(c)
        return cls(c, c)

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(Fraction(lo), Fraction(hi))

    def is_point(self) -> bool:
        return self.lower is not None and self.lower == self.upper \
            and not self.lower_open and not self.upper_open


# -- predicates ---------------------------------------------------------------


@dataclass(frozen=True)
class Lin:
    """``sum(coef * var) rel rhs`` with rel in ``< <= = >= >``."""

    terms: Tuple[Tuple[str, int], ...]
    rel: str
    rhs: Fraction


@dataclass(frozen=True)
class DiscTest:
    var: str
    op: str  # "=" or "!="
    value: int


@dataclass(frozen=True)
class ModeTest:
    process: str
    mode: str


@dataclass(frozen=True)
class And:
    items: Tuple["Pred", ...]


@dataclass(frozen=True)
class Or:
    items: Tuple["Pred", ...]


@dataclass(frozen=True)
class Const:
    value: bool


Pred = Union[Lin, DiscTest, ModeTest, And, Or, Const]
TRUE_PRED = Const(True)
FALSE_PRED = Const(False)


def conj(*items) -> Pred:
    items = tuple(i for i in items if i != TRUE_PRED)
    if not items:
        return TRUE_PRED
    return items[0] if len(items) == 1 else And(items)


def disj(*items) -> Pred:
    items = tuple(i for i in items if i != FALSE_PRED)
    if not items:
        return FALSE_PRED
    return items[0] if len(items) == 1 else Or(items)


# -- automaton ------------------------------------------------------------------


@dataclass(frozen=True)
class Mode:
    name: str
    inv: Pred = TRUE_PRED
    rates: Tuple[Tuple[str, Interval], ...] = ()


@dataclass(frozen=True)
class Transition:
    src: str
    dst: str
    guard: Pred = TRUE_PRED
    # dense targets get an Interval, discrete targets an int
    assigns: Tuple[Tuple[str, Union[Interval, int]], ...] = ()


@dataclass(frozen=True)
class Process:
    name: str
    dense: Tuple[str, ...]
    modes: Tuple[Mode, ...]
    transitions: Tuple[Transition, ...] = ()

    def mode_names(self):
        return tuple(m.name for m in self.modes)


@dataclass(frozen=True)
class DiscreteDecl:
    name: str
    lo: int
    hi: int
    init: int

    @property
    def domain(self):
        return tuple(range(self.lo, self.hi + 1))


@dataclass(frozen=True)
class LHAModel:
    params: Tuple[str, ...]
    dense: Tuple[str, ...]
    discretes: Tuple[DiscreteDecl, ...]
    processes: Tuple[Process, ...]
    initially: Pred
    risk: Pred
    comments: Tuple[str, ...] = field(default=(), compare=False)

    def process(self, name: str) -> Process:
        for p in self.processes:
            if p.name == name:
                return p
        raise KeyError(name)

    def counts(self):
        """(modes, transitions, local clocks, parameters, discretes)."""
        return (sum(len(p.modes) for p in self.processes),
                sum(len(p.transitions) for p in self.processes),
                sum(len(p.dense) for p in self.processes),
                len(self.params), len(self.discretes))
