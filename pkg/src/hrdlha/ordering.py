"""Evaluation orderings over decision atoms.

Every atom gets a sort key; comparing keys is comparing atoms.  Dense keys
are built from the sign-canonical form of the expression (leading
coefficient negative) so that an expression and its converse share all key
components except the final sign bit, which keeps the pair adjacent.
"""
from __future__ import annotations

import enum
from typing import Sequence, Tuple

from .core import DenseVar, LinExpr, Order


class OrderingKind(enum.Enum):
    DICTIONARY = "dictionary"
    COEFFICIENT = "coefficient"
    MAGNITUDE = "magnitude"


class ModelError(ValueError):
    pass


def canonical_form(e: LinExpr) -> Tuple[LinExpr, int]:
    """Flip signs when the first nonzero coefficient is positive.

    Returns the canonical expression and the sign (+1/-1) of the original
    leading coefficient.
    """
    lead = e.terms[0][1]
    if lead > 0:
        return -e, 1
    return e, -1


def group_of(e: LinExpr, variables: Sequence[DenseVar]) -> int:
    """Largest owning process among the variables of ``e`` (0 if none)."""
    g = 0
    for v, _ in e.terms:
        if v < 0 or v >= len(variables):
            raise ModelError("unknown dense variable id %d" % v)
        g = max(g, variables[v].owner)
    return g


def dictionary_string(e: LinExpr, variables: Sequence[DenseVar]) -> str:
    parts = []
    for v, a in e.terms:
        sign = "-" if a < 0 else "+"
        mag = "" if abs(a) == 1 else str(abs(a))
        parts.append(sign + mag + variables[v].name)
    return "".join(parts)


class AtomOrder:
    """Total precedence over dense and discrete atoms for one context.

    Discrete atoms owned by process ``p`` sit just before the dense atoms of
    group ``p``.
    """

    def __init__(self, variables: Sequence[DenseVar], kind: OrderingKind):
        self.variables = tuple(variables)
        self.kind = OrderingKind(kind)
        self._cache = {}

    def dense_key(self, e: LinExpr):
        key = self._cache.get(e)
        if key is not None:
            return key
        canon, lead = canonical_form(e)
        group = group_of(e, self.variables)
        if self.kind is OrderingKind.DICTIONARY:
            body = (dictionary_string(canon, self.variables).encode("utf-8"), canon.terms)
        else:
            vec = [0] * len(self.variables)
            for v, a in canon.terms:
                vec[v] = a
            if self.kind is OrderingKind.COEFFICIENT:
                body = tuple(vec)
            else:
                body = tuple((abs(a), a) for a in vec)
        key = (group, 1, body, 0 if lead < 0 else 1)
        self._cache[e] = key
        return key

    def discrete_key(self, owner: int, index: int):
        return (owner, 0, index)

    def compare(self, e1: LinExpr, e2: LinExpr) -> Order:
        k1, k2 = self.dense_key(e1), self.dense_key(e2)
        if k1 == k2:
            return Order.EQUAL
        return Order.PRECEDES if k1 < k2 else Order.FOLLOWS


def compare_atoms(e1: LinExpr, e2: LinExpr, kind: OrderingKind,
                  variables: Sequence[DenseVar]) -> Order:
    return AtomOrder(variables, kind).compare(e1, e2)
