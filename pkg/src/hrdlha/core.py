"""Exact linear-constraint primitives.

Expressions are integer linear forms normalized to coefficient gcd 1,
upper bounds are ``(value, weak)`` pairs ordered by restrictiveness, and a
polyhedron is a plain ``dict`` mapping expressions to their tightest upper
bound.  Fourier-Motzkin elimination over such dicts provides the exact
feasibility, implication and projection checks used elsewhere.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple


class Order(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    PRECEDES = -1
    FOLLOWS = 1


class ZeroExpression(ValueError):
    """Raised when a linear form has no nonzero coefficient."""


class _Infinity:
    __slots__ = ()

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return 0x1F1F1F

    def __neg__(self):
        raise ValueError("cannot negate an infinite bound")

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return "INFINITY"


INFINITY = _Infinity()


class Bound(NamedTuple):
    """An upper bound ``(<, c)`` or ``(<=, c)``; ``INF`` is ``(<, inf)``.

    Tuple order is the restrictiveness order: smaller value first, and on
    equal values the strict bound first.
    """

    value: object
    weak: bool

    @classmethod
    def le(cls, c) -> "Bound":
        return cls(Fraction(c), True)

    @classmethod
    def lt(cls, c) -> "Bound":
        return cls(Fraction(c), False)

    @property
    def infinite(self) -> bool:
        return self.value is INFINITY

    def __repr__(self):
        if self.value is INFINITY:
            return "(<,inf)"
        return "(%s,%s)" % ("<=" if self.weak else "<", self.value)


INF = Bound(INFINITY, False)
ZERO_WEAK = Bound(Fraction(0), True)
ZERO_STRICT = Bound(Fraction(0), False)


def bound_compare(b1: Bound, b2: Bound) -> Order:
    if b1 == b2:
        return Order.EQUAL
    return Order.LESS if b1 < b2 else Order.GREATER


def bound_add(b1: Bound, b2: Bound) -> Bound:
    if b1.value is INFINITY or b2.value is INFINITY:
        return INF
    return Bound(b1.value + b2.value, b1.weak and b2.weak)


def bound_scale(b: Bound, k) -> Bound:
    k = Fraction(k)
    if k <= 0:
        raise ValueError("bound scale factor must be positive, got %s" % k)
    if b.value is INFINITY:
        return INF
    return Bound(b.value * k, b.weak)


def zero_holds(b: Bound) -> bool:
    """Truth of ``0 ~ c`` for a bound on the all-zero expression."""
    if b.value is INFINITY:
        return True
    return b.value > 0 or (b.value == 0 and b.weak)


class LinExpr:
    """Normalized integer linear form; build with :func:`normalize_expression`.

    ``terms`` is a tuple of ``(var, coef)`` pairs sorted by variable index.
    """

    __slots__ = ("terms", "coeffs", "_hash")

    def __init__(self, terms: Tuple[Tuple[int, int], ...]):
        self.terms = terms
        self.coeffs = dict(terms)
        self._hash = hash(terms)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, LinExpr) and self.terms == other.terms)

    def __hash__(self):
        return self._hash

    def __neg__(self) -> "LinExpr":
        return LinExpr(tuple((v, -a) for v, a in self.terms))

    def __repr__(self):
        return "LinExpr(%r)" % (self.coeffs,)

    def coef(self, var: int) -> int:
        return self.coeffs.get(var, 0)

    @property
    def variables(self):
        return tuple(v for v, _ in self.terms)

    def value(self, point: Mapping[int, Fraction]) -> Fraction:
        return sum((a * point[v] for v, a in self.terms), Fraction(0))

    def render(self, names) -> str:
        """Human readable form such as ``-11*A + 8*B``."""
        out = []
        for v, a in self.terms:
            name = names[v]
            mag = "" if abs(a) == 1 else "%d*" % abs(a)
            if not out:
                out.append(("-" if a < 0 else "") + mag + name)
            else:
                out.append(("- " if a < 0 else "+ ") + mag + name)
        return " ".join(out)


def normalize_expression(raw: Mapping[int, int]) -> Tuple[LinExpr, int]:
    """Divide out the gcd of the nonzero coefficients of ``raw``.

    Returns the normalized expression and the (positive) factor removed.
    """
    items = sorted((v, int(a)) for v, a in raw.items() if a)
    if not items:
        raise ZeroExpression("linear form has no nonzero coefficient")
    g = 0
    for _, a in items:
        g = gcd(g, a)
    if g != 1:
        items = [(v, a // g) for v, a in items]
    return LinExpr(tuple(items)), g


@dataclass(frozen=True)
class DenseVar:
    """Entry of a dense-variable table; the index in the table is the id."""

    name: str
    owner: int = 0
    param: bool = False


# ---------------------------------------------------------------------------
# constraints


def negate_constraint(e: LinExpr, b: Bound) -> Tuple[LinExpr, Bound]:
    """The complement of ``e ~ c`` as an upper bound on ``-e``."""
    if b.value is INFINITY:
        raise ValueError("the complement of a trivial constraint is empty")
    return -e, Bound(-b.value, not b.weak)


def combine(e1: LinExpr, b1: Bound, e2: LinExpr, b2: Bound, var: int):
    """Fourier-Motzkin combination of two bounds with opposite signs on var.

    Returns ``(expr, bound)``; ``expr`` is ``None`` when everything cancels,
    in which case ``zero_holds(bound)`` decides consistency.
    """
    a = e1.coeffs[var]
    b = e2.coeffs[var]
    if a * b >= 0:
        raise ValueError("combine needs opposite signs on the eliminated variable")
    ka, kb = abs(b), abs(a)
    raw = {}
    for v, c in e1.terms:
        raw[v] = c * ka
    for v, c in e2.terms:
        raw[v] = raw.get(v, 0) + c * kb
    bound = bound_add(Bound(b1.value * ka, b1.weak), Bound(b2.value * kb, b2.weak))
    try:
        expr, g = normalize_expression(raw)
    except ZeroExpression:
        return None, bound
    if g != 1:
        bound = Bound(bound.value / g, bound.weak)
    return expr, bound


Polyhedron = Dict[LinExpr, Bound]


def poly_add(z: Polyhedron, e: LinExpr, b: Bound) -> None:
    """Record ``e ~ b`` in ``z`` keeping the tighter bound."""
    if b.value is INFINITY:
        return
    old = z.get(e)
    if old is None or b < old:
        z[e] = b


def poly_space_intersect(z1: Mapping[LinExpr, Bound], z2: Mapping[LinExpr, Bound]) -> Polyhedron:
    out = dict(z1)
    for e, b in z2.items():
        poly_add(out, e, b)
    return out


def poly_satisfies(z: Mapping[LinExpr, Bound], point: Mapping[int, Fraction]) -> bool:
    for e, b in z.items():
        if b.value is INFINITY:
            continue
        v = e.value(point)
        if v > b.value or (v == b.value and not b.weak):
            return False
    return True


def _converse_clash(z: Polyhedron, e: LinExpr, b: Bound) -> bool:
    other = z.get(-e)
    return other is not None and not zero_holds(bound_add(b, other))


def fm_eliminate(z: Mapping[LinExpr, Bound], var: int) -> Optional[Polyhedron]:
    """Project ``var`` out of ``z``; ``None`` if an inconsistency shows up."""
    pos, neg = [], []
    out: Polyhedron = {}
    for e, b in z.items():
        a = e.coeffs.get(var, 0)
        if a > 0:
            pos.append((e, b))
        elif a < 0:
            neg.append((e, b))
        else:
            out[e] = b
    for e1, b1 in pos:
        for e2, b2 in neg:
            e, b = combine(e1, b1, e2, b2, var)
            if e is None:
                if not zero_holds(b):
                    return None
                continue
            if _converse_clash(out, e, b):
                return None
            poly_add(out, e, b)
    return out


def _pick_variable(z: Mapping[LinExpr, Bound], candidates) -> int:
    best, best_cost = None, None
    for v in candidates:
        p = n = 0
        for e in z:
            a = e.coeffs.get(v, 0)
            if a > 0:
                p += 1
            elif a < 0:
                n += 1
        cost = p * n - p - n
        if best_cost is None or cost < best_cost or (cost == best_cost and v < best):
            best, best_cost = v, cost
    return best


def _variables_of(z: Iterable[LinExpr]):
    vs = set()
    for e in z:
        vs.update(e.coeffs)
    return vs


def _fm_stage(cur, var: int, step: int):
    """One elimination on a system ``expr -> (bound, history)``.

    ``history`` is the set of input constraints a row was combined from.
    After ``step`` eliminations a row with more than ``step + 1`` ancestors
    is implied by the others (Chernikov), strictness included, so it is
    never stored.  Returns None on an inconsistency.
    """
    pos, neg = [], []
    out = {}
    for e, (b, h) in cur.items():
        a = e.coeffs.get(var, 0)
        if a > 0:
            pos.append((e, b, h))
        elif a < 0:
            neg.append((e, b, h))
        else:
            out[e] = (b, h)
    cap = step + 1
    for e1, b1, h1 in pos:
        for e2, b2, h2 in neg:
            h = h1 | h2
            e, b = combine(e1, b1, e2, b2, var)
            if e is None:
                if not zero_holds(b):
                    return None
                continue
            if len(h) > cap:
                continue
            other = out.get(-e)
            if other is not None and not zero_holds(bound_add(b, other[0])):
                return None
            old = out.get(e)
            if old is None or b < old[0]:
                out[e] = (b, h)
    return out


def _fm_stages(z: Mapping[LinExpr, Bound], eliminate):
    """Yield ``(var, system)`` before each elimination, then ``(None, final)``;
    the final system is None when ``z`` is infeasible."""
    cur = {}
    for i, (e, b) in enumerate(z.items()):
        if b.value is INFINITY:
            continue
        if _converse_clash(z, e, b):
            yield None, None
            return
        cur[e] = (b, frozenset((i,)))
    todo = set(eliminate) & _variables_of(cur)
    step = 0
    while todo:
        plain = {e: b for e, (b, _) in cur.items()}
        v = _pick_variable(plain, todo)
        todo.discard(v)
        yield v, plain
        step += 1
        cur = _fm_stage(cur, v, step)
        if cur is None:
            yield None, None
            return
        todo &= _variables_of(cur)
    yield None, {e: b for e, (b, _) in cur.items()}


def poly_project(z: Mapping[LinExpr, Bound], eliminate) -> Optional[Polyhedron]:
    """Eliminate every variable in ``eliminate``; ``None`` when infeasible."""
    for v, system in _fm_stages(z, eliminate):
        if v is None:
            return system
    raise AssertionError("unreachable")


def poly_is_infeasible(z: Mapping[LinExpr, Bound]) -> bool:
    """True iff no real valuation satisfies every constraint of ``z``."""
    return poly_project(z, _variables_of(z)) is None


def poly_implies(z: Mapping[LinExpr, Bound], e: LinExpr, b: Bound) -> bool:
    """True iff every point of ``z`` satisfies ``e ~ b``."""
    if b.value is INFINITY:
        return True
    have = z.get(e)
    if have is not None and have <= b:
        return True
    ne, nb = negate_constraint(e, b)
    test = dict(z)
    poly_add(test, ne, nb)
    return poly_is_infeasible(test)


_SUP_VAR = -1


def poly_sup(z: Mapping[LinExpr, Bound], e: LinExpr) -> Optional[Bound]:
    """Tightest upper bound on ``e`` over ``z``; ``None`` if ``z`` is empty."""
    raw = {_SUP_VAR: 1}
    for v, a in e.terms:
        raw[v] = -a
    t_le_e, _ = normalize_expression(raw)
    test = dict(z)
    poly_add(test, t_le_e, ZERO_WEAK)
    proj = poly_project(test, _variables_of(test) - {_SUP_VAR})
    if proj is None:
        return None
    t_expr = LinExpr(((_SUP_VAR, 1),))
    return proj.get(t_expr, INF)


def _choose(lo: Optional[Bound], hi: Optional[Bound]) -> Fraction:
    # lo is a lower bound stored as (value, weak) meaning x >= / > value
    lv = None if lo is None else lo.value
    hv = None if hi is None else hi.value

    def ok(x):
        if lo is not None and (x < lv or (x == lv and not lo.weak)):
            return False
        if hi is not None and (x > hv or (x == hv and not hi.weak)):
            return False
        return True

    if ok(Fraction(0)):
        return Fraction(0)
    if lo is not None and hi is not None:
        if lv == hv:
            return lv
        return (lv + hv) / 2
    if lo is not None:
        return lv if lo.weak else lv + 1
    return hv if hi.weak else hv - 1


def poly_witness(z: Mapping[LinExpr, Bound]) -> Optional[Dict[int, Fraction]]:
    """A rational point of ``z`` (0 for unconstrained variables), or None."""
    allvars = _variables_of(z)
    stack = []
    for v, system in _fm_stages(z, allvars):
        if v is None:
            if system is None:
                return None
            break
        stack.append((v, system))
    point: Dict[int, Fraction] = {v: Fraction(0) for v in allvars}
    assigned = set()
    for v, system in reversed(stack):
        lo = hi = None
        for e, b in system.items():
            a = e.coeffs.get(v, 0)
            if not a:
                continue
            rest = sum((c * point[u] for u, c in e.terms if u != v), Fraction(0))
            bound = (b.value - rest) / a
            if a > 0:
                cand = Bound(bound, b.weak)
                if hi is None or cand < hi:
                    hi = cand
            else:
                # a*v <= c - rest with a < 0 gives v >= bound
                if lo is None or bound > lo.value or (bound == lo.value and not b.weak):
                    lo = Bound(bound, b.weak)
        point[v] = _choose(lo, hi)
        assigned.add(v)
    return point
