"""Independent oracles and random-instance strategies for the test suite.

Nothing here uses the package's Fourier-Motzkin code: feasibility and
suprema come from z3's exact linear real arithmetic, projections from direct
one-variable interval reasoning, and diagram semantics from explicit lists
of polyhedra.
"""
from __future__ import annotations

import random
from fractions import Fraction

import z3
from hypothesis import strategies as st

from hrdlha.core import Bound, DenseVar, normalize_expression
from hrdlha.hrd import DiscreteVar, Manager

NVARS = 4
VARS = [DenseVar("v%d" % i, owner=i % 2) for i in range(NVARS)]
DISC = DiscreteVar("m", 1, (0, 1, 2))


# -- explicit polyhedra ----------------------------------------------------------


def holds(e, b, point):
    v = sum((a * point.get(x, 0) for x, a in e.terms), Fraction(0))
    return v < b.value or (v == b.value and b.weak)


def poly_holds(z, point):
    return all(holds(e, b, point) for e, b in z.items())


def paths_hold(paths, point, disc=None):
    """Explicit union of (polyhedron, discrete assignment) pairs."""
    disc = disc or {}
    for z, dv in paths:
        if all(disc.get(k) == v for k, v in dv.items()) and poly_holds(z, point):
            return True
    return False


def _z3(e, syms):
    return z3.Sum([z3.RealVal(a) * syms[x] for x, a in e.terms])


def _z3_cons(z, syms, strict_ok=True):
    out = []
    for e, b in z.items():
        lhs, c = _z3(e, syms), z3.Q(b.value.numerator, b.value.denominator)
        out.append(lhs <= c if (b.weak or not strict_ok) else lhs < c)
    return out


def _syms(exprs):
    vs = sorted({x for e in exprs for x, _ in e.terms})
    return {x: z3.Real("x%d" % x) for x in vs}


def lp_feasible(z) -> bool:
    """Exact feasibility of strict/weak constraints (z3 linear real arithmetic)."""
    if not z:
        return True
    s = z3.Solver()
    s.add(*_z3_cons(z, _syms(z)))
    return s.check() == z3.sat


def lp_sup(z, e):
    """Tightest upper bound of ``e`` over ``z`` as a Bound (None if empty,
    'inf' if unbounded)."""
    if not lp_feasible(z):
        return None
    syms = _syms(list(z) + [e])
    # a nonempty polyhedron has the all-weak system as its closure
    o = z3.Optimize()
    o.add(*_z3_cons(z, syms, strict_ok=False))
    h = o.maximize(_z3(e, syms))
    assert o.check() == z3.sat
    v = h.value()
    if z3.is_int_value(v):
        opt = Fraction(v.as_long())
    elif z3.is_rational_value(v):
        opt = Fraction(v.numerator_as_long(), v.denominator_as_long())
    else:
        return "inf"
    probe = dict(z)
    probe[-e] = min(probe.get(-e, Bound(-opt, True)), Bound(-opt, True))
    return Bound(opt, lp_feasible(probe))


def project_holds(z, x, point):
    """Does some value of variable ``x`` extend ``point`` into ``z``?"""
    lo, lo_weak, hi, hi_weak = None, True, None, True
    for e, b in z.items():
        a = e.coeffs.get(x, 0)
        rest = sum((c * point.get(v, 0) for v, c in e.terms if v != x), Fraction(0))
        if a == 0:
            if not (rest < b.value or (rest == b.value and b.weak)):
                return False
            continue
        bnd = (b.value - rest) / a
        if a > 0:
            if hi is None or bnd < hi or (bnd == hi and not b.weak):
                hi, hi_weak = bnd, b.weak
        else:
            if lo is None or bnd > lo or (bnd == lo and not b.weak):
                lo, lo_weak = bnd, b.weak
    if lo is None or hi is None:
        return True
    return lo < hi or (lo == hi and lo_weak and hi_weak)


# -- random instances --------------------------------------------------------------

RATS = [Fraction(n, d) for d in (1, 2, 3) for n in range(-12, 13)]


def rand_point(rng: random.Random, nvars=NVARS):
    return {i: rng.choice(RATS) / 2 for i in range(nvars)}


@st.composite
def expressions(draw, nvars=NVARS, maxc=3):
    pivot = draw(st.integers(0, nvars - 1))
    raw = {i: draw(st.integers(-maxc, maxc)) for i in range(nvars)}
    raw[pivot] = draw(st.integers(1, maxc)) * draw(st.sampled_from((1, -1)))
    return normalize_expression(raw)[0]


bounds_st = st.builds(Bound, st.fractions(min_value=-6, max_value=6, max_denominator=3),
                      st.booleans())


@st.composite
def polyhedra(draw, nvars=NVARS, max_cons=3, min_cons=0):
    z = {}
    for _ in range(draw(st.integers(min_cons, max_cons))):
        e = draw(expressions(nvars))
        b = draw(bounds_st)
        if e not in z or b < z[e]:
            z[e] = b
    return z


@st.composite
def path_sets(draw, nvars=NVARS, max_paths=4, discrete=False):
    out = []
    for _ in range(draw(st.integers(0, max_paths))):
        z = draw(polyhedra(nvars))
        dv = {}
        if discrete and draw(st.booleans()):
            dv = {DISC: draw(st.sampled_from(DISC.domain))}
        out.append((z, dv))
    return out


def manager(ordering="coefficient", memoize=True, discrete=False):
    return Manager(VARS, (DISC,) if discrete else (), ordering, memoize)


def build(mgr, paths):
    """Diagram for a path list, folded left with union (not from_paths, so
    the construction path differs from normalize's)."""
    d = mgr.union_all(mgr.from_path(z, dv) for z, dv in paths)
    return d


def agree(mgr, d, predicate, rng, n=1000, nvars=NVARS, discrete=False):
    """Sample ``n`` points; return the first disagreement or None."""
    for _ in range(n):
        p = rand_point(rng, nvars)
        dv = {DISC: rng.choice(DISC.domain)} if discrete else {}
        got = mgr.evaluate(d, p, dv)
        want = predicate(p, dv)
        if got != want:
            return p, dv, got, want
    return None
