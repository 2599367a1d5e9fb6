"""Weakest preconditions (and their forward duals) over diagrams.

Diagram-level primitives come first: ``delta_exp`` substitutes ``x + dx``,
``xtivity`` adds every constraint derivable by combining two path
constraints with opposite signs on a variable, ``var_del`` forgets atoms and
``exists_elim`` projects a variable away.  :class:`SymbolicModel` compiles a
model AST into the diagrams those operators need and provides ``xtion`` /
``time`` and ``post_xtion`` / ``post_time``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .core import (INFINITY, Bound, DenseVar, LinExpr, ZeroExpression,
                   combine, normalize_expression, zero_holds)
from .frontend.model import (And, Const, DiscTest, Interval, LHAModel, Lin,
                             ModeTest, Or)
from .hrd import FALSE, TRUE, DiscreteVar, Manager, Node
from .normalize import normalize
from .ordering import ModelError, OrderingKind

DELTA_PREFIX = "$"


def _mentions(var: int):
    memo = {}

    def rec(n):
        if n.terminal:
            return False
        hit = memo.get(n)
        if hit is None:
            hit = (n.dense and var in n.atom.coeffs) or any(rec(c) for _, c in n.arcs)
            memo[n] = hit
        return hit

    return rec


def _follows(n: Node, child: Node) -> bool:
    return child.terminal or n.key < child.key


def xtivity(mgr: Manager, d: Node, x: int, drop: bool = False) -> Node:
    """Augment every path with the combinations of its opposite-sign
    constraint pairs on ``x``.  With ``drop`` the constraints on ``x`` are
    left out of the result, which makes this an exact projection."""
    mentions = _mentions(x)
    memo = {}

    def rec(n, ctx):
        if n.terminal or not mentions(n):
            return n
        k = (n, ctx)
        hit = memo.get(k)
        if hit is not None:
            return hit
        direct, parts = [], []
        if n.dense:
            e = n.atom
            a = e.coeffs.get(x, 0)
            for beta, c in n.arcs:
                if beta.value is INFINITY:
                    sub = rec(c, ctx)
                    if sub is FALSE:
                        continue
                    if _follows(n, sub):
                        direct.append((beta, sub))
                    else:
                        parts.append(sub)
                    continue
                if not a:
                    sub = rec(c, ctx)
                    if sub is FALSE:
                        continue
                    if _follows(n, sub):
                        direct.append((beta, sub))
                    else:
                        parts.append(mgr.meet(mgr.constraint(e, beta), sub))
                    continue
                derived = []
                dead = False
                for e2, b2 in ctx:
                    if e2.coeffs[x] * a < 0:
                        de, db = combine(e, beta, e2, b2, x)
                        if de is None:
                            if not zero_holds(db):
                                dead = True
                                break
                        else:
                            derived.append((de, db))
                if dead:
                    continue
                sub = rec(c, ctx + ((e, beta),))
                if sub is FALSE:
                    continue
                if drop:
                    parts.append(mgr.meet(mgr.conj(derived), sub))
                elif not derived and _follows(n, sub):
                    direct.append((beta, sub))
                else:
                    derived.append((e, beta))
                    parts.append(mgr.meet(mgr.conj(derived), sub))
        else:
            for v, c in n.arcs:
                sub = rec(c, ctx)
                if sub is FALSE:
                    continue
                if _follows(n, sub):
                    direct.append((v, sub))
                else:
                    parts.append(mgr.meet(mgr.disc_eq(n.atom, v), sub))
        res = mgr.union_all([mgr._rebuild(n, direct)] + parts)
        memo[k] = res
        return res

    return rec(d, ())


def var_del(mgr: Manager, d: Node, variables: Iterable[int]) -> Node:
    """Drop every dense atom mentioning one of ``variables``."""
    drop = frozenset(variables)
    if not drop:
        return d
    memo = {}

    def rec(n):
        if n.terminal:
            return n
        hit = memo.get(n)
        if hit is not None:
            return hit
        if n.dense and not drop.isdisjoint(n.atom.coeffs):
            res = mgr.union_all(rec(c) for _, c in n.arcs)
        else:
            arcs = []
            for label, c in n.arcs:
                sub = rec(c)
                if sub is not FALSE:
                    arcs.append((label, sub))
            res = mgr._rebuild(n, arcs)
        memo[n] = res
        return res

    return rec(d)


def exists_elim(mgr: Manager, d: Node, x: int) -> Node:
    """Exact projection of ``x`` out of ``d``."""
    return xtivity(mgr, d, x, drop=True)


def exists_elim_all(mgr: Manager, d: Node, variables: Iterable[int],
                    between=None) -> Node:
    for x in variables:
        d = exists_elim(mgr, d, x)
        if between is not None:
            d = between(d)
    return d


def delta_exp(mgr: Manager, d: Node, deltas: Mapping[int, int], sign: int = 1) -> Node:
    """Rewrite each atom ``sum a_i x_i`` as ``sum a_i (x_i + sign * dx_i)``
    for the variables in ``deltas`` (a map from variable to its delta)."""
    memo = {}

    def rec(n):
        if n.terminal:
            return n
        hit = memo.get(n)
        if hit is not None:
            return hit
        parts = []
        if n.dense:
            raw = dict(n.atom.coeffs)
            for v, a in n.atom.terms:
                dv = deltas.get(v)
                if dv is not None:
                    raw[dv] = raw.get(dv, 0) + sign * a
            e2, _ = normalize_expression(raw)
            for beta, c in n.arcs:
                sub = rec(c)
                if sub is FALSE:
                    continue
                parts.append(sub if beta.value is INFINITY else mgr.meet(mgr.constraint(e2, beta), sub))
        else:
            for v, c in n.arcs:
                sub = rec(c)
                if sub is not FALSE:
                    parts.append(mgr.meet(mgr.disc_eq(n.atom, v), sub))
        res = mgr.union_all(parts)
        memo[n] = res
        return res

    return rec(d)


def dense_vars_of(mgr: Manager, d: Node):
    vs = set()
    for e in mgr.dense_atoms(d):
        vs.update(e.coeffs)
    return vs


# ---------------------------------------------------------------------------
# compiled models


@dataclass(frozen=True)
class TransitionSpec:
    """A compiled transition of process ``proc`` (1-based)."""

    label: str
    proc: int
    mode_var: DiscreteVar
    src: int
    dst: int
    guard: Node
    dense_assigns: Tuple[Tuple[int, Interval], ...]
    disc_assigns: Tuple[Tuple[DiscreteVar, int], ...]


def interval_constraints(var: int, iv: Interval) -> List[Tuple[LinExpr, Bound]]:
    """``var`` in ``iv`` as upper bounds on ``var`` and ``-var``."""
    out = []
    pos = LinExpr(((var, 1),))
    if iv.lower is not None:
        out.append((-pos, Bound(-Fraction(iv.lower), not iv.lower_open)))
    if iv.upper is not None:
        out.append((pos, Bound(Fraction(iv.upper), not iv.upper_open)))
    return out


def rate_constraints(dx: int, delta: int, iv: Interval) -> List[Tuple[LinExpr, Bound]]:
    """``dx`` within ``iv`` scaled by ``delta``: ``lo*delta <= dx <= hi*delta``."""
    out = []
    if iv.lower is not None:
        lo = Fraction(iv.lower)
        e, _ = normalize_expression({dx: -lo.denominator, delta: lo.numerator})
        out.append((e, Bound(Fraction(0), not iv.lower_open)))
    if iv.upper is not None:
        hi = Fraction(iv.upper)
        e, _ = normalize_expression({dx: hi.denominator, delta: -hi.numerator})
        out.append((e, Bound(Fraction(0), not iv.upper_open)))
    return out


class SymbolicModel:
    """A model compiled into one analysis context.

    Dense table: parameters, global dense variables, then each process's
    locals, then the delta variables (``$x`` per non-parameter variable and
    ``$`` for elapsed time).  Discrete table: declared discretes, then one
    mode variable per process (named after the process).
    """

    def __init__(self, model: LHAModel, ordering: OrderingKind = OrderingKind.COEFFICIENT,
                 memoize: bool = True, normalize_ops: bool = True):
        self.model = model
        self.normalize_ops = normalize_ops
        dense: List[DenseVar] = [DenseVar(p, 0, True) for p in model.params]
        dense += [DenseVar(x, 0) for x in model.dense]
        for i, proc in enumerate(model.processes, 1):
            dense += [DenseVar(x, i) for x in proc.dense]
        self.n_model = len(dense)
        self.params = tuple(range(len(model.params)))
        self.clocks = tuple(range(len(model.params), self.n_model))
        self.delta_of: Dict[int, int] = {}
        for x in self.clocks:
            self.delta_of[x] = len(dense)
            dense.append(DenseVar(DELTA_PREFIX + dense[x].name, dense[x].owner))
        self.delta = len(dense)
        dense.append(DenseVar(DELTA_PREFIX, 0))
        names = [v.name for v in dense]
        if len(set(names)) != len(names):
            raise ModelError("dense names collide with delta names")
        self.var_id = {v.name: i for i, v in enumerate(dense)}

        disc = [DiscreteVar(d.name, 0, d.domain) for d in model.discretes]
        self.mode_vars = []
        for i, proc in enumerate(model.processes, 1):
            mv = DiscreteVar(proc.name, i, tuple(range(len(proc.modes))))
            self.mode_vars.append(mv)
            disc.append(mv)
        self.disc_by_name = {d.name: d for d in disc[:len(model.discretes)]}
        self.mgr = Manager(dense, disc, ordering, memoize)

        self._compile_rates()
        self.invariant = self._compile_invariant()
        init = self.pred(model.initially)
        for d in model.discretes:
            init = self.mgr.meet(init, self.mgr.disc_eq(self.disc_by_name[d.name], d.init))
        self.initial = self.mgr.meet(init, self.invariant)
        self.risk = self.pred(model.risk)
        self.transitions = self._compile_transitions()
        self._rate_cache = {}

    # -- compilation --------------------------------------------------------

    def mode_index(self, proc: str, mode: str) -> Tuple[int, int]:
        for i, p in enumerate(self.model.processes):
            if p.name == proc:
                names = p.mode_names()
                if mode not in names:
                    raise ModelError("unknown mode %s@%s" % (proc, mode))
                return i, names.index(mode)
        raise ModelError("unknown process %s" % proc)

    def lin_constraints(self, p: Lin):
        raw: Dict[int, int] = {}
        for name, a in p.terms:
            if name not in self.var_id or self.var_id[name] >= self.n_model:
                raise ModelError("unknown dense variable %s" % name)
            v = self.var_id[name]
            raw[v] = raw.get(v, 0) + a
        rhs = Fraction(p.rhs)
        try:
            e, g = normalize_expression(raw)
        except ZeroExpression:
            truth = {"<": 0 < rhs, "<=": 0 <= rhs, "=": rhs == 0,
                     ">=": 0 >= rhs, ">": 0 > rhs}[p.rel]
            return truth
        c = rhs / g
        out = []
        if p.rel in ("<=", "="):
            out.append((e, Bound(c, True)))
        if p.rel in (">=", "="):
            out.append((-e, Bound(-c, True)))
        if p.rel == "<":
            out.append((e, Bound(c, False)))
        if p.rel == ">":
            out.append((-e, Bound(-c, False)))
        return out

    def pred(self, p) -> Node:
        mgr = self.mgr
        if isinstance(p, Const):
            return TRUE if p.value else FALSE
        if isinstance(p, Lin):
            cons = self.lin_constraints(p)
            if isinstance(cons, bool):
                return TRUE if cons else FALSE
            return mgr.conj(cons)
        if isinstance(p, DiscTest):
            var = self.disc_by_name.get(p.var)
            if var is None:
                raise ModelError("unknown discrete variable %s" % p.var)
            if p.op == "=":
                return mgr.disc_eq(var, p.value) if p.value in var.domain else FALSE
            return mgr.disc_in(var, [v for v in var.domain if v != p.value])
        if isinstance(p, ModeTest):
            i, q = self.mode_index(p.process, p.mode)
            return mgr.disc_eq(self.mode_vars[i], q)
        if isinstance(p, And):
            return mgr.meet_all(self.pred(i) for i in p.items)
        if isinstance(p, Or):
            return mgr.union_all(self.pred(i) for i in p.items)
        raise ModelError("not a predicate: %r" % (p,))

    def _compile_invariant(self) -> Node:
        mgr = self.mgr
        parts = []
        for i, proc in enumerate(self.model.processes):
            mv = self.mode_vars[i]
            parts.append(mgr.union_all(mgr.meet(mgr.disc_eq(mv, q), self.pred(m.inv))
                                       for q, m in enumerate(proc.modes)))
        return mgr.meet_all(parts)

    def _compile_rates(self):
        # rates[x] = (process index or None, per-mode intervals)
        one = Interval.point(1)
        governed = {}
        for i, proc in enumerate(self.model.processes):
            for x in proc.dense:
                governed[self.var_id[x]] = i
            for m in proc.modes:
                for name, _ in m.rates:
                    v = self.var_id.get(name)
                    if v is not None and v in self.delta_of:
                        governed.setdefault(v, i)
        self.rates: Dict[int, Tuple[Optional[int], Tuple[Interval, ...]]] = {}
        for x in self.clocks:
            i = governed.get(x)
            if i is None:
                self.rates[x] = (None, (one,))
                continue
            name = self.mgr.dense[x].name
            per_mode = []
            for m in self.model.processes[i].modes:
                per_mode.append(dict(m.rates).get(name, one))
            self.rates[x] = (i, tuple(per_mode))

    def _compile_transitions(self) -> List[TransitionSpec]:
        out = []
        for i, proc in enumerate(self.model.processes):
            names = proc.mode_names()
            for k, t in enumerate(proc.transitions):
                dense_as, disc_as = [], []
                for name, val in t.assigns:
                    if isinstance(val, Interval):
                        dense_as.append((self.var_id[name], val))
                    else:
                        disc_as.append((self.disc_by_name[name], val))
                out.append(TransitionSpec(
                    "%s:%s->%s#%d" % (proc.name, t.src, t.dst, k + 1), i + 1, self.mode_vars[i],
                    names.index(t.src), names.index(t.dst), self.pred(t.guard),
                    tuple(dense_as), tuple(disc_as)))
        return out

    def rate_diagram(self, variables) -> Node:
        """Rate constraints on ``$x`` for each ``x`` in ``variables``."""
        key = frozenset(variables)
        hit = self._rate_cache.get(key)
        if hit is not None:
            return hit
        mgr = self.mgr
        by_proc: Dict[Optional[int], List[int]] = {}
        for x in sorted(key):
            by_proc.setdefault(self.rates[x][0], []).append(x)
        parts = []
        for i, xs in by_proc.items():
            if i is None:
                cons = []
                for x in xs:
                    cons += rate_constraints(self.delta_of[x], self.delta, self.rates[x][1][0])
                parts.append(mgr.conj(cons))
                continue
            mv = self.mode_vars[i]
            alts = []
            for q in range(len(mv.domain)):
                cons = []
                for x in xs:
                    cons += rate_constraints(self.delta_of[x], self.delta, self.rates[x][1][q])
                alts.append(mgr.meet(mgr.disc_eq(mv, q), mgr.conj(cons)))
            parts.append(mgr.union_all(alts))
        res = mgr.meet_all(parts)
        self._rate_cache[key] = res
        return res

    # -- operators ------------------------------------------------------------

    def _finish(self, d: Node) -> Node:
        return normalize(self.mgr, d) if self.normalize_ops else d

    def _elapse(self, d: Node, sign: int) -> Node:
        mgr = self.mgr
        moving = sorted(dense_vars_of(mgr, d) & set(self.delta_of))
        if not moving:
            return self._finish(mgr.meet(self.invariant, d))
        deltas = {x: self.delta_of[x] for x in moving}
        d = delta_exp(mgr, d, deltas, sign)
        d = mgr.meet(d, mgr.conj([(LinExpr(((self.delta, -1),)), Bound(Fraction(0), True))]))
        d = mgr.meet(d, self.rate_diagram(moving))
        between = self._finish if self.normalize_ops else None
        d = exists_elim_all(mgr, d, [deltas[x] for x in moving], between)
        d = exists_elim(mgr, d, self.delta)
        return self._finish(mgr.meet(self.invariant, d))

    def time(self, d: Node, modes=None) -> Node:
        """States that can reach ``d`` by letting time pass.

        ``modes`` optionally restricts the source to ``{process: mode}``.
        """
        d = self._restrict(d, modes)
        return self._elapse(d, 1)

    def post_time(self, d: Node, modes=None) -> Node:
        """States reachable from ``d`` by letting time pass."""
        d = self._restrict(d, modes)
        return self._elapse(d, -1)

    def _restrict(self, d, modes):
        if modes:
            for proc, mode in dict(modes).items():
                i, q = self.mode_index(proc, mode)
                d = self.mgr.meet(d, self.mgr.disc_eq(self.mode_vars[i], q))
        return d

    def xtion(self, d: Node, t: TransitionSpec) -> Node:
        """States that reach ``d`` by taking ``t``."""
        mgr = self.mgr
        d = mgr.cofactor(d, t.mode_var, t.dst)
        for var, val in t.disc_assigns:
            d = mgr.cofactor(d, var, val)
        for y, iv in t.dense_assigns:
            d = mgr.meet(d, mgr.conj(interval_constraints(y, iv)))
        for y, _ in t.dense_assigns:
            d = exists_elim(mgr, d, y)
        if d is FALSE:
            return FALSE
        d = mgr.meet(d, mgr.disc_eq(t.mode_var, t.src))
        d = mgr.meet(d, t.guard)
        d = mgr.meet(d, self.invariant)
        return self._finish(d)

    def post_xtion(self, d: Node, t: TransitionSpec) -> Node:
        """States reached from ``d`` by taking ``t``."""
        mgr = self.mgr
        d = mgr.meet(d, mgr.disc_eq(t.mode_var, t.src))
        d = mgr.meet(d, t.guard)
        d = mgr.meet(d, self.invariant)
        if d is FALSE:
            return FALSE
        d = mgr.cofactor(d, t.mode_var, t.src)
        if t.disc_assigns:
            d = mgr.discrete_del(d, [v for v, _ in t.disc_assigns])
        for y, _ in t.dense_assigns:
            d = exists_elim(mgr, d, y)
        for y, iv in t.dense_assigns:
            d = mgr.meet(d, mgr.conj(interval_constraints(y, iv)))
        d = mgr.meet(d, mgr.disc_eq(t.mode_var, t.dst))
        for var, val in t.disc_assigns:
            d = mgr.meet(d, mgr.disc_eq(var, val))
        d = mgr.meet(d, self.invariant)
        return self._finish(d)

    def project_params(self, d: Node) -> Node:
        """Existentially remove every non-parameter variable and all
        discrete atoms."""
        mgr = self.mgr
        others = sorted(dense_vars_of(mgr, d) - set(self.params))
        between = self._finish if self.normalize_ops else None
        d = exists_elim_all(mgr, d, others, between)
        d = mgr.discrete_del(d, mgr.discrete)
        return normalize(mgr, d)
