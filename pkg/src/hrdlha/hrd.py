"""Hybrid-Restriction Diagrams.

A diagram node tests one decision atom.  Dense atoms are normalized linear
expressions whose outgoing arcs carry strictly ascending upper bounds; a
path takes the conjunction of the constraints it passes and the diagram
denotes the set of its root-to-TRUE paths.  A dense atom missing from a
path is unconstrained, which the operations model by lifting the operand
to a single ``(<, inf)`` arc.  Discrete atoms (mode variables and
finite-domain variables) carry one arc per value; a missing discrete atom
means every value.

All nodes of a context live in one :class:`Manager`, which hash-conses
them, so equal structure is the same Python object.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .core import INF, INFINITY, Bound, DenseVar, LinExpr, negate_constraint
from .ordering import AtomOrder, OrderingKind

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class OrderingViolation(RuntimeError):
    """A child atom does not strictly follow its parent atom."""


@dataclass(frozen=True)
class DiscreteVar:
    name: str
    owner: int
    domain: Tuple[int, ...]


class Node:
    __slots__ = ("atom", "arcs", "key", "dense", "uid")

    def __init__(self, atom, arcs, key, dense, uid):
        self.atom = atom
        self.arcs = arcs
        self.key = key
        self.dense = dense
        self.uid = uid

    def __repr__(self):
        if self is TRUE:
            return "TRUE"
        if self is FALSE:
            return "FALSE"
        return "Node#%d" % self.uid

    @property
    def terminal(self) -> bool:
        return self.atom is None


TRUE = Node(None, (), None, False, 1)
FALSE = Node(None, (), None, False, 0)


class Manager:
    """Node store, ordering and diagram operations for one analysis context.

    ``dense`` and ``discrete`` are the variable tables; atom ids are indices
    into them.  With ``memoize=False`` the per-call operation caches are
    disabled (used to check that caching changes nothing).
    """

    def __init__(self, dense: Sequence[DenseVar], discrete: Sequence[DiscreteVar] = (),
                 ordering: OrderingKind = OrderingKind.COEFFICIENT, memoize: bool = True):
        self.dense = tuple(dense)
        self.discrete = tuple(discrete)
        self.order = AtomOrder(self.dense, OrderingKind(ordering))
        self.memoize = memoize
        self._unique: Dict[tuple, Node] = {}
        self._next_uid = 2
        self._disc_index = {d: i for i, d in enumerate(self.discrete)}
        self.peak_nodes = 0

    # -- variables -------------------------------------------------------

    @property
    def ordering(self) -> OrderingKind:
        return self.order.kind

    def dense_id(self, name: str) -> int:
        for i, v in enumerate(self.dense):
            if v.name == name:
                return i
        raise KeyError(name)

    def discrete_var(self, name: str) -> DiscreteVar:
        for d in self.discrete:
            if d.name == name:
                return d
        raise KeyError(name)

    def names(self):
        return [v.name for v in self.dense]

    def atom_key(self, atom):
        if isinstance(atom, LinExpr):
            return self.order.dense_key(atom)
        return self.order.discrete_key(atom.owner, self._disc_index[atom])

    def __len__(self):
        return len(self._unique)

    # -- construction ----------------------------------------------------

    def _memo(self):
        return {} if self.memoize else None

    def _intern(self, atom, key, dense, arcs) -> Node:
        k = (atom, arcs)
        node = self._unique.get(k)
        if node is None:
            node = Node(atom, arcs, key, dense, self._next_uid)
            self._next_uid += 1
            self._unique[k] = node
            if len(self._unique) > self.peak_nodes:
                self.peak_nodes = len(self._unique)
        return node

    def _dense_node(self, atom, key, arcs) -> Node:
        # arcs: sorted, distinct labels, children never FALSE
        if not arcs:
            return FALSE
        if len(arcs) == 1 and arcs[0][0].value is INFINITY:
            return arcs[0][1]
        return self._intern(atom, key, True, tuple(arcs))

    def _disc_node(self, atom, key, arcs) -> Node:
        # arcs: sorted by value, children never FALSE
        if not arcs:
            return FALSE
        if len(arcs) == len(atom.domain):
            first = arcs[0][1]
            if all(c is first for _, c in arcs):
                return first
        return self._intern(atom, key, False, tuple(arcs))

    def make_node(self, atom, arcs: Iterable[Tuple[object, Node]]) -> Node:
        """Build a node, sorting arcs and merging equal labels by union."""
        key = self.atom_key(atom)
        merged: Dict[object, Node] = {}
        dense = isinstance(atom, LinExpr)
        for label, child in arcs:
            if child is FALSE:
                continue
            if not child.terminal and not key < child.key:
                raise OrderingViolation("child atom %r does not follow %r" % (child.atom, atom))
            if dense:
                if not isinstance(label, Bound):
                    raise TypeError("dense arc labels must be Bound, got %r" % (label,))
            elif label not in atom.domain:
                raise ValueError("value %r outside the domain of %s" % (label, atom.name))
            if label in merged:
                merged[label] = self.union(merged[label], child)
            else:
                merged[label] = child
        items = sorted(merged.items(), key=lambda kv: kv[0])
        if dense:
            return self._dense_node(atom, key, items)
        return self._disc_node(atom, key, items)

    def constraint(self, e: LinExpr, b: Bound) -> Node:
        if b.value is INFINITY:
            return TRUE
        return self._dense_node(e, self.order.dense_key(e), ((b, TRUE),))

    def conj(self, constraints: Iterable[Tuple[LinExpr, Bound]]) -> Node:
        """Single-path diagram for a conjunction of constraints."""
        best: Dict[LinExpr, Bound] = {}
        for e, b in constraints:
            if b.value is INFINITY:
                continue
            old = best.get(e)
            if old is None or b < old:
                best[e] = b
        items = sorted(best.items(), key=lambda kv: self.order.dense_key(kv[0]), reverse=True)
        node = TRUE
        for e, b in items:
            node = self._dense_node(e, self.order.dense_key(e), ((b, node),))
        return node

    def disc_eq(self, var: DiscreteVar, value: int) -> Node:
        return self.disc_in(var, (value,))

    def disc_in(self, var: DiscreteVar, values) -> Node:
        vals = sorted(set(values))
        for v in vals:
            if v not in var.domain:
                raise ValueError("value %r outside the domain of %s" % (v, var.name))
        return self._disc_node(var, self.atom_key(var), tuple((v, TRUE) for v in vals))

    def from_path(self, poly: Mapping[LinExpr, Bound], disc: Mapping[DiscreteVar, int] = ()) -> Node:
        node = self.conj(poly.items())
        items = sorted(dict(disc).items(), key=lambda kv: self.atom_key(kv[0]))
        for var, val in items:
            node = self.meet(self.disc_eq(var, val), node)
        return node

    def from_paths(self, paths) -> Node:
        """Union of single-path diagrams, combined pairwise."""
        nodes = [self.from_path(p, d) for p, d in paths]
        if not nodes:
            return FALSE
        while len(nodes) > 1:
            nxt = []
            for i in range(0, len(nodes) - 1, 2):
                nxt.append(self.union(nodes[i], nodes[i + 1]))
            if len(nodes) % 2:
                nxt.append(nodes[-1])
            nodes = nxt
        return nodes[0]

    # -- union -----------------------------------------------------------

    def union(self, b: Node, d: Node) -> Node:
        if b is FALSE:
            return d
        if d is FALSE:
            return b
        return self._union(b, d, self._memo())

    def union_all(self, nodes: Iterable[Node]) -> Node:
        out = FALSE
        for n in nodes:
            out = self.union(out, n)
        return out

    def _union(self, b, d, memo):
        if b is TRUE or d is TRUE:
            return TRUE
        if b is FALSE:
            return d
        if d is FALSE or b is d:
            return b
        if memo is not None:
            mk = (b, d) if b.uid < d.uid else (d, b)
            hit = memo.get(mk)
            if hit is not None:
                return hit
        bk, dk = b.key, d.key
        if bk == dk:
            if b.dense:
                arcs = _merge_dense(b.arcs, d.arcs, lambda x, y: self._union(x, y, memo))
                res = self._dense_node(b.atom, bk, arcs)
            else:
                bm, dm = dict(b.arcs), dict(d.arcs)
                arcs = []
                for v in b.atom.domain:
                    x, y = bm.get(v, FALSE), dm.get(v, FALSE)
                    if x is FALSE and y is FALSE:
                        continue
                    arcs.append((v, self._union(x, y, memo)))
                res = self._disc_node(b.atom, bk, arcs)
        else:
            top, other = (b, d) if bk < dk else (d, b)
            if top.dense:
                arcs = list(top.arcs)
                last_label, last_child = arcs[-1]
                if last_label.value is INFINITY:
                    arcs[-1] = (INF, self._union(last_child, other, memo))
                else:
                    arcs.append((INF, other))
                res = self._dense_node(top.atom, top.key, arcs)
            else:
                tm = dict(top.arcs)
                arcs = [(v, self._union(tm.get(v, FALSE), other, memo)) for v in top.atom.domain]
                res = self._disc_node(top.atom, top.key, arcs)
        if memo is not None:
            memo[mk] = res
        return res

    # -- space intersection ----------------------------------------------

    def meet(self, b: Node, d: Node) -> Node:
        """Pairwise space-intersection of the polyhedra of ``b`` and ``d``."""
        return self._meet(b, d, self._memo())

    def meet_all(self, nodes: Iterable[Node]) -> Node:
        out = TRUE
        for n in nodes:
            out = self.meet(out, n)
            if out is FALSE:
                break
        return out

    def _meet(self, b, d, memo):
        if b is FALSE or d is FALSE:
            return FALSE
        if b is TRUE:
            return d
        if d is TRUE or b is d:
            return b
        if memo is not None:
            mk = (b, d) if b.uid < d.uid else (d, b)
            hit = memo.get(mk)
            if hit is not None:
                return hit
        bk, dk = b.key, d.key
        if bk == dk:
            if b.dense:
                merged: Dict[Bound, Node] = {}
                for beta, bc in b.arcs:
                    for alpha, dc in d.arcs:
                        child = self._meet(bc, dc, memo)
                        if child is FALSE:
                            continue
                        label = beta if beta < alpha else alpha
                        prev = merged.get(label)
                        merged[label] = child if prev is None else self.union(prev, child)
                res = self._dense_node(b.atom, bk, sorted(merged.items(), key=lambda kv: kv[0]))
            else:
                dm = dict(d.arcs)
                arcs = []
                for v, bc in b.arcs:
                    dc = dm.get(v)
                    if dc is None:
                        continue
                    child = self._meet(bc, dc, memo)
                    if child is not FALSE:
                        arcs.append((v, child))
                res = self._disc_node(b.atom, bk, arcs)
        else:
            top, other = (b, d) if bk < dk else (d, b)
            arcs = []
            for label, c in top.arcs:
                child = self._meet(c, other, memo)
                if child is not FALSE:
                    arcs.append((label, child))
            if top.dense:
                res = self._dense_node(top.atom, top.key, arcs)
            else:
                res = self._disc_node(top.atom, top.key, arcs)
        if memo is not None:
            memo[mk] = res
        return res

    # -- representation-level intersection / exclusion -------------------

    def _lift(self, n: Node, atom, key, dense):
        """Arcs of ``n`` viewed as a node on ``atom`` (n may lack it)."""
        if not n.terminal and n.key == key:
            return n.arcs
        if dense:
            return ((INF, n),)
        return tuple((v, n) for v in atom.domain)

    def _top(self, b: Node, d: Node):
        if b.terminal:
            return d
        if d.terminal:
            return b
        return b if b.key <= d.key else d

    def intersect_sets(self, b: Node, d: Node) -> Node:
        """Polyhedra recorded in both ``b`` and ``d`` (conjunction on
        discrete atoms)."""
        return self._inter(b, d, self._memo())

    def _inter(self, b, d, memo):
        if b is FALSE or d is FALSE:
            return FALSE
        if b is d:
            return b
        if memo is not None:
            mk = (b, d) if b.uid < d.uid else (d, b)
            hit = memo.get(mk)
            if hit is not None:
                return hit
        top = self._top(b, d)
        if top.terminal:
            res = TRUE  # both TRUE, handled by b is d; kept for clarity
        else:
            atom, key, dense = top.atom, top.key, top.dense
            barcs = self._lift(b, atom, key, dense)
            darcs = dict(self._lift(d, atom, key, dense))
            arcs = []
            for label, bc in barcs:
                dc = darcs.get(label)
                if dc is None:
                    continue
                child = self._inter(bc, dc, memo)
                if child is not FALSE:
                    arcs.append((label, child))
            res = self._dense_node(atom, key, arcs) if dense else self._disc_node(atom, key, arcs)
        if memo is not None:
            memo[mk] = res
        return res

    def exclude(self, b: Node, d: Node) -> Node:
        """Polyhedra recorded in ``b`` but not in ``d`` (``b and not d`` on
        discrete atoms)."""
        if d is FALSE:
            return b
        return self._excl(b, d, self._memo())

    def _excl(self, b, d, memo):
        if b is FALSE or b is d:
            return FALSE
        if d is FALSE:
            return b
        if memo is not None:
            hit = memo.get((b, d))
            if hit is not None:
                return hit
        top = self._top(b, d)
        atom, key, dense = top.atom, top.key, top.dense
        barcs = self._lift(b, atom, key, dense)
        darcs = dict(self._lift(d, atom, key, dense))
        arcs = []
        for label, bc in barcs:
            dc = darcs.get(label)
            child = bc if dc is None else self._excl(bc, dc, memo)
            if child is not FALSE:
                arcs.append((label, child))
        res = self._dense_node(atom, key, arcs) if dense else self._disc_node(atom, key, arcs)
        if memo is not None:
            memo[(b, d)] = res
        return res

    # -- complement --------------------------------------------------------

    def complement(self, d: Node) -> Node:
        """Diagram for the complement of the satisfying set of ``d``.

        For a dense node with ascending labels b1..bm, the value of the atom
        falls into exactly one slice (b_{k-1}, b_k]; inside it the node is
        the union of children k..m, so its complement there is the
        complement of that suffix union.
        """
        return self._compl(d, self._memo())

    def _compl(self, d, memo):
        if d is TRUE:
            return FALSE
        if d is FALSE:
            return TRUE
        if memo is not None:
            hit = memo.get(d)
            if hit is not None:
                return hit
        if d.dense:
            e = d.atom
            arcs = d.arcs
            suffix = [None] * len(arcs)
            acc = FALSE
            for i in range(len(arcs) - 1, -1, -1):
                acc = self.union(arcs[i][1], acc)
                suffix[i] = acc
            parts = []
            prev = None
            for i, (beta, _) in enumerate(arcs):
                region = []
                if beta.value is not INFINITY:
                    region.append((e, beta))
                if prev is not None:
                    region.append(negate_constraint(e, prev))
                parts.append(self.meet(self.conj(region), self._compl(suffix[i], memo)))
                prev = beta
            if prev.value is not INFINITY:
                parts.append(self.conj([negate_constraint(e, prev)]))
            res = self.union_all(parts)
        else:
            dm = dict(d.arcs)
            arcs = []
            for v in d.atom.domain:
                child = self._compl(dm.get(v, FALSE), memo)
                if child is not FALSE:
                    arcs.append((v, child))
            # children may contain atoms preceding nothing above d, so reuse key
            res = self._disc_node(d.atom, d.key, arcs)
        if memo is not None:
            memo[d] = res
        return res

    # -- restriction on discrete atoms ------------------------------------

    def cofactor(self, d: Node, var: DiscreteVar, value: int) -> Node:
        """``d`` restricted to ``var = value`` with the ``var`` atom removed."""
        key = self.atom_key(var)
        memo = {}

        def rec(n):
            if n.terminal or key < n.key:
                return n
            hit = memo.get(n)
            if hit is not None:
                return hit
            if n.key == key:
                res = dict(n.arcs).get(value, FALSE)
            else:
                arcs = []
                for label, c in n.arcs:
                    child = rec(c)
                    if child is not FALSE:
                        arcs.append((label, child))
                res = self._dense_node(n.atom, n.key, arcs) if n.dense \
                    else self._disc_node(n.atom, n.key, arcs)
            memo[n] = res
            return res

        return rec(d)

    def discrete_del(self, d: Node, variables) -> Node:
        """Existentially drop the given discrete atoms."""
        drop = set(variables)
        memo = {}

        def rec(n):
            if n.terminal:
                return n
            hit = memo.get(n)
            if hit is not None:
                return hit
            if not n.dense and n.atom in drop:
                res = self.union_all(rec(c) for _, c in n.arcs)
            else:
                arcs = []
                for label, c in n.arcs:
                    child = rec(c)
                    if child is not FALSE:
                        arcs.append((label, child))
                res = self._rebuild(n, arcs)
            memo[n] = res
            return res

        return rec(d)

    def _rebuild(self, n: Node, arcs) -> Node:
        """Node on ``n``'s atom whose children may have lost atoms (so they
        still follow ``n``) but may now share labels."""
        if n.dense:
            return self._dense_node(n.atom, n.key, _dedupe(arcs, self.union))
        return self._disc_node(n.atom, n.key, arcs)

    # -- inspection --------------------------------------------------------

    def evaluate(self, d: Node, valuation: Mapping[int, Fraction],
                 discretes: Mapping[DiscreteVar, int] = None) -> bool:
        """Does some root-to-TRUE path hold under the valuation?"""
        discretes = discretes or {}
        memo = {}

        def rec(n):
            if n is TRUE:
                return True
            if n is FALSE:
                return False
            hit = memo.get(n)
            if hit is not None:
                return hit
            if n.dense:
                try:
                    val = n.atom.value(valuation)
                except KeyError as exc:
                    raise KeyError("valuation misses dense variable %s" % exc) from None
                res = False
                for beta, c in n.arcs:
                    if beta.value is INFINITY or val < beta.value or (val == beta.value and beta.weak):
                        if rec(c):
                            res = True
                            break
            else:
                if n.atom not in discretes:
                    raise KeyError("valuation misses discrete variable %s" % n.atom.name)
                c = dict(n.arcs).get(discretes[n.atom])
                res = c is not None and rec(c)
            memo[n] = res
            return res

        return rec(d)

    def enumerate_paths(self, d: Node) -> List[Tuple[Dict[LinExpr, Bound], Dict[DiscreteVar, int]]]:
        """Every root-to-TRUE path as ``(polyhedron, discrete assignment)``."""
        out = []

        def rec(n, poly, disc):
            if n is FALSE:
                return
            if n is TRUE:
                out.append((dict(poly), dict(disc)))
                return
            for label, c in n.arcs:
                if n.dense:
                    if label.value is INFINITY:
                        rec(c, poly, disc)
                    else:
                        poly[n.atom] = label
                        rec(c, poly, disc)
                        del poly[n.atom]
                else:
                    disc[n.atom] = label
                    rec(c, poly, disc)
                    del disc[n.atom]

        rec(d, {}, {})
        return out

    def path_count(self, d: Node) -> int:
        memo = {TRUE: 1, FALSE: 0}

        def rec(n):
            hit = memo.get(n)
            if hit is not None:
                return hit
            res = sum(rec(c) for _, c in n.arcs)
            memo[n] = res
            return res

        return rec(d)

    def nodes(self, d: Node) -> List[Node]:
        seen = {}
        stack = [d]
        while stack:
            n = stack.pop()
            if n.terminal or n.uid in seen:
                continue
            seen[n.uid] = n
            stack.extend(c for _, c in n.arcs)
        return list(seen.values())

    def size(self, d: Node) -> Tuple[int, int]:
        ns = self.nodes(d)
        return len(ns), sum(len(n.arcs) for n in ns)

    def dense_atoms(self, d: Node):
        return {n.atom for n in self.nodes(d) if n.dense}

    def check_invariants(self, d: Node) -> None:
        """Structural audit; raises AssertionError on any violation."""
        for n in self.nodes(d):
            assert n.arcs, "internal node without arcs"
            if n.dense:
                labels = [lb for lb, _ in n.arcs]
                assert labels[0].value is not INFINITY, "first label infinite"
                assert all(a < b for a, b in zip(labels, labels[1:])), "labels not ascending"
            else:
                vals = [v for v, _ in n.arcs]
                assert len(set(vals)) == len(vals)
            for _, c in n.arcs:
                assert c is not FALSE, "FALSE child"
                if not c.terminal:
                    assert n.key < c.key, "ordering violation"

    def clear(self) -> None:
        """Drop every node not reachable from TRUE/FALSE (invalidates all
        previously returned diagrams)."""
        self._unique.clear()


def _merge_dense(a, b, join):
    """Merge two ascending arc lists; equal labels combine with ``join``."""
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        la, ca = a[i]
        lb, cb = b[j]
        if la == lb:
            out.append((la, join(ca, cb)))
            i += 1
            j += 1
        elif la < lb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def _dedupe(arcs, union):
    merged = {}
    for label, c in arcs:
        prev = merged.get(label)
        merged[label] = c if prev is None else union(prev, c)
    return sorted(merged.items(), key=lambda kv: kv[0])
