"""Normalization of diagrams.

The pipeline works on the recorded polyhedra:

1. drop paths whose polyhedron is empty;
2. along each path drop constraints implied by the others, trying the
   latest atoms first (``eliminate_redundant`` alone applies the narrower
   rule: only constraints implied by the ones on preceding atoms go);
3. drop paths contained in a peer path with the same discrete assignment
   (containment is decided with the tightest derivable bounds of the
   container's expressions, i.e. the proof obligations).

Discrete assignments are first completed over the discrete atoms present in
the diagram, so "same assignment" is well defined and the result is
idempotent.  Per-path results are cached on the manager; caches key on the
frozen polyhedron.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Set, Tuple

from .core import (INF, Bound, LinExpr, poly_implies, poly_is_infeasible,
                   poly_sup, poly_witness)
from .hrd import FALSE, DiscreteVar, Manager, Node

Path = Tuple[Dict[LinExpr, Bound], Dict[DiscreteVar, int]]


class _PathCache:
    __slots__ = ("infeasible", "witness", "sup", "reduced", "core")

    def __init__(self):
        self.core = {}
        self.infeasible = {}
        self.witness = {}
        self.sup = {}
        self.reduced = {}


def _cache(mgr: Manager) -> _PathCache:
    c = getattr(mgr, "_path_cache", None)
    if c is None:
        c = mgr._path_cache = _PathCache()
    return c


def _fz(z):
    return frozenset(z.items())


def is_infeasible(mgr: Manager, z) -> bool:
    c = _cache(mgr).infeasible
    k = _fz(z)
    hit = c.get(k)
    if hit is None:
        hit = c[k] = poly_is_infeasible(z)
    return hit


def witness(mgr: Manager, z):
    c = _cache(mgr).witness
    k = _fz(z)
    if k not in c:
        c[k] = poly_witness(z)
    return c[k]


def core(mgr: Manager, z) -> Dict[LinExpr, Bound]:
    """An irredundant subset of ``z`` with the same points (cached).

    Constraints on later atoms are tried for removal first.
    """
    c = _cache(mgr).core
    k = _fz(z)
    hit = c.get(k)
    if hit is None:
        kept = dict(z)
        for e, b in sorted(z.items(), key=lambda kv: mgr.order.dense_key(kv[0]), reverse=True):
            del kept[e]
            if not poly_implies(kept, e, b):
                kept[e] = b
        hit = c[k] = kept
    return hit


def tightest(mgr: Manager, z, e: LinExpr) -> Bound:
    """Tightest upper bound on ``e`` derivable from ``z`` (cached)."""
    c = _cache(mgr).sup
    k = (_fz(z), e)
    hit = c.get(k)
    if hit is None:
        have = z.get(e, INF)
        s = poly_sup(core(mgr, z), e)
        hit = c[k] = have if s is None or have < s else s
    return hit


def collect_obligations(mgr: Manager, d: Node) -> Set[LinExpr]:
    """Every dense atom reachable in ``d``."""
    return mgr.dense_atoms(d)


def tighten_path(mgr: Manager, z, obligations: Iterable[LinExpr]):
    """``z`` with the tightest derivable bound recorded for each obligation."""
    out = dict(z)
    for e in obligations:
        b = tightest(mgr, z, e)
        if b.value is not INF.value and (e not in out or b < out[e]):
            out[e] = b
    return out


def contains(mgr: Manager, z1, z2) -> bool:
    """Is polyhedron ``z2`` a subset of ``z1``?  (``z2`` must be feasible.)"""
    w = witness(mgr, z2)
    if w is not None:
        for e, b in z1.items():
            v = sum((a * w.get(x, 0) for x, a in e.terms), 0)
            if v > b.value or (v == b.value and not b.weak):
                return False
    for e, b in z1.items():
        have = z2.get(e)
        if have is not None and have <= b:
            continue
        if not tightest(mgr, z2, e) <= b:
            return False
    return True


def reduce_path(mgr: Manager, z) -> Dict[LinExpr, Bound]:
    """Drop constraints implied by the constraints on preceding atoms."""
    c = _cache(mgr).reduced
    k = _fz(z)
    hit = c.get(k)
    if hit is not None:
        return dict(hit)
    key = mgr.order.dense_key
    kept: Dict[LinExpr, Bound] = {}
    for e, b in sorted(z.items(), key=lambda kv: key(kv[0])):
        if kept and poly_implies(kept, e, b):
            continue
        kept[e] = b
    c[k] = dict(kept)
    return kept


# ---------------------------------------------------------------------------
# path-level steps


def _complete(mgr: Manager, d: Node, paths: List[Path]) -> List[Path]:
    atoms = {n.atom for n in mgr.nodes(d) if not n.dense}
    if not atoms:
        return paths
    atoms = sorted(atoms, key=mgr.atom_key)
    out = []
    for z, disc in paths:
        missing = [a for a in atoms if a not in disc]
        if not missing:
            out.append((z, disc))
            continue
        for vals in itertools.product(*(a.domain for a in missing)):
            full = dict(disc)
            full.update(zip(missing, vals))
            out.append((z, full))
    return out


def _disc_key(mgr, disc):
    return tuple(sorted(((mgr.atom_key(a), v) for a, v in disc.items())))


def _poly_key(mgr, z):
    key = mgr.order.dense_key
    return (len(z), sorted((key(e), b) for e, b in z.items()))


def _feasible(mgr, paths):
    return [(z, disc) for z, disc in paths if not is_infeasible(mgr, z)]


def _subsume(mgr, paths):
    groups: Dict[tuple, List[Path]] = {}
    for z, disc in paths:
        groups.setdefault(_disc_key(mgr, disc), []).append((z, disc))
    out = []
    for gk in sorted(groups):
        members = groups[gk]
        members.sort(key=lambda p: _poly_key(mgr, p[0]))
        kept: List[Path] = []
        for z, disc in members:
            if any(contains(mgr, kz, z) for kz, _ in kept):
                continue
            kept = [(kz, kd) for kz, kd in kept if not contains(mgr, z, kz)]
            kept.append((z, disc))
        out.extend(kept)
    return out


def _reduce(mgr, paths):
    return [(reduce_path(mgr, z), disc) for z, disc in paths]


def _paths(mgr, d):
    return _complete(mgr, d, mgr.enumerate_paths(d))


def drop_infeasible(mgr: Manager, d: Node) -> Node:
    """Remove every path whose polyhedron is empty."""
    if d.terminal:
        return d
    return mgr.from_paths(_feasible(mgr, mgr.enumerate_paths(d)))


def eliminate_subsumed(mgr: Manager, d: Node) -> Node:
    if d.terminal:
        return d
    return mgr.from_paths(_subsume(mgr, _feasible(mgr, _paths(mgr, d))))


def eliminate_redundant(mgr: Manager, d: Node) -> Node:
    if d.terminal:
        return d
    return mgr.from_paths(_reduce(mgr, _feasible(mgr, mgr.enumerate_paths(d))))


def normalize(mgr: Manager, d: Node) -> Node:
    """Empty-path removal, redundant-constraint removal, then subsumption."""
    if d.terminal:
        return d
    paths = _feasible(mgr, _paths(mgr, d))
    if not paths:
        return FALSE
    # containment is semantic, so reducing first changes no decision and
    # keeps the exact bound computations small
    paths = [(dict(core(mgr, reduce_path(mgr, z))), disc) for z, disc in paths]
    return mgr.from_paths(_subsume(mgr, paths))
