"""Reachability fixpoints and parametric safety analysis."""
from __future__ import annotations

import enum
import time as _time
from dataclasses import dataclass, field
from typing import List, Optional, TextIO

from .hrd import FALSE, TRUE, Node
from .normalize import normalize
from .ordering import OrderingKind
from .wp import SymbolicModel


class Direction(enum.Enum):
    BACKWARD = "backward"
    FORWARD = "forward"


class Status(enum.Enum):
    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class AnalysisConfig:
    direction: Direction = Direction.BACKWARD
    pspsc: bool = False
    ordering: OrderingKind = OrderingKind.COEFFICIENT
    max_iterations: int = 0  # 0 means unbounded
    emit_stats: bool = False

    def __post_init__(self):
        self.direction = Direction(self.direction)
        self.ordering = OrderingKind(self.ordering)
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")


@dataclass
class Stats:
    iterations: int = 0
    peak_nodes: int = 0
    frontier_paths: List[int] = field(default_factory=list)
    wall_time: float = 0.0

    def as_dict(self):
        return {"iterations": self.iterations, "peak_nodes": self.peak_nodes,
                "frontier_paths": list(self.frontier_paths),
                "wall_time": round(self.wall_time, 6)}


@dataclass
class AnalysisResult:
    status: Status
    unsafe_params: Node
    solutions: Node
    reach: Node
    symbolic: SymbolicModel
    stats: Stats

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def manager(self):
        return self.symbolic.mgr


class _Loop:
    """Shared fixpoint driver: ``step`` maps a frontier to its image."""

    def __init__(self, sm: SymbolicModel, cfg: AnalysisConfig, stream: Optional[TextIO]):
        self.sm = sm
        self.cfg = cfg
        self.stream = stream
        self.stats = Stats()

    def step(self, frontier: Node) -> Node:
        sm, mgr = self.sm, self.sm.mgr
        if self.cfg.direction is Direction.BACKWARD:
            parts = [sm.time(sm.xtion(frontier, t)) for t in sm.transitions]
        else:
            parts = [sm.post_time(sm.post_xtion(frontier, t)) for t in sm.transitions]
        return mgr.union_all(parts)

    def report(self, frontier: Node):
        mgr = self.sm.mgr
        paths = mgr.path_count(frontier)
        self.stats.frontier_paths.append(paths)
        self.stats.peak_nodes = max(self.stats.peak_nodes, mgr.peak_nodes)
        if self.stream is not None:
            self.stream.write("iteration %d frontier_paths %d nodes %d\n"
                              % (self.stats.iterations, paths, len(mgr)))
            self.stream.flush()

    def run(self, seed: Node, prune=None, record=None):
        """Iterate to the fixpoint from ``seed``.

        ``prune`` filters each new image before the novelty check and
        ``record`` sees every frontier (both used by PSPSC).  Returns
        ``(status, accumulated)``.
        """
        mgr = self.sm.mgr
        limit = self.cfg.max_iterations
        if record is not None:
            record(seed)
        acc = normalize(mgr, seed)
        frontier = acc
        self.report(frontier)
        while frontier is not FALSE:
            if limit and self.stats.iterations >= limit:
                return Status.ITERATION_LIMIT, acc
            self.stats.iterations += 1
            image = self.step(frontier)
            if prune is not None:
                image = prune(image)
            new = normalize(mgr, mgr.union(acc, image))
            frontier = FALSE if new is acc else mgr.exclude(new, acc)
            acc = new
            if record is not None and frontier is not FALSE:
                record(frontier)
            self.report(frontier)
        return Status.CONVERGED, acc


def backward_reach(sm: SymbolicModel, risk: Node = None, cfg: AnalysisConfig = None,
                   stream=None):
    """Least fixpoint of the backward image from the time closure of ``risk``."""
    cfg = cfg or AnalysisConfig()
    cfg.direction = Direction.BACKWARD
    risk = sm.risk if risk is None else risk
    loop = _Loop(sm, cfg, stream)
    seed = sm.time(sm.mgr.meet(risk, sm.invariant))
    status, reach = loop.run(seed)
    return status, reach, loop.stats


def forward_reach(sm: SymbolicModel, cfg: AnalysisConfig = None, stream=None):
    cfg = cfg or AnalysisConfig()
    cfg.direction = Direction.FORWARD
    loop = _Loop(sm, cfg, stream)
    status, reach = loop.run(sm.post_time(sm.initial))
    return status, reach, loop.stats


def parametric_unsafe(sm: SymbolicModel, reach: Node, direction=Direction.BACKWARD) -> Node:
    """Parameter valuations from which the risk is reachable.

    Backward: project ``I and reach``; forward: project ``reach and risk``.
    """
    mgr = sm.mgr
    other = sm.initial if Direction(direction) is Direction.BACKWARD else sm.risk
    return sm.project_params(mgr.meet(other, reach))


def psa_with_pspsc(sm: SymbolicModel, cfg: AnalysisConfig = None, stream=None):
    """Parametric analysis that stops exploring states whose parameter
    valuations are already known to be unsafe.

    Returns ``(status, unsafe, reach, stats)``.
    """
    cfg = cfg or AnalysisConfig(pspsc=True)
    mgr = sm.mgr
    loop = _Loop(sm, cfg, stream)
    backward = cfg.direction is Direction.BACKWARD
    other = sm.initial if backward else sm.risk
    state = {"P": FALSE, "notP": TRUE}

    def record(frontier):
        hit = sm.project_params(mgr.meet(other, frontier))
        if hit is FALSE:
            return
        P = normalize(mgr, mgr.union(state["P"], hit))
        if P is not state["P"]:
            state["P"] = P
            state["notP"] = normalize(mgr, mgr.complement(P))

    def prune(image):
        return normalize(mgr, mgr.meet(image, state["notP"]))

    if backward:
        seed = sm.time(mgr.meet(sm.risk, sm.invariant))
    else:
        seed = sm.post_time(sm.initial)
    status, reach = loop.run(seed, prune=prune, record=record)
    return status, state["P"], reach, loop.stats


def analyze(model, cfg: AnalysisConfig = None, stream: Optional[TextIO] = None,
            memoize: bool = True) -> AnalysisResult:
    """Run the configured analysis on a model AST (or a compiled model)."""
    cfg = cfg or AnalysisConfig()
    start = _time.perf_counter()
    if isinstance(model, SymbolicModel):
        sm = model
    else:
        sm = SymbolicModel(model, cfg.ordering, memoize=memoize)
    if cfg.pspsc:
        status, unsafe, reach, stats = psa_with_pspsc(sm, cfg, stream)
    else:
        if cfg.direction is Direction.BACKWARD:
            status, reach, stats = backward_reach(sm, cfg=cfg, stream=stream)
        else:
            status, reach, stats = forward_reach(sm, cfg=cfg, stream=stream)
        unsafe = parametric_unsafe(sm, reach, cfg.direction)
    mgr = sm.mgr
    solutions = normalize(mgr, mgr.complement(unsafe))
    stats.wall_time = _time.perf_counter() - start
    stats.peak_nodes = max(stats.peak_nodes, mgr.peak_nodes)
    return AnalysisResult(status, unsafe, solutions, reach, sm, stats)


def semantically_equal(mgr, a: Node, b: Node) -> bool:
    """Exact check: both differences are empty polyhedra sets."""
    from .normalize import drop_infeasible
    d1 = drop_infeasible(mgr, mgr.meet(a, mgr.complement(b)))
    if d1 is not FALSE:
        return False
    return drop_infeasible(mgr, mgr.meet(b, mgr.complement(a))) is FALSE
