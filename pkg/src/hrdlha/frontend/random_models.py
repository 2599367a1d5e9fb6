"""Random small parametric models, for differential testing.

Each process owns one clock; guards and invariants compare a clock with a
constant or with a parameter, transitions may reset the clock and write a
shared discrete flag.  Seeds are deterministic.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import (TRUE_PRED, DiscreteDecl, DiscTest, Interval, LHAModel,
                    Lin, Mode, ModeTest, Process, Transition, conj, disj)

RATES = (Interval.point(1), Interval(Fraction(1), Fraction(2)),
         Interval(Fraction(1, 2), Fraction(1)), Interval.point(2))


@dataclass
class RandomModelConfig:
    max_processes: int = 2
    max_modes: int = 3
    max_params: int = 2
    max_const: int = 5
    flag: bool = True  # shared discrete flag in 0..1


def _clock_test(rng, x, params, cfg, upper):
    """``x <= c``, ``x >= c``, ``x - P <= 0`` and friends, possibly strict."""
    rel = rng.choice(("<=", "<") if upper else (">=", ">"))
    if params and rng.random() < 0.5:
        p = rng.choice(params)
        k = rng.choice((0, 0, 1, -1))
        return Lin(((x, 1), (p, -1)), rel, Fraction(k))
    return Lin(((x, 1),), rel, Fraction(rng.randint(0, cfg.max_const)))


def random_model(seed: int, cfg: Optional[RandomModelConfig] = None) -> LHAModel:
    cfg = cfg or RandomModelConfig()
    rng = random.Random(seed)
    params = tuple("P%d" % i for i in range(1, rng.randint(1, cfg.max_params) + 1))
    nproc = rng.randint(1, cfg.max_processes)
    procs = []
    for pi in range(1, nproc + 1):
        x = "x%d" % pi
        nmodes = rng.randint(2, cfg.max_modes)
        names = ["m%d" % k for k in range(nmodes)]
        modes = []
        for k, name in enumerate(names):
            inv = TRUE_PRED
            if k < nmodes - 1 and rng.random() < 0.6:
                inv = _clock_test(rng, x, params, cfg, upper=True)
            modes.append(Mode(name, inv, ((x, rng.choice(RATES)),)))
        trans = []
        # a chain through the modes keeps every mode potentially reachable
        for k in range(nmodes - 1):
            trans.append(_transition(rng, x, params, cfg, names[k], names[k + 1]))
        for _ in range(rng.randint(0, 2)):
            a, b = rng.sample(names, 2)
            trans.append(_transition(rng, x, params, cfg, a, b))
        procs.append(Process("p%d" % pi, (x,), tuple(modes), tuple(trans)))
    discretes = (DiscreteDecl("f", 0, 1, 0),) if cfg.flag else ()
    init = conj(*[ModeTest(p.name, "m0") for p in procs],
                *[Lin(((p.dense[0], 1),), "=", Fraction(0)) for p in procs])
    targets = [ModeTest(p.name, p.modes[-1].name) for p in procs]
    risk = conj(*targets) if rng.random() < 0.5 else disj(*targets)
    return LHAModel(params, (), discretes, tuple(procs), init, risk,
                    ("random model, seed %d" % seed,))


def _transition(rng, x, params, cfg, src, dst):
    guard = TRUE_PRED
    r = rng.random()
    if r < 0.45:
        guard = _clock_test(rng, x, params, cfg, upper=False)
    elif r < 0.7:
        guard = _clock_test(rng, x, params, cfg, upper=True)
    if cfg.flag and rng.random() < 0.3:
        guard = conj(guard, DiscTest("f", rng.choice(("=", "!=")), rng.randint(0, 1)))
    assigns = []
    if rng.random() < 0.6:
        assigns.append((x, Interval.point(0)))
    if cfg.flag and rng.random() < 0.3:
        assigns.append(("f", rng.randint(0, 1)))
    return Transition(src, dst, guard, tuple(assigns))
