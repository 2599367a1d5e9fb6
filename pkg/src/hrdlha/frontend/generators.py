"""Benchmark model families.

Fischer's protocol follows the usual four-mode structure.  The reactor,
railroad and CSMA/CD families are reconstructions from their published
descriptions; each generator records its assumptions in model comments.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from ..ordering import ModelError
from .model import (TRUE_PRED, And, DiscreteDecl, DiscTest, Interval, LHAModel,
                    Lin, Mode, ModeTest, Or, Process, Transition, conj, disj)

ZERO = Interval.point(0)


def _lin(terms, rel, rhs):
    return Lin(tuple(terms), rel, Fraction(rhs))


def _pairs_risk(names, mode):
    pairs = [And((ModeTest(a, mode), ModeTest(b, mode)))
             for i, a in enumerate(names) for b in names[i + 1:]]
    return pairs[0] if len(pairs) == 1 else Or(tuple(pairs))


def generate_fischer(m: int, strict_guard: bool = False) -> LHAModel:
    """Fischer's mutual exclusion protocol with ``m`` processes.

    Process 1 has a clock rate in [4/5, 1], the others in [1, 11/10].  The
    request-to-set guard is ``x <= A`` unless ``strict_guard`` asks for
    ``x < A``.
    """
    if m < 2:
        raise ModelError("fischer needs at least 2 processes, got %d" % m)
    procs = []
    for i in range(1, m + 1):
        x = "x%d" % i
        rate = Interval(Fraction(4, 5), Fraction(1)) if i == 1 else \
            Interval(Fraction(1), Fraction(11, 10))
        modes = tuple(Mode("q%d" % k, TRUE_PRED, ((x, rate),)) for k in range(4))
        trans = (
            Transition("q0", "q1", DiscTest("L", "=", 0), ((x, ZERO),)),
            Transition("q1", "q2", _lin(((x, 1), ("A", -1)), "<" if strict_guard else "<=", 0),
                       ((x, ZERO), ("L", i))),
            Transition("q2", "q3", And((_lin(((x, 1), ("B", -1)), ">=", 0), DiscTest("L", "=", i))),
                       ()),
            Transition("q2", "q1", DiscTest("L", "!=", i), ()),
            Transition("q3", "q0", TRUE_PRED, (("L", 0),)),
        )
        procs.append(Process("p%d" % i, (x,), modes, trans))
    names = [p.name for p in procs]
    init = conj(*[ModeTest(n, "q0") for n in names],
                *[_lin((("x%d" % i, 1),), "=", 0) for i in range(1, m + 1)])
    comments = (
        "Fischer's protocol, %d processes; A and B are the timing parameters" % m,
        "q1 -> q2 guard uses %s" % ("x < A" if strict_guard else "x <= A"),
    )
    return LHAModel(("A", "B"), (), (DiscreteDecl("L", 0, m, 0),), tuple(procs),
                    init, _pairs_risk(names, "q3"), comments)


def _tick(x):
    return ((x, Interval.point(1)),)


def generate_reactor(m: int) -> LHAModel:
    """Reactor controller with ``m`` control rods.

    Reconstruction: the controller alternates between heating, which lasts
    [16, 161/10] time units (clock ``x``), and cooling with one rod in the
    water for [58/10, 59/10].  Withdrawing rod ``i`` resets its clock
    ``y_i``; the rod may go back in only once ``y_i > T``.  The controller
    fails when heating ends and no rod is ready.  Rods are used round
    robin at best, so a rod is needed again at the earliest after
    ``16m + 5.8(m-1)`` time units, which is where the unsafe region
    ``T >= (109m - 29)/5`` comes from.
    """
    if m < 1:
        raise ModelError("reactor needs at least 1 rod, got %d" % m)
    heat_lo, heat_hi = Fraction(16), Fraction(161, 10)
    cool_lo, cool_hi = Fraction(58, 10), Fraction(59, 10)
    ys = ["y%d" % i for i in range(1, m + 1)]
    modes = [Mode("heat", _lin((("x", 1),), "<=", heat_hi), _tick("x"))]
    trans = []
    for i, y in enumerate(ys, 1):
        modes.append(Mode("cool%d" % i, _lin((("x", 1),), "<=", cool_hi), _tick("x")))
        trans.append(Transition("heat", "cool%d" % i,
                                And((_lin((("x", 1),), ">=", heat_lo),
                                     _lin(((y, 1), ("T", -1)), ">", 0))), (("x", ZERO),)))
        trans.append(Transition("cool%d" % i, "heat", _lin((("x", 1),), ">=", cool_lo),
                                (("x", ZERO), (y, ZERO))))
    trans.append(Transition("heat", "fail",
                            And(tuple([_lin((("x", 1),), ">=", heat_lo)] +
                                      [_lin(((y, 1), ("T", -1)), "<=", 0) for y in ys])), ()))
    modes.append(Mode("fail", TRUE_PRED, _tick("x")))
    procs = [Process("ctl", ("x",), tuple(modes), tuple(trans))]
    for i, y in enumerate(ys, 1):
        procs.append(Process("rod%d" % i, (y,), (Mode("idle", TRUE_PRED, _tick(y)),), ()))
    init = conj(ModeTest("ctl", "heat"), *[ModeTest("rod%d" % i, "idle") for i in range(1, m + 1)],
                _lin((("x", 1),), "=", 0), *[_lin(((y, 1), ("T", -1)), ">", 0) for y in ys])
    comments = ("reactor reconstruction with %d rods; heating [16,161/10], cooling [58/10,59/10]" % m,
                "a withdrawn rod is ready again once y_i > T; all rods start ready")
    return LHAModel(("T",), (), (), tuple(procs), init, ModeTest("ctl", "fail"), comments)


def generate_railroad(m: int) -> LHAModel:
    """Railroad crossing with ``m`` trains, a controller and a gate.

    Reconstruction: a train's clock starts at the approach sensor, the
    train announces itself at ``t = CUTOFF`` and reaches the crossing at
    some ``t`` in [30, 40].  The announcement is a zero-time handshake: the
    train holds time until the controller (no clocks, just open/closed) has
    closed and the gate is going down.  The gate angle ``g`` moves at [-10,-9] going
    down and [9,10] going up, so closing takes between 9 and 10 time units.
    Failure is a train on the crossing while the gate is not down.  A train
    that never gets to announce itself before 40 is stuck, which cuts the
    unsafe region off above.
    """
    if m < 1:
        raise ModelError("railroad needs at least 1 train, got %d" % m)
    t_lo, t_hi = 30, 40
    procs = []
    for i in range(1, m + 1):
        t = "t%d" % i
        tick = _tick(t)
        at_cutoff = _lin(((t, 1), ("CUTOFF", -1)), "=", 0)
        modes = (
            Mode("far", TRUE_PRED, tick),
            Mode("approach", _lin(((t, 1),), "<=", t_hi), tick),
            Mode("announce", _lin(((t, 1), ("CUTOFF", -1)), "<=", 0), tick),
            Mode("near", _lin(((t, 1),), "<=", t_hi), tick),
            Mode("cross", _lin(((t, 1),), "<=", t_hi), tick),
        )
        trans = [Transition("far", "approach", TRUE_PRED, ((t, ZERO),))]
        for k in range(m):
            trans.append(Transition("approach", "announce", And((at_cutoff, DiscTest("N", "=", k))),
                                    (("N", k + 1),)))
        trans.append(Transition("announce", "near",
                                And((DiscTest("C", "=", 1), Or((DiscTest("G", "=", 1), DiscTest("G", "=", 2))))), ()))
        trans.append(Transition("near", "cross", _lin(((t, 1),), ">=", t_lo), ()))
        for k in range(1, m + 1):
            trans.append(Transition("cross", "far", DiscTest("N", "=", k), (("N", k - 1), (t, ZERO))))
        procs.append(Process("train%d" % i, (t,), modes, tuple(trans)))
    procs.append(Process("ctl", (), (Mode("open"), Mode("closed")), (
        Transition("open", "closed", DiscTest("N", "!=", 0), (("C", 1),)),
        Transition("closed", "open", DiscTest("N", "=", 0), (("C", 0),)),
    )))
    down, up = Interval(Fraction(-10), Fraction(-9)), Interval(Fraction(9), Fraction(10))
    gmodes = (
        Mode("up", TRUE_PRED, (("g", ZERO),)),
        Mode("lower", _lin((("g", -1),), "<=", 0), (("g", down),)),
        Mode("down", TRUE_PRED, (("g", ZERO),)),
        Mode("raise", _lin((("g", 1),), "<=", 90), (("g", up),)),
    )
    gtrans = (
        Transition("up", "lower", DiscTest("C", "=", 1), (("G", 1),)),
        Transition("raise", "lower", DiscTest("C", "=", 1), (("G", 1),)),
        Transition("lower", "down", _lin((("g", 1),), "=", 0), (("G", 2),)),
        Transition("down", "raise", DiscTest("C", "=", 0), (("G", 3),)),
        Transition("raise", "up", _lin((("g", 1),), "=", 90), (("G", 0),)),
    )
    procs.append(Process("gate", ("g",), gmodes, gtrans))
    names = ["train%d" % i for i in range(1, m + 1)]
    init = conj(*[ModeTest(n, "far") for n in names], ModeTest("ctl", "open"), ModeTest("gate", "up"),
                _lin((("g", 1),), "=", 90), *[_lin((("t%d" % i, 1),), "=", 0) for i in range(1, m + 1)])
    risk = disj(*[And((ModeTest(n, "cross"), DiscTest("G", "!=", 2))) for n in names])
    comments = ("railroad reconstruction with %d trains; trains cross in [30,40], gate rate [-10,-9]" % m,
                "N trains announced; C controller command; G gate status 0 up 1 lower 2 down 3 raise")
    discretes = (DiscreteDecl("N", 0, m, 0), DiscreteDecl("C", 0, 1, 0), DiscreteDecl("G", 0, 3, 0))
    return LHAModel(("CUTOFF",), (), discretes, tuple(procs), init, risk, comments)


WAIT, TRANSM, RETRY = 0, 1, 2
IDLE, ACTIVE, COLLISION = 0, 1, 2
LAMBDA = 808


def generate_csma(m: int) -> LHAModel:
    """CSMA/CD bus arbitration with ``m`` senders.

    Reconstruction of the classic sender/bus automata with the propagation
    delay ``A`` and the collision window ``B`` as parameters (transmission
    takes 808).  The collision broadcast moves several senders at once, so
    the sender states ``s_i`` and the bus state are shared discrete
    variables of one product process and every combination of sender
    states gets its own broadcast transition.  A sender still inside its
    window goes to retry; one that has transmitted for ``B`` or longer
    ignores the signal.  The bad state is two senders transmitting while
    one of them is past its window.
    """
    if m < 2:
        raise ModelError("csma needs at least 2 senders, got %d" % m)
    xs = ["x%d" % i for i in range(1, m + 1)]
    ss = ["s%d" % i for i in range(1, m + 1)]
    in_window = lambda x: _lin(((x, 1), ("B", -1)), "<", 0)
    past_window = lambda x: _lin(((x, 1), ("B", -1)), ">=", 0)
    inv = [Or((DiscTest("bus", "!=", COLLISION), _lin((("y", 1), ("A", -1)), "<", 0)))]
    for x, sv in zip(xs, ss):
        inv.append(Or((DiscTest(sv, "!=", TRANSM), _lin(((x, 1),), "<=", LAMBDA))))
        inv.append(Or((DiscTest(sv, "!=", RETRY), in_window(x))))
    trans = []
    for x, sv in zip(xs, ss):
        for src, extra in ((WAIT, ()), (RETRY, (in_window(x),))):
            here = (DiscTest(sv, "=", src),) + extra
            trans.append(Transition("run", "run", And(here + (DiscTest("bus", "=", IDLE),)),
                                    ((sv, TRANSM), (x, ZERO), ("bus", ACTIVE), ("y", ZERO))))
            trans.append(Transition("run", "run",
                                    And(here + (DiscTest("bus", "=", ACTIVE),
                                                _lin((("y", 1), ("A", -1)), "<", 0))),
                                    ((sv, TRANSM), (x, ZERO), ("bus", COLLISION), ("y", ZERO))))
            trans.append(Transition("run", "run",
                                    And(here + (DiscTest("bus", "=", ACTIVE),
                                                _lin((("y", 1), ("A", -1)), ">=", 0))),
                                    ((sv, RETRY), (x, ZERO))))
        trans.append(Transition("run", "run", And((DiscTest(sv, "=", TRANSM), _lin(((x, 1),), "=", LAMBDA))),
                                ((sv, WAIT), (x, ZERO), ("bus", IDLE), ("y", ZERO))))
    # collision broadcast: each sender is waiting, retrying, transmitting
    # inside its window, or transmitting past it
    for combo in itertools.product(range(4), repeat=m):
        guard = [DiscTest("bus", "=", COLLISION), _lin((("y", 1), ("A", -1)), "<", 0)]
        assigns = [("bus", IDLE), ("y", ZERO)]
        for k, (x, sv) in zip(combo, zip(xs, ss)):
            if k == 0:
                guard.append(DiscTest(sv, "=", WAIT))
            elif k == 1:
                guard.append(DiscTest(sv, "=", RETRY))
            elif k == 2:
                guard += [DiscTest(sv, "=", TRANSM), in_window(x)]
            else:
                guard += [DiscTest(sv, "=", TRANSM), past_window(x)]
                continue
            assigns += [(sv, RETRY), (x, ZERO)]
        trans.append(Transition("run", "run", And(tuple(guard)), tuple(assigns)))
    rates = tuple((v, Interval.point(1)) for v in xs + ["y"])
    proc = Process("net", tuple(xs) + ("y",), (Mode("run", And(tuple(inv)), rates),), tuple(trans))
    discretes = tuple(DiscreteDecl(sv, 0, 2, WAIT) for sv in ss) + (DiscreteDecl("bus", 0, 2, IDLE),)
    init = conj(ModeTest("net", "run"), _lin((("B", -1),), "<=", -52), _lin((("y", 1),), "=", 0),
                *[_lin(((x, 1),), "=", 0) for x in xs])
    risk = []
    for i, (xi, si) in enumerate(zip(xs, ss)):
        for j, sj in enumerate(ss):
            if i != j:
                risk.append(And((DiscTest(si, "=", TRANSM), DiscTest(sj, "=", TRANSM), past_window(xi))))
    comments = ("csma/cd reconstruction with %d senders; A propagation delay, B collision window" % m,
                "s_i: 0 wait, 1 transmit, 2 retry; bus: 0 idle, 1 active, 2 collision; B >= 52 assumed")
    return LHAModel(("A", "B"), (), discretes, (proc,), init, disj(*risk), comments)


FAMILIES = {
    "fischer": generate_fischer,
    "reactor": generate_reactor,
    "railroad": generate_railroad,
    "csma": generate_csma,
}


def generate(ref: str) -> LHAModel:
    """``family:N`` to a model, e.g. ``fischer:3``."""
    fam, _, n = ref.partition(":")
    if fam not in FAMILIES or not n.strip().isdigit():
        raise ModelError("bad generator reference %r (want family:N with family in %s)"
                         % (ref, ", ".join(sorted(FAMILIES))))
    return FAMILIES[fam](int(n))
