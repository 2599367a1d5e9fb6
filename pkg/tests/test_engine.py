import io
import random
from fractions import Fraction as F

import pytest

from hrdlha.core import Bound, normalize_expression
from hrdlha.engine import (AnalysisConfig, Direction, Status, analyze,
                           backward_reach, forward_reach, parametric_unsafe,
                           semantically_equal)
from hrdlha.frontend import generate, generate_fischer, parse_model, parse_pred
from hrdlha.frontend.random_models import random_model
from hrdlha.hrd import FALSE, TRUE
from hrdlha.normalize import drop_infeasible, normalize
from hrdlha.ordering import OrderingKind
from hrdlha.wp import SymbolicModel, dense_vars_of

ONE_CLOCK = """
process p {
  dense x;
  mode m { inv true; rate x in [1,1]; }
}
initially p@m and x = 0;
risk %s;
"""

GATE = """
param A;
process p {
  dense x;
  mode a { inv x <= 4; rate x in [1,1]; }
  mode b { inv true; rate x in [1,1]; }
  trans a -> b { guard x - A >= 0; set x := [0,0]; }
}
initially p@a and x = 0;
risk p@b;
"""


def sm_of(text, ordering="coefficient"):
    return SymbolicModel(parse_model(text), ordering)


def subset(mgr, a, b):
    return drop_infeasible(mgr, mgr.meet(a, mgr.complement(b))) is FALSE


def region(sm, text):
    return normalize(sm.mgr, sm.pred(parse_pred(text)))


def only_params(sm, d):
    params = set(sm.params)
    return dense_vars_of(sm.mgr, d) <= params and all(n.dense for n in sm.mgr.nodes(d))


def test_risk_false_gives_empty_fixpoint():
    sm = sm_of(ONE_CLOCK % "false")
    status, reach, stats = backward_reach(sm)
    assert status is Status.CONVERGED and reach is FALSE
    res = analyze(sm)
    assert res.unsafe_params is FALSE and res.solutions is TRUE


def test_no_transitions_single_closure():
    sm = sm_of(ONE_CLOCK % "x >= 3 and x <= 5")
    status, reach, _ = backward_reach(sm)
    assert reach is sm.time(sm.mgr.meet(sm.risk, sm.invariant))
    assert reach is region(sm, "x <= 5")


def test_forward_one_clock():
    sm = sm_of(ONE_CLOCK % "false")
    status, reach, _ = forward_reach(sm)
    assert status is Status.CONVERGED
    x = sm.var_id["x"]
    mode = region(sm, "p@m")
    assert reach is normalize(sm.mgr, sm.mgr.meet(mode, sm.mgr.constraint(
        normalize_expression({x: -1})[0], Bound.le(0))))


def test_initial_false_forward():
    sm = sm_of(ONE_CLOCK.replace("p@m and x = 0", "false") % "true")
    assert forward_reach(sm)[1] is FALSE


@pytest.mark.parametrize("direction", list(Direction))
@pytest.mark.parametrize("pspsc", [False, True])
def test_gate_model(direction, pspsc):
    # b is reachable iff the guard x >= A can be met while x <= 4
    res = analyze(parse_model(GATE), AnalysisConfig(direction, pspsc))
    assert res.converged
    sm = res.symbolic
    assert semantically_equal(sm.mgr, res.unsafe_params, region(sm, "A <= 4"))
    assert semantically_equal(sm.mgr, res.solutions, region(sm, "A > 4"))
    assert only_params(sm, res.unsafe_params) and only_params(sm, res.solutions)


NO_PARAMS = """
process p {
  dense x;
  mode a { inv x <= 4; rate x in [1,1]; }
  mode b { inv true; rate x in [1,1]; }
  trans a -> b { guard x >= %d; }
}
initially p@a and x = 0;
risk p@b;
"""


@pytest.mark.parametrize("pspsc", [False, True])
def test_no_parameters(pspsc):
    reachable = analyze(parse_model(NO_PARAMS % 2), AnalysisConfig(pspsc=pspsc))
    assert reachable.unsafe_params is TRUE and reachable.solutions is FALSE
    blocked = analyze(parse_model(NO_PARAMS % 5), AnalysisConfig(pspsc=pspsc))
    assert blocked.unsafe_params is FALSE and blocked.solutions is TRUE


def test_unreachable_risk_pspsc():
    res = analyze(parse_model(ONE_CLOCK % "x < 0"), AnalysisConfig(pspsc=True))
    assert res.converged and res.solutions is TRUE


def test_iteration_limit_and_stats():
    stream = io.StringIO()
    res = analyze(generate_fischer(2), AnalysisConfig(max_iterations=1), stream)
    assert res.status is Status.ITERATION_LIMIT and not res.converged
    lines = stream.getvalue().splitlines()
    assert len(lines) == 2 and lines[0].startswith("iteration 0 frontier_paths ")
    assert res.stats.iterations == 1 and len(res.stats.frontier_paths) == 2
    with pytest.raises(ValueError):
        AnalysisConfig(max_iterations=-1)


def test_accumulation_monotone():
    sm = SymbolicModel(generate_fischer(2))
    prev = FALSE
    for k in range(1, 8):
        _, reach, _ = backward_reach(sm, cfg=AnalysisConfig(max_iterations=k))
        assert subset(sm.mgr, prev, reach)
        prev = reach


def test_pspsc_unsafe_grows():
    sm = SymbolicModel(generate_fischer(2))
    prev = FALSE
    for k in range(1, 6):
        res = analyze(sm, AnalysisConfig(pspsc=True, max_iterations=k))
        assert subset(sm.mgr, prev, res.unsafe_params)
        prev = res.unsafe_params


# -- Fischer -------------------------------------------------------------------------

FISCHER_UNSAFE = "-11*A + 8*B <= 0 and -A <= 0"


@pytest.fixture(scope="module")
def fischer2_results():
    out = {}
    for direction in Direction:
        for kind in OrderingKind:
            for pspsc in (False, True):
                out[direction, kind, pspsc] = analyze(
                    generate_fischer(2), AnalysisConfig(direction, pspsc, kind))
    return out


def test_fischer2_region(fischer2_results):
    for key, res in fischer2_results.items():
        assert res.converged, key
        sm = res.symbolic
        assert semantically_equal(sm.mgr, res.unsafe_params, region(sm, FISCHER_UNSAFE)), key
        assert only_params(sm, res.solutions), key
        assert res.solutions is normalize(sm.mgr, sm.mgr.complement(res.unsafe_params))


def test_fischer2_structure(fischer2_results):
    res = fischer2_results[Direction.BACKWARD, OrderingKind.COEFFICIENT, False]
    mgr = res.manager
    got = {(frozenset((e.render(mgr.names()), b) for e, b in z.items()))
           for z, _ in mgr.enumerate_paths(res.unsafe_params)}
    assert got == {frozenset({("-11*A + 8*B", Bound.le(0)), ("-A", Bound.le(0))})}


def test_fischer2_sampled(fischer2_results):
    res = fischer2_results[Direction.FORWARD, OrderingKind.MAGNITUDE, True]
    mgr, sm = res.manager, res.symbolic
    a, b = sm.var_id["A"], sm.var_id["B"]
    rng = random.Random(0)
    for _ in range(2000):
        A, B = F(rng.randint(-40, 40), 4), F(rng.randint(-40, 40), 4)
        want = A >= 0 and 8 * B <= 11 * A
        assert mgr.evaluate(res.unsafe_params, {a: A, b: B}) == want
        assert mgr.evaluate(res.solutions, {a: A, b: B}) == (not want)


def test_fischer_strict_guard_variant():
    res = analyze(generate_fischer(2, strict_guard=True))
    sm = res.symbolic
    assert semantically_equal(sm.mgr, res.unsafe_params, region(sm, "-11*A + 8*B < 0 and -A < 0"))


def test_parametric_unsafe_of_false():
    sm = SymbolicModel(generate_fischer(2))
    assert parametric_unsafe(sm, FALSE) is FALSE
    assert parametric_unsafe(sm, FALSE, Direction.FORWARD) is FALSE


# -- reconstructed benchmarks ----------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2])
def test_reactor_formula(m):
    res = analyze(generate("reactor:%d" % m))
    assert res.converged
    bound = F(109 * m - 29, 5)
    assert semantically_equal(res.manager, res.unsafe_params, region(res.symbolic, "T >= %s" % bound))


@pytest.mark.parametrize("direction", list(Direction))
def test_railroad_window(direction):
    res = analyze(generate("railroad:1"), AnalysisConfig(direction, pspsc=True))
    assert res.converged
    assert semantically_equal(res.manager, res.unsafe_params,
                              region(res.symbolic, "CUTOFF >= 20 and CUTOFF <= 40"))


def test_csma_region():
    res = analyze(generate("csma:2"), AnalysisConfig(Direction.FORWARD))
    assert res.converged
    want = region(res.symbolic, "A > 0 and B >= 52 and B <= 808 and B - 2*A < 0")
    assert semantically_equal(res.manager, res.unsafe_params, want)


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5, 6, 7, 8, 10, 13, 14, 15, 16, 17, 18, 19, 20])
def test_random_models_forward_matches_backward(seed):
    back = analyze(random_model(seed), AnalysisConfig(max_iterations=200))
    fwd = analyze(back.symbolic, AnalysisConfig(Direction.FORWARD, max_iterations=200))
    assert back.converged and fwd.converged
    assert semantically_equal(back.manager, back.unsafe_params, fwd.unsafe_params)
