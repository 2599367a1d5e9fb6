"""Static checks on a parsed model; returns human-readable diagnostics."""
from __future__ import annotations

from typing import List

from .model import (And, Const, DiscTest, Interval, LHAModel, Lin, ModeTest,
                    Or)


def _interval_issues(iv: Interval, where: str, out: List[str]):
    if iv.lower is None and not iv.lower_open or iv.upper is None and not iv.upper_open:
        out.append("%s: infinite interval ends must be open" % where)
    if iv.lower is not None and iv.upper is not None:
        if iv.lower > iv.upper or (iv.lower == iv.upper and (iv.lower_open or iv.upper_open)):
            out.append("%s: empty interval" % where)


def validate(model: LHAModel) -> List[str]:
    out: List[str] = []
    params = set(model.params)
    globals_ = set(model.dense)
    discretes = {d.name: d for d in model.discretes}
    local = {}
    seen = set()

    def declare(name, what):
        if name in seen:
            out.append("duplicate declaration of %s %s" % (what, name))
        seen.add(name)

    for p in model.params:
        declare(p, "parameter")
    for d in model.dense:
        declare(d, "dense variable")
    for d in model.discretes:
        declare(d.name, "discrete variable")
        if d.lo > d.hi:
            out.append("discrete %s has an empty domain" % d.name)
        elif not d.lo <= d.init <= d.hi:
            out.append("initial value %d of %s outside %d..%d" % (d.init, d.name, d.lo, d.hi))
    procs = {}
    for proc in model.processes:
        if proc.name in procs:
            out.append("duplicate process %s" % proc.name)
        procs[proc.name] = proc
        for d in proc.dense:
            declare(d, "dense variable")
            local[d] = proc.name
    dense_all = params | globals_ | set(local)

    def check_pred(p, where):
        if isinstance(p, Const):
            return
        if isinstance(p, Lin):
            for name, _ in p.terms:
                if name in discretes:
                    out.append("%s: discrete variable %s in a linear constraint" % (where, name))
                elif name not in dense_all:
                    out.append("%s: unknown variable %s" % (where, name))
            if p.rel not in ("<", "<=", "=", ">=", ">"):
                out.append("%s: bad relation %s" % (where, p.rel))
        elif isinstance(p, DiscTest):
            d = discretes.get(p.var)
            if d is None:
                kind = "dense variable" if p.var in dense_all else "unknown variable"
                out.append("%s: %s %s used as discrete" % (where, kind, p.var))
            elif p.value not in d.domain:
                out.append("%s: value %d outside the domain of %s" % (where, p.value, p.var))
            if p.op not in ("=", "!="):
                out.append("%s: bad discrete test %s" % (where, p.op))
        elif isinstance(p, ModeTest):
            proc = procs.get(p.process)
            if proc is None:
                out.append("%s: unknown process %s" % (where, p.process))
            elif p.mode not in proc.mode_names():
                out.append("%s: unknown mode %s@%s" % (where, p.process, p.mode))
        elif isinstance(p, (And, Or)):
            for i in p.items:
                check_pred(i, where)
        else:
            out.append("%s: not a predicate: %r" % (where, p))

    rated_by = {}
    for proc in model.processes:
        names = proc.mode_names()
        if len(set(names)) != len(names):
            out.append("process %s: duplicate mode names" % proc.name)
        for mode in proc.modes:
            where = "%s.%s" % (proc.name, mode.name)
            check_pred(mode.inv, where + " inv")
            rated = set()
            for var, iv in mode.rates:
                if var in rated:
                    out.append("%s: rate of %s given twice" % (where, var))
                rated.add(var)
                if var in params:
                    if not iv.is_point() or iv.lower != 0:
                        out.append("%s: parameter %s must have rate [0,0]" % (where, var))
                elif var in discretes:
                    out.append("%s: discrete variable %s cannot have a rate" % (where, var))
                elif var not in dense_all:
                    out.append("%s: rate for unknown variable %s" % (where, var))
                elif var in local and local[var] != proc.name:
                    out.append("%s: rate for %s owned by process %s" % (where, var, local[var]))
                elif var in globals_:
                    owner = rated_by.setdefault(var, proc.name)
                    if owner != proc.name:
                        out.append("%s: global %s already rated by process %s" % (where, var, owner))
                _interval_issues(iv, "%s rate %s" % (where, var), out)
        for k, t in enumerate(proc.transitions):
            where = "%s trans %d (%s -> %s)" % (proc.name, k + 1, t.src, t.dst)
            for m in (t.src, t.dst):
                if m not in names:
                    out.append("%s: unknown mode %s" % (where, m))
            check_pred(t.guard, where + " guard")
            assigned = set()
            for var, val in t.assigns:
                if var in assigned:
                    out.append("%s: variable %s assigned twice" % (where, var))
                assigned.add(var)
                if var in params:
                    out.append("%s: parameter %s cannot be assigned" % (where, var))
                elif var in discretes:
                    if isinstance(val, Interval):
                        out.append("%s: discrete %s assigned an interval" % (where, var))
                    elif val not in discretes[var].domain:
                        out.append("%s: value %d outside the domain of %s" % (where, val, var))
                elif var in dense_all:
                    if not isinstance(val, Interval):
                        out.append("%s: dense %s assigned a discrete value" % (where, var))
                    else:
                        _interval_issues(val, "%s set %s" % (where, var), out)
                else:
                    out.append("%s: assignment to unknown variable %s" % (where, var))
    check_pred(model.initially, "initially")
    check_pred(model.risk, "risk")
    return out
