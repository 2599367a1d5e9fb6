"""Model pretty-printer; ``parse_model(print_model(m)) == m``."""
from __future__ import annotations

from fractions import Fraction

from .model import (And, Const, DiscTest, Interval, LHAModel, Lin, ModeTest,
                    Or)


def fmt_rat(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return "%d/%d" % (c.numerator, c.denominator)


def fmt_interval(iv: Interval) -> str:
    lo = "-inf" if iv.lower is None else fmt_rat(iv.lower)
    hi = "inf" if iv.upper is None else fmt_rat(iv.upper)
    return "%s%s, %s%s" % ("(" if iv.lower_open else "[", lo, hi, ")" if iv.upper_open else "]")


def _term(name, coef, first):
    mag = "" if abs(coef) == 1 else "%d*" % abs(coef)
    if first:
        return ("-" if coef < 0 else "") + mag + name
    return ("- " if coef < 0 else "+ ") + mag + name


def fmt_pred(p, nested=False) -> str:
    if isinstance(p, Const):
        return "true" if p.value else "false"
    if isinstance(p, Lin):
        lhs = " ".join(_term(n, a, i == 0) for i, (n, a) in enumerate(p.terms))
        return "%s %s %s" % (lhs, p.rel, fmt_rat(p.rhs))
    if isinstance(p, DiscTest):
        return "%s %s %d" % (p.var, p.op, p.value)
    if isinstance(p, ModeTest):
        return "%s@%s" % (p.process, p.mode)
    if isinstance(p, (And, Or)):
        sep = " and " if isinstance(p, And) else " or "
        body = sep.join(fmt_pred(i, True) for i in p.items)
        return "(%s)" % body if nested else body
    raise TypeError("not a predicate: %r" % (p,))


def print_model(m: LHAModel) -> str:
    out = ["# %s" % c for c in m.comments]
    out += ["param %s;" % p for p in m.params]
    out += ["dense %s;" % d for d in m.dense]
    out += ["discrete %s in %d..%d init %d;" % (d.name, d.lo, d.hi, d.init) for d in m.discretes]
    for proc in m.processes:
        out.append("")
        out.append("process %s {" % proc.name)
        out += ["  dense %s;" % d for d in proc.dense]
        for mode in proc.modes:
            out.append("  mode %s {" % mode.name)
            out.append("    inv %s;" % fmt_pred(mode.inv))
            out += ["    rate %s in %s;" % (v, fmt_interval(iv)) for v, iv in mode.rates]
            out.append("  }")
        for t in proc.transitions:
            out.append("  trans %s -> %s {" % (t.src, t.dst))
            out.append("    guard %s;" % fmt_pred(t.guard))
            for v, val in t.assigns:
                rhs = fmt_interval(val) if isinstance(val, Interval) else str(val)
                out.append("    set %s := %s;" % (v, rhs))
            out.append("  }")
        out.append("}")
    out.append("")
    out.append("initially %s;" % fmt_pred(m.initially))
    out.append("risk %s;" % fmt_pred(m.risk))
    return "\n".join(out) + "\n"
