"""Recursive-descent parser for the textual model language.

    system   := decl* process+ "initially" pred ";" "risk" pred ";"
    decl     := "param" ID ";" | "dense" ID ";"
              | "discrete" ID "in" INT ".." INT "init" INT ";"
    process  := "process" ID "{" ("dense" ID ";")* mode+ trans* "}"
    mode     := "mode" ID "{" ["inv" pred ";"] ("rate" ID "in" ival ";")* "}"
    trans    := "trans" ID "->" ID "{" ["guard" pred ";"]
                ("set" ID ":=" (ival | INT) ";")* "}"
    ival     := ("[" | "(") end "," end (")" | "]")     end := rat | "inf" | "-inf"

A term is ``[INT ["*"]] ID``; ``ID = INT`` and ``ID != INT`` on a declared
discrete variable are discrete tests, ``PROC @ MODE`` is a mode test.
"""
from __future__ import annotations

import dataclasses
import re
from fractions import Fraction
from typing import List, NamedTuple

from ..ordering import ModelError
from .model import (FALSE_PRED, TRUE_PRED, And, DiscreteDecl, DiscTest,
                    Interval, LHAModel, Lin, Mode, ModeTest, Or, Process,
                    Transition)


class ModelSyntaxError(ModelError):
    def __init__(self, msg, line=0, col=0):
        super().__init__("%d:%d: %s" % (line, col, msg))
        self.line = line
        self.col = col


class ModelValidationError(ModelError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|:=|<=|>=|!=|\.\.|[<>=()\[\]{};,/@+\-*])
""", re.VERBOSE)

KEYWORDS = {"param", "dense", "discrete", "in", "init", "process", "mode", "inv",
            "rate", "trans", "guard", "set", "initially", "risk", "and", "or",
            "true", "false"}


def tokenize(text: str) -> List[Token]:
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError("unexpected character %r" % text[pos], line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            tok = m.group()
            if kind == "id" and tok in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, tok, line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.discretes = set()

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ModelSyntaxError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("kw", "op")

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error("expected %r, found %r" % (text, found))
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id":
            self.error("expected identifier, found %r" % (t.text or "end of input"))
        self.i += 1
        return t.text

    def integer(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "int":
            self.error("expected integer, found %r" % (t.text or "end of input"))
        self.i += 1
        return -int(t.text) if neg else int(t.text)

    def rational(self) -> Fraction:
        num = self.integer()
        if self.accept("/"):
            t = self.tok
            den = self.integer()
            if den <= 0:
                self.error("denominator must be positive", t)
            return Fraction(num, den)
        return Fraction(num)

    # -- grammar --

    def system(self) -> LHAModel:
        params, dense, discretes = [], [], []
        while True:
            if self.accept("param"):
                params.append(self.ident())
                self.expect(";")
            elif self.accept("dense"):
                dense.append(self.ident())
                self.expect(";")
            elif self.accept("discrete"):
                name = self.ident()
                self.expect("in")
                lo = self.integer()
                self.expect("..")
                hi = self.integer()
                self.expect("init")
                init = self.integer()
                self.expect(";")
                discretes.append(DiscreteDecl(name, lo, hi, init))
                self.discretes.add(name)
            else:
                break
        procs = []
        while self.at("process"):
            procs.append(self.process())
        if not procs:
            self.error("expected at least one process")
        self.expect("initially")
        init = self.pred()
        self.expect(";")
        self.expect("risk")
        risk = self.pred()
        self.expect(";")
        if self.tok.kind != "eof":
            self.error("unexpected %r after risk" % self.tok.text)
        return LHAModel(tuple(params), tuple(dense), tuple(discretes), tuple(procs), init, risk)

    def process(self) -> Process:
        self.expect("process")
        name = self.ident()
        self.expect("{")
        dense = []
        while self.accept("dense"):
            dense.append(self.ident())
            self.expect(";")
        modes = []
        while self.at("mode"):
            modes.append(self.mode())
        if not modes:
            self.error("process %s needs at least one mode" % name)
        trans = []
        while self.at("trans"):
            trans.append(self.transition())
        self.expect("}")
        return Process(name, tuple(dense), tuple(modes), tuple(trans))

    def mode(self) -> Mode:
        self.expect("mode")
        name = self.ident()
        self.expect("{")
        inv = TRUE_PRED
        if self.accept("inv"):
            inv = self.pred()
            self.expect(";")
        rates = []
        while self.accept("rate"):
            var = self.ident()
            self.expect("in")
            rates.append((var, self.interval()))
            self.expect(";")
        self.expect("}")
        return Mode(name, inv, tuple(rates))

    def transition(self) -> Transition:
        self.expect("trans")
        src = self.ident()
        self.expect("->")
        dst = self.ident()
        self.expect("{")
        guard = TRUE_PRED
        if self.accept("guard"):
            guard = self.pred()
            self.expect(";")
        assigns = []
        while self.accept("set"):
            var = self.ident()
            self.expect(":=")
            if self.at("[") or self.at("("):
                assigns.append((var, self.interval()))
            else:
                assigns.append((var, self.integer()))
            self.expect(";")
        self.expect("}")
        return Transition(src, dst, guard, tuple(assigns))

    def _end(self):
        if self.tok.kind == "id" and self.tok.text == "inf":
            self.i += 1
            return "inf"
        if self.at("-") and self.toks[self.i + 1].text == "inf":
            self.i += 2
            return "-inf"
        return self.rational()

    def interval(self) -> Interval:
        t = self.tok
        if self.accept("["):
            lo_open = False
        elif self.accept("("):
            lo_open = True
        else:
            self.error("expected interval")
        lo = self._end()
        self.expect(",")
        hi = self._end()
        if self.accept("]"):
            hi_open = False
        else:
            self.expect(")")
            hi_open = True
        if lo == "inf" or hi == "-inf":
            self.error("interval ends in the wrong direction", t)
        if (lo == "-inf" and not lo_open) or (hi == "inf" and not hi_open):
            self.error("infinite interval ends must be open", t)
        if lo == "-inf":
            lo, lo_open = None, True
        if hi == "inf":
            hi, hi_open = None, True
        return Interval(lo, hi, lo_open, hi_open)

    def pred(self):
        items = [self.conj()]
        while self.accept("or"):
            items.append(self.conj())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conj(self):
        items = [self.atom()]
        while self.accept("and"):
            items.append(self.atom())
        return items[0] if len(items) == 1 else And(tuple(items))

    def atom(self):
        if self.accept("("):
            p = self.pred()
            self.expect(")")
            return p
        if self.accept("true"):
            return TRUE_PRED
        if self.accept("false"):
            return FALSE_PRED
        t = self.tok
        if t.kind == "id" and self.toks[self.i + 1].text == "@":
            self.i += 2
            return ModeTest(t.text, self.ident())
        if t.kind == "id" and t.text in self.discretes and self.toks[self.i + 1].text in ("=", "!="):
            self.i += 1
            op = self.tok.text
            self.i += 1
            return DiscTest(t.text, op, self.integer())
        return self.linear()

    def linear(self) -> Lin:
        terms = [self.term(first=True)]
        while self.at("+") or self.at("-"):
            terms.append(self.term(first=False))
        t = self.tok
        if t.text not in ("<", "<=", "=", ">=", ">") or t.kind != "op":
            self.error("expected relation, found %r" % (t.text or "end of input"))
        self.i += 1
        return Lin(tuple(terms), t.text, self.rational())

    def term(self, first):
        sign = 1
        if self.accept("-"):
            sign = -1
        elif not self.accept("+") and not first:
            self.error("expected '+' or '-'")
        coef = 1
        if self.tok.kind == "int":
            coef = int(self.tok.text)
            self.i += 1
            self.accept("*")
        t = self.tok
        if t.kind != "id":
            self.error("expected variable in linear term, found %r" % (t.text or "end of input"))
        if t.text in self.discretes:
            self.error("discrete variable %s used in a linear constraint" % t.text)
        self.i += 1
        return (t.text, sign * coef)


def _header_comments(text: str):
    """Comment lines before the first declaration (kept for printing)."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if not line.startswith("#"):
            break
        body = line[1:]
        out.append(body[1:] if body.startswith(" ") else body)
    return tuple(out)


def parse_model(text: str, check: bool = True) -> LHAModel:
    """Parse ``text``; with ``check`` also run :func:`validate` and raise
    :class:`ModelValidationError` on any diagnostic."""
    model = Parser(text).system()
    header = _header_comments(text)
    if header:
        model = dataclasses.replace(model, comments=header)
    if check:
        from .validate import validate
        diags = validate(model)
        if diags:
            raise ModelValidationError(diags)
    return model


def parse_pred(text: str, discretes=()):
    p = Parser(text)
    p.discretes = set(discretes)
    out = p.pred()
    if p.tok.kind != "eof":
        p.error("unexpected %r" % p.tok.text)
    return out
