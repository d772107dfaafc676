"""Formula AST for implicitly quantified modal logic, with parser and printer.

Concrete syntax::

    formula := imp
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "[E]" unary | "[A]" unary | "<E>" unary | "<A>" unary | atom
    atom    := "true" | "false" | IDENT | "(" formula ")"

``[E]f`` holds when some index has all its successors satisfying ``f``;
``[A]f`` when every successor under every index does.  ``<A>`` and ``<E>``
are their duals.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

__all__ = [
    "Formula", "Atom", "Top", "Bot", "Not", "And", "Or", "Imp",
    "BoxE", "BoxA", "DiaE", "DiaA", "TRUE", "FALSE",
    "FormulaSyntaxError", "parse_formula", "render_formula",
    "subformulas", "modal_depth", "to_nnf", "random_formula",
    "atoms", "conj", "disj", "is_literal", "IDENT_RE", "MODALS",
]

IDENT_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
KEYWORDS = frozenset({"true", "false"})


def _cached_hash(self):
    h = self.__dict__.get("_h")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in self._fields))
        object.__setattr__(self, "_h", h)
    return h


def _node(cls):
    cls = dataclass(frozen=True, eq=True, repr=False)(cls)
    cls._fields = tuple(f for f in cls.__dataclass_fields__)
    # Deep trees (characteristic formulas) are hashed repeatedly as dict keys.
    cls.__hash__ = _cached_hash
    return cls


class Formula:
    """Base class; instances are immutable and compare structurally."""

    _fields: tuple = ()

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __rshift__(self, other):
        return Imp(self, other)

    def __str__(self):
        return render_formula(self)

    def __repr__(self):
        return f"<{type(self).__name__} {render_formula(self)}>"

    def children(self) -> tuple:
        return tuple(getattr(self, n) for n in self._fields if isinstance(getattr(self, n), Formula))


@_node
class Atom(Formula):
    name: str


@_node
class Top(Formula):
    pass


@_node
class Bot(Formula):
    pass


@_node
class Not(Formula):
    sub: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Imp(Formula):
    left: Formula
    right: Formula


@_node
class BoxE(Formula):
    sub: Formula


@_node
class BoxA(Formula):
    sub: Formula


@_node
class DiaE(Formula):
    sub: Formula


@_node
class DiaA(Formula):
    sub: Formula


TRUE = Top()
FALSE = Bot()
MODALS = (BoxE, BoxA, DiaE, DiaA)
_BINARY = {And: "&", Or: "|", Imp: "->"}
_PREFIX = {Not: "~", BoxE: "[E]", BoxA: "[A]", DiaE: "<E>", DiaA: "<A>"}


# ---------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    """Malformed formula text; ``offset`` is the 0-based character position."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.text = text


_TOKEN_RE = re.compile(r"\s*(?:(->)|([&|~()])|(\[[EA]\]|<[EA]>)|([a-z][a-zA-Z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            if ch in "[<":
                # report the first character that breaks a modal token
                close = "]" if ch == "[" else ">"
                bad = pos + 1
                if bad < n and text[bad] in "EA":
                    bad += 1
                    if bad < n and text[bad] == close:  # pragma: no cover - matched above
                        bad += 1
                raise FormulaSyntaxError(f"malformed modality {text[pos:bad + 1]!r}", bad, text)
            raise FormulaSyntaxError(f"unexpected character {ch!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("op", "->", start))
        elif m.group(2):
            tokens.append(("op", m.group(2), start))
        elif m.group(3):
            tokens.append(("modal", m.group(3), start))
        else:
            word = m.group(4)
            tokens.append(("kw" if word in KEYWORDS else "ident", word, start))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise FormulaSyntaxError(f"{message}, found {what}", tok[2], self.text)

    def parse(self) -> Formula:
        f = self.imp()
        if self.peek()[0] != "eof":
            self.fail("expected end of input")
        return f

    def imp(self):
        left = self.disj()
        if self.peek()[1] == "->" and self.peek()[0] == "op":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self):
        f = self.conj()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "~":
            self.take()
            return Not(self.unary())
        if kind == "modal":
            self.take()
            cls = {"[E]": BoxE, "[A]": BoxA, "<E>": DiaE, "<A>": DiaA}[val]
            return cls(self.unary())
        return self.atom()

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "kw":
            return TRUE if val == "true" else FALSE
        if kind == "ident":
            return Atom(val)
        if kind == "op" and val == "(":
            f = self.imp()
            if self.peek()[:2] != ("op", ")"):
                self.fail("expected ')'")
            self.take()
            return f
        self.fail("expected a formula", tok)


def parse_formula(text: str) -> Formula:
    """Parse ``text``; raises :class:`FormulaSyntaxError` with an offset."""
    return _Parser(text).parse()


@lru_cache(maxsize=65536)
def render_formula(f: Formula) -> str:
    """Canonical text: every binary connective is parenthesized."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    op = _PREFIX.get(type(f))
    if op is not None:
        return op + render_formula(f.sub)
    op = _BINARY[type(f)]
    return f"({render_formula(f.left)} {op} {render_formula(f.right)})"


# ---------------------------------------------------------------------------
# structural queries

def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(g.children())


def subformulas(f: Formula) -> frozenset[Formula]:
    return frozenset(_walk(f))


def atoms(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in _walk(f) if isinstance(g, Atom))


@lru_cache(maxsize=65536)
def modal_depth(f: Formula) -> int:
    kids = f.children()
    inner = max((modal_depth(k) for k in kids), default=0)
    return inner + 1 if isinstance(f, MODALS) else inner


def is_literal(f: Formula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.sub, Atom))


_DUAL = {BoxE: DiaA, BoxA: DiaE, DiaE: BoxA, DiaA: BoxE}


def to_nnf(f: Formula) -> Formula:
    """Negation normal form: no ``Imp``, ``Not`` only directly above atoms."""
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Top):
        return FALSE if neg else TRUE
    if isinstance(f, Bot):
        return TRUE if neg else FALSE
    if isinstance(f, Not):
        return _nnf(f.sub, not neg)
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Imp):
        # a -> b  ==  ~a | b ;  ~(a -> b)  ==  a & ~b
        if neg:
            return And(_nnf(f.left, False), _nnf(f.right, True))
        return Or(_nnf(f.left, True), _nnf(f.right, False))
    cls = _DUAL[type(f)] if neg else type(f)
    return cls(_nnf(f.sub, neg))


def conj(parts) -> Formula:
    """Left-nested conjunction with true/false absorption; empty gives ``true``."""
    out = None
    for p in parts:
        if isinstance(p, Bot):
            return FALSE
        if isinstance(p, Top):
            continue
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts) -> Formula:
    """Left-nested disjunction with true/false absorption; empty gives ``false``."""
    out = None
    for p in parts:
        if isinstance(p, Top):
            return TRUE
        if isinstance(p, Bot):
            continue
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


# ---------------------------------------------------------------------------
# random generation

def random_formula(seed: int, max_depth: int, props, size: int = 12) -> Formula:
    """Deterministic pseudo-random formula over ``props`` with modal depth <= max_depth.

    ``size`` roughly bounds the number of connectives.
    """
    props = list(props)
    if not props:
        raise ValueError("random_formula needs at least one proposition")
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    rng = random.Random(seed)
    return _gen(rng, max_depth, size, props)


def _gen(rng: random.Random, depth: int, budget: int, props) -> Formula:
    if budget <= 1 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.06:
            return TRUE
        if r < 0.12:
            return FALSE
        return Atom(rng.choice(props))
    choices = ["not", "and", "or", "imp"]
    if depth > 0:
        choices += ["BoxE", "BoxA", "DiaE", "DiaA"] * 2
    op = rng.choice(choices)
    if op == "not":
        return Not(_gen(rng, depth, budget - 1, props))
    if op in ("and", "or", "imp"):
        split = rng.randint(1, max(1, budget - 2))
        left = _gen(rng, depth, split, props)
        right = _gen(rng, depth, budget - 1 - split, props)
        return {"and": And, "or": Or, "imp": Imp}[op](left, right)
    cls = {"BoxE": BoxE, "BoxA": BoxA, "DiaE": DiaE, "DiaA": DiaA}[op]
    return cls(_gen(rng, depth - 1, budget - 1, props))
