"""Checker for Hilbert-style derivations.

Axioms: A0 (instances of propositional tautologies), A1 ``[A](f -> g) -> ([A]f -> [A]g)``,
A2 ``[A](f -> g) -> (<A>f -> <A>g)``.  Rules: MP, NecA (f / [A]f), NecE (f / [E]f).
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional

from .syntax import (Formula, Atom, Top, Bot, Not, And, Or, Imp, BoxA, BoxE, DiaA,
                     MODALS, parse_formula, FormulaSyntaxError)

__all__ = ["Justification", "ProofLine", "Proof", "ProofResult", "ProofFormatError",
           "is_tautology_instance", "match_axiom", "check_proof", "parse_proof",
           "load_proof", "MAX_SKELETON_WIDTH"]

MAX_SKELETON_WIDTH = 20


@dataclass(frozen=True)
class Justification:
    rule: str  # one of A0, A1, A2, MP, NecA, NecE
    refs: tuple = ()

    def __str__(self):
        return " ".join([self.rule, *map(str, self.refs)])


@dataclass(frozen=True)
class ProofLine:
    index: int
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    lines: tuple

    def conclusion(self) -> Formula:
        return self.lines[-1].formula


@dataclass(frozen=True)
class ProofResult:
    accepted: bool
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.accepted


class ProofFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# A0

def _skeleton(f: Formula, table: dict) -> Formula:
    if isinstance(f, (Atom, *MODALS)):
        if f not in table:
            table[f] = len(table)
        return Atom(f"_{table[f]}")
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(_skeleton(f.sub, table))
    return type(f)(_skeleton(f.left, table), _skeleton(f.right, table))


def _bool_eval(f: Formula, env: dict) -> bool:
    if isinstance(f, Atom):
        return env[f.name]
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not _bool_eval(f.sub, env)
    a = _bool_eval(f.left, env)
    if isinstance(f, And):
        return a and _bool_eval(f.right, env)
    if isinstance(f, Or):
        return a or _bool_eval(f.right, env)
    return (not a) or _bool_eval(f.right, env)


def is_tautology_instance(f: Formula, max_width: int = MAX_SKELETON_WIDTH) -> bool:
    """Replace each atom and maximal modal subformula by a fresh letter and
    truth-table the resulting Boolean skeleton."""
    table: dict = {}
    skel = _skeleton(f, table)
    if len(table) > max_width:
        raise ValueError(f"skeleton has {len(table)} letters, more than {max_width}")
    names = [f"_{n}" for n in range(len(table))]
    for values in itertools.product((False, True), repeat=len(names)):
        if not _bool_eval(skel, dict(zip(names, values))):
            return False
    return True


# ---------------------------------------------------------------------------
# A1 / A2

def match_axiom(f: Formula) -> Optional[str]:
    """``"A1"``, ``"A2"`` or ``None`` by literal pattern match."""
    if not (isinstance(f, Imp) and isinstance(f.left, BoxA) and isinstance(f.left.sub, Imp)
            and isinstance(f.right, Imp)):
        return None
    phi, psi = f.left.sub.left, f.left.sub.right
    lhs, rhs = f.right.left, f.right.right
    if lhs == BoxA(phi) and rhs == BoxA(psi):
        return "A1"
    if lhs == DiaA(phi) and rhs == DiaA(psi):
        return "A2"
    return None


# ---------------------------------------------------------------------------
# checking

def check_proof(pr: Proof) -> ProofResult:
    """Verify every line against its justification; report the first failure."""
    done: dict[int, Formula] = {}
    for pos, line in enumerate(pr.lines, 1):
        n, f, j = line.index, line.formula, line.just
        if n != pos:
            return ProofResult(False, n, f"line numbers must be consecutive from 1 (expected {pos})")
        for r in j.refs:
            if r not in done:
                return ProofResult(False, n, f"reference {r} is not an earlier line")
        rule = j.rule
        if rule == "A0":
            try:
                ok = is_tautology_instance(f)
            except ValueError as exc:
                return ProofResult(False, n, str(exc))
            if not ok:
                return ProofResult(False, n, "not an instance of a propositional tautology")
        elif rule in ("A1", "A2"):
            got = match_axiom(f)
            if got != rule:
                return ProofResult(False, n, f"not an instance of {rule}")
        elif rule == "MP":
            if len(j.refs) != 2:
                return ProofResult(False, n, "MP takes two line references")
            imp, ante = done[j.refs[0]], done[j.refs[1]]
            if imp != Imp(ante, f):
                return ProofResult(False, n, f"line {j.refs[0]} is not (line {j.refs[1]} -> this line)")
        elif rule in ("NecA", "NecE"):
            if len(j.refs) != 1:
                return ProofResult(False, n, f"{rule} takes one line reference")
            box = BoxA if rule == "NecA" else BoxE
            if f != box(done[j.refs[0]]):
                return ProofResult(False, n, f"not the {rule} of line {j.refs[0]}")
        else:
            return ProofResult(False, n, f"unknown justification {rule!r}")
        done[n] = f
    if not pr.lines:
        return ProofResult(False, None, "empty proof")
    return ProofResult(True)


_LINE_RE = re.compile(r"^\s*(\d+)\s*:\s*(.*?)\s*;\s*(\S.*?)\s*$")
_ARITY = {"A0": 0, "A1": 0, "A2": 0, "MP": 2, "NecA": 1, "NecE": 1}


def parse_proof(text: str) -> Proof:
    """Read ``<n>: <formula> ; <just>`` lines; ``#`` starts a comment."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        m = _LINE_RE.match(body)
        if not m:
            raise ProofFormatError(f"line {lineno}: expected '<n>: <formula> ; <justification>'")
        try:
            f = parse_formula(m.group(2))
        except FormulaSyntaxError as exc:
            raise ProofFormatError(f"line {lineno}: {exc}") from None
        parts = m.group(3).split()
        rule, refs = parts[0], parts[1:]
        if rule not in _ARITY or len(refs) != _ARITY[rule] or not all(r.isdigit() for r in refs):
            raise ProofFormatError(f"line {lineno}: bad justification {m.group(3)!r}")
        lines.append(ProofLine(int(m.group(1)), f, Justification(rule, tuple(map(int, refs)))))
    return Proof(tuple(lines))


def load_proof(path) -> Proof:
    with open(path, encoding="utf-8") as fh:
        return parse_proof(fh.read())
