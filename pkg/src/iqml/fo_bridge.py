"""Two-sorted first-order logic over worlds and indices, the standard translation,
and an exact Ehrenfeucht-Fraisse game solver."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Mapping

from .kripke import KripkeModel
from .syntax import (Formula, Atom, Top, Bot, Not, And, Or, Imp, BoxE, BoxA, DiaE, DiaA)

__all__ = [
    "WORLD", "INDEX", "Var", "FOFormula", "PredQ", "PredR", "FTrue", "FFalse", "FNot",
    "FAnd", "FOr", "FImp", "ExistsW", "ExistsI", "ForallW", "ForallI", "FOStructure",
    "to_fo_structure", "translate", "fo_eval", "quantifier_ranks", "free_vars",
    "render_fo", "Player", "GameConfig", "ef_winner", "random_fo_formula",
    "FOEvalError", "X", "Y", "TAU",
]

WORLD = "W"
INDEX = "I"


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __post_init__(self):
        if self.sort not in (WORLD, INDEX):
            raise ValueError(f"unknown sort {self.sort!r}")


class FOFormula:
    def __str__(self):
        return render_fo(self)


@dataclass(frozen=True)
class PredQ(FOFormula):
    prop: str
    x: Var

    def __post_init__(self):
        _need(self.x, WORLD)


@dataclass(frozen=True)
class PredR(FOFormula):
    x: Var
    t: Var
    y: Var

    def __post_init__(self):
        _need(self.x, WORLD)
        _need(self.t, INDEX)
        _need(self.y, WORLD)


@dataclass(frozen=True)
class FTrue(FOFormula):
    pass


@dataclass(frozen=True)
class FFalse(FOFormula):
    pass


@dataclass(frozen=True)
class FNot(FOFormula):
    sub: FOFormula


@dataclass(frozen=True)
class FAnd(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FOr(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class FImp(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class _Quant(FOFormula):
    var: Var
    body: FOFormula


class ExistsW(_Quant):
    def __post_init__(self):
        _need(self.var, WORLD)


class ForallW(_Quant):
    def __post_init__(self):
        _need(self.var, WORLD)


class ExistsI(_Quant):
    def __post_init__(self):
        _need(self.var, INDEX)


class ForallI(_Quant):
    def __post_init__(self):
        _need(self.var, INDEX)


def _need(v: Var, sort: str):
    if not isinstance(v, Var) or v.sort != sort:
        raise TypeError(f"expected a {sort}-sort variable, got {v!r}")


_QNAME = {ExistsW: "EXISTS-W", ForallW: "FORALL-W", ExistsI: "EXISTS-I", ForallI: "FORALL-I"}


def render_fo(f: FOFormula) -> str:
    """Parenthesized ASCII, e.g. ``EXISTS-I t (FORALL-W y (R(x,t,y) -> Qp(y)))``."""
    if isinstance(f, PredQ):
        return f"Q{f.prop}({f.x.name})"
    if isinstance(f, PredR):
        return f"R({f.x.name},{f.t.name},{f.y.name})"
    if isinstance(f, FTrue):
        return "true"
    if isinstance(f, FFalse):
        return "false"
    if isinstance(f, FNot):
        return f"~{render_fo(f.sub)}"
    if isinstance(f, (FAnd, FOr, FImp)):
        op = {FAnd: "&", FOr: "|", FImp: "->"}[type(f)]
        return f"({render_fo(f.left)} {op} {render_fo(f.right)})"
    body = render_fo(f.body)
    if not isinstance(f.body, (FAnd, FOr, FImp)):
        body = f"({body})"
    return f"{_QNAME[type(f)]} {f.var.name} {body}"


# ---------------------------------------------------------------------------
# structures

@dataclass(frozen=True)
class FOStructure:
    """Two-sorted structure: worlds, indices, ternary ``R`` and monadic ``Q_p``."""

    worlds: tuple
    indices: tuple
    r_interp: frozenset
    q_interp: Mapping[str, frozenset] = field(hash=False)

    def __post_init__(self):
        if not self.worlds or not self.indices:
            raise ValueError("both sorts must be nonempty")
        ws, ix = set(self.worlds), set(self.indices)
        for (w, i, v) in self.r_interp:
            if w not in ws or v not in ws or i not in ix:
                raise ValueError(f"R triple {(w, i, v)!r} outside the domain")


def to_fo_structure(m: KripkeModel) -> FOStructure:
    return FOStructure(tuple(m.worlds), tuple(m.indices), frozenset(m.edges),
                       {w: frozenset(m.valuation[w]) for w in m.worlds})


# ---------------------------------------------------------------------------
# translation

X = Var("x", WORLD)
Y = Var("y", WORLD)
TAU = Var("t", INDEX)


def translate(f: Formula, x: Var = X) -> FOFormula:
    """Standard translation with the free world variable ``x``.

    Uses two world variables, alternating on each modal step, and one recycled
    index variable.
    """
    _need(x, WORLD)
    other = Y if x.name != Y.name else X
    return _tr(f, x, other)


def _tr(f: Formula, x: Var, y: Var) -> FOFormula:
    if isinstance(f, Atom):
        return PredQ(f.name, x)
    if isinstance(f, Top):
        return FTrue()
    if isinstance(f, Bot):
        return FFalse()
    if isinstance(f, Not):
        return FNot(_tr(f.sub, x, y))
    if isinstance(f, And):
        return FAnd(_tr(f.left, x, y), _tr(f.right, x, y))
    if isinstance(f, Or):
        return FOr(_tr(f.left, x, y), _tr(f.right, x, y))
    if isinstance(f, Imp):
        return FImp(_tr(f.left, x, y), _tr(f.right, x, y))
    body = _tr(f.sub, y, x)
    edge = PredR(x, TAU, y)
    if isinstance(f, BoxE):
        return ExistsI(TAU, ForallW(y, FImp(edge, body)))
    if isinstance(f, BoxA):
        return ForallI(TAU, ForallW(y, FImp(edge, body)))
    if isinstance(f, DiaE):
        return ExistsI(TAU, ExistsW(y, FAnd(edge, body)))
    if isinstance(f, DiaA):
        return ForallI(TAU, ExistsW(y, FAnd(edge, body)))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# evaluation

class FOEvalError(ValueError):
    pass


def fo_eval(s: FOStructure, env: Mapping[Var, str], f: FOFormula) -> bool:
    """Tarskian truth of ``f`` in ``s`` under ``env`` (innermost binding wins)."""
    for v, e in env.items():
        dom = s.worlds if v.sort == WORLD else s.indices
        if e not in dom:
            raise FOEvalError(f"{v.name} is bound to {e!r}, not an element of sort {v.sort}")
    succ: dict = {}
    for (w, i, v) in s.r_interp:
        succ.setdefault((w, i), set()).add(v)
    return _ev(s, succ, dict(env), f)


def _lookup(env, v):
    try:
        return env[v]
    except KeyError:
        raise FOEvalError(f"unbound variable {v.name}") from None


def _ev(s, succ, env, f):
    if isinstance(f, PredQ):
        return f.prop in s.q_interp.get(_lookup(env, f.x), ())
    if isinstance(f, PredR):
        return _lookup(env, f.y) in succ.get((_lookup(env, f.x), _lookup(env, f.t)), ())
    if isinstance(f, FTrue):
        return True
    if isinstance(f, FFalse):
        return False
    if isinstance(f, FNot):
        return not _ev(s, succ, env, f.sub)
    if isinstance(f, FAnd):
        return _ev(s, succ, env, f.left) and _ev(s, succ, env, f.right)
    if isinstance(f, FOr):
        return _ev(s, succ, env, f.left) or _ev(s, succ, env, f.right)
    if isinstance(f, FImp):
        return (not _ev(s, succ, env, f.left)) or _ev(s, succ, env, f.right)
    dom = s.worlds if f.var.sort == WORLD else s.indices
    saved = env.get(f.var, _MISSING)
    try:
        for e in dom:
            env[f.var] = e
            r = _ev(s, succ, env, f.body)
            if isinstance(f, (ExistsW, ExistsI)):
                if r:
                    return True
            elif not r:
                return False
        return isinstance(f, (ForallW, ForallI))
    finally:
        if saved is _MISSING:
            env.pop(f.var, None)
        else:
            env[f.var] = saved


_MISSING = object()


def quantifier_ranks(f: FOFormula) -> tuple[int, int]:
    """(world-sort rank, index-sort rank): maximal nesting of each quantifier sort."""
    if isinstance(f, (PredQ, PredR, FTrue, FFalse)):
        return (0, 0)
    if isinstance(f, FNot):
        return quantifier_ranks(f.sub)
    if isinstance(f, (FAnd, FOr, FImp)):
        a, b = quantifier_ranks(f.left), quantifier_ranks(f.right)
        return (max(a[0], b[0]), max(a[1], b[1]))
    qx, qt = quantifier_ranks(f.body)
    return (qx + 1, qt) if f.var.sort == WORLD else (qx, qt + 1)


def free_vars(f: FOFormula) -> frozenset[Var]:
    if isinstance(f, PredQ):
        return frozenset({f.x})
    if isinstance(f, PredR):
        return frozenset({f.x, f.t, f.y})
    if isinstance(f, (FTrue, FFalse)):
        return frozenset()
    if isinstance(f, FNot):
        return free_vars(f.sub)
    if isinstance(f, (FAnd, FOr, FImp)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def random_fo_formula(seed: int, qx: int, qt: int, free: Var = X, props=("p",),
                      size: int = 10) -> FOFormula:
    """Random formula with ``quantifier_ranks <= (qx, qt)`` whose only free variable is ``free``."""
    rng = random.Random(seed)
    world_names = [free.name] + [n for n in ("y", "z", "u", "v") if n != free.name]
    return _rgen(rng, qx, qt, [free], [], size, list(props), world_names)


def _rgen(rng, qx, qt, wvars, ivars, budget, props, names):
    def atom():
        if ivars and rng.random() < 0.5:
            return PredR(rng.choice(wvars), rng.choice(ivars), rng.choice(wvars))
        return PredQ(rng.choice(props), rng.choice(wvars))

    if budget <= 1 or rng.random() < 0.15:
        return atom()
    ops = ["not", "and", "or", "imp"]
    if qx > 0:
        ops += ["EW", "AW"] * 2
    if qt > 0:
        ops += ["EI", "AI"] * 2
    op = rng.choice(ops)
    if op == "not":
        return FNot(_rgen(rng, qx, qt, wvars, ivars, budget - 1, props, names))
    if op in ("and", "or", "imp"):
        split = rng.randint(1, max(1, budget - 2))
        a = _rgen(rng, qx, qt, wvars, ivars, split, props, names)
        b = _rgen(rng, qx, qt, wvars, ivars, budget - 1 - split, props, names)
        return {"and": FAnd, "or": FOr, "imp": FImp}[op](a, b)
    if op in ("EW", "AW"):
        # reuse a bound name sometimes so shadowing gets exercised
        pool = [Var(n, WORLD) for n in names[: len(wvars) + 1]]
        v = rng.choice(pool)
        inner = wvars if v in wvars else wvars + [v]
        body = _rgen(rng, qx - 1, qt, inner, ivars, budget - 1, props, names)
        return (ExistsW if op == "EW" else ForallW)(v, body)
    v = Var(rng.choice(["t", "s"][: len(ivars) + 1]), INDEX)
    inner = ivars if v in ivars else ivars + [v]
    body = _rgen(rng, qx, qt - 1, wvars, inner, budget - 1, props, names)
    return (ExistsI if op == "EI" else ForallI)(v, body)


# ---------------------------------------------------------------------------
# Ehrenfeucht-Fraisse games

class Player(Enum):
    SPOILER = "Spoiler"
    DUPLICATOR = "Duplicator"


@dataclass(frozen=True)
class GameConfig:
    """Position ``[(left, s); (right, t)]`` with remaining pebble budgets.

    Pebbles are ``(sort, element)`` pairs; ``s`` and ``t`` list them in play order.
    """

    left: FOStructure
    right: FOStructure
    budget_w: int
    budget_i: int
    left_pebbles: tuple = ()
    right_pebbles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "left_pebbles", tuple(tuple(p) for p in self.left_pebbles))
        object.__setattr__(self, "right_pebbles", tuple(tuple(p) for p in self.right_pebbles))
        if len(self.left_pebbles) != len(self.right_pebbles):
            raise ValueError("pebble sequences differ in length")
        for (a, _), (b, _) in zip(self.left_pebbles, self.right_pebbles):
            if a != b:
                raise ValueError("corresponding pebbles must have the same sort")
        for st, peb in ((self.left, self.left_pebbles), (self.right, self.right_pebbles)):
            for sort, e in peb:
                dom = st.worlds if sort == WORLD else st.indices
                if e not in dom:
                    raise ValueError(f"pebble {e!r} is not an element of sort {sort}")

    @classmethod
    def from_points(cls, m1: KripkeModel, w1: str, m2: KripkeModel, w2: str,
                    budget_w: int, budget_i: int) -> "GameConfig":
        return cls(to_fo_structure(m1), to_fo_structure(m2), budget_w, budget_i,
                   ((WORLD, w1),), ((WORLD, w2),))


def _partial_iso(left: FOStructure, right: FOStructure, s: tuple, t: tuple) -> bool:
    n = len(s)
    for a in range(n):
        for b in range(a + 1, n):
            if (s[a] == s[b]) != (t[a] == t[b]):
                return False
    W = [a for a in range(n) if s[a][0] == WORLD]
    I = [a for a in range(n) if s[a][0] == INDEX]
    for a in W:
        if left.q_interp.get(s[a][1], frozenset()) != right.q_interp.get(t[a][1], frozenset()):
            return False
    for a in W:
        for c in I:
            for b in W:
                l = (s[a][1], s[c][1], s[b][1]) in left.r_interp
                r = (t[a][1], t[c][1], t[b][1]) in right.r_interp
                if l != r:
                    return False
    return True


def ef_winner(cfg: GameConfig) -> Player:
    """Winner of the ``(budget_w, budget_i)``-round game under optimal play.

    Spoiler chooses a sort with budget left, a side and an element; Duplicator
    answers on the other side.  A position that already fails to be a partial
    isomorphism is lost for Duplicator, since pebbles are never lifted.
    """
    L, R = cfg.left, cfg.right
    dom = {(0, WORLD): L.worlds, (0, INDEX): L.indices,
           (1, WORLD): R.worlds, (1, INDEX): R.indices}

    @lru_cache(maxsize=None)
    def dup_wins(s, t, bw, bi):
        if not _partial_iso(L, R, s, t):
            return False
        for sort, budget in ((WORLD, bw), (INDEX, bi)):
            if budget == 0:
                continue
            nbw = bw - (sort == WORLD)
            nbi = bi - (sort == INDEX)
            for side in (0, 1):
                for e in dom[side, sort]:
                    answered = False
                    for d in dom[1 - side, sort]:
                        if side == 0:
                            ok = dup_wins(s + ((sort, e),), t + ((sort, d),), nbw, nbi)
                        else:
                            ok = dup_wins(s + ((sort, d),), t + ((sort, e),), nbw, nbi)
                        if ok:
                            answered = True
                            break
                    if not answered:
                        return False
        return True

    won = dup_wins(cfg.left_pebbles, cfg.right_pebbles, cfg.budget_w, cfg.budget_i)
    return Player.DUPLICATOR if won else Player.SPOILER
