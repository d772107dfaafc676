"""IQML bisimulation, its depth-n approximants, and characteristic formulas."""
from __future__ import annotations

from itertools import combinations

from .kripke import KripkeModel
from .syntax import (Formula, Atom, Not, Imp, BoxE, BoxA, DiaE, DiaA, Top, Bot,
                     TRUE, FALSE, conj, disj, modal_depth, render_formula)

__all__ = [
    "max_bisimulation", "bisimilar", "n_bisimilar", "n_bisimulation",
    "n_bisimulation_levels", "is_bisimulation", "CharContext", "char_formula",
    "distinguishing_formula", "CharGuardExceeded", "DEFAULT_GAMMA_GUARD",
]

DEFAULT_GAMMA_GUARD = 12


def _clauses_hold(m1: KripkeModel, w1, m2: KripkeModel, w2, related) -> bool:
    """The four back-and-forth clauses for ``(w1, w2)``; ``related(u1, u2)`` is the
    relation they are checked against.  Val is checked by the caller."""
    s1 = m1.successors
    s2 = m2.successors
    # [E]forth: every i has a j whose successors are all matched into i's
    for i in m1.indices:
        a = s1(w1, i)
        if not any(all(any(related(u1, u2) for u1 in a) for u2 in s2(w2, j))
                   for j in m2.indices):
            return False
    # [E]back
    for j in m2.indices:
        b = s2(w2, j)
        if not any(all(any(related(u1, u2) for u2 in b) for u1 in s1(w1, i))
                   for i in m1.indices):
            return False
    all1 = m1.all_successors(w1)
    all2 = m2.all_successors(w2)
    # <E>forth / <E>back
    if not all(any(related(u1, u2) for u2 in all2) for u1 in all1):
        return False
    if not all(any(related(u1, u2) for u1 in all1) for u2 in all2):
        return False
    return True


def max_bisimulation(m1: KripkeModel, m2: KripkeModel) -> frozenset[tuple[str, str]]:
    """Greatest IQML bisimulation between ``m1`` and ``m2`` (possibly empty).

    Starts from all valuation-agreeing pairs and deletes violators until stable;
    sound because every clause is monotone in the relation.
    """
    G = {(a, b) for a in m1.worlds for b in m2.worlds if m1.valuation[a] == m2.valuation[b]}
    related = lambda u1, u2: (u1, u2) in G
    changed = True
    while changed:
        changed = False
        for pair in sorted(G):
            if not _clauses_hold(m1, pair[0], m2, pair[1], related):
                G.discard(pair)
                changed = True
    return frozenset(G)


def is_bisimulation(m1: KripkeModel, m2: KripkeModel, G) -> bool:
    """Whether every pair of ``G`` satisfies Val and the four clauses w.r.t. ``G``."""
    G = set(G)
    related = lambda u1, u2: (u1, u2) in G
    return all(m1.valuation[a] == m2.valuation[b] and _clauses_hold(m1, a, m2, b, related)
               for a, b in G)


def bisimilar(m1: KripkeModel, w1: str, m2: KripkeModel, w2: str) -> bool:
    for m, w in ((m1, w1), (m2, w2)):
        if w not in m.valuation:
            raise KeyError(f"unknown world {w!r}")
    return (w1, w2) in max_bisimulation(m1, m2)


def n_bisimilar(m1: KripkeModel, w1: str, m2: KripkeModel, w2: str, n: int) -> bool:
    """Depth-``n`` bisimilarity, evaluated top-down with a memo on ``(u1, u2, k)``.

    Valuation agreement is required at every level, not only at depth 0.
    """
    for m, w in ((m1, w1), (m2, w2)):
        if w not in m.valuation:
            raise KeyError(f"unknown world {w!r}")
    memo: dict = {}

    def nb(u1, u2, k):
        key = (u1, u2, k)
        got = memo.get(key)
        if got is None:
            if m1.valuation[u1] != m2.valuation[u2]:
                got = False
            elif k == 0:
                got = True
            else:
                got = _clauses_hold(m1, u1, m2, u2, lambda a, b: nb(a, b, k - 1))
            memo[key] = got
        return got

    return nb(w1, w2, n)


def n_bisimulation_levels(m1: KripkeModel, m2: KripkeModel, n: int) -> list[frozenset]:
    """Relations ``[R_0, ..., R_n]`` with ``R_k`` the set of k-bisimilar pairs (bottom-up)."""
    R = frozenset((a, b) for a in m1.worlds for b in m2.worlds
                  if m1.valuation[a] == m2.valuation[b])
    levels = [R]
    for _ in range(n):
        prev = levels[-1]
        related = lambda u1, u2, prev=prev: (u1, u2) in prev
        levels.append(frozenset(p for p in prev if _clauses_hold(m1, p[0], m2, p[1], related)))
    return levels


def n_bisimulation(m1: KripkeModel, m2: KripkeModel, n: int) -> frozenset:
    return n_bisimulation_levels(m1, m2, n)[-1]


# ---------------------------------------------------------------------------
# characteristic formulas

class CharGuardExceeded(ValueError):
    pass


def _box_e(f):
    return TRUE if isinstance(f, Top) else BoxE(f)


def _box_a(f):
    return TRUE if isinstance(f, Top) else BoxA(f)


def _dia_e(f):
    return FALSE if isinstance(f, Bot) else DiaE(f)


def _imp(a, b):
    if isinstance(a, Bot) or isinstance(b, Top):
        return TRUE
    if isinstance(a, Top):
        return b
    if isinstance(b, Bot):
        return Not(a)
    return Imp(a, b)


def _uniq(fs):
    seen = {}
    for f in fs:
        seen.setdefault(f, None)
    return list(seen)


class CharContext:
    """Memo table of characteristic formulas for one model over a finite prop list.

    ``table[w, k]`` is the depth-k characteristic formula of ``w``; ``gamma(k)``
    is the deduplicated set of those formulas across all worlds, in render order.
    """

    def __init__(self, model: KripkeModel, props=None, depth: int = 0,
                 gamma_guard: int = DEFAULT_GAMMA_GUARD):
        self.model = model
        self.props = sorted(model.props() if props is None else set(props))
        missing = model.props() - set(self.props)
        if missing:
            raise ValueError(f"props must cover the valuation; missing {sorted(missing)}")
        self.depth = depth
        self.gamma_guard = gamma_guard
        self.table: dict[tuple[str, int], Formula] = {}
        self._gamma: dict[int, list[Formula]] = {}

    def gamma(self, k: int) -> list[Formula]:
        if k not in self._gamma:
            fs = _uniq(self.chi(w, k) for w in self.model.worlds)
            self._gamma[k] = sorted(fs, key=render_formula)
        return self._gamma[k]

    def chi(self, w: str, k: int) -> Formula:
        key = (w, k)
        got = self.table.get(key)
        if got is None:
            got = self._build(w, k)
            assert modal_depth(got) <= k
            self.table[key] = got
        return got

    def _build(self, w: str, k: int) -> Formula:
        m = self.model
        val = conj(Atom(p) if p in m.valuation[w] else Not(Atom(p)) for p in self.props)
        if k == 0:
            return val
        n = k - 1
        chi = lambda u: self.chi(u, n)
        succ = {i: m.successors(w, i) for i in m.indices}
        forth = [_box_e(disj(_uniq(chi(u) for u in succ[i]))) for i in m.indices]

        gamma = self.gamma(n)
        if len(gamma) > self.gamma_guard:
            raise CharGuardExceeded(
                f"|Gamma^{n}| = {len(gamma)} exceeds the subset guard {self.gamma_guard}")
        back = []
        for size in range(len(gamma) + 1):
            for S in combinations(gamma, size):
                Sset = set(S)
                vee = disj(S)
                options = []
                for i in m.indices:
                    # chi(u) -> \/S is a propositional validity when chi(u) is in S
                    options.append(conj(TRUE if chi(u) in Sset else _box_a(_imp(chi(u), vee))
                                        for u in _uniq(succ[i])))
                back.append(_imp(_box_e(vee), disj(_uniq(options))))

        everyone = m.all_successors(w)
        dforth = [_dia_e(chi(u)) for u in _uniq_by_formula(everyone, chi)]
        dback = _box_a(disj(_uniq(chi(u) for u in everyone)))
        return conj([val, *forth, *back, *dforth, dback])


def _uniq_by_formula(worlds, chi):
    seen = {}
    for u in worlds:
        seen.setdefault(chi(u), u)
    return list(seen.values())


def char_formula(ctx: CharContext, w: str, n: int) -> Formula:
    """Characteristic formula of ``(ctx.model, w)`` of modal depth at most ``n``."""
    if n > ctx.depth:
        raise ValueError(f"depth {n} exceeds the context depth {ctx.depth}")
    if w not in ctx.model.valuation:
        raise KeyError(f"unknown world {w!r}")
    return ctx.chi(w, n)


def distinguishing_formula(m1: KripkeModel, w1: str, m2: KripkeModel, w2: str,
                           max_n: int, gamma_guard: int = DEFAULT_GAMMA_GUARD) -> Formula | None:
    """A formula true at ``(m1, w1)`` and false at ``(m2, w2)``, or ``None``.

    Uses the characteristic formula of ``(m1, w1)`` at the least ``n <= max_n``
    where the two points are not n-bisimilar.
    """
    levels = n_bisimulation_levels(m1, m2, max_n)
    for n, R in enumerate(levels):
        if (w1, w2) not in R:
            props = m1.props() | m2.props()
            ctx = CharContext(m1, props, n, gamma_guard)
            return char_formula(ctx, w1, n)
    return None
