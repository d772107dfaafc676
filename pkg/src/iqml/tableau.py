"""Tableau satisfiability for IQML with model extraction from open tableaux.

The procedure works on negation normal form.  A node's label is saturated
propositionally (conjunctions split, disjunctions branched), then the modal
rule produces one successor obligation per witness index:

* ``<E>a``            -> a ``c_a`` successor with ``a`` and every ``[A]`` body;
* ``[E]b`` and ``<A>f`` -> a ``d_b`` successor with ``b``, ``f`` and every ``[A]`` body;
* ``<A>f``            -> a successor with ``f`` and every ``[A]`` body on each
                         remaining index (``c_*``, inactive ``d_*`` and ``j``).

All successors of a saturated label must be satisfiable (AND); the disjunction
branches are alternatives (OR), tried in canonical order.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

from .kripke import KripkeModel, PointedModel, render_model
from .semantics import holds
from .syntax import (Formula, Atom, Top, Bot, Not, And, Or, BoxE, BoxA, DiaE, DiaA,
                     modal_depth, render_formula, subformulas, to_nnf, is_literal)

__all__ = ["WitnessIndexSet", "witness_index_set", "apply_br", "TableauNode", "Verdict",
           "decide_sat", "is_valid", "extract_model", "format_verdict", "size_bound"]

log = logging.getLogger(__name__)

DEFAULT_INDEX = "j"


def _key(f: Formula) -> str:
    return render_formula(f)


@dataclass(frozen=True)
class WitnessIndexSet:
    """Index names for the extracted model: ``c_a`` per ``<E>a``, ``d_b`` per ``[E]b``, plus ``j``."""

    c_witnesses: dict
    d_witnesses: dict
    default_index: str = DEFAULT_INDEX

    def names(self) -> list[str]:
        return sorted([*self.c_witnesses.values(), *self.d_witnesses.values(), self.default_index])

    def __len__(self):
        return len(self.c_witnesses) + len(self.d_witnesses) + 1


def witness_index_set(f: Formula) -> WitnessIndexSet:
    sf = subformulas(to_nnf(f))
    alphas = sorted({g.sub for g in sf if isinstance(g, DiaE)}, key=_key)
    betas = sorted({g.sub for g in sf if isinstance(g, BoxE)}, key=_key)
    return WitnessIndexSet({a: f"c{n}" for n, a in enumerate(alphas, 1)},
                           {b: f"d{n}" for n, b in enumerate(betas, 1)})


class UnsaturatedLabel(ValueError):
    pass


def _split(label):
    A, B, C, D = [], [], [], []
    for g in label:
        if isinstance(g, DiaE):
            A.append(g.sub)
        elif isinstance(g, BoxE):
            B.append(g.sub)
        elif isinstance(g, DiaA):
            C.append(g.sub)
        elif isinstance(g, BoxA):
            D.append(g.sub)
        elif not is_literal(g):
            raise UnsaturatedLabel(f"label not saturated: {render_formula(g)}")
    return (sorted(set(A), key=_key), sorted(set(B), key=_key),
            sorted(set(C), key=_key), sorted(set(D), key=_key))


def apply_br(label, idx: WitnessIndexSet) -> list[tuple[str, frozenset]]:
    """Successor obligations ``(index, label)`` for a saturated, open label."""
    label = frozenset(label)
    if _closed(label):
        raise ValueError("apply_br on a closed label")
    A, B, C, D = _split(label)
    Dp = frozenset(D)
    out = []
    for a in A:
        out.append((idx.c_witnesses[a], frozenset({a}) | Dp))
    for b in B:
        for phi in C:
            out.append((idx.d_witnesses[b], frozenset({b, phi}) | Dp))
    active = {idx.d_witnesses[b] for b in B}
    others = [e for e in idx.names() if e not in active]
    for phi in C:
        for e in others:
            out.append((e, frozenset({phi}) | Dp))
    return out


def _closed(label) -> bool:
    if any(isinstance(g, Bot) for g in label):
        return True
    return any(isinstance(g, Not) and g.sub in label for g in label)


def saturations(label) -> Iterator[frozenset]:
    """Open propositional saturations of ``label`` in canonical branch order."""
    yield from _saturate(frozenset(label))


def _saturate(label: frozenset) -> Iterator[frozenset]:
    if _closed(label):
        return
    todo = sorted((g for g in label if isinstance(g, (And, Or, Top))), key=_key)
    if not todo:
        yield label
        return
    g = todo[0]
    rest = label - {g}
    if isinstance(g, Top):
        yield from _saturate(rest)
    elif isinstance(g, And):
        yield from _saturate(rest | {g.left, g.right})
    else:
        seen = set()
        for branch in (g.left, g.right):
            for s in _saturate(rest | {branch}):
                if s not in seen:
                    seen.add(s)
                    yield s


@dataclass
class TableauNode:
    id: str
    label: frozenset
    incoming: str | None = None
    children: list["TableauNode"] = field(default_factory=list)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0) if self.children else 0

    def walk(self) -> Iterator["TableauNode"]:
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class Verdict:
    satisfiable: bool
    model: PointedModel | None = None
    tableau: TableauNode | None = None

    def __bool__(self):
        return self.satisfiable


class _Search:
    def __init__(self, idx: WitnessIndexSet):
        self.idx = idx
        self.memo: dict[frozenset, tuple | None] = {}

    def solve(self, label: frozenset):
        """A resolution ``(saturated_label, [(index, child_resolution), ...])`` or None."""
        if label in self.memo:
            return self.memo[label]
        self.memo[label] = None  # depth strictly decreases, so no real cycles
        found = None
        md = max((modal_depth(g) for g in label), default=0)
        for sat in _saturate(label):
            kids = []
            for e, child in apply_br(sat, self.idx):
                assert max((modal_depth(g) for g in child), default=0) < md or not child, \
                    "modal depth must strictly decrease"
                r = self.solve(child)
                if r is None:
                    break
                kids.append((e, r))
            else:
                found = (sat, kids)
                break
        self.memo[label] = found
        return found


def _build_tree(res, incoming=None, counter=None) -> TableauNode:
    counter = counter if counter is not None else [0]
    node = TableauNode(f"w{counter[0]}", res[0], incoming)
    counter[0] += 1
    for e, r in res[1]:
        node.children.append(_build_tree(r, e, counter))
    return node


def extract_model(t: TableauNode, idx: WitnessIndexSet) -> PointedModel:
    """World per node, edge ``(parent, child.incoming, child)``, atoms from labels."""
    worlds, edges, val = [], [], {}
    for node in t.walk():
        if _closed(node.label):
            raise ValueError(f"closed node {node.id} in a resolution")
        worlds.append(node.id)
        val[node.id] = {g.name for g in node.label if isinstance(g, Atom)}
        for c in node.children:
            edges.append((node.id, c.incoming, c.id))
    return PointedModel(KripkeModel(worlds, idx.names(), edges, val), t.id)


def size_bound(f: Formula, idx: WitnessIndexSet | None = None) -> int:
    """Upper bound on extracted world count: ``(|SF|*(|SF|+|I|))**md``."""
    idx = idx or witness_index_set(f)
    sf = len(subformulas(to_nnf(f)))
    return (sf * (sf + len(idx))) ** modal_depth(f)


def decide_sat(f: Formula) -> Verdict:
    """Decide satisfiability; a ``Sat`` verdict carries a model and its tableau."""
    nnf = to_nnf(f)
    idx = witness_index_set(f)
    res = _Search(idx).solve(frozenset({nnf}))
    if res is None:
        return Verdict(False)
    tree = _build_tree(res)
    md = modal_depth(f)
    assert tree.depth() <= md, f"tableau depth {tree.depth()} exceeds modal depth {md}"
    pm = extract_model(tree, idx)
    assert len(pm.model.worlds) <= max(1, size_bound(f, idx))
    assert holds(pm.model, pm.point, f), "extracted model must satisfy the formula"
    return Verdict(True, pm, tree)


def is_valid(f: Formula) -> bool:
    return not decide_sat(Not(f)).satisfiable


def format_verdict(v: Verdict) -> str:
    if not v.satisfiable:
        return "UNSAT\n"
    return "SAT\n" + render_model(v.model.model, first=v.model.point)
