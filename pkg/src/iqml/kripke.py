"""Finite IQML structures: worlds, a nonempty index set, indexed edges, valuation."""
from __future__ import annotations

import itertools
import os
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .syntax import IDENT_RE

__all__ = [
    "KripkeModel", "PointedModel", "ModelError", "validate_model",
    "parse_model", "render_model", "load_model", "successors", "unravel",
    "restrict", "is_tree", "random_model", "enumerate_models", "count_models",
    "model_from_id", "enumeration_bits", "oracle_guard", "GuardExceeded",
    "DEFAULT_GUARD",
]

DEFAULT_GUARD = 24


class ModelError(ValueError):
    """Model description violates the structure invariants.

    ``violations`` lists every problem found, each naming the offending identifier.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GuardExceeded(ValueError):
    pass


class KripkeModel:
    """Immutable finite model ``(W, {R_i}_{i in I}, rho)``.

    Worlds and indices are kept sorted so every emitted listing is canonical.
    Construct through :func:`validate_model` or directly; both check invariants.
    """

    __slots__ = ("worlds", "indices", "edges", "valuation", "_succ", "_hash")

    def __init__(self, worlds: Iterable[str], indices: Iterable[str],
                 edges: Iterable[tuple[str, str, str]] = (),
                 valuation: Mapping[str, Iterable[str]] | None = None):
        worlds = list(worlds)
        indices = list(indices)
        edges = list(edges)
        valuation = dict(valuation or {})
        problems = _violations(worlds, indices, edges, valuation)
        if problems:
            raise ModelError(problems)
        self.worlds = tuple(sorted(worlds))
        self.indices = tuple(sorted(indices))
        self.edges = frozenset(tuple(e) for e in edges)
        self.valuation = {w: frozenset(valuation.get(w, ())) for w in self.worlds}
        succ = {(w, i): [] for w in self.worlds for i in self.indices}
        for (w, i, v) in sorted(self.edges):
            succ[w, i].append(v)
        self._succ = {k: tuple(v) for k, v in succ.items()}
        self._hash = None

    def successors(self, w: str, i: str) -> tuple[str, ...]:
        """The ``i``-successors of ``w``, sorted."""
        try:
            return self._succ[w, i]
        except KeyError:
            if w not in self.valuation:
                raise KeyError(f"unknown world {w!r}") from None
            raise KeyError(f"unknown index {i!r}") from None

    def all_successors(self, w: str) -> tuple[str, ...]:
        return tuple(sorted({v for i in self.indices for v in self._succ[w, i]}))

    def props(self) -> frozenset[str]:
        return frozenset().union(*self.valuation.values())

    def _key(self):
        return (self.worlds, self.indices, tuple(sorted(self.edges)),
                tuple(tuple(sorted(self.valuation[w])) for w in self.worlds))

    def __eq__(self, other):
        return isinstance(other, KripkeModel) and self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return (f"KripkeModel(worlds={list(self.worlds)}, indices={list(self.indices)}, "
                f"edges={sorted(self.edges)}, valuation="
                f"{ {w: sorted(self.valuation[w]) for w in self.worlds} })")


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.valuation:
            raise ModelError([f"point {self.point!r} is not a world of the model"])


def _violations(worlds, indices, edges, valuation) -> list[str]:
    out = []
    if not worlds:
        out.append("empty world set")
    if not indices:
        out.append("empty index set")
    for kind, names in (("world", worlds), ("index", indices)):
        seen = set()
        for n in names:
            if n in seen:
                out.append(f"duplicate {kind} {n!r}")
            seen.add(n)
    ws, ix = set(worlds), set(indices)
    for e in edges:
        if len(e) != 3:
            out.append(f"malformed edge {e!r}")
            continue
        src, idx, dst = e
        if src not in ws:
            out.append(f"edge source {src!r} is not a declared world")
        if idx not in ix:
            out.append(f"edge label {idx!r} is not a declared index")
        if dst not in ws:
            out.append(f"edge target {dst!r} is not a declared world")
    for w in valuation:
        if w not in ws:
            out.append(f"valuation given for undeclared world {w!r}")
    return out


def validate_model(raw) -> KripkeModel:
    """Check a raw description and return a :class:`KripkeModel`.

    ``raw`` is model-file text, a mapping with keys ``worlds``, ``indices``,
    ``edges`` and optional ``valuation``, or an existing model.  Raises
    :class:`ModelError` listing all violations.
    """
    if isinstance(raw, KripkeModel):
        return raw
    if isinstance(raw, str):
        return parse_model(raw)
    return KripkeModel(raw.get("worlds", ()), raw.get("indices", ()),
                       raw.get("edges", ()), raw.get("valuation", {}))


# ---------------------------------------------------------------------------
# file format

def parse_model(text: str) -> KripkeModel:
    """Read the line format::

        world <id> [<prop> ...]
        index <id>
        edge <src> <idx> <dst>

    ``#`` starts a comment.  Worlds and indices must be declared before any edge.
    """
    worlds, indices, edges, valuation = [], [], [], {}
    problems = []
    seen_edge = False
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        for a in args:
            if not IDENT_RE.fullmatch(a):
                problems.append(f"line {lineno}: bad identifier {a!r}")
        if kind == "world":
            if not args:
                problems.append(f"line {lineno}: world needs a name")
                continue
            if seen_edge:
                problems.append(f"line {lineno}: world {args[0]!r} declared after edges")
            worlds.append(args[0])
            valuation[args[0]] = set(args[1:])
        elif kind == "index":
            if len(args) != 1:
                problems.append(f"line {lineno}: index takes exactly one name")
                continue
            if seen_edge:
                problems.append(f"line {lineno}: index {args[0]!r} declared after edges")
            indices.append(args[0])
        elif kind == "edge":
            if len(args) != 3:
                problems.append(f"line {lineno}: edge takes <src> <idx> <dst>")
                continue
            seen_edge = True
            edges.append(tuple(args))
        else:
            problems.append(f"line {lineno}: unknown declaration {kind!r}")
    problems += _violations(worlds, indices, edges, valuation)
    if problems:
        raise ModelError(problems)
    return KripkeModel(worlds, indices, edges, valuation)


def load_model(path) -> KripkeModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def render_model(m: KripkeModel, first: str | None = None) -> str:
    """Model-file text; ``first`` (e.g. the point) is listed before other worlds."""
    order = list(m.worlds)
    if first is not None:
        order.remove(first)
        order.insert(0, first)
    lines = []
    for w in order:
        lines.append(" ".join(["world", w, *sorted(m.valuation[w])]))
    lines += [f"index {i}" for i in m.indices]
    rank = {w: k for k, w in enumerate(order)}
    for (w, i, v) in sorted(m.edges, key=lambda e: (rank[e[0]], e[1], rank[e[2]])):
        lines.append(f"edge {w} {i} {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# queries and constructions

def successors(m: KripkeModel, w: str, i: str) -> frozenset[str]:
    return frozenset(m.successors(w, i))


def unravel(m: KripkeModel, w: str, depth: int) -> PointedModel:
    """Tree unravelling of ``(m, w)`` cut at ``depth`` edges.

    Each world is a path from ``w``; the path ``w (i1,v1) ... (ik,vk)`` is named
    ``w__i1__v1__...__ik__vk``.  The valuation of a path is that of its last world.
    """
    if w not in m.valuation:
        raise KeyError(f"unknown world {w!r}")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    worlds, edges, val = [w], [], {w: m.valuation[w]}
    frontier = [(w, w)]
    for _ in range(depth):
        nxt = []
        for name, last in frontier:
            for i in m.indices:
                for v in m.successors(last, i):
                    child = f"{name}__{i}__{v}"
                    if child in val:
                        raise ValueError(f"path name collision at {child!r}")
                    worlds.append(child)
                    val[child] = m.valuation[v]
                    edges.append((name, i, child))
                    nxt.append((child, v))
        frontier = nxt
    return PointedModel(KripkeModel(worlds, m.indices, edges, val), w)


def _tree_depths(m: KripkeModel, root: str) -> dict[str, int] | None:
    incoming: dict[str, int] = {}
    for (_, _, v) in m.edges:
        incoming[v] = incoming.get(v, 0) + 1
    if incoming.get(root):
        return None
    if any(incoming.get(w, 0) != 1 for w in m.worlds if w != root):
        return None
    depth = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in m.all_successors(u):
            if v in depth:
                return None
            depth[v] = depth[u] + 1
            queue.append(v)
    if len(depth) != len(m.worlds):
        return None
    return depth


def is_tree(pm: PointedModel) -> bool:
    return _tree_depths(pm.model, pm.point) is not None


def restrict(pm: PointedModel, n: int) -> PointedModel:
    """Keep the worlds of tree depth <= ``n``; raises ``ValueError`` on non-trees."""
    m = pm.model
    depth = _tree_depths(m, pm.point)
    if depth is None:
        raise ValueError("restrict needs a tree model rooted at its point")
    keep = {w for w, d in depth.items() if d <= n}
    edges = [e for e in m.edges if e[0] in keep and e[2] in keep]
    return PointedModel(KripkeModel(sorted(keep), m.indices, edges,
                                    {w: m.valuation[w] for w in keep}), pm.point)


def random_model(seed: int, max_worlds: int, max_indices: int, props=(),
                 density: float | None = None) -> KripkeModel:
    """Deterministic random model with 1..max_worlds worlds and 1..max_indices indices."""
    if max_worlds < 1 or max_indices < 1:
        raise ValueError("max_worlds and max_indices must be >= 1")
    rng = random.Random(seed)
    k = rng.randint(1, max_worlds)
    j = rng.randint(1, max_indices)
    p = rng.uniform(0.1, 0.6) if density is None else density
    worlds = [f"w{n}" for n in range(1, k + 1)]
    indices = [f"i{n}" for n in range(1, j + 1)]
    edges = [(w, i, v) for w in worlds for i in indices for v in worlds if rng.random() < p]
    valuation = {w: {q for q in props if rng.random() < 0.5} for w in worlds}
    return KripkeModel(worlds, indices, edges, valuation)


# ---------------------------------------------------------------------------
# exhaustive enumeration
#
# A model with k worlds, j indices and props P is identified by an integer whose
# low k*k*j bits are edges (bit (w*j + i)*k + v set iff w -i-> v) and whose next
# k*|P| bits are the valuation (bit k*k*j + w*|P| + p).

def oracle_guard() -> int:
    env = os.environ.get("IQML_ORACLE_GUARD")
    return int(env) if env else DEFAULT_GUARD


def enumeration_bits(k: int, j: int, nprops: int) -> int:
    return k * k * j + k * nprops


def _check_guard(k, j, nprops, guard):
    bits = enumeration_bits(k, j, nprops)
    limit = oracle_guard() if guard is None else guard
    if bits > limit:
        raise GuardExceeded(f"{bits} bits of choice exceed the enumeration guard {limit}")


def model_from_id(n: int, k: int, j: int, props) -> KripkeModel:
    props = list(props)
    worlds = [f"w{a}" for a in range(1, k + 1)]
    indices = [f"i{a}" for a in range(1, j + 1)]
    edges = []
    for a in range(k):
        for b in range(j):
            for c in range(k):
                if n >> ((a * j + b) * k + c) & 1:
                    edges.append((worlds[a], indices[b], worlds[c]))
    base = k * k * j
    valuation = {worlds[a]: {p for q, p in enumerate(props) if n >> (base + a * len(props) + q) & 1}
                 for a in range(k)}
    return KripkeModel(worlds, indices, edges, valuation)


def count_models(max_worlds: int, max_indices: int, nprops: int, cumulative: bool = False) -> int:
    ks = range(1, max_worlds + 1) if cumulative else [max_worlds]
    js = range(1, max_indices + 1) if cumulative else [max_indices]
    return sum(2 ** enumeration_bits(k, j, nprops) for k in ks for j in js)


def enumerate_models(max_worlds: int, max_indices: int, props=(), *,
                     cumulative: bool = False, guard: int | None = None) -> Iterator[KripkeModel]:
    """Every model over worlds ``w1..wk`` and indices ``i1..ij`` with valuations over ``props``.

    By default ``k = max_worlds`` and ``j = max_indices`` exactly; with
    ``cumulative=True`` all sizes ``1..max`` are produced, world count outermost.
    Models come in increasing identifier order (see :func:`model_from_id`).
    """
    if max_worlds < 1 or max_indices < 1:
        raise ValueError("bounds must be >= 1")
    props = list(props)
    _check_guard(max_worlds, max_indices, len(props), guard)
    ks = range(1, max_worlds + 1) if cumulative else [max_worlds]
    js = range(1, max_indices + 1) if cumulative else [max_indices]
    for k, j in itertools.product(ks, js):
        for n in range(2 ** enumeration_bits(k, j, len(props))):
            yield model_from_id(n, k, j, props)
