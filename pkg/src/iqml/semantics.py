"""Model checking and a bounded brute-force satisfiability oracle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kripke import (KripkeModel, PointedModel, GuardExceeded, enumeration_bits,
                     model_from_id, oracle_guard)
from .syntax import (Formula, Atom, Top, Bot, Not, And, Or, Imp, BoxE, BoxA, DiaE, DiaA,
                     atoms)

__all__ = ["holds", "extension", "valid_on_model", "OracleBounds", "sat_oracle",
           "bulk_truth"]


def extension(m: KripkeModel, f: Formula, memo: dict | None = None) -> frozenset[str]:
    """The set of worlds of ``m`` where ``f`` is true."""
    memo = {} if memo is None else memo
    return _ext(m, f, memo)


def _ext(m, f, memo):
    got = memo.get(f)
    if got is not None:
        return got
    W = m.worlds
    if isinstance(f, Atom):
        out = frozenset(w for w in W if f.name in m.valuation[w])
    elif isinstance(f, Top):
        out = frozenset(W)
    elif isinstance(f, Bot):
        out = frozenset()
    elif isinstance(f, Not):
        out = frozenset(W) - _ext(m, f.sub, memo)
    elif isinstance(f, And):
        out = _ext(m, f.left, memo) & _ext(m, f.right, memo)
    elif isinstance(f, Or):
        out = _ext(m, f.left, memo) | _ext(m, f.right, memo)
    elif isinstance(f, Imp):
        out = (frozenset(W) - _ext(m, f.left, memo)) | _ext(m, f.right, memo)
    else:
        sub = _ext(m, f.sub, memo)
        I = m.indices
        succ = m.successors
        if isinstance(f, BoxE):
            out = frozenset(w for w in W if any(all(u in sub for u in succ(w, i)) for i in I))
        elif isinstance(f, BoxA):
            out = frozenset(w for w in W if all(all(u in sub for u in succ(w, i)) for i in I))
        elif isinstance(f, DiaE):
            out = frozenset(w for w in W if any(any(u in sub for u in succ(w, i)) for i in I))
        elif isinstance(f, DiaA):
            out = frozenset(w for w in W if all(any(u in sub for u in succ(w, i)) for i in I))
        else:
            raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def holds(m: KripkeModel, w: str, f: Formula) -> bool:
    """Truth of ``f`` at world ``w`` of ``m``."""
    if w not in m.valuation:
        raise KeyError(f"unknown world {w!r}")
    return w in _ext(m, f, {})


def valid_on_model(m: KripkeModel, f: Formula) -> bool:
    return len(_ext(m, f, {})) == len(m.worlds)


# ---------------------------------------------------------------------------
# bit-parallel evaluation over every model of a fixed shape
#
# Model identifiers follow kripke.model_from_id.  Bit t of word q of an array
# stands for model id (chunk << L) + 64*q + t.

_LOW_PATTERNS = [np.uint64(sum(1 << t for t in range(64) if (t >> b) & 1)) for b in range(6)]
_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)
_ZERO = np.uint64(0)
_CHUNK_BITS = 22


class _Shape:
    def __init__(self, k: int, j: int, props: list[str]):
        self.k, self.j, self.props = k, j, props
        self.bits = enumeration_bits(k, j, len(props))
        self.low = min(self.bits, _CHUNK_BITS)
        self.words = max(1, (1 << self.low) // 64)
        n = 1 << self.low
        if n < 64:
            self.mask = np.array([np.uint64((1 << n) - 1)], dtype=np.uint64)
        else:
            self.mask = None
        q = np.arange(self.words, dtype=np.uint64)
        self._low_vars = []
        for b in range(self.low):
            if b < 6:
                arr = np.full(self.words, _LOW_PATTERNS[b], dtype=np.uint64)
            else:
                arr = np.where((q >> np.uint64(b - 6)) & np.uint64(1), _ONES, _ZERO).astype(np.uint64)
            self._low_vars.append(arr)

    def chunks(self):
        return range(1 << (self.bits - self.low))

    def var(self, b: int, chunk: int):
        if b < self.low:
            return self._low_vars[b]
        return _ONES if (chunk >> (b - self.low)) & 1 else _ZERO

    def edge_array(self, chunk: int) -> np.ndarray:
        k, j = self.k, self.j
        out = np.empty((k, j, k, self.words), dtype=np.uint64)
        for a in range(k):
            for b in range(j):
                for c in range(k):
                    out[a, b, c] = self.var((a * j + b) * k + c, chunk)
        return out

    def val_array(self, chunk: int, p: str) -> np.ndarray:
        out = np.empty((self.k, self.words), dtype=np.uint64)
        if p not in self.props:
            out[:] = _ZERO
            return out
        q = self.props.index(p)
        base = self.k * self.k * self.j
        for a in range(self.k):
            out[a] = self.var(base + a * len(self.props) + q, chunk)
        return out


def _bulk_ext(f: Formula, shape: _Shape, edges, vals, memo):
    got = memo.get(f)
    if got is not None:
        return got
    if isinstance(f, Atom):
        out = vals.get(f.name)
        if out is None:
            out = vals[f.name] = shape.val_array(vals["__chunk__"], f.name)
    elif isinstance(f, Top):
        out = np.full((shape.k, shape.words), _ONES, dtype=np.uint64)
    elif isinstance(f, Bot):
        out = np.zeros((shape.k, shape.words), dtype=np.uint64)
    elif isinstance(f, Not):
        out = ~_bulk_ext(f.sub, shape, edges, vals, memo)
    elif isinstance(f, And):
        out = _bulk_ext(f.left, shape, edges, vals, memo) & _bulk_ext(f.right, shape, edges, vals, memo)
    elif isinstance(f, Or):
        out = _bulk_ext(f.left, shape, edges, vals, memo) | _bulk_ext(f.right, shape, edges, vals, memo)
    elif isinstance(f, Imp):
        out = ~_bulk_ext(f.left, shape, edges, vals, memo) | _bulk_ext(f.right, shape, edges, vals, memo)
    else:
        sub = _bulk_ext(f.sub, shape, edges, vals, memo)[None, None, :, :]
        if isinstance(f, (BoxE, BoxA)):
            every = np.bitwise_and.reduce(~edges | sub, axis=2)
            red = np.bitwise_or if isinstance(f, BoxE) else np.bitwise_and
        else:
            some = np.bitwise_or.reduce(edges & sub, axis=2)
            every = some
            red = np.bitwise_or if isinstance(f, DiaE) else np.bitwise_and
        out = red.reduce(every, axis=1)
    memo[f] = out
    return out


def _iter_chunks(f: Formula, shape: _Shape):
    for chunk in shape.chunks():
        edges = shape.edge_array(chunk)
        vals = {"__chunk__": chunk}
        ext = _bulk_ext(f, shape, edges, vals, {})
        if shape.mask is not None:
            ext = ext & shape.mask
        yield chunk, ext


def bulk_truth(f: Formula, k: int, j: int, props, guard: int | None = None) -> np.ndarray:
    """Boolean array ``T[n, a]``: truth of ``f`` at world ``w{a+1}`` of model ``n``.

    Covers all ``2**bits`` models of exactly ``k`` worlds and ``j`` indices.
    """
    props = list(props)
    shape = _Shape(k, j, props)
    _guard(shape.bits, guard)
    parts = []
    for _, ext in _iter_chunks(f, shape):
        bits = np.unpackbits(ext.view(np.uint8), axis=1, bitorder="little")
        parts.append(bits[:, : 1 << shape.low].T.astype(bool))
    return np.concatenate(parts, axis=0)


def _guard(bits, guard):
    limit = oracle_guard() if guard is None else guard
    if bits > limit:
        raise GuardExceeded(f"{bits} bits of choice exceed the enumeration guard {limit}")


@dataclass(frozen=True)
class OracleBounds:
    max_worlds: int
    max_indices: int
    props: tuple = field(default=())

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_indices < 1:
            raise ValueError("oracle bounds must be >= 1")
        object.__setattr__(self, "props", tuple(self.props))


def sat_oracle(f: Formula, b: OracleBounds, guard: int | None = None) -> PointedModel | None:
    """First satisfying pointed model in canonical enumeration order, or ``None``.

    World counts and then index counts increase; within a size, models are
    scanned by identifier and the first satisfying world is the point.
    """
    props = list(b.props)
    missing = atoms(f) - set(props)
    if missing:
        raise ValueError(f"formula uses propositions outside the bounds: {sorted(missing)}")
    _guard(enumeration_bits(b.max_worlds, b.max_indices, len(props)), guard)
    for k in range(1, b.max_worlds + 1):
        for j in range(1, b.max_indices + 1):
            shape = _Shape(k, j, props)
            for chunk, ext in _iter_chunks(f, shape):
                anywhere = np.bitwise_or.reduce(ext, axis=0)
                nz = np.flatnonzero(anywhere)
                if nz.size == 0:
                    continue
                q = int(nz[0])
                word = int(anywhere[q])
                t = (word & -word).bit_length() - 1
                n = (chunk << shape.low) + 64 * q + t
                for a in range(k):
                    if int(ext[a, q]) >> t & 1:
                        return PointedModel(model_from_id(n, k, j, props), f"w{a + 1}")
    return None
