"""Constructible sets as finite unions of locally closed pieces V(I) minus V(E)."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .ideals import (
    Ideal, dimension as ideal_dimension, groebner, intersect_all, max_independent_set,
    member, normal_form, product_all, radical_member, saturate,
)
from .polycore import LEX, QQ, Polynomial, VariableContext, rational_roots, squarefree_part


@dataclass(frozen=True)
class Piece:
    """The locally closed set V(closure) minus V(exception).

    ``exception = <1>`` means nothing is removed (a closed piece).
    """

    closure: Ideal
    exception: Ideal
    normalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.closure.ctx.same_vars(self.exception.ctx):
            raise ValueError("closure and exception ideals live in different rings")

    @property
    def ctx(self) -> VariableContext:
        return self.closure.ctx

    @classmethod
    def closed(cls, I: Ideal) -> "Piece":
        return cls(I, Ideal.unit(I.ctx))

    @classmethod
    def empty(cls, ctx: VariableContext) -> "Piece":
        return cls(Ideal.unit(ctx), Ideal.unit(ctx), True)

    def normalize(self) -> "Piece":
        return normalize(self)

    def is_empty(self) -> bool:
        return is_empty(self)

    def dim(self) -> int:
        p = normalize(self)
        return -1 if is_empty(p) else ideal_dimension(p.closure)

    def contains_point(self, pt: Sequence) -> bool:
        return piece_contains_point(self, pt)

    def to_json(self) -> dict:
        p = normalize(self)
        return {"closure": p.closure.strings(), "except": p.exception.strings(), "dim": p.dim()}

    def __str__(self):
        cl = ", ".join(self.closure.strings()) or "0"
        ex = ", ".join(self.exception.strings()) or "0"
        return f"V({cl}) \\ V({ex})"


def normalize(p: Piece) -> Piece:
    """Replace the closure ideal by the ideal of the Zariski closure of the piece.

    Exception generators are reduced modulo the closure ideal; those that
    vanish on V(I) are dropped.  The closure of V(I) minus V(E) is the
    intersection over the remaining generators e of (I : e^inf).  The
    exception generators are then reduced modulo the new closure ideal,
    made square-free, and dropped when the others already generate them
    modulo the closure.
    """
    if p.normalized:
        return p
    return _normalize(p.closure, p.exception)


@lru_cache(maxsize=8192)
def _normalize(I: Ideal, E: Ideal) -> Piece:
    ctx = I.ctx
    if I.is_unit():
        return Piece.empty(ctx)
    gb = groebner(I)
    kept = []
    for e in E.generators:
        r = normal_form(e, gb)
        if r.is_zero() or radical_member(r, I):
            continue
        kept.append(squarefree_part(r))
    if not kept:
        return Piece.empty(ctx)
    if any(e.is_constant() for e in kept):
        J = I.reduced()
        return Piece(J, Ideal.unit(ctx), True)
    J = intersect_all([saturate(I, e) for e in kept], ctx).reduced()
    jgb = groebner(J)
    ex = []
    for e in kept:
        r = normal_form(e, jgb)
        if not r.is_zero():
            ex.append(squarefree_part(r))
    ex = list(dict.fromkeys(ex))
    ex = _compact_exception(J, jgb, ex)
    if len(ex) > 1:
        for e in list(reversed(ex)):
            rest = [f for f in ex if f != e]
            if member(e, J + rest):
                ex = rest
    return Piece(J, Ideal(ctx, ex), True)


def _size(polys) -> int:
    return sum(len(f.terms) * (1 + f.degree()) for f in polys)


def _compact_exception(J: Ideal, jgb, ex: list[Polynomial]) -> list[Polynomial]:
    """Swap the exception for the basis of J + E when that is smaller.

    Only V(J) meet V(E) matters, and it is also cut out by J + E.  Repeated
    cutting multiplies exception ideals together, so the product generators
    grow quickly while the basis of J + E stays bounded by the geometry.
    """
    if len(ex) == 1 and ex[0].degree() <= 2:
        return ex
    basis = groebner(J + ex).elements
    alt = []
    for g in basis:
        r = normal_form(g.to_ctx(J.ctx), jgb)
        if not r.is_zero():
            alt.append(r.monic())
    alt = list(dict.fromkeys(alt))
    return alt if alt and _size(alt) < _size(ex) else ex


def is_empty(p: Piece) -> bool:
    """V(I) inside V(E): every generator of E vanishes on V(I)."""
    if p.closure.is_unit():
        return True
    return all(radical_member(e, p.closure) for e in p.exception.generators)


def _check_arity(ctx: VariableContext, pt: Sequence):
    if len(pt) != ctx.arity:
        raise ValueError(f"point has {len(pt)} coordinates, ring has {ctx.arity}")


def piece_contains_point(p: Piece, pt: Sequence) -> bool:
    _check_arity(p.ctx, pt)
    pt = [QQ(v) for v in pt]
    if any(g.evaluate(pt) != 0 for g in p.closure.generators):
        return False
    return any(e.evaluate(pt) != 0 for e in p.exception.generators)


def piece_dimension(p: Piece) -> int:
    return p.dim()


def intersect(a: Piece, b: Piece) -> Piece:
    """(V(Ia) minus V(Ea)) meet (V(Ib) minus V(Eb)) = V(Ia + Ib) minus V(Ea * Eb)."""
    return normalize(Piece(a.closure + b.closure, a.exception * b.exception))


def difference(a: Piece, B: Ideal) -> "CSet":
    """The piece with the closed set V(B) removed."""
    return CSet([Piece(a.closure, a.exception * B)]).pruned()


def piece_minus_piece(a: Piece, b: Piece) -> "CSet":
    """a minus b = (a minus V(Ib)) union (a meet V(Ib) meet V(Eb))."""
    first = Piece(a.closure, a.exception * b.closure)
    second = Piece(a.closure + b.closure + b.exception, a.exception)
    return CSet([first, second]).pruned()


def piece_subset(a: Piece, b: Piece) -> bool:
    return piece_minus_piece(a, b).is_empty()


@dataclass(frozen=True)
class PurityReport:
    pure: bool
    dim: int
    piece_dims: tuple[int, ...]
    top_pieces: tuple[int, ...]
    stray_pieces: tuple[int, ...]
    note: str = ("decided on the given pieces: a lower-dimensional piece whose closure is not "
                 "covered by the union of the top-dimensional closures makes the set impure")

    def to_json(self) -> dict:
        return {"pure": self.pure, "dim": self.dim, "piece_dims": list(self.piece_dims),
                "top_pieces": list(self.top_pieces), "stray_pieces": list(self.stray_pieces),
                "note": self.note}


class CSet:
    """Finite union of pieces; ``pieces == ()`` is the empty set."""

    __slots__ = ("ctx", "pieces", "disjoint")

    def __init__(self, pieces: Iterable[Piece] = (), ctx: VariableContext | None = None,
                 disjoint: bool = False):
        pieces = tuple(pieces)
        if ctx is None:
            if not pieces:
                raise ValueError("an empty CSet needs an explicit ring")
            ctx = pieces[0].ctx
        for p in pieces:
            if not p.ctx.same_vars(ctx):
                raise ValueError("pieces of a CSet must share a ring")
        self.ctx = ctx
        self.pieces = pieces
        self.disjoint = disjoint

    @classmethod
    def empty(cls, ctx: VariableContext) -> "CSet":
        return cls((), ctx, True)

    @classmethod
    def closed(cls, I: Ideal) -> "CSet":
        return cls([Piece.closed(I)]).pruned()

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def pruned(self) -> "CSet":
        """Normalized, non-empty pieces only."""
        out = dict.fromkeys(normalize(p) for p in self.pieces)
        return CSet([p for p in out if not is_empty(p)], self.ctx, self.disjoint)

    def is_empty(self) -> bool:
        return all(is_empty(normalize(p)) for p in self.pieces)

    def contains_point(self, pt: Sequence) -> bool:
        _check_arity(self.ctx, pt)
        return any(piece_contains_point(p, pt) for p in self.pieces)

    def closure(self) -> Ideal:
        return closure(self)

    def dimension(self) -> int:
        return dimension(self)

    def union(self, other: "CSet") -> "CSet":
        return union(self, other)

    def minus_ideal(self, B: Ideal) -> "CSet":
        return CSet([q for p in self.pieces for q in difference(p, B).pieces], self.ctx)

    def minus(self, other: "CSet") -> "CSet":
        return cset_difference(self, other)

    def meet(self, other: "CSet") -> "CSet":
        out = [intersect(a, b) for a in self.pieces for b in other.pieces]
        return CSet(out, self.ctx).pruned()

    def to_json(self) -> list[dict]:
        return [p.to_json() for p in self.pieces]

    def __repr__(self):
        return "CSet[" + "; ".join(map(str, self.pieces)) + "]"


def closure(c: CSet) -> Ideal:
    """Ideal of the Zariski closure: the intersection of normalized closure ideals."""
    pieces = [normalize(p) for p in c.pieces]
    pieces = [p for p in pieces if not is_empty(p)]
    return intersect_all([p.closure for p in pieces], c.ctx)


def union(a: CSet, b: CSet, refine: bool = False) -> CSet:
    out = CSet(a.pieces + b.pieces, a.ctx)
    return disjointify(out) if refine else out


def cset_difference(a: CSet, b: CSet) -> CSet:
    cur = list(a.pieces)
    for q in b.pieces:
        nxt = []
        for p in cur:
            nxt.extend(piece_minus_piece(p, q).pieces)
        cur = nxt
    return CSet(cur, a.ctx).pruned()


def is_subset(a: CSet, b: CSet) -> bool:
    return cset_difference(a, b).is_empty()


def same_set(a: CSet, b: CSet) -> bool:
    return is_subset(a, b) and is_subset(b, a)


def disjointify(c: CSet) -> CSet:
    """Rewrite as pairwise disjoint pieces with the same union."""
    out: list[Piece] = []
    for p in c.pieces:
        rest = CSet([p], c.ctx)
        for q in out:
            rest = CSet([r for piece in rest.pieces for r in piece_minus_piece(piece, q).pieces], c.ctx)
        out.extend(rest.pruned().pieces)
    return CSet(out, c.ctx, True)


def dimension(c: CSet) -> int:
    dims = [p.dim() for p in c.pieces]
    return max(dims, default=-1)


def is_pure_dimensional(c: CSet) -> PurityReport:
    """Purity on the given pieces.

    Pieces of top dimension are kept; every lower-dimensional piece must
    have its closure inside the union of the top-dimensional closures
    (checked up to radical through the product of their ideals).
    """
    pieces = [normalize(p) for p in c.pieces]
    dims = tuple(-1 if is_empty(p) else ideal_dimension(p.closure) for p in pieces)
    top = max(dims, default=-1)
    if top < 0:
        return PurityReport(True, -1, dims, (), ())
    top_idx = tuple(i for i, d in enumerate(dims) if d == top)
    cover = product_all([pieces[i].closure for i in top_idx], c.ctx)
    stray = []
    for i, d in enumerate(dims):
        if d < 0 or d == top:
            continue
        if not all(radical_member(g, pieces[i].closure) for g in cover.generators):
            stray.append(i)
    return PurityReport(not stray, top, dims, top_idx, tuple(stray))


# ---------------------------------------------------------------------------
# rational sample points
# ---------------------------------------------------------------------------

def _rational_solutions(polys: list[Polynomial], names: tuple[str, ...], rng: random.Random,
                        limit: int, spread: int) -> list[dict]:
    """Rational solutions of a system, free variables assigned at random."""
    if not names:
        return [{}] if all(p.is_zero() for p in polys) else []
    ctx = VariableContext(names, LEX)
    I = Ideal(ctx, [p.to_ctx(ctx) for p in polys])
    gb = groebner(I, LEX)
    if gb.is_unit():
        return []
    last = names[-1]
    uni = [g for g in gb.elements if g.variables() <= {last} and not g.is_zero()]
    if uni:
        values = rational_roots(uni[-1])
        rng.shuffle(values)
    else:
        values = [QQ(rng.randint(-spread, spread))]
    sols = []
    for v in values:
        sub = [g.substitute({last: v}) for g in gb.elements]
        rest = VariableContext(names[:-1], LEX) if len(names) > 1 else None
        if rest is None:
            if all(s.is_zero() for s in sub):
                sols.append({last: v})
            continue
        sub = [s.to_ctx(rest) for s in sub if not s.is_zero()]
        if any(s.is_constant() for s in sub):
            continue
        for tail in _rational_solutions(sub, names[:-1], rng, limit - len(sols), spread):
            tail[last] = v
            sols.append(tail)
            if len(sols) >= limit:
                return sols
    return sols


def sample_points(p: Piece, count: int = 5, seed: int = 0, spread: int = 6,
                  tries: int = 60) -> list[tuple]:
    """Rational points of the piece, found by fixing an independent set at random."""
    rng = random.Random(seed)
    q = normalize(p)
    if is_empty(q):
        return []
    free = max_independent_set(q.closure)
    others = tuple(n for n in q.ctx.names if n not in free)
    found: list[tuple] = []
    for _ in range(tries):
        binding = {v: QQ(rng.randint(-spread, spread)) for v in free}
        polys = [g.substitute(binding) for g in q.closure.generators]
        if others:
            sub_ctx = VariableContext(others)
            polys = [s.to_ctx(sub_ctx) for s in polys if not s.is_zero()]
            if any(s.is_constant() for s in polys):
                continue
            sols = _rational_solutions(polys, others, rng, 4, spread)
        else:
            if any(not s.is_zero() for s in polys):
                continue
            sols = [{}]
        for s in sols:
            full = dict(binding)
            full.update(s)
            pt = tuple(full[n] for n in q.ctx.names)
            if piece_contains_point(q, pt) and pt not in found:
                found.append(pt)
                if len(found) >= count:
                    return found
    return found
