"""Thom's rank partition of the critical values and a stratification of
K0(F) union S_F, with checkers for the frontier condition, transversality,
closedness and pure-dimensionality.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .csets import (
    CSet, Piece, PurityReport, intersect, is_empty, is_pure_dimensional, is_subset, normalize,
)
from .ideals import Ideal, dimension, groebner, intersect_all, radical_member, variety_subset
from .mapanalysis import (
    asymptotic_set, critical_values, image_closure, image_of_piece, is_dominant,
)
from .polycore import PolyMap, factor_squarefree, jacobian, jacobian_of, minors_ideal


class SubdivisionDepthError(RuntimeError):
    """Singular-locus recursion went deeper than the ambient dimension allows."""


def piece_key(p: Piece) -> tuple:
    """Deterministic sort key: sorted generator strings of closure and exception."""
    return (tuple(sorted(p.closure.strings())), tuple(sorted(p.exception.strings())))


# ---------------------------------------------------------------------------
# step 1: rank subdivision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RankPiece:
    rank: int
    piece: Piece


@lru_cache(maxsize=128)
def rank_subdivision(F: PolyMap) -> tuple[RankPiece, ...]:
    """V^i = {rank J_F = i} = V(minors_{i+1}) minus V(minors_i), for i < n."""
    F.require_square()
    J = jacobian(F)
    ctx = F.source
    prev = Ideal.unit(ctx)
    out = []
    for i in range(F.n):
        cur = Ideal(ctx, minors_ideal(J, i + 1))
        p = normalize(Piece(cur, prev))
        if not is_empty(p):
            out.append(RankPiece(i, p))
        prev = cur
    return tuple(out)


# ---------------------------------------------------------------------------
# step 2: smooth subdivision
# ---------------------------------------------------------------------------

def _split_by_factors(p: Piece) -> list[Piece] | None:
    """Split the closure along a reducible basis element, or return None.

    Factors that already vanish on V(I) are added to I.  When two or more
    factors of one element do not vanish on V(I), the piece is replaced by
    the pieces V(I + f) minus V(E).
    """
    I = p.closure
    extra = []
    for g in groebner(I).elements:
        g = g.to_ctx(I.ctx)
        facs = factor_squarefree(g)
        if len(facs) == 1 and facs[0] == g.monic():
            continue
        outside = []
        for f in facs:
            if radical_member(f, I):
                extra.append(f)
            else:
                outside.append(f)
        if len(outside) >= 2:
            base = I + extra
            cands = [normalize(Piece(base + [f], p.exception)) for f in outside]
            cands = [c for c in cands if not is_empty(c)]
            keep = []
            for i, c in enumerate(cands):
                inside = any(
                    j != i and variety_subset(c.closure, d.closure)
                    and not (variety_subset(d.closure, c.closure) and j > i)
                    for j, d in enumerate(cands))
                if not inside:
                    keep.append(c)
            return keep
    if extra:
        return [normalize(Piece(I + extra, p.exception))]
    return None


def singular_ideal(I: Ideal) -> Ideal:
    """Jacobian criterion: I + (c x c minors of the Jacobian of a basis), c = codim."""
    ctx = I.ctx
    d = dimension(I)
    c = ctx.arity - d
    if d <= 0 or c == 0:
        # points and open sets are smooth
        return Ideal.unit(ctx)
    gens = [g.to_ctx(ctx) for g in groebner(I).elements]
    M = jacobian_of(gens, ctx)
    if c > min(M.rows, M.cols):
        return I
    return I + minors_ideal(M, c)


def smooth_subdivision(rp: RankPiece | Piece, split_components: bool = True,
                       _depth: int = 0, _limit: int | None = None) -> list[Piece]:
    """Partition a piece into smooth locally closed pieces by iterated singular loci.

    With ``split_components`` the closure is first split along factors of
    its basis elements, so every emitted piece has a closure of a single
    dimension.  Pieces coming from a split may overlap; ``refine_partition``
    makes them disjoint.
    """
    p = rp.piece if isinstance(rp, RankPiece) else rp
    p = normalize(p)
    n = p.ctx.arity
    limit = 2 * (n + 1) if _limit is None else _limit
    if is_empty(p):
        return []
    if _depth > limit:
        raise SubdivisionDepthError(f"smooth subdivision exceeded depth {limit}")
    if split_components:
        parts = _split_by_factors(p)
        if parts is not None:
            out = []
            for q in parts:
                out.extend(smooth_subdivision(q, True, _depth + 1, limit))
            return out
    sing = singular_ideal(p.closure)
    smooth = normalize(Piece(p.closure, p.exception * sing))
    out = [] if is_empty(smooth) else [smooth]
    if not sing.is_unit():
        out.extend(smooth_subdivision(Piece(sing, p.exception), split_components, _depth + 1, limit))
    return out


# ---------------------------------------------------------------------------
# step 3: refinement to a partition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothPiece:
    """A smooth piece with its labels.

    ``labels = (i, j)``: i is the dimension of the piece and j its index
    among pieces of that dimension.  ``rank`` is the Jacobian rank of F on
    the piece (None for pieces not coming from a rank locus) and
    ``tag`` records where the piece came from.
    """

    labels: tuple[int, int]
    piece: Piece
    dim: int
    rank: int | None = None
    tag: str = ""

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "rank": self.rank, "dim": self.dim,
                "closure": self.piece.closure.strings(), "except": self.piece.exception.strings()}


def _merge_tag(a: str, b: str) -> str:
    return a if a == b else "intersection"


def _overlap(a: Piece, b: Piece) -> Piece:
    return intersect(a, b)


def _push(heap, counter, p: Piece, rank, tag, split: bool):
    for q in smooth_subdivision(p, split):
        item = (-q.dim(), rank if rank is not None else -1, piece_key(q), next(counter), q, rank, tag)
        heapq.heappush(heap, item)


def refine_partition(pieces: Sequence[SmoothPiece | Piece], split_components: bool = True,
                     sort_key=None) -> list[SmoothPiece]:
    """Pairwise disjoint smooth pieces with the same union.

    Pieces are processed from high to low dimension.  When a new piece p
    meets an accepted piece r, both are cut into the part away from the
    other's closure, the part on the other's closure but outside it, and
    the overlap; the last two are smoothed and queued again.
    """
    import itertools

    counter = itertools.count()
    heap: list = []
    for sp in pieces:
        if isinstance(sp, SmoothPiece):
            _push(heap, counter, sp.piece, sp.rank, sp.tag, split_components)
        else:
            _push(heap, counter, sp, None, "", split_components)
    accepted: list[tuple[Piece, int | None, str]] = []
    while heap:
        *_, p, rank, tag = heapq.heappop(heap)
        p = normalize(p)
        if is_empty(p):
            continue
        nxt = []
        for r, rrank, rtag in accepted:
            if p is None:
                nxt.append((r, rrank, rtag))
                continue
            X = _overlap(r, p)
            if is_empty(X):
                nxt.append((r, rrank, rtag))
                continue
            r_open = normalize(Piece(r.closure, r.exception * p.closure))
            r_closed = Piece(r.closure + p.closure + p.exception, r.exception)
            p_open = normalize(Piece(p.closure, p.exception * r.closure))
            p_closed = Piece(p.closure + r.closure + r.exception, p.exception)
            merged_rank = rrank if rrank == rank else (rrank if rank is None else rank)
            _push(heap, counter, X, merged_rank, _merge_tag(rtag, tag), split_components)
            _push(heap, counter, r_closed, rrank, rtag, split_components)
            _push(heap, counter, p_closed, rank, tag, split_components)
            if not is_empty(r_open):
                nxt.append((r_open, rrank, rtag))
            p = None if is_empty(p_open) else p_open
        accepted = nxt
        if p is not None:
            accepted.append((p, rank, tag))
    return _label([(p, rk, tg) for p, rk, tg in accepted], sort_key)


def _label(items: list[tuple[Piece, int | None, str]], sort_key=None) -> list[SmoothPiece]:
    dims = [p.dim() for p, _, _ in items]
    key = sort_key or (lambda p, rank, tag: (-1 if rank is None else rank, piece_key(p)))
    order = sorted(range(len(items)), key=lambda i: (-dims[i], key(*items[i])))
    out, counts = [], {}
    for i in order:
        p, rank, tag = items[i]
        counts[dims[i]] = counts.get(dims[i], 0) + 1
        out.append(SmoothPiece((dims[i], counts[dims[i]]), p, dims[i], rank, tag))
    return out


# ---------------------------------------------------------------------------
# steps 4 and 5: restricted rank and images
# ---------------------------------------------------------------------------

def restricted_rank(sp: SmoothPiece | Piece, F: PolyMap) -> int:
    """Dimension of the closure of F(piece): the generic rank of dF along the piece."""
    p = sp.piece if isinstance(sp, SmoothPiece) else sp
    p = normalize(p)
    if is_empty(p):
        raise ValueError("restricted rank of an empty piece")
    return dimension(image_closure(F, p.closure))


@dataclass(frozen=True)
class ImageStratum:
    """W^{i,k}_j: the image of the source piece labelled (i, j), of dimension k."""

    labels: tuple[int, int, int]
    image_closure: Ideal
    k: int
    source: SmoothPiece
    image: CSet

    def to_json(self) -> dict:
        i, k, j = self.labels
        return {"labels": [i, k, j], "k": k, "image_closure": self.image_closure.strings(),
                "image_pieces": self.image.to_json(), "source": self.source.to_json()}


@lru_cache(maxsize=128)
def thom_partition(F: PolyMap) -> tuple[ImageStratum, ...]:
    """Steps 1 to 5: rank loci, smooth pieces, refinement, restricted ranks, images."""
    F.require_square()
    raw = []
    for rp in rank_subdivision(F):
        for q in smooth_subdivision(rp):
            raw.append(SmoothPiece((0, 0), q, q.dim(), rp.rank, "thom"))
    refined = refine_partition(raw)
    ranks = {id(sp.piece): restricted_rank(sp, F) for sp in refined}
    # within one dimension: lower Jacobian rank first, then larger image, then generators
    relabeled = _label([(sp.piece, sp.rank, sp.tag) for sp in refined],
                       lambda p, rank, tag: (rank, -ranks[id(p)], piece_key(p)))
    out = []
    for sp in relabeled:
        k = ranks[id(sp.piece)]
        out.append(ImageStratum((sp.labels[0], k, sp.labels[1]), image_closure(F, sp.piece.closure),
                                k, sp, image_of_piece(F, sp.piece)))
    return tuple(out)


def thom_smooth_pieces(F: PolyMap) -> list[SmoothPiece]:
    return [w.source for w in thom_partition(F)]


@lru_cache(maxsize=128)
def sf_stratification(F: PolyMap) -> tuple[SmoothPiece, ...]:
    """Smooth partition of S_F by iterated singular loci."""
    sf = asymptotic_set(F)
    if sf.is_unit():
        return ()
    return tuple(refine_partition([SmoothPiece((0, 0), Piece.closed(sf), 0, None, "sf")]))


# ---------------------------------------------------------------------------
# the stratification of K0 union S_F
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Stratum:
    id: str
    piece: Piece
    dim: int
    origin: str
    labels: tuple[int, int]

    def to_json(self) -> dict:
        return {"id": self.id, "dim": self.dim, "closure": self.piece.closure.strings(),
                "except": self.piece.exception.strings(), "origin": self.origin,
                "labels": list(self.labels)}


@dataclass(frozen=True)
class FrontierReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations)}


@dataclass(frozen=True)
class TransversalityEntry:
    thom: str
    stratum: str
    d1: int
    d2: int
    meet_dim: int
    status: str  # disjoint | containment | transverse | non-transverse

    def to_json(self) -> dict:
        return {"thom": self.thom, "stratum": self.stratum, "d1": self.d1, "d2": self.d2,
                "meet_dim": self.meet_dim, "status": self.status}


@dataclass(frozen=True)
class ClosednessReport:
    ok: bool
    boundary_in_sf: bool
    union_equal: bool
    boundary: tuple[Piece, ...]
    witnesses: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"ok": self.ok, "boundary_in_sf": self.boundary_in_sf,
                "union_equal": self.union_equal,
                "boundary": [p.to_json() for p in self.boundary],
                "witnesses": list(self.witnesses)}


@dataclass(frozen=True)
class ConjectureReport:
    dominant: bool
    pure: bool
    dim: int
    dims: tuple[int, ...]
    k0_pure: bool
    k0_dims: tuple[int, ...]
    purity: PurityReport = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {"dominant": self.dominant, "pure": self.pure, "dim": self.dim,
                "dims": list(self.dims), "k0_pure": self.k0_pure, "k0_dims": list(self.k0_dims)}


@dataclass(frozen=True)
class Stratification:
    ambient_dim: int
    strata: tuple[Stratum, ...]
    filtration: tuple[Ideal, ...]
    incidence: tuple[tuple[str, str], ...]
    frontier: FrontierReport | None = None
    transversality: tuple[TransversalityEntry, ...] = ()

    def pieces(self) -> list[Piece]:
        return [s.piece for s in self.strata]

    def as_cset(self, ctx) -> CSet:
        return CSet(self.pieces(), ctx)

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for s in self.strata:
            out[s.dim] = out.get(s.dim, 0) + 1
        return out


ORIGIN_RANK = {"thom": 0, "intersection": 1, "sf": 2}


def _frontier_split(items: list[tuple[Piece, str]]) -> list[tuple[Piece, str]]:
    """Split strata until each one meeting the closure of another lies inside it."""
    changed = True
    guard = 0
    while changed:
        changed = False
        guard += 1
        if guard > 50:
            raise RuntimeError("frontier enforcement did not stabilise")
        for a, (S, _) in enumerate(items):
            for b, (T, tag) in enumerate(items):
                if a == b:
                    continue
                meet = normalize(Piece(T.closure + S.closure, T.exception))
                if is_empty(meet) or variety_subset(T.closure, S.closure):
                    continue
                rest = normalize(Piece(T.closure, T.exception * S.closure))
                new = [(q.piece, tag) for q in refine_partition([meet])]
                if not is_empty(rest):
                    new.append((rest, tag))
                items = items[:b] + items[b + 1:] + new
                changed = True
                break
            if changed:
                break
    return items


def _build(items: list[tuple[Piece, str]], ctx, n: int) -> Stratification:
    dims = [p.dim() for p, _ in items]
    order = sorted(range(len(items)), key=lambda i: (-dims[i], ORIGIN_RANK.get(items[i][1], 9),
                                                     piece_key(items[i][0])))
    strata, counts = [], {}
    for i in order:
        p, tag = items[i]
        counts[dims[i]] = counts.get(dims[i], 0) + 1
        strata.append(Stratum(f"S{dims[i]}_{counts[dims[i]]}", p, dims[i], tag, (dims[i], counts[dims[i]])))
    top = max(dims, default=-1)
    filtration = []
    for d in range(top, -1, -1):
        filtration.append(intersect_all([s.piece.closure for s in strata if s.dim <= d], ctx).reduced())
    incidence = []
    for lo in strata:
        for hi in strata:
            if lo.dim < hi.dim and variety_subset(lo.piece.closure, hi.piece.closure):
                incidence.append((lo.id, hi.id))
    return Stratification(n, tuple(strata), tuple(filtration), tuple(incidence))


@lru_cache(maxsize=128)
def stratify_union(F: PolyMap) -> Stratification:
    """Strata of K0(F) union S_F compatible with the Thom images and with S_F.

    Candidates are the Thom image pieces away from S_F, the strata of S_F,
    and the traces of each Thom image closure on each S_F stratum.  They
    are smoothed, refined to a partition and split further until the
    frontier condition holds between every pair.
    """
    F.require_square()
    tctx = F.target_ctx
    sf = asymptotic_set(F)
    thom = thom_partition(F)
    s_strata = sf_stratification(F)
    cands: list[SmoothPiece] = []
    for w in thom:
        for p in w.image.pieces:
            for q in CSet([p], tctx).minus_ideal(sf).pieces:
                cands.append(SmoothPiece((0, 0), q, 0, None, "thom"))
    for s in s_strata:
        cands.append(SmoothPiece((0, 0), s.piece, s.dim, None, "sf"))
    for w in thom:
        for s in s_strata:
            meet = intersect(Piece.closed(w.image_closure), s.piece)
            if not is_empty(meet):
                cands.append(SmoothPiece((0, 0), meet, 0, None, "intersection"))
    refined = refine_partition(cands)
    items = _frontier_split([(sp.piece, sp.tag) for sp in refined])
    st = _build(items, tctx, F.n)
    frontier = frontier_check(st)
    trans = transversality_check(F)
    return Stratification(st.ambient_dim, st.strata, st.filtration, st.incidence, frontier, trans)


def stratification_of_pieces(pieces: Iterable[Piece], n: int, tag: str = "given") -> Stratification:
    """Wrap arbitrary pieces (no refinement) so that the checkers can run on them."""
    items = [(normalize(p), tag) for p in pieces]
    items = [(p, t) for p, t in items if not is_empty(p)]
    ctx = items[0][0].ctx if items else None
    if ctx is None:
        return Stratification(n, (), (), ())
    return _build(items, ctx, n)


def frontier_check(s: Stratification) -> FrontierReport:
    """closure(S) minus S is a union of strata, for every stratum S.

    Two conditions are checked: the boundary V(I_S + E_S) lies inside
    the union of all strata, and every stratum T meeting closure(S) lies
    entirely inside it.
    """
    violations = []
    strata = s.strata
    if not strata:
        return FrontierReport(True)
    ctx = strata[0].piece.ctx
    union = CSet([t.piece for t in strata], ctx)
    for S in strata:
        boundary = CSet([Piece.closed(S.piece.closure + S.piece.exception)], ctx).pruned()
        if not is_subset(boundary, union):
            violations.append(f"boundary of {S.id} is not covered by strata")
        for T in strata:
            if T is S:
                continue
            meet = normalize(Piece(T.piece.closure + S.piece.closure, T.piece.exception))
            if is_empty(meet):
                continue
            if not variety_subset(T.piece.closure, S.piece.closure):
                violations.append(f"{T.id} meets the closure of {S.id} without lying inside it")
    return FrontierReport(not violations, tuple(violations))


def raw_k0_stratification(F: PolyMap) -> Stratification:
    """The exact K0(F) pieces on their own, without S_F."""
    _, k0 = critical_values(F)
    return stratification_of_pieces(k0.pieces, F.n, "thom")


@lru_cache(maxsize=128)
def transversality_check(F: PolyMap) -> tuple[TransversalityEntry, ...]:
    """Compare each Thom image closure with each S_F stratum.

    Containment of one closure in the other is reported as its own
    category.  Otherwise the pair is transverse when the intersection is
    empty or has dimension at most d1 + d2 - n.
    """
    n = F.n
    out = []
    for w in thom_partition(F):
        Kbar = w.image_closure
        d1 = dimension(Kbar)
        name = "W{},{},{}".format(*w.labels)
        for s in sf_stratification(F):
            d2 = s.dim
            sid = f"SF{s.labels[0]}_{s.labels[1]}"
            meet = intersect(Piece.closed(Kbar), s.piece)
            md = meet.dim()
            if variety_subset(Kbar, s.piece.closure) or variety_subset(s.piece.closure, Kbar):
                status = "containment"
            elif md < 0:
                status = "disjoint"
            elif md <= d1 + d2 - n:
                status = "transverse"
            else:
                status = "non-transverse"
            out.append(TransversalityEntry(name, sid, d1, d2, md, status))
    return tuple(out)


@lru_cache(maxsize=128)
def verify_closedness(F: PolyMap) -> ClosednessReport:
    """closure(K0) minus K0 lies in S_F, and K0 u S_F = closure(K0) u S_F."""
    closure, k0 = critical_values(F)
    sf = asymptotic_set(F)
    tctx = F.target_ctx
    boundary = CSet.closed(closure).minus(k0)
    witnesses = []
    inside = True
    for p in boundary.pieces:
        if not all(radical_member(g, p.closure) for g in sf.generators):
            inside = False
            witnesses.append(f"boundary piece {p} leaves S_F")
    sf_set = CSet.closed(sf) if not sf.is_unit() else CSet.empty(tctx)
    left = CSet(k0.pieces + sf_set.pieces, tctx)
    right = CSet(CSet.closed(closure).pieces + sf_set.pieces, tctx)
    equal = is_subset(left, right) and is_subset(right, left)
    if not equal:
        witnesses.append("K0 u S_F differs from closure(K0) u S_F")
    return ClosednessReport(inside and equal, inside, equal, boundary.pieces, tuple(witnesses))


@lru_cache(maxsize=128)
def check_conjecture(F: PolyMap) -> ConjectureReport:
    """Dominance and pure-dimensionality of K0(F) union S_F (and of K0 alone)."""
    dom = is_dominant(F)
    st = stratify_union(F)
    tctx = F.target_ctx
    rep = is_pure_dimensional(CSet(st.pieces(), tctx))
    _, k0 = critical_values(F)
    k0rep = is_pure_dimensional(k0)
    return ConjectureReport(dom, rep.pure, rep.dim, rep.piece_dims, k0rep.pure, k0rep.piece_dims, rep)


def stratification_json(F: PolyMap, st: Stratification | None = None) -> dict:
    st = st or stratify_union(F)
    return {
        "filtration": [I.strings() for I in st.filtration],
        "strata": [s.to_json() for s in st.strata],
        "incidence": [list(p) for p in st.incidence],
        "frontier_ok": st.frontier.ok if st.frontier else None,
        "frontier_violations": list(st.frontier.violations) if st.frontier else [],
        "transversality": [t.to_json() for t in st.transversality],
        "closedness_ok": verify_closedness(F).ok,
        "conjecture": check_conjecture(F).to_json(),
    }
