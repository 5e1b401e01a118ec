"""Map-level invariants of a square polynomial map F: singular locus,
critical values K0(F), asymptotic set S_F, dominance, properness and
leading-form data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .csets import CSet, Piece, normalize
from .ideals import (
    Ideal, dimension, eliminate, groebner, intersect_all, radical_member, saturate,
)
from .polycore import (
    GREVLEX, Polynomial, PolyMap, VariableContext, block_order, determinant,
    generic_rank, jacobian, jacobian_of, QQ,
)

IMAGE_DEPTH_LIMIT = 64


@lru_cache(maxsize=256)
def jacobian_determinant(F: PolyMap) -> Polynomial:
    F.require_square()
    return determinant(jacobian(F))


def singular_locus(F: PolyMap) -> Ideal:
    """<det J_F>; the unit ideal when F has no critical points."""
    det = jacobian_determinant(F)
    if det.is_zero():
        return Ideal.zero(F.source)
    return Ideal(F.source, [det.monic()])


def graph_ideal(F: PolyMap) -> Ideal:
    return Ideal(F.graph_ctx, F.graph_equations())


def image_closure(F: PolyMap, constraint: Ideal) -> Ideal:
    """Ideal of the Zariski closure of F(V(constraint)), in the target ring."""
    g = graph_ideal(F) + [c.to_ctx(F.graph_ctx) for c in constraint.generators]
    out = eliminate(g, F.source.names)
    return Ideal(F.target_ctx, [p.to_ctx(F.target_ctx) for p in out.generators]).reduced()


# ---------------------------------------------------------------------------
# exact images of locally closed pieces
# ---------------------------------------------------------------------------

def _lift(h: Polynomial, ctx: VariableContext) -> Polynomial:
    return h.to_ctx(ctx)


def _image_recurse(K: Ideal, nu: int, yctx: VariableContext, depth: int, out: list[Piece]):
    """Append pieces covering the projection of V(K) onto the last variables.

    The first ``nu`` variables of K's ring are projected away.  With a
    block order eliminating them, the basis elements free of those
    variables cut out the closure of the image; wherever none of the
    other elements' leading coefficients vanishes, the basis specializes
    and the fiber is non-empty.  The locus where the product of the
    leading coefficients vanishes is treated recursively.
    """
    if depth > IMAGE_DEPTH_LIMIT:
        raise RuntimeError("image computation did not terminate within the depth guard")
    ctx = K.ctx
    gb = groebner(K, block_order(nu, GREVLEX, GREVLEX))
    if gb.is_unit():
        return
    W_gens, lcs = [], []
    for g in gb.elements:
        lm = g.lm()
        if not any(lm[:nu]):
            W_gens.append(g.to_ctx(yctx))
            continue
        head = lm[:nu]
        lc = Polynomial(gb.ctx, {m: c for m, c in g.terms.items() if m[:nu] == head})
        lc = Polynomial(yctx, {m[nu:]: c for m, c in lc.terms.items()})
        if not lc.is_constant():
            lcs.append(lc.monic())
    W = Ideal(yctx, W_gens)
    if dimension(W) == 0:
        # the projection is dense in the finite set V(W), hence equal to it
        out.append(Piece.closed(W))
        return
    for h in lcs:
        if radical_member(h, W):
            _image_recurse(K + _lift(h, ctx), nu, yctx, depth + 1, out)
            return
    lcs = list(dict.fromkeys(lcs))
    H = yctx.one()
    for h in lcs:
        H = H * h
    if not radical_member(H, W):
        out.append(Piece(W, Ideal(yctx, [H])))
        if not H.is_constant():
            _image_recurse(K + _lift(H, ctx), nu, yctx, depth + 1, out)
        return
    # V(W) is reducible and the leading coefficients vanish on different parts
    h = lcs[0]
    s = ctx.fresh("_s")
    big = VariableContext((s,) + ctx.names, ctx.order)
    Ks = Ideal(big, [g.to_ctx(big) for g in K.generators] + [big.one() - big.var(s) * _lift(h, big)])
    _image_recurse(Ks, nu + 1, yctx, depth + 1, out)
    _image_recurse(K + _lift(h, ctx), nu, yctx, depth + 1, out)


def image_of_piece(F: PolyMap, piece: Piece) -> CSet:
    """Exact image F(V(I) minus V(E)) as a constructible set in the target ring."""
    piece = normalize(piece)
    tctx = F.target_ctx
    if piece.closure.is_unit():
        return CSet.empty(tctx)
    t = F.graph_ctx.fresh("_t")
    ring = VariableContext((t,) + F.source.names + F.targets)
    base = [ring.var(y) - f.to_ctx(ring) for y, f in zip(F.targets, F.components)]
    base += [g.to_ctx(ring) for g in piece.closure.generators]
    out: list[Piece] = []
    for e in piece.exception.generators:
        K = Ideal(ring, base + [ring.one() - ring.var(t) * e.to_ctx(ring)])
        _image_recurse(K, 1 + F.n, tctx, 0, out)
    return CSet(out, tctx).pruned()


def point_in_image(F: PolyMap, constraint: Ideal, a: Sequence) -> bool:
    """a lies in F(V(constraint)) iff <F(x) - a> + constraint is not the unit ideal."""
    if len(a) != len(F.components):
        raise ValueError(f"target point has {len(a)} coordinates, map has {len(F.components)}")
    fiber = [f - QQ(v) for f, v in zip(F.components, a)]
    return not (constraint + fiber).is_unit()


@lru_cache(maxsize=256)
def critical_values(F: PolyMap) -> tuple[Ideal, CSet]:
    """(closure ideal of K0(F), exact K0(F) as the union of the Thom pieces' images)."""
    from .thomstrat import thom_partition

    closure = image_closure(F, singular_locus(F))
    pieces = [p for w in thom_partition(F) for p in w.image.pieces]
    return closure, CSet(pieces, F.target_ctx).pruned()


# ---------------------------------------------------------------------------
# asymptotic set
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def asymptotic_set(F: PolyMap) -> Ideal:
    """Ideal in the target ring whose variety is S_F.

    Graph equations are homogenized in the source block only, giving
    y_i w^d_i - F_i^h(x, w).  Saturating by w closes the graph in
    P^n x C^n; adding w keeps its part at infinity.  For each chart
    x_j != 0 the part is saturated by x_j and projected to the target; S_F
    is the union of those projections.
    """
    F.require_square()
    w = F.graph_ctx.fresh("_w")
    ring = VariableContext(F.source.names + (w,) + F.targets)
    wv = ring.var(w)
    gens = []
    for y, f in zip(F.targets, F.components):
        fr = f.to_ctx(ring)
        if fr.is_zero():
            gens.append(ring.var(y))
            continue
        d = f.degree()
        fh = Polynomial(ring, {m[:F.n] + (d - sum(m[:F.n]),) + m[F.n + 1:]: c
                               for m, c in fr.terms.items()})
        gens.append(ring.var(y) * wv ** d - fh)
    closed = saturate(Ideal(ring, gens), wv)
    at_infinity = closed + [wv]
    parts = []
    for x in F.source.names:
        chart = saturate(at_infinity, ring.var(x))
        proj = eliminate(chart, F.source.names + (w,))
        parts.append(Ideal(F.target_ctx, [p.to_ctx(F.target_ctx) for p in proj.generators]))
    return intersect_all(parts, F.target_ctx).reduced()


@lru_cache(maxsize=256)
def is_dominant(F: PolyMap) -> bool:
    F.require_square()
    return eliminate(graph_ideal(F), F.source.names).is_zero()


def is_proper(F: PolyMap) -> bool:
    return asymptotic_set(F).is_unit()


@dataclass(frozen=True)
class JelonekReport:
    dominant: bool
    proper: bool
    sf_dim: int
    n: int

    @property
    def ok(self) -> bool:
        return (not self.dominant) or self.sf_dim in (-1, self.n - 1)

    def to_json(self) -> dict:
        return {"dominant": self.dominant, "proper": self.proper, "sf_dim": self.sf_dim,
                "n": self.n, "ok": self.ok}


def check_jelonek(F: PolyMap) -> JelonekReport:
    """S_F of a dominant map is empty or a hypersurface."""
    sf = asymptotic_set(F)
    return JelonekReport(is_dominant(F), sf.is_unit(), dimension(sf), F.n)


# ---------------------------------------------------------------------------
# leading forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeadingFormData:
    forms: tuple[Polynomial, ...]
    generic_rank: int
    v_ideal: Ideal
    v_dim: int
    n: int

    @property
    def corank(self) -> int:
        return self.n - self.generic_rank

    @property
    def rank_condition_ok(self) -> bool:
        return self.generic_rank >= self.n - 1

    @property
    def v_dim_ok(self) -> bool:
        return self.v_dim <= 1

    @property
    def corank_agrees(self) -> bool:
        return self.v_dim == self.corank

    def to_json(self) -> dict:
        return {"forms": [str(f) for f in self.forms], "generic_rank": self.generic_rank,
                "v_dim": self.v_dim, "rank_condition_ok": self.rank_condition_ok,
                "v_dim_ok": self.v_dim_ok, "corank": self.corank,
                "corank_agrees": self.corank_agrees}


def leading_form_data(F: PolyMap) -> LeadingFormData:
    F.require_square()
    if any(c.is_zero() for c in F.components):
        raise ValueError("leading forms need every component to be non-zero")
    forms = tuple(c.leading_form() for c in F.components)
    rank = generic_rank(jacobian_of(forms, F.source))
    V = Ideal(F.source, forms)
    return LeadingFormData(forms, rank, V, dimension(V), F.n)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapReport:
    map: PolyMap
    sing_ideal: Ideal
    k0_closure: Ideal
    k0: CSet
    sf_ideal: Ideal
    dominant: bool
    proper: bool
    jelonek: JelonekReport
    leading: LeadingFormData | None

    def to_json(self) -> dict:
        from .parsing import render_map
        return {
            "map": render_map(self.map),
            "sing": self.sing_ideal.strings(),
            "k0_closure": self.k0_closure.strings(),
            "k0_pieces": self.k0.to_json(),
            "sf": self.sf_ideal.strings(),
            "dominant": self.dominant,
            "proper": self.proper,
            "jelonek_ok": self.jelonek.ok,
            "leading": self.leading.to_json() if self.leading else None,
        }


def analyze(F: PolyMap) -> MapReport:
    closure, k0 = critical_values(F)
    sf = asymptotic_set(F)
    lead = None if any(c.is_zero() for c in F.components) else leading_form_data(F)
    jel = check_jelonek(F)
    return MapReport(F, singular_locus(F), closure, k0, sf, jel.dominant, jel.proper, jel, lead)
