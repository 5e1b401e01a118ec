from __future__ import annotations

import itertools
import random

import pytest

from oracles import rank_of
from stratkit import mapanalysis as ma
from stratkit import thomstrat as ts
from stratkit.corpus import FIXTURES, load_fixture
from stratkit.csets import CSet, Piece, closure as cset_closure, intersect, is_empty, is_subset, normalize, sample_points
from stratkit.ideals import Ideal, dimension, intersect_all, same_variety, variety_subset
from stratkit.polycore import QQ, VariableContext, jacobian

RXY = VariableContext(("x", "y"))


def ideal(ctx, *gens):
    return Ideal.from_strings(ctx, list(gens))


def same_piece(p: Piece, closure: Ideal, exception: Ideal) -> bool:
    """Point-set equality of p with V(closure) minus V(exception)."""
    q = Piece(closure, exception)
    return is_subset(CSet([p]), CSet([q])) and is_subset(CSet([q]), CSet([p]))


# ---------------------------------------------------------------------------
# step 1
# ---------------------------------------------------------------------------

def test_rank_subdivision_example(pasferme):
    R = pasferme.source
    rps = {rp.rank: rp.piece for rp in ts.rank_subdivision(pasferme)}
    assert set(rps) == {0, 1, 2}
    assert same_piece(rps[0], ideal(R, "x1", "x2", "x3"), Ideal.unit(R))
    assert same_piece(rps[1], ideal(R, "x1", "x3"), ideal(R, "x2"))
    # V^2: the three loci of the determinant minus the x2-axis
    assert same_piece(rps[2], ideal(R, "x1*x3*(3*x1^2 - x2*x3)"), ideal(R, "x1", "x3"))


def test_rank_subdivision_trivial(identity, x_xy):
    assert ts.rank_subdivision(identity) == ()
    rps = ts.rank_subdivision(x_xy)
    assert [rp.rank for rp in rps] == [1]
    assert same_piece(rps[0].piece, ideal(x_xy.source, "x"), Ideal.unit(x_xy.source))
    # oracle: J = [[1, 0], [y, x]] has rank 1 along x = 0
    J = jacobian(x_xy)
    assert all(J.rank_at((0, y)) == 1 for y in range(-3, 4))


@pytest.mark.parametrize("name", FIXTURES)
def test_rank_pieces_cover_singular_locus(name):
    F = load_fixture(name)
    sing = ma.singular_locus(F)
    rps = ts.rank_subdivision(F)
    for rp in rps:
        assert variety_subset(rp.piece.closure, sing)
        assert rp.rank < F.n
    union = CSet([rp.piece for rp in rps], F.source)
    if sing.is_unit():
        assert not rps
    else:
        assert is_subset(CSet.closed(sing), union)


@pytest.mark.parametrize("name", FIXTURES)
def test_rank_labels_match_numeric_rank(name):
    F = load_fixture(name)
    J = jacobian(F)
    for rp in ts.rank_subdivision(F):
        pts = sample_points(rp.piece, 10, seed=1)
        assert pts
        for pt in pts:
            assert rank_of(J.evaluate(pt)) == rp.rank


# ---------------------------------------------------------------------------
# step 2
# ---------------------------------------------------------------------------

def test_smooth_subdivision_of_v2(pasferme):
    v2 = [rp for rp in ts.rank_subdivision(pasferme) if rp.rank == 2][0]
    pieces = ts.smooth_subdivision(v2)
    dims = sorted(p.dim() for p in pieces)
    top = [p for p in pieces if p.dim() == 2]
    assert len(top) == 3, dims
    R = pasferme.source
    closures = [ideal(R, "3*x1^2 - x2*x3"), ideal(R, "x1"), ideal(R, "x3")]
    for c in closures:
        assert any(same_variety(p.closure, c) for p in top)


def test_smooth_piece_is_a_fixpoint():
    p = normalize(Piece(ideal(RXY, "x^2 + y^2 - 1"), Ideal.unit(RXY)))
    out = ts.smooth_subdivision(p)
    assert len(out) == 1 and same_variety(out[0].closure, p.closure) and out[0].exception.is_unit()


def test_node_without_component_splitting():
    p = Piece(ideal(RXY, "x*y"), Ideal.unit(RXY))
    out = ts.smooth_subdivision(p, split_components=False)
    assert len(out) == 2
    curve = [q for q in out if q.dim() == 1][0]
    origin = [q for q in out if q.dim() == 0][0]
    assert same_variety(curve.closure, ideal(RXY, "x*y"))
    assert same_variety(origin.closure, ideal(RXY, "x", "y"))
    assert not curve.contains_point((0, 0)) and curve.contains_point((0, 2))


def test_node_with_component_splitting():
    p = Piece(ideal(RXY, "x*y"), Ideal.unit(RXY))
    parts = ts.refine_partition([p])
    assert sorted(sp.dim for sp in parts) == [0, 1, 1]


# ---------------------------------------------------------------------------
# step 3
# ---------------------------------------------------------------------------

def test_refine_partition_example(pasferme):
    table = ts.thom_partition(pasferme)
    assert [w.source.labels for w in table] == [(2, 1), (2, 2), (2, 3), (1, 1), (1, 2), (0, 1)]
    R = pasferme.source
    expected = [
        (ideal(R, "3*x1^2 - x2*x3"), ideal(R, "x2*x3")),
        (ideal(R, "x1"), ideal(R, "x2*x3")),
        (ideal(R, "x3"), ideal(R, "x1")),
        (ideal(R, "x1", "x3"), ideal(R, "x2")),
        (ideal(R, "x1", "x2"), ideal(R, "x3")),
        (ideal(R, "x1", "x2", "x3"), Ideal.unit(R)),
    ]
    for w, (cl, ex) in zip(table, expected):
        assert same_piece(w.source.piece, cl, ex), w.source.piece


def test_refine_partition_keeps_disjoint_input():
    a = normalize(Piece(ideal(RXY, "x"), ideal(RXY, "y")))
    b = normalize(Piece(ideal(RXY, "y - 1"), ideal(RXY, "x")))
    out = ts.refine_partition([a, b])
    assert len(out) == 2
    assert {ts.piece_key(sp.piece) for sp in out} == {ts.piece_key(a), ts.piece_key(b)}


def test_refine_partition_idempotent_on_copies():
    a = normalize(Piece(ideal(RXY, "x^2 - y"), ideal(RXY, "x")))
    out = ts.refine_partition([a, a])
    assert len(out) == 1 and same_piece(out[0].piece, a.closure, a.exception)


def _partition_property(F):
    pieces = [w.source.piece for w in ts.thom_partition(F)]
    for p, q in itertools.combinations(pieces, 2):
        assert is_empty(intersect(p, q))
    sing = ma.singular_locus(F)
    if sing.is_unit():
        assert not pieces
        return
    union_closure = intersect_all([p.closure for p in pieces], F.source)
    assert same_variety(union_closure, sing)
    assert is_subset(CSet.closed(sing), CSet(pieces, F.source))


@pytest.mark.parametrize("name", FIXTURES)
def test_partition_disjoint_with_same_union(name):
    _partition_property(load_fixture(name))


@pytest.mark.parametrize("name", FIXTURES)
def test_smoothness_certificate(name):
    F = load_fixture(name)
    for w in ts.thom_partition(F):
        p = w.source.piece
        sing = ts.singular_ideal(p.closure)
        # the singular locus of the closure misses the piece
        assert is_empty(Piece(p.closure + list(sing.generators), p.exception))


# ---------------------------------------------------------------------------
# steps 4 and 5
# ---------------------------------------------------------------------------

def test_restricted_ranks_example(pasferme):
    assert [ts.restricted_rank(w.source, pasferme) for w in ts.thom_partition(pasferme)] == [2, 1, 1, 0, 0, 0]


def test_thom_table_example(pasferme):
    A = pasferme.target_ctx
    table = ts.thom_partition(pasferme)
    assert [w.labels for w in table] == [(2, 2, 1), (2, 1, 2), (2, 1, 3), (1, 0, 1), (1, 0, 2), (0, 0, 1)]
    expected = [ideal(A, "27*a1^2 - 4*a2^3"), ideal(A, "a1", "a3"), ideal(A, "a2", "a3")] + \
        [ideal(A, "a1", "a2", "a3")] * 3
    for w, e in zip(table, expected):
        assert same_variety(w.image_closure, e)


def test_thom_table_trivial(identity, x_xy):
    assert ts.thom_partition(identity) == ()
    table = ts.thom_partition(x_xy)
    assert len(table) == 1 and table[0].k == 0
    assert same_variety(table[0].image_closure, ideal(x_xy.target_ctx, "a1", "a2"))


@pytest.mark.parametrize("name", FIXTURES)
def test_image_dimension_bound(name):
    F = load_fixture(name)
    closure, _ = ma.critical_values(F)
    for w in ts.thom_partition(F):
        assert w.k == dimension(w.image_closure)
        assert w.k <= w.source.dim
        assert w.k <= dimension(closure)


@pytest.mark.parametrize("name", FIXTURES)
def test_thom_closures_cover_critical_value_closure(name):
    F = load_fixture(name)
    closure, _ = ma.critical_values(F)
    table = ts.thom_partition(F)
    union = intersect_all([w.image_closure for w in table], F.target_ctx)
    assert same_variety(union, closure)


# ---------------------------------------------------------------------------
# S_F strata and the stratification
# ---------------------------------------------------------------------------

def test_sf_stratification_example(pasferme):
    A = pasferme.target_ctx
    strata = ts.sf_stratification(pasferme)
    assert len(strata) == 3
    expected = [(ideal(A, "a1"), ideal(A, "a3")), (ideal(A, "a3"), ideal(A, "a1")),
                (ideal(A, "a1", "a3"), Ideal.unit(A))]
    for sp, (cl, ex) in zip(strata, expected):
        assert same_piece(sp.piece, cl, ex)


def test_sf_stratification_trivial(identity, x_xy):
    assert ts.sf_stratification(identity) == ()
    strata = ts.sf_stratification(x_xy)
    assert len(strata) == 1 and same_piece(strata[0].piece, ideal(x_xy.target_ctx, "a1"), Ideal.unit(x_xy.target_ctx))


def test_stratify_trivial(identity, x_xy):
    assert ts.stratify_union(identity).strata == ()
    st = ts.stratify_union(x_xy)
    A = x_xy.target_ctx
    assert [s.dim for s in st.strata] == [1, 0]
    assert same_piece(st.strata[0].piece, ideal(A, "a1"), ideal(A, "a2"))
    assert same_piece(st.strata[1].piece, ideal(A, "a1", "a2"), Ideal.unit(A))


def _union_set(F):
    closure, k0 = ma.critical_values(F)
    sf = ma.asymptotic_set(F)
    sf_pieces = [] if sf.is_unit() else CSet.closed(sf).pieces
    return CSet(list(k0.pieces) + list(sf_pieces), F.target_ctx), closure, sf


@pytest.mark.parametrize("name", FIXTURES)
def test_stratification_soundness(name):
    F = load_fixture(name)
    st = ts.stratify_union(F)
    tctx = F.target_ctx
    target, closure, sf = _union_set(F)
    strata = CSet(st.pieces(), tctx)
    for p, q in itertools.combinations(st.pieces(), 2):
        assert is_empty(intersect(p, q))
    if st.strata:
        assert same_variety(cset_closure(strata), intersect_all([closure, sf], tctx))
    rng = random.Random(3)
    pts = []
    for p in st.pieces():
        pts += sample_points(p, 3, seed=rng.randint(0, 999))
    while len(pts) < 30:
        pts.append(tuple(QQ(rng.randint(-2, 2)) for _ in range(F.n)))
    for pt in pts:
        assert strata.contains_point(pt) == target.contains_point(pt), pt
    # strata dimensions drop along the filtration
    for level, I in zip(range(len(st.filtration) - 1, -1, -1), st.filtration):
        assert dimension(I) == max((s.dim for s in st.strata if s.dim <= level), default=-1)


@pytest.mark.parametrize("name", FIXTURES)
def test_frontier_on_corpus(name):
    F = load_fixture(name)
    rep = ts.frontier_check(ts.stratify_union(F))
    assert rep.ok, rep.violations


def test_frontier_fails_on_raw_critical_values(pasferme):
    rep = ts.frontier_check(ts.raw_k0_stratification(pasferme))
    assert not rep.ok and rep.violations


def test_frontier_single_closed_stratum():
    st = ts.stratification_of_pieces([Piece.closed(ideal(RXY, "x^2 + y^2 - 1"))], 2)
    assert ts.frontier_check(st).ok


def test_transversality_example(pasferme):
    entries = {(e.thom, e.stratum): e for e in ts.transversality_check(pasferme)}
    cusp_vs_plane = entries[("W2,2,1", "SF2_1")]
    assert cusp_vs_plane.meet_dim == 1 == 2 + 2 - 3 and cusp_vs_plane.status == "transverse"
    assert entries[("W2,1,2", "SF2_1")].status == "containment"
    assert entries[("W2,1,3", "SF2_1")].status == "disjoint"


def test_closedness_example(pasferme):
    rep = ts.verify_closedness(pasferme)
    A = pasferme.target_ctx
    assert rep.ok and rep.boundary_in_sf and rep.union_equal
    # limits of critical values that are not critical values: the cusp curve over a3 = 0
    # and the a3-axis, both without the origin
    assert len(rep.boundary) == 1
    assert same_piece(rep.boundary[0], ideal(A, "27*a1^2 - 4*a2^3", "a1*a3"), ideal(A, "a1*a2", "a3"))
    assert rep.boundary[0].contains_point((0, 0, 5)) and rep.boundary[0].contains_point((2, 3, 0))
    sf = ma.asymptotic_set(pasferme)
    assert all(variety_subset(p.closure, sf) for p in rep.boundary)


@pytest.mark.parametrize("name", FIXTURES)
def test_closedness_on_corpus(name):
    assert ts.verify_closedness(load_fixture(name)).ok


def test_closedness_trivial(identity, x_xy):
    assert ts.verify_closedness(identity).ok and not ts.verify_closedness(identity).boundary
    rep = ts.verify_closedness(x_xy)
    assert rep.ok and not rep.boundary


def test_conjecture_reports(pasferme, identity):
    rep = ts.check_conjecture(pasferme)
    assert rep.dominant and rep.pure and rep.dim == 2 and not rep.k0_pure
    rep = ts.check_conjecture(identity)
    assert rep.dominant and rep.pure and rep.dim == -1


def test_conjecture_remark49_is_computed():
    F = load_fixture("remark49")
    rep = ts.check_conjecture(F)
    # hand elimination: x1 = x3 + a3, x2 = x3 + a2, a1 = x3 (2 a3 - a2) + a3^2 has a solution
    # whenever a2 != 2 a3, so the image is dense
    assert rep.dominant == ma.is_dominant(F) is True
    assert isinstance(rep.pure, bool)


def test_depth_guard():
    p = Piece(ideal(RXY, "x^2 - y^3"), Ideal.unit(RXY))
    with pytest.raises(ts.SubdivisionDepthError):
        ts.smooth_subdivision(p, _limit=-1)
