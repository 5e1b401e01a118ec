from __future__ import annotations

import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from stratkit.csets import (
    CSet, Piece, closure, difference, dimension, intersect, is_empty, is_pure_dimensional,
    is_subset, normalize, piece_subset, sample_points, union,
)
from stratkit.ideals import Ideal, intersect_all, ideal_containment, same_variety
from stratkit.mapanalysis import asymptotic_set, critical_values
from stratkit.polycore import QQ, VariableContext
from stratkit.thomstrat import stratify_union

RXY = VariableContext(("x", "y"))
R3 = VariableContext(("x1", "x2", "x3"))


def ideal(ctx, *gens):
    return Ideal.from_strings(ctx, list(gens))


def piece(ctx, closure_gens, except_gens=("1",)):
    return Piece(ideal(ctx, *closure_gens), ideal(ctx, *except_gens))


# ---------------------------------------------------------------------------
# normalize and emptiness
# ---------------------------------------------------------------------------

def test_normalize_drops_removed_component():
    p = normalize(piece(RXY, ["x*y"], ["x"]))
    assert p.closure.generators == (RXY("y"),)
    assert p.exception.generators == (RXY("x"),)


def test_normalize_closed_piece():
    p = normalize(piece(RXY, ["x"]))
    assert p.closure.generators == (RXY("x"),)
    assert p.exception.is_unit()


def test_normalize_keeps_saturated_closure():
    p = normalize(piece(R3, ["3*x1^2 - x2*x3"], ["x3"]))
    assert same_variety(p.closure, ideal(R3, "3*x1^2 - x2*x3"))
    assert ideal_containment(p.closure, ideal(R3, "3*x1^2 - x2*x3"), "exact")


@pytest.mark.parametrize("cl, ex, empty", [
    (["x"], ["x"], True),
    (["x"], ["y"], False),
    (["1"], ["x"], True),
    (["1"], ["1"], True),
    (["x^2"], ["x"], True),
])
def test_is_empty(cl, ex, empty):
    assert is_empty(piece(RXY, cl, ex)) is empty


# ---------------------------------------------------------------------------
# K0 of the cubic example
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def k0(pasferme):
    return critical_values(pasferme)


def test_closure_of_k0(k0, pasferme):
    closure_ideal, exact = k0
    A = pasferme.target_ctx
    expected = intersect_all([ideal(A, "27*a1^2 - 4*a2^3"), ideal(A, "a2", "a3"), ideal(A, "a1", "a3")], A)
    assert same_variety(closure(exact), expected)
    assert same_variety(closure_ideal, expected)


def test_closure_trivial_cases():
    I = ideal(RXY, "x*y - 1")
    assert same_variety(closure(CSet.closed(I)), I)
    assert closure(CSet.empty(RXY)).is_unit()


@pytest.mark.parametrize("pt, inside", [
    ((0, 0, 0), True),
    ((0, 0, 1), False),
    ((-2, 3, 1), True),
    ((0, 5, 0), True),
    ((7, 0, 0), True),
])
def test_k0_membership(k0, pt, inside):
    assert k0[1].contains_point(pt) is inside


def test_k0_excludes_cusp_curve_at_a3_zero(k0):
    # 27 a1^2 = 4 a2^3 with a3 = 0 and a1 != 0: (2 t^3, 3 t^2, 0)
    for t in (1, 2, QQ(1, 3), -5):
        t = QQ(t)
        assert not k0[1].contains_point((2 * t ** 3, 3 * t ** 2, 0))


def test_contains_point_arity(k0):
    with pytest.raises(ValueError):
        k0[1].contains_point((0, 0))


def test_k0_dimension_and_purity(k0):
    rep = is_pure_dimensional(k0[1])
    assert dimension(k0[1]) == 2
    assert rep.dim == 2 and not rep.pure and rep.stray_pieces


def test_k0_union_sf_is_pure(pasferme):
    st_ = stratify_union(pasferme)
    rep = is_pure_dimensional(CSet(st_.pieces(), pasferme.target_ctx))
    assert rep.pure and rep.dim == 2
    # axes absorbed by the planes: 0a1 inside {a3 = 0}, 0a2 inside {a1 = 0}
    A = pasferme.target_ctx
    sf = asymptotic_set(pasferme)
    assert ideal_containment(ideal(A, "a2", "a3"), ideal(A, "a3"), "up-to-radical")
    assert ideal_containment(ideal(A, "a1", "a3"), ideal(A, "a1"), "up-to-radical")
    assert ideal_containment(ideal(A, "a1", "a3"), sf, "up-to-radical")


def test_empty_set_dimension():
    rep = is_pure_dimensional(CSet.empty(RXY))
    assert dimension(CSet.empty(RXY)) == -1 and rep.pure


# ---------------------------------------------------------------------------
# boolean operations
# ---------------------------------------------------------------------------

def test_plane_minus_axis_membership_table():
    plane = piece(R3, ["x1"])
    axis = ideal(R3, "x1", "x2")
    d = difference(plane, axis)
    table = {(0, 1, 1): True, (0, 0, 1): False, (0, 1, 0): True, (0, 0, 0): False,
             (1, 1, 1): False, (0, -3, 2): True}
    for pt, inside in table.items():
        assert d.contains_point(pt) is inside, pt


def test_difference_by_empty_set():
    a = piece(RXY, ["x^2 - y"], ["x"])
    d = difference(a, Ideal.unit(RXY))
    assert len(d.pieces) == 1
    assert piece_subset(d.pieces[0], a) and piece_subset(a, d.pieces[0])


def test_intersection_idempotent():
    a = piece(RXY, ["x^2 - y"], ["x"])
    aa = intersect(a, a)
    assert piece_subset(aa, a) and piece_subset(a, aa)
    for pt in [(1, 1), (0, 0), (2, 4), (3, 1)]:
        assert aa.contains_point(pt) == a.contains_point(pt)


def test_union_refined_is_disjoint():
    a = CSet([piece(RXY, ["x"])])
    b = CSet([piece(RXY, ["y"])])
    u = union(a, b, refine=True)
    assert u.disjoint
    for p, q in itertools.combinations(u.pieces, 2):
        assert is_empty(intersect(p, q))
    for pt in [(0, 0), (0, 3), (2, 0), (1, 1)]:
        assert u.contains_point(pt) == (a.contains_point(pt) or b.contains_point(pt))


def test_json_shape(k0):
    data = json.loads(json.dumps(k0[1].to_json()))
    assert all(set(d) == {"closure", "except", "dim"} for d in data)


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

lines = st.sampled_from(["x", "y", "x - y", "x + y - 1", "x - 2", "y + 1", "x*y - 1", "x^2 - y"])


@st.composite
def pieces(draw):
    cl = draw(st.lists(lines, min_size=1, max_size=2))
    ex = draw(st.lists(lines, min_size=1, max_size=2))
    # closure is a product of curves, so points on it are easy to list
    prod = "*".join(f"({c})" for c in cl)
    return piece(RXY, [prod], ex)


GRID = [(QQ(a), QQ(b)) for a in range(-2, 3) for b in range(-2, 3)]


@settings(max_examples=25, deadline=None)
@given(pieces())
def test_normalize_preserves_membership(p):
    q = normalize(p)
    for pt in GRID:
        assert p.contains_point(pt) == q.contains_point(pt)


@settings(max_examples=25, deadline=None)
@given(pieces())
def test_difference_with_own_closure_is_empty(p):
    a = normalize(p)
    assert all(is_empty(q) for q in difference(a, closure(CSet([a]))).pieces)


@settings(max_examples=15, deadline=None)
@given(pieces(), pieces())
def test_closure_monotone_and_union_dimension(p, q):
    a = CSet([p])
    b = CSet([p, q])
    assert is_subset(a, b)
    assert ideal_containment(closure(a), closure(b), "exact")
    assert dimension(union(a, CSet([q]))) == max(dimension(a), dimension(CSet([q])))


@settings(max_examples=20, deadline=None)
@given(pieces())
def test_membership_matches_direct_substitution(p):
    c = CSet([p]).pruned()
    for pt in GRID:
        direct = any(all(g.evaluate(pt) == 0 for g in q.closure.generators)
                     and any(e.evaluate(pt) != 0 for e in q.exception.generators) for q in c.pieces)
        assert c.contains_point(pt) == direct


def test_sample_points_lie_on_piece():
    p = piece(R3, ["3*x1^2 - x2*x3"], ["x3"])
    pts = sample_points(p, count=6, seed=3)
    assert len(pts) == 6
    for pt in pts:
        assert p.contains_point(pt)
