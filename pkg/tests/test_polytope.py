"""Lattice polytope algebra: hulls, faces, duals, summand reconstruction."""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from sigma_polytope.errors import (
    CoverageGap,
    EmptyOperand,
    InconsistentAtlas,
    NotASummandDecomposition,
    UnsupportedDimension,
)
from sigma_polytope.polytope import (
    Chart,
    IntegralPolytope,
    MarkedPolytope,
    PolytopeDiff,
    combine_atlas,
    decompose_face,
    dual_key,
    face_min,
    hull,
    lattice_points,
    minkowski_sum,
    nonvanishing_region,
    sample_directions,
    seminorm,
    single_polytope_reduce,
    vertex_duals,
    whole_polytope_duals,
)


def seg(a, b):
    return hull([a, b])


def brute_force_summand(diff):
    """Exhaustive oracle: search sub-point-sets of a lattice box for R with
    R + minus = plus. Only usable on tiny instances."""
    plus, minus = diff.plus, diff.minus
    base_p = min(plus.vertices)
    base_m = min(minus.vertices)
    shift = tuple(a - b for a, b in zip(base_p, base_m))
    box = lattice_points(plus.translate(tuple(-x for x in base_p)))
    pts = [tuple(a + b for a, b in zip(p, shift)) for p in box]
    for size in range(1, len(pts) + 1):
        for subset in combinations(pts, size):
            r = hull(list(subset))
            if minkowski_sum(r, minus) == plus:
                return r
    return None


class TestHull:
    def test_collinear_middle_removed(self):
        assert hull([(0, 0), (1, 0), (2, 0)]).vertices == ((0, 0), (2, 0))

    def test_empty(self):
        p = hull([], dim=2)
        assert p.is_empty

    def test_unit_square_with_duplicates(self):
        p = hull([(0, 0), (1, 0), (0, 1), (1, 1), (1, 0)])
        assert p.vertices == ((0, 0), (0, 1), (1, 0), (1, 1))

    def test_interior_points_dropped_3d(self):
        p = hull([(0, 0, 0), (2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (0, 0, 1)])
        assert (1, 1, 0) not in p.vertices
        assert (0, 0, 1) not in p.vertices
        assert len(p.vertices) == 4

    def test_dimension_cap(self):
        with pytest.raises(UnsupportedDimension):
            hull([(0,) * 5])


class TestMinkowski:
    def test_segments_make_square(self):
        s = minkowski_sum(seg((0, 0), (1, 0)), seg((0, 0), (0, 1)))
        assert s.vertices == ((0, 0), (0, 1), (1, 0), (1, 1))

    def test_point_translation(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        p = minkowski_sum(tri, hull([(2, 3)]))
        assert p == tri.translate((2, 3))

    def test_triangle_plus_diagonal_vs_allpairs_oracle(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        diag = seg((0, 0), (1, 1))
        s = minkowski_sum(tri, diag)
        oracle = hull([tuple(a + b for a, b in zip(u, v))
                       for u in [(0, 0), (1, 0), (0, 1)]
                       for v in [(0, 0), (1, 1)]])
        assert s == oracle
        assert len(s.vertices) == 5

    def test_empty_operand(self):
        with pytest.raises(EmptyOperand):
            minkowski_sum(hull([], dim=2), seg((0, 0), (1, 0)))

    def test_cancellation_property(self):
        rng = random.Random(12)
        for _ in range(20):
            def rnd():
                pts = [(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 5))]
                return hull(pts)
            p, q, x = rnd(), rnd(), rnd()
            if minkowski_sum(p, x) == minkowski_sum(q, x):
                assert p == q


class TestFaces:
    def test_square_edge(self):
        square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        f = face_min(square, (1, 0))
        assert f.vertices == ((0, 0), (0, 1))

    def test_square_vertex(self):
        square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert face_min(square, (1, 1)).vertices == ((0, 0),)

    def test_zero_character_gives_whole(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        assert face_min(tri, (0, 0)).vertices == tri.vertices

    def test_face_sum_compatibility(self):
        rng = random.Random(13)
        for _ in range(30):
            p = hull([(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 5))])
            q = hull([(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 5))])
            phi = (Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)))
            lhs = face_min(minkowski_sum(p, q), phi).as_polytope()
            rhs = minkowski_sum(face_min(p, phi).as_polytope(), face_min(q, phi).as_polytope())
            assert lhs == rhs


class TestDuals:
    def test_unit_square_corner(self):
        square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        duals = {d.face.vertices[0]: d for d in vertex_duals(square)}
        origin_cone = duals[(0, 0)]
        assert origin_cone.contains((Fraction(1), Fraction(2)))
        assert not origin_cone.contains((Fraction(-1), Fraction(2)))
        assert not origin_cone.contains((Fraction(0), Fraction(1)))  # boundary
        assert set(origin_cone.rays) == {(1, 0), (0, 1)}

    def test_codimension_one_two_duals(self):
        diag = seg((0, 0), (1, 1))
        duals = whole_polytope_duals(diag)
        assert len(duals) == 2
        rays = {d.rays[0] for d in duals}
        assert rays == {(1, -1), (-1, 1)}
        assert duals[0].contains(duals[0].rays[0])
        assert not duals[0].contains(duals[1].rays[0])

    def test_triangle_vertex_cone_generators(self):
        # oracle: argmin sampling across the grid confirms both the membership
        # test and the extreme rays {phi1 <= 0, phi1 <= phi2}
        tri = hull([(0, 0), (2, 0), (0, 2)])
        duals = {d.face.vertices[0]: d for d in vertex_duals(tri)}
        cone = duals[(2, 0)]
        assert set(cone.rays) == {(0, 1), (-1, -1)}
        for phi in sample_directions(2, 4):
            inside = cone.contains(phi)
            selected = face_min(tri, phi)
            assert inside == (selected.vertices == ((2, 0),))
        # the interior of the cone contains the directions (-1,0) and (-1,1)
        assert cone.contains((-1, 0)) and cone.contains((-1, 1))

    def test_vertex_duals_disjoint_and_dense(self):
        tri = hull([(0, 0), (2, 1), (1, 3)])
        duals = vertex_duals(tri)
        hits = 0
        for phi in sample_directions(2, 5):
            inside = [d for d in duals if d.contains(phi)]
            assert len(inside) <= 1
            hits += bool(inside)
        assert hits > 0.8 * len(sample_directions(2, 5))

    def test_constant_face_within_dual(self):
        rng = random.Random(14)
        for _ in range(10):
            p = hull([(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(4)])
            for d in vertex_duals(p):
                phi = d.interior_point()
                if phi is None:
                    continue
                assert face_min(p, phi).vertices == d.face.vertices


class TestDecomposeFace:
    def test_square_split(self):
        sh = seg((0, 0), (1, 0))
        sv = seg((0, 0), (0, 1))
        square = minkowski_sum(sh, sv)
        left_edge = face_min(square, (1, 0))
        parts = decompose_face(left_edge, [sh, sv])
        assert parts[0].vertices == ((0, 0),)
        assert parts[1].vertices == ((0, 0), (0, 1))

    def test_vertex_decomposes_into_vertices(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        diag = seg((0, 0), (1, 1))
        total = minkowski_sum(tri, diag)
        corner = face_min(total, (1, 2))
        parts = decompose_face(corner, [tri, diag])
        assert all(p.is_point() for p in parts)

    def test_not_a_decomposition(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        with pytest.raises(NotASummandDecomposition):
            decompose_face(face_min(tri, (1, 0)), [tri, tri])

    def test_perturbed_witness_agreement(self):
        rng = random.Random(15)
        for _ in range(15):
            p = hull([(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(3)])
            q = hull([(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(3)])
            total = minkowski_sum(p, q)
            phi = (Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4)))
            if phi == (0, 0):
                continue
            face = face_min(total, phi)
            parts = decompose_face(face, [p, q])
            # perturb inside the same dual: scaled copies select the same face
            for scale in (Fraction(1, 3), Fraction(7, 2), Fraction(5)):
                phi2 = tuple(scale * x for x in phi)
                parts2 = decompose_face(face_min(total, phi2), [p, q])
                assert parts == parts2


class TestSinglePolytopeReduce:
    def test_square_minus_horizontal(self):
        square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        d = PolytopeDiff(square, seg((0, 0), (1, 0)))
        r = single_polytope_reduce(d)
        assert r == seg((0, 0), (0, 1))
        assert brute_force_summand(d) == r

    def test_p_minus_p(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        r = single_polytope_reduce(PolytopeDiff(tri, tri))
        assert r is not None and r.is_point()

    def test_triangle_minus_segment_not_single(self):
        tri = hull([(0, 0), (1, 0), (0, 1)])
        d = PolytopeDiff(tri, seg((0, 0), (1, 0)))
        assert single_polytope_reduce(d) is None
        assert brute_force_summand(d) is None

    def test_round_trip_random(self):
        rng = random.Random(16)
        for _ in range(25):
            r = hull([(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(rng.randint(1, 4))])
            q = hull([(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(rng.randint(1, 4))])
            total = minkowski_sum(r, q)
            got = single_polytope_reduce(PolytopeDiff(total, q))
            assert got == r

    def test_empty_operand(self):
        with pytest.raises(EmptyOperand):
            single_polytope_reduce(PolytopeDiff(hull([], dim=2), hull([(0, 0)])))


class TestSeminorm:
    def test_segment_spread(self):
        assert seminorm(seg((-2,), (0,)), (1,)) == 2

    def test_square_diagonal(self):
        square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert seminorm(square, (1, 1)) == 2

    def test_singleton(self):
        assert seminorm(hull([(3, 5)]), (1, 1)) == 0

    def test_triangle_inequality_and_homogeneity(self):
        rng = random.Random(17)
        p = hull([(0, 0), (2, 1), (1, 3), (-1, 2)])
        for _ in range(20):
            phi = (Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4)))
            psi = (Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4)))
            both = tuple(a + b for a, b in zip(phi, psi))
            assert seminorm(p, both) <= seminorm(p, phi) + seminorm(p, psi)
            assert seminorm(p, tuple(3 * x for x in phi)) == 3 * seminorm(p, phi)

    def test_point_difference_invariance(self):
        p = hull([(0, 0), (2, 0), (0, 2)])
        d = PolytopeDiff(p, hull([(1, 1)]))
        assert seminorm(d, (1, 0)) == seminorm(p, (1, 0))


class TestGrothendieck:
    def test_diff_equality_by_cancellation(self):
        p = hull([(0, 0), (1, 0)])
        q = hull([(0, 0), (0, 1)])
        d1 = PolytopeDiff(minkowski_sum(p, q), q)
        d2 = PolytopeDiff(p, hull([(0, 0)]))
        assert d1 == d2

    def test_pt_equality_ignores_translation(self):
        p = hull([(0, 0), (1, 0)])
        d1 = PolytopeDiff(p, hull([(0, 0)]))
        d2 = PolytopeDiff(p.translate((5, -3)), hull([(0, 0)]))
        assert d1.pt_equal(d2)
        assert not d1 == d2


class TestLatticePoints:
    def test_triangle(self):
        tri = hull([(0, 0), (2, 0), (0, 2)])
        pts = set(lattice_points(tri))
        assert pts == {(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)}


class TestAtlas:
    def test_single_chart(self):
        p = seg((0,), (1,))
        marked = MarkedPolytope(p, {(0,): True, (1,): False})
        chart = Chart(lambda phi: True, marked, label="everything")
        out, diag = combine_atlas([chart])
        assert out.polytope == p
        assert out.vertex_marks == {(0,): True, (1,): False}

    def test_two_halfline_charts(self):
        p = seg((0,), (1,))
        # chart on phi > 0 marks the vertex 0; chart on phi < 0 marks vertex 1;
        # overlap is empty so any pair of markings is consistent
        m1 = MarkedPolytope(p, {(0,): True, (1,): False})
        m2 = MarkedPolytope(p, {(0,): True, (1,): True})
        c1 = Chart(lambda phi: phi[0] > 0, m1, label="positive")
        c2 = Chart(lambda phi: phi[0] < 0, m2, label="negative")
        out, _ = combine_atlas([c1, c2])
        # the sum polytope is p + p; marking induced per side
        assert out.polytope == seg((0,), (2,))
        assert out.vertex_marks == {(0,): True, (2,): True}

    def test_coverage_gap(self):
        p = seg((0,), (1,))
        m = MarkedPolytope(p, {(0,): True, (1,): False})
        c = Chart(lambda phi: phi[0] > 0, m)
        with pytest.raises(CoverageGap):
            combine_atlas([c])

    def test_inconsistent_overlap(self):
        p = seg((0,), (1,))
        m1 = MarkedPolytope(p, {(0,): True, (1,): False})
        m2 = MarkedPolytope(p, {(0,): False, (1,): False})
        c1 = Chart(lambda phi: True, m1, label="a")
        c2 = Chart(lambda phi: phi[0] > 0, m2, label="b")
        with pytest.raises(InconsistentAtlas):
            combine_atlas([c1, c2])

    def test_anchored_mode(self):
        # anchor P, chart polytope P + 1 * segment
        anchor = seg((0,), (2,))
        segment = seg((0,), (1,))
        chart_poly = minkowski_sum(anchor, segment)
        marked = MarkedPolytope(chart_poly, {(0,): True, (3,): True})
        chart = Chart(lambda phi: True, marked, label="t")
        out, diag = combine_atlas(
            [chart], mode="anchored", anchor=anchor, offsets=[1], segments=[segment]
        )
        assert out.polytope == anchor
        assert out.vertex_marks == {(0,): True, (2,): True}
        assert diag["charts"][0]["anchor_consistent"]

    def test_dual_key_distinguishes_components(self):
        pt = hull([(3,)])
        assert dual_key(pt, (Fraction(1),)) != dual_key(pt, (Fraction(-1),))
        square = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert dual_key(square, (Fraction(1), Fraction(1)))[0] == ((0, 0),)
