"""Grid fibering reports, the I/J/K partition, structure detectors, plane
bound, and missing-top-difference fibering."""

from __future__ import annotations

import pytest

from cyclotile import (
    Inapplicable,
    Modulus,
    Multiset,
    TilingInstance,
    classify_unfibered_grid,
    detect_corner,
    detect_diagonal_boxes,
    detect_extended_corner,
    grid_fiber_report,
    ijk_partition,
    is_m_fibered_on_grid,
    missing_top_difference_fibering,
    plane_bound_check,
    remove_fibers,
    standard_complement,
)
from cyclotile.structure import GridView, _top_divisor_profile
from cyclotile.tiling import div_set


@pytest.fixture(scope="module")
def m900() -> Modulus:
    # smallest even 3-prime square modulus: 2^2 * 3^2 * 5^2
    return Modulus.of(900)


def grid_points(mod, coords_list):
    gv = GridView(mod, 0)
    return sorted(gv.from_coords(c) for c in coords_list)


class TestGridFibering:
    def test_empty_vacuous(self, m11025):
        a = Multiset.from_set(m11025, range(0, 11025, 105))
        rep = grid_fiber_report(a, 1)
        assert rep.empty

    def test_full_grid_all_directions(self, m11025):
        a = Multiset.from_set(m11025, range(0, 11025, 105))
        ok_all = [is_m_fibered_on_grid(a, 0, nu) for nu in range(3)]
        assert all(flag for flag, _ in ok_all)
        assert len(ok_all[0][1]) == 35  # p_j * p_k roots

    def test_fiber_plus_point_never_fibered(self, m11025):
        pts = list(m11025.fiber(0, 0)) + [105]
        a = Multiset.from_set(m11025, pts)
        for nu in range(3):
            flag, _ = is_m_fibered_on_grid(a, 0, nu)
            assert not flag


class TestIJK:
    def test_full_grid(self, flat11025):
        part = ijk_partition(flat11025)
        support = frozenset(flat11025.a.support())
        assert part.sets[0] == part.sets[1] == part.sets[2] == support
        assert part.covers_a and part.triple == support
        assert part.flag_f and not part.flag_f1 and not part.flag_f2 and not part.flag_f3

    def test_mixed_double_fiber_example(self, m11025):
        # F_i * [(F_j * a) u (F_k * a)]: a lies in all three sets, yet the
        # plane is not fibered in the j or k directions alone.
        mod = m11025
        a0 = 0
        fj = set(mod.fiber(a0, 1))
        fk = set(mod.fiber(a0, 2))
        base = fj | fk
        pts = sorted({(x + t * (mod.m // 3)) % mod.m for x in base for t in range(3)})
        aset = Multiset.from_set(mod, pts)
        bflat = standard_complement(mod, ({1}, {1}, {1}))
        t = TilingInstance(mod, aset, bflat)  # not a tiling; membership only
        table_t = t.box_table("a")
        for nu, p in ((0, 3), (1, 5), (2, 7)):
            idx = mod.divisor_index(mod.m // p)
            assert table_t[a0, idx] == p - 1  # a0 on a full fiber in all three
        flag_j, _ = is_m_fibered_on_grid(aset, 0, 1)
        flag_k, _ = is_m_fibered_on_grid(aset, 0, 2)
        assert not flag_j and not flag_k

    def test_no_fiber_direction_empty(self, m11025, flat11025):
        # remove one point per i-fiber: no complete i-fibers remain
        pts = [x for x in flat11025.a.elements() if x != 0]
        t = TilingInstance(m11025, Multiset.from_set(m11025, pts), flat11025.b)
        part = ijk_partition(t)
        assert 0 not in part.sets[0]

    def test_wrong_arity(self, m225):
        t = TilingInstance.from_sets(m225, [0], [0])
        with pytest.raises(ValueError):
            ijk_partition(t)


class TestDiagonalBoxes:
    def test_constructed(self, m11025):
        pts = grid_points(
            m11025,
            [(0, 0, 0)] + [(i, j, k) for i in (1, 2) for j in range(1, 5) for k in range(1, 7)],
        )
        f = detect_diagonal_boxes(Multiset.from_set(m11025, pts), 0)
        assert f.found
        assert f.witness["i"] == (0,) and f.witness["j"] == (0,) and f.witness["k"] == (0,)

    def test_full_grid_lexicographic(self, m11025, flat11025):
        f = detect_diagonal_boxes(flat11025.a, 0)
        assert (f.witness["i"], f.witness["j"], f.witness["k"]) == ((0,), (0,), (0,))

    def test_single_fiber_none(self, m11025):
        a = Multiset.from_set(m11025, m11025.fiber(0, 0))
        assert not detect_diagonal_boxes(a, 0).found

    def test_witness_revalidates(self, m11025):
        pts = grid_points(
            m11025,
            [(i, j, k) for i in (0, 1) for j in (0, 1, 2) for k in (0, 1)]
            + [(i, j, k) for i in (2,) for j in (3, 4) for k in (2, 3, 4, 5, 6)],
        )
        a = Multiset.from_set(m11025, pts)
        f = detect_diagonal_boxes(a, 0)
        assert f.found
        gv = GridView(m11025, 0)
        for i in f.witness["i"]:
            for j in f.witness["j"]:
                for k in f.witness["k"]:
                    assert gv.from_coords((i, j, k)) in a


class TestCorners:
    def _corner_set(self, mod):
        gv = GridView(mod, 0)
        a = gv.from_coords((0, 0, 0))
        ai = gv.from_coords((1, 0, 0))
        return Multiset.from_set(mod, sorted(set(mod.fiber(a, 1)) | set(mod.fiber(ai, 2))))

    def test_corner_found(self, m11025):
        a = self._corner_set(m11025)
        f = detect_corner(a, 0, 0)
        assert f.found and f.witness["dir_a"] == 1 and f.witness["dir_ai"] == 2

    def test_full_grid_no_corner(self, flat11025):
        assert not detect_corner(flat11025.a, 0, 0).found
        assert not detect_extended_corner(flat11025.a, 0, 0).found

    def test_extended_with_two_fibers(self, m11025):
        gv = GridView(m11025, 0)
        pts = set()
        for c in ((0, 0, 0), (0, 2, 3)):
            pts |= set(m11025.fiber(gv.from_coords(c), 1))
        for c in ((1, 0, 0), (1, 4, 0)):
            pts |= set(m11025.fiber(gv.from_coords(c), 2))
        a = Multiset.from_set(m11025, sorted(pts))
        assert detect_extended_corner(a, 0, 0).found
        assert not detect_corner(a, 0, 0).found

    def test_plain_corner_is_extended(self, m11025):
        a = self._corner_set(m11025)
        assert detect_extended_corner(a, 0, 0).found


class TestRemoveFibers:
    def test_single_fiber_vanishes(self, m11025):
        a = Multiset.from_set(m11025, m11025.fiber(0, 1))
        residual, removed = remove_fibers(a, 0)
        assert len(residual) == 0 and removed == ((0, 1),)

    def test_full_grid_vanishes(self, flat11025):
        residual, removed = remove_fibers(flat11025.a, 0)
        assert len(residual) == 0
        assert len(removed) == 35  # 105 points / 3 per i-fiber, removed in i first

    def test_pure_boxes_stay(self, m11025):
        pts = grid_points(
            m11025,
            [(0, 0, 0)] + [(i, j, k) for i in (1, 2) for j in range(1, 5) for k in range(1, 7)],
        )
        a = Multiset.from_set(m11025, pts)
        residual, removed = remove_fibers(a, 0)
        assert removed == () and len(residual) == len(pts)


class TestClassifyUnfiberedGrid:
    def test_full_plane_profile(self, m11025):
        # boxes with |I^c| = |J| = |K| = 1, |K^c| > 1: misses exactly the two
        # pair divisors through direction i
        gv = GridView(m11025, 0)
        pts = [(i, 0, 0) for i in (0, 1)] + [(2, j, k) for j in range(1, 5) for k in range(1, 7)]
        a = Multiset.from_set(m11025, grid_points(m11025, pts))
        # the witness grid restriction must itself divide Phi_M, so embed it
        # in a set whose other grids are full
        rest = [x for x in range(1, 105)]
        full_elsewhere = [x + 105 * t for x in rest for t in range(105)]
        big = Multiset.from_set(m11025, sorted(set(a.elements()) | set(full_elsewhere)))
        present, missing = _top_divisor_profile(big, 0)
        f = classify_unfibered_grid(big, 0)
        assert f.kind == "full-plane"
        exps = [m11025.divisor_exponents(d) for d in missing]
        assert len(missing) == 2
        assert f.direction == 0

    def test_corner_profile(self, m11025):
        gv = GridView(m11025, 0)
        pts = set(m11025.fiber(gv.from_coords((0, 0, 0)), 0))
        pts |= set(m11025.fiber(gv.from_coords((0, 1, 1)), 1))
        a0 = sorted(pts)
        rest = [x for x in range(1, 105)]
        full_elsewhere = [x + 105 * t for x in rest for t in range(105)]
        big = Multiset.from_set(m11025, sorted(set(a0) | set(full_elsewhere)))
        f = classify_unfibered_grid(big, 0)
        assert f.kind == "corner"
        assert f.direction == 2  # fibers in i and j directions -> corner in k

    def test_diagonal_boxes_full_profile(self, m11025):
        # two fat boxes leave all top divisors present
        pts = [(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1, 2)]
        pts += [(i, j, k) for i in (2,) for j in (2, 3, 4) for k in (3, 4, 5, 6)]
        a0 = grid_points(m11025, pts)
        rest = [x for x in range(1, 105)]
        full_elsewhere = [x + 105 * t for x in rest for t in range(105)]
        big = Multiset.from_set(m11025, sorted(set(a0) | set(full_elsewhere)))
        f = classify_unfibered_grid(big, 0)
        assert f.kind == "diagonal-boxes"

    def test_almost_corner(self, m11025):
        # boxes with |I^c| = |J| = 1 and both K parts proper, exactly covering
        pts = [(i, 0, k) for i in (0, 1) for k in (0, 1, 2)]
        pts += [(2, j, k) for j in (1, 2, 3, 4) for k in (3, 4, 5, 6)]
        a0 = grid_points(m11025, pts)
        rest = [x for x in range(1, 105)]
        full_elsewhere = [x + 105 * t for x in rest for t in range(105)]
        big = Multiset.from_set(m11025, sorted(set(a0) | set(full_elsewhere)))
        f = classify_unfibered_grid(big, 0)
        assert f.kind == "almost-corner"
        assert f.direction == 2

    def test_even_corner(self, m900):
        gv = GridView(m900, 0)
        pts = set(m900.fiber(gv.from_coords((0, 0, 0)), 0))  # 2-fiber
        pts |= set(m900.fiber(gv.from_coords((0, 1, 1)), 1))  # 3-fiber
        a0 = sorted(pts)
        rest = [x for x in range(1, 30)]
        full_elsewhere = [x + 30 * t for x in rest for t in range(30)]
        big = Multiset.from_set(m900, sorted(set(a0) | set(full_elsewhere)))
        f = classify_unfibered_grid(big, 0)
        assert f.kind == "even-corner"
        assert f.direction == 2

    def test_even_diagonal_boxes(self, m900):
        # p_i = 2: boxes with no 2-direction top difference
        pts = [(0, j, k) for j in (0, 1) for k in (0, 1)]
        pts += [(1, j, k) for j in (2,) for k in (2, 3, 4)]
        a0 = grid_points(m900, pts)
        rest = [x for x in range(1, 30)]
        full_elsewhere = [x + 30 * t for x in rest for t in range(30)]
        big = Multiset.from_set(m900, sorted(set(a0) | set(full_elsewhere)))
        f = classify_unfibered_grid(big, 0)
        assert f.kind == "even-diagonal-boxes"

    def test_fibered_grid_rejected(self, flat11025):
        with pytest.raises(ValueError):
            classify_unfibered_grid(flat11025.a, 0)


class TestPlaneBound:
    def test_flat225(self, flat225):
        assert plane_bound_check(flat225)

    def test_flat11025(self, flat11025):
        assert plane_bound_check(flat11025)

    def test_z36_tilings(self, m36):
        t = TilingInstance.from_sets(m36, [0, 1, 2, 3, 4, 5], [0, 6, 12, 18, 24, 30])
        assert plane_bound_check(t)

    def test_violation_detected(self, m225):
        # six points in one mod-9 plane exceed the bound 5 for |A| = 15
        pts = [t * 9 for t in range(6)] + [1, 2, 3, 4, 5, 6, 7, 8, 10]
        t = TilingInstance.from_sets(m225, pts, [0])
        assert not plane_bound_check(t, require_tiling=False)

    def test_unverified_rejected(self, m4):
        t = TilingInstance.from_sets(m4, [0, 1], [0, 1])
        with pytest.raises(ValueError):
            plane_bound_check(t)


class TestMissingTopDifference:
    def test_constructed_fibered(self, m11025):
        # A = A' * F_k with A' avoiding i- and j- top differences
        mod = m11025
        roots = [0, 1 + 105 * 3, 2 + 105 * 7]
        pts = sorted({(r + t * (mod.m // 7)) % mod.m for r in roots for t in range(7)})
        a = Multiset.from_set(mod, pts)
        top_i = mod.m // 3
        assert top_i not in div_set(a).members
        rep = missing_top_difference_fibering(a, mod.m, 0)
        assert rep.applicable and rep.holds
        assert all(d == 2 for _, d in rep.per_grid)

    def test_even_prime_inapplicable(self, m900):
        a = Multiset.from_set(m900, m900.fiber(0, 2))
        with pytest.raises(Inapplicable):
            missing_top_difference_fibering(a, 900, 0)  # direction of p=2

    def test_two_missing_single_direction(self, m11025):
        mod = m11025
        pts = sorted({t * (mod.m // 7) for t in range(7)}
                     | {(1 + t * (mod.m // 7)) % mod.m for t in range(7)})
        a = Multiset.from_set(mod, pts)
        rep = missing_top_difference_fibering(a, mod.m, 0)
        assert rep.holds and rep.single_direction == 2

    def test_nonuniform_weights_inapplicable(self, m11025):
        a = Multiset.from_pairs(m11025, [(0, 1), (3675, 2), (7350, 1)])
        with pytest.raises(Inapplicable):
            missing_top_difference_fibering(a, 11025, 0)
