"""Grid sampling, band extraction, flat bands, gaps, measure, paths."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fluxband as fb
from fluxband import OneForm
from fluxband.spectrum import BandStructure, TorusGrid, default_grid, merge_intervals

from conftest import random_graph, random_one_form


class TestTorusGrid:
    def test_contains_zero_and_pi_corner(self):
        grid = TorusGrid(2, 33)
        pts = grid.points()
        assert any(np.all(p == 0.0) for p in pts)
        assert any(np.allclose(p, math.pi) for p in pts)
        assert len(pts) == 33**2

    def test_even_points_rejected(self):
        with pytest.raises(ValueError):
            TorusGrid(1, 8)

    def test_refinement_is_nested(self):
        coarse = set(float(x) for x in TorusGrid(1, 9).axis())
        fine = set(float(x) for x in TorusGrid(1, 17).axis())
        assert coarse <= fine

    def test_default_grid_warns_high_dimension(self):
        with pytest.warns(UserWarning):
            grid = default_grid(3)
        assert grid.points_per_dim == 9
        assert default_grid(2).points_per_dim == 33

    def test_mirror_permutation(self):
        grid = TorusGrid(2, 5)
        pts = grid.points()
        perm = grid.mirror_permutation()
        assert np.allclose(pts[perm], -pts)


class TestSweep:
    def test_square_lattice_single_band(self):
        bs = fb.sweep(fb.square_lattice(2).graph)
        assert bs.bands == pytest.approx(np.array([[0.0, 8.0]]), abs=1e-12)
        measure, gaps = fb.measure_and_gaps(bs)
        assert measure == pytest.approx(8.0, abs=1e-12)
        assert gaps == []

    def test_star_bands_match_oracle(self):
        named = fb.star_lattice(2, 3)
        bs = fb.sweep(named.graph)
        expected = np.array(named.oracle.bands)
        dispersing = np.array([bs.bands[0], bs.bands[2]])
        assert dispersing == pytest.approx(expected, abs=1e-9)

    def test_eigenvalue_window(self, rng):
        for _ in range(3):
            g = random_graph(rng, potentials=True)
            bs = fb.sweep(g, grid=TorusGrid(g.dimension, 9))
            q = g.potentials()
            lo = q.min() - 1e-10
            hi = q.max() + 2.0 * g.kappa_plus + 1e-10
            assert bs.values.min() >= lo
            assert bs.values.max() <= hi

    def test_measure_subadditive(self, rng):
        g = random_graph(rng)
        bs = fb.sweep(g, alpha=random_one_form(rng, g), grid=TorusGrid(2, 9))
        widths = (bs.bands[:, 1] - bs.bands[:, 0]).sum()
        assert bs.measure <= widths + 1e-12

    def test_refinement_never_shrinks_bands(self, rng):
        g = fb.hexagonal().graph
        alpha = random_one_form(rng, g)
        coarse = fb.sweep(g, alpha=alpha, grid=TorusGrid(2, 9))
        fine = fb.sweep(g, alpha=alpha, grid=TorusGrid(2, 17))
        assert np.all(fine.bands[:, 0] <= coarse.bands[:, 0] + 1e-14)
        assert np.all(fine.bands[:, 1] >= coarse.bands[:, 1] - 1e-14)

    def test_alpha_independence_beta_d(self, rng):
        for named in (fb.hexagonal(), fb.square_lattice(2)):
            base = fb.sweep(named.graph, grid=TorusGrid(2, 9))
            for _ in range(3):
                alpha = random_one_form(rng, named.graph)
                bs = fb.sweep(named.graph, alpha=alpha, grid=TorusGrid(2, 9))
                assert np.abs(bs.values - base.values).max() < 1e-10

    def test_negated_alpha_band_structure(self, rng):
        g = fb.harper(1, 2).graph
        alpha = g.one_form()
        neg = OneForm.from_values([-v for v in alpha.values])
        a = fb.sweep(g, alpha=alpha, grid=TorusGrid(2, 9))
        b = fb.sweep(g, alpha=neg, grid=TorusGrid(2, 9))
        assert np.abs(a.bands - b.bands).max() < 1e-10

    def test_unreduced_sweep_same_bands_when_grid_exact(self):
        g = fb.star_lattice(2, 3).graph
        a = fb.sweep(g, grid=TorusGrid(2, 9))
        b = fb.sweep(g, grid=TorusGrid(2, 9), reduce_fluxes=False)
        assert np.abs(a.values - b.values).max() == 0.0  # zero potential either way

    def test_refine_edges_flag(self, rng):
        g = fb.hexagonal().graph
        alpha = random_one_form(rng, g)
        plain = fb.sweep(g, alpha=alpha, grid=TorusGrid(2, 9))
        refined = fb.sweep(g, alpha=alpha, grid=TorusGrid(2, 9), refine_edges=True)
        assert np.all(refined.bands[:, 0] <= plain.bands[:, 0])
        assert np.all(refined.bands[:, 1] >= plain.bands[:, 1])


class TestFlatBands:
    def test_star_nu3(self):
        bs = fb.sweep(fb.star_lattice(2, 3).graph)
        assert fb.flat_bands(bs) == [fb.FlatBand(1.0, 1)]

    def test_star_nu5_multiplicity(self):
        bs = fb.sweep(fb.star_lattice(2, 5).graph, grid=TorusGrid(2, 9))
        flats = fb.flat_bands(bs)
        assert len(flats) == 1
        assert flats[0].value == pytest.approx(1.0, abs=1e-9)
        assert flats[0].multiplicity == 3

    def test_square_lattice_none(self):
        bs = fb.sweep(fb.square_lattice(2).graph)
        assert fb.flat_bands(bs) == []

    def test_distinct_flat_values_not_merged(self):
        g = fb.star_lattice(2, 5).graph
        q = [0.5, 0.5, 2.0, 2.0, 0.0]
        bs = fb.sweep(g, potential=q, grid=TorusGrid(2, 9))
        flats = fb.flat_bands(bs)
        assert [f.multiplicity for f in flats] == [1, 1]
        assert [f.value for f in flats] == pytest.approx([1.5, 3.0], abs=1e-9)


class TestMeasureAndGaps:
    def test_disjoint(self):
        bs = _fake_bands([[0.0, 1.0], [2.0, 3.0]])
        measure, gaps = fb.measure_and_gaps(bs)
        assert measure == pytest.approx(2.0)
        assert gaps == [(1.0, 2.0)]

    def test_overlapping(self):
        bs = _fake_bands([[0.0, 2.0], [1.0, 3.0]])
        measure, gaps = fb.measure_and_gaps(bs)
        assert measure == pytest.approx(3.0)
        assert gaps == []

    def test_flat_band_inside_gap_leaves_it_whole(self):
        bs = fb.sweep(fb.star_lattice(2, 3).graph)
        measure, gaps = fb.measure_and_gaps(bs)
        assert measure == pytest.approx(8.0, abs=1e-9)
        assert len(gaps) == 1
        lo, hi = gaps[0]
        assert lo == pytest.approx((11 - math.sqrt(89)) / 2, abs=1e-9)
        assert hi == pytest.approx(3.0, abs=1e-9)

    def test_touching_bands_merge(self):
        bs = _fake_bands([[0.0, 1.0], [1.0, 2.0]])
        measure, gaps = fb.measure_and_gaps(bs)
        assert measure == pytest.approx(2.0)
        assert gaps == []


def _fake_bands(intervals):
    values = np.array([[a, (a + b) / 2, b] for a, b in intervals])
    return BandStructure(grid=TorusGrid(1, 3), values=values)


class TestBandPath:
    def test_square_lattice_waypoints(self):
        g = fb.square_lattice(2).graph
        path = fb.band_path(g, [[0.0, 0.0], [math.pi, 0.0], [math.pi, math.pi]], 16)
        assert path.values[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert path.values[16, 0] == pytest.approx(4.0, abs=1e-12)
        assert path.values[-1, 0] == pytest.approx(8.0, abs=1e-12)
        assert path.arclength[-1] == pytest.approx(2 * math.pi)

    def test_single_waypoint(self, rng):
        g = random_graph(rng)
        theta = rng.uniform(-math.pi, math.pi, size=g.dimension)
        path = fb.band_path(g, [theta])
        fd = fb.flux_data(g)
        direct = fb.eigen(fb.assemble_flux(g, fd.alpha_star, theta)).eigenvalues
        assert path.values.shape == (1, g.nu)
        assert np.allclose(path.values[0], direct)

    def test_star_flat_branch_constant(self):
        g = fb.star_lattice(2, 3).graph
        path = fb.band_path(g, [[0.0, 0.0], [math.pi, math.pi]], 10)
        assert np.abs(path.values[:, 1] - 1.0).max() < 1e-12


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.floats(-10, 10), st.floats(0, 5)).map(lambda ab: (ab[0], ab[0] + ab[1])),
        min_size=1,
        max_size=8,
    )
)
def test_merge_matches_coverage_count(intervals):
    merged = merge_intervals(intervals)
    total = sum(b - a for a, b in merged)
    # independent oracle: integrate the coverage indicator over elementary segments
    points = sorted({x for ab in intervals for x in ab})
    covered = 0.0
    for left, right in zip(points, points[1:]):
        mid = (left + right) / 2
        if any(a <= mid <= b for a, b in intervals):
            covered += right - left
    assert total == pytest.approx(covered, abs=1e-9)
    for (a1, b1), (a2, b2) in zip(merged, merged[1:]):
        assert b1 < a2
