"""Band-length, gap, perturbation and effective-form checks."""

import math

import numpy as np
import pytest

import fluxband as fb
from fluxband import OneForm
from fluxband.bounds import difference_matrix, flux_coupling
from fluxband.spectrum import TorusGrid

from conftest import random_graph, random_one_form


class TestTotalBandLength:
    def test_star_equality(self):
        g = fb.star_lattice(2, 3).graph
        fd = fb.flux_data(g)
        reports = fb.check_total_band_length(fb.sweep(g), fd)
        assert all(r.satisfied for r in reports)
        assert reports[1].slack == pytest.approx(0.0, abs=1e-9)  # sum = 4 betti

    def test_square_equality(self):
        g = fb.square_lattice(2).graph
        fd = fb.flux_data(g)
        reports = fb.check_total_band_length(fb.sweep(g), fd)
        assert reports[1].lhs == pytest.approx(8.0, abs=1e-9)
        assert reports[1].rhs == pytest.approx(8.0)

    def test_hexagonal_strict(self):
        g = fb.hexagonal().graph
        fd = fb.flux_data(g)
        reports = fb.check_total_band_length(fb.sweep(g), fd)
        assert all(r.satisfied for r in reports)
        assert reports[1].slack > 1.0  # two bands cover well under 4*betti = 8

    def test_random_graphs_and_potentials(self, rng):
        for _ in range(6):
            g = random_graph(rng, potentials=True)
            alpha = random_one_form(rng, g)
            fd = fb.flux_data(g, alpha)
            bs = fb.sweep(g, alpha=alpha, grid=TorusGrid(g.dimension, 9))
            assert all(r.satisfied for r in fb.check_total_band_length(bs, fd))


class TestWeightedBandLength:
    def test_unit_weights_match_combinatorial(self, rng):
        g = random_graph(rng)
        fd = fb.flux_data(g)
        bs = fb.sweep(g, grid=TorusGrid(2, 9), weighted=True)
        weighted = fb.check_weighted_band_length(bs, g, fd)
        plain = fb.check_total_band_length(bs, fd)
        assert weighted[1].rhs == pytest.approx(plain[1].rhs)

    def test_half_couplings_square(self):
        base = fb.square_lattice(2).graph
        edges = tuple(
            fb.Edge(e.id, e.tail, e.head, e.index, 0.5, e.alpha) for e in base.edges
        )
        g = fb.validate(fb.FundamentalGraph(2, base.vertices, edges))
        fd = fb.flux_data(g)
        bs = fb.sweep(g, weighted=True)
        reports = fb.check_weighted_band_length(bs, g, fd)
        assert bs.bands[0] == pytest.approx([0.0, 4.0], abs=1e-12)
        assert reports[1].rhs == pytest.approx(4.0)
        assert reports[1].slack == pytest.approx(0.0, abs=1e-9)

    def test_normalized_square(self):
        base = fb.square_lattice(2).graph
        verts = (fb.Vertex(0, "v0", 0.0, 4.0),)
        g = fb.validate(fb.FundamentalGraph(2, verts, base.edges))
        fd = fb.flux_data(g)
        bs = fb.sweep(g, weighted=True)
        reports = fb.check_weighted_band_length(bs, g, fd)
        assert bs.bands[0] == pytest.approx([0.0, 2.0], abs=1e-12)
        assert reports[1].rhs == pytest.approx(2.0)


class TestGapBound:
    def test_star_equality(self):
        g = fb.star_lattice(2, 3).graph
        fd = fb.flux_data(g)
        bs = fb.sweep(g)
        reports = fb.check_gap_bound(bs, bs, g, fd)
        assert all(r.satisfied for r in reports)
        expected = (math.sqrt(89) - 5) / 2
        assert reports[0].lhs == pytest.approx(expected, abs=1e-9)
        assert reports[0].rhs == pytest.approx(expected, abs=1e-9)

    def test_constant_potential_reduces(self):
        g = fb.star_lattice(2, 3).graph
        fd = fb.flux_data(g)
        bs_full = fb.sweep(g, potential=2.5)
        bs_free = fb.sweep(g, potential=0.0)
        reports = fb.check_gap_bound(bs_full, bs_free, g, fd)
        assert all(r.satisfied for r in reports)
        assert reports[1].lhs == pytest.approx(reports[1].rhs, abs=1e-9)

    def test_square_no_gaps(self):
        g = fb.square_lattice(2).graph
        fd = fb.flux_data(g)
        bs = fb.sweep(g)
        reports = fb.check_gap_bound(bs, bs, g, fd)
        assert reports[0].lhs == pytest.approx(0.0, abs=1e-9)
        assert reports[0].rhs == 0.0
        assert all(r.satisfied for r in reports)


class TestPerturbation:
    def test_identical_potentials(self, rng):
        g = random_graph(rng)
        alpha = random_one_form(rng, g)
        data, reports = fb.perturbation_bounds(g, alpha, alpha, grid=TorusGrid(2, 9))
        assert data.lambda_1 == pytest.approx(0.0, abs=1e-12)
        assert data.lambda_nu == pytest.approx(0.0, abs=1e-12)
        assert data.coupling == 0.0
        assert np.abs(data.lower_shifts).max() < 1e-12
        assert all(r.satisfied for r in reports)

    def test_fluxes_equal_mod_2pi_gives_zero_difference(self, rng):
        g = fb.star_lattice(2, 3).graph
        alpha = random_one_form(rng, g)
        shifted = OneForm.from_values(
            [v + (2 * math.pi if e >= 2 else 0.0) for e, v in enumerate(alpha.values)]
        )
        fd_a = fb.flux_data(g, alpha)
        fd_b = fb.flux_data(g, shifted)
        theta = rng.uniform(-math.pi, math.pi, size=2)
        x = difference_matrix(g, fd_a, fd_b, theta)
        assert np.abs(x).max() < 1e-9
        assert flux_coupling(fd_a, fd_b) < 1e-9

    def test_harper_pi_flux_vs_free(self):
        g = fb.harper(1, 2).graph
        data, reports = fb.perturbation_bounds(g, g.one_form(), OneForm.zero(g))
        assert all(r.satisfied for r in reports)
        assert data.coupling == pytest.approx(4.0)  # two cotree edges of |sin(pi/2)| at the worst vertex

    def test_random_pairs(self, rng):
        for _ in range(6):
            g = random_graph(rng)
            a = random_one_form(rng, g)
            b = random_one_form(rng, g)
            data, reports = fb.perturbation_bounds(g, a, b, grid=TorusGrid(2, 17))
            for r in reports:
                assert r.satisfied, str(r)
            assert data.lambda_1 <= data.lambda_nu

    def test_trace_between_extremes(self, rng):
        g = random_graph(rng)
        a = random_one_form(rng, g)
        b = random_one_form(rng, g)
        fd_a = fb.flux_data(g, a)
        fd_b = fb.flux_data(g, b)
        grid = TorusGrid(2, 9)
        data, _ = fb.perturbation_bounds(g, a, b, grid=grid)
        for theta in grid.points():
            mean = float(np.trace(difference_matrix(g, fd_a, fd_b, theta)).real) / g.nu
            assert data.lambda_1 - 1e-9 <= mean <= data.lambda_nu + 1e-9

    def test_mismatched_form_length(self, rng):
        g = random_graph(rng)
        with pytest.raises(fb.GraphMismatch):
            fb.perturbation_bounds(g, OneForm.from_values([0.0]), None)


class TestEffectiveForm:
    def test_square_lattice_isotropic(self):
        g = fb.square_lattice(2).graph
        eff, report = fb.effective_form(g, 0)
        assert np.allclose(eff.matrix, 2.0 * np.eye(2), atol=1e-6)
        assert math.isinf(eff.rho)
        assert eff.t1 == pytest.approx(4.0)
        assert eff.t2 == pytest.approx(2.0)
        assert report.rhs == pytest.approx(2.0)
        assert report.satisfied
        rng = np.random.default_rng(5)
        for _ in range(16):
            w = rng.normal(size=2)
            w /= np.linalg.norm(w)
            assert eff.mu(w) == pytest.approx(1.0, abs=1e-5)

    def test_star_bottom_band(self):
        g = fb.star_lattice(2, 3).graph
        eff, report = fb.effective_form(g, 0)
        assert eff.rho == pytest.approx(1.0, abs=1e-9)
        assert report.rhs == pytest.approx(eff.t1**2 / eff.rho + eff.t2)
        assert report.satisfied

    def test_richardson_step_stability(self):
        g = fb.square_lattice(2).graph
        eff1, _ = fb.effective_form(g, 0, step=1e-3)
        eff2, _ = fb.effective_form(g, 0, step=5e-4)
        assert np.abs(eff1.matrix - eff2.matrix).max() < 1e-5 * 2.0

    def test_degenerate_flat_band_raises(self):
        g = fb.star_lattice(2, 5).graph
        with pytest.raises(fb.NotSimpleEigenvalue):
            fb.effective_form(g, 1, grid=TorusGrid(2, 9))  # flat, multiplicity 3

    def test_off_grid_extremum_raises(self):
        g = fb.hexagonal().graph
        with pytest.raises(fb.NotExtremum):
            fb.effective_form(g, 0, kind="max")  # conical touching point off-grid

    def test_weighted_variant(self, rng):
        g = random_graph(rng, weights=True, nu_max=4)
        try:
            eff, report = fb.effective_form(g, 0, grid=TorusGrid(2, 9), weighted=True)
        except (fb.NotSimpleEigenvalue, fb.NotExtremum):
            pytest.skip("random draw lacks a usable extremum")
        assert report.satisfied


class TestVerifyAll:
    @pytest.mark.parametrize("maker", [
        lambda: fb.square_lattice(2).graph,
        lambda: fb.hexagonal().graph,
        lambda: fb.star_lattice(2, 3).graph,
    ])
    def test_all_bounds_hold(self, maker):
        reports = fb.verify_bounds(maker(), grid=TorusGrid(2, 17))
        assert len(reports) == 6
        assert all(r.satisfied for r in reports)
