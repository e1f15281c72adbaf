import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlsground import (
    ConfigurationError,
    GridFunction,
    grad_norm_sq,
    make_grid,
    mass,
    neg_laplacian,
)
from nlsground.grid import solve_shifted, sphere_area

from conftest import random_profiles


def ball_volume(N, R):
    return sphere_area(N) / N * R**N


class TestMakeGrid:
    def test_weights_sum_to_ball_volume(self):
        for N in (1, 2, 3, 5):
            g = make_grid(N, 7.5, 301)
            assert abs(g.weights.sum() / ball_volume(N, 7.5) - 1) < 1e-10

    def test_three_dim_ball(self):
        g = make_grid(3, 10.0, 4001)
        assert abs(g.weights.sum() / (4.0 / 3.0 * math.pi * 1000.0) - 1) < 1e-6

    def test_one_dim_measure_is_two(self):
        g = make_grid(1, 5.0, 1001)
        assert abs(g.weights.sum() - 10.0) < 1e-10

    def test_weights_positive_nodes_increasing(self):
        for stretch in (None, 3.0, 40.0):
            g = make_grid(4, 12.0, 257, stretch=stretch)
            assert np.all(g.weights > 0)
            assert np.all(np.diff(g.nodes) > 0)
            assert g.nodes[0] == 0.0 and g.nodes[-1] == 12.0

    def test_stretch_clusters_near_origin(self):
        uniform = make_grid(2, 10.0, 101)
        stretched = make_grid(2, 10.0, 101, stretch=9.0)
        assert stretched.nodes[1] < uniform.nodes[1] / 5.0
        assert (stretched.nodes[-1] - stretched.nodes[-2]) > (
            uniform.nodes[-1] - uniform.nodes[-2]
        )

    def test_rejects_bad_arguments(self):
        with pytest.raises(ConfigurationError):
            make_grid(3, -1.0, 100)
        with pytest.raises(ConfigurationError):
            make_grid(3, 1.0, 15)
        with pytest.raises(ConfigurationError):
            make_grid(0, 1.0, 100)
        with pytest.raises(ConfigurationError):
            make_grid(3, 1.0, 100, stretch=-2.0)

    def test_grid_immutable(self):
        g = make_grid(2, 1.0, 64)
        with pytest.raises(ValueError):
            g.nodes[3] = 17.0


class TestMass:
    def test_zero_profile(self):
        g = make_grid(3, 4.0, 128)
        assert mass(GridFunction(g, np.zeros(128))) == 0.0

    def test_gaussian_closed_form(self):
        # int exp(-2 r^2) over R^3 = (pi/2)^{3/2}
        g = make_grid(3, 9.0, 4001)
        u = GridFunction(g, np.exp(-g.nodes**2))
        assert abs(mass(u) / (math.pi / 2.0) ** 1.5 - 1) < 1e-5
        assert abs(mass(u) - 1.9687) < 2e-4

    @given(c=st.floats(-8.0, 8.0, allow_nan=False))
    @settings(max_examples=25, deadline=None)
    def test_scaling_homogeneity(self, c):
        g = make_grid(2, 5.0, 200)
        vals = np.exp(-g.nodes)
        base = mass(GridFunction(g, vals))
        scaled = mass(GridFunction(g, c * vals))
        assert scaled == pytest.approx(c * c * base, rel=1e-12, abs=1e-12)


class TestGradNormSq:
    def test_zero_profile(self):
        g = make_grid(2, 3.0, 90)
        assert grad_norm_sq(GridFunction(g, np.zeros(90))) == 0.0

    def test_constant_has_boundary_layer_only(self):
        g = make_grid(1, 10.0, 1001)
        u = GridFunction(g, np.ones(1001))
        h = g.nodes[-1] - g.nodes[-2]
        # Dirichlet end forced to zero: single-cell energy 2 * (1/h)
        assert grad_norm_sq(u) == pytest.approx(2.0 / h, rel=1e-12)

    def test_gaussian_closed_form_1d(self):
        # int |d/dr exp(-r^2)|^2 * 2 dr over [0, inf) = sqrt(pi/2)
        g = make_grid(1, 9.0, 4001)
        u = GridFunction(g, np.exp(-g.nodes**2))
        assert abs(grad_norm_sq(u) / math.sqrt(math.pi / 2.0) - 1) < 1e-5

    def test_summation_by_parts_exact(self):
        gen = np.random.default_rng(3)
        for N in (1, 2, 3, 5):
            g = make_grid(N, 4.0, 96)
            v = gen.standard_normal(96)
            v[-1] = 0.0
            u = GridFunction(g, v)
            lhs = grad_norm_sq(u)
            rhs = g.inner(neg_laplacian(u).values, v)
            assert abs(lhs - rhs) <= 1e-13 * max(lhs, 1.0)


class TestNegLaplacian:
    def test_zero_profile(self):
        g = make_grid(5, 2.0, 64)
        out = neg_laplacian(GridFunction(g, np.zeros(64)))
        assert np.all(out.values == 0.0)

    def test_linearity(self):
        g = make_grid(3, 5.0, 200)
        gen = np.random.default_rng(11)
        a, b = gen.standard_normal(200), gen.standard_normal(200)
        x, y = 1.7, -0.3
        left = neg_laplacian(GridFunction(g, x * a + y * b)).values
        right = x * neg_laplacian(GridFunction(g, a)).values \
            + y * neg_laplacian(GridFunction(g, b)).values
        assert np.allclose(left, right, rtol=1e-12, atol=1e-12)

    def test_adjointness(self):
        gen = np.random.default_rng(7)
        for N in (1, 2, 3):
            g = make_grid(N, 4.0, 80)
            a = gen.standard_normal(80)
            b = gen.standard_normal(80)
            a[-1] = b[-1] = 0.0
            x = g.inner(neg_laplacian(GridFunction(g, a)).values, b)
            y = g.inner(a, neg_laplacian(GridFunction(g, b)).values)
            assert abs(x - y) <= 1e-12 * max(abs(x), 1.0)

    def test_radial_eigenfunction(self):
        # u = sin(pi r / R)/r solves -Delta u = (pi/R)^2 u in R^3
        residuals = []
        for K in (501, 1001, 2001):
            g = make_grid(3, 1.0, K)
            r = g.nodes.copy()
            r[0] = 1.0
            vals = np.sin(math.pi * g.nodes) / r
            vals[0] = math.pi
            u = GridFunction(g, vals)
            res = neg_laplacian(u).values - math.pi**2 * vals
            residuals.append(g.norm(res) / g.norm(vals))
        assert residuals[0] < 1e-4
        # second-order convergence: each doubling gains at least 3x
        assert residuals[0] / residuals[1] > 3.0
        assert residuals[1] / residuals[2] > 3.0

    def test_refinement_invariance_of_functionals(self):
        vals = []
        for K in (501, 1001, 2001):
            g = make_grid(3, 12.0, K)
            u = GridFunction(g, np.exp(-g.nodes**2) * (1 + g.nodes))
            vals.append((mass(u), grad_norm_sq(u)))
        m_err = [abs(v[0] - vals[-1][0]) for v in vals[:-1]]
        t_err = [abs(v[1] - vals[-1][1]) for v in vals[:-1]]
        assert m_err[0] / max(m_err[1], 1e-15) > 3.0
        assert t_err[0] / max(t_err[1], 1e-15) > 3.0


class TestShiftedSolve:
    def test_inverse_of_shifted_operator(self):
        gen = np.random.default_rng(5)
        for N in (1, 3):
            g = make_grid(N, 6.0, 150)
            rhs = gen.standard_normal(150)
            rhs[-1] = 0.0
            x = solve_shifted(g, 2.5, 0.7, rhs)
            u = GridFunction(g, x)
            back = 2.5 * x + 0.7 * neg_laplacian(u).values
            assert np.allclose(back[:-1], rhs[:-1], rtol=1e-10, atol=1e-10)
            assert x[-1] == 0.0


class TestProfileIO:
    def test_csv_roundtrip_bit_exact(self, tmp_path):
        g = make_grid(2, 5.0, 64, stretch=2.0)
        gen = np.random.default_rng(13)
        u = GridFunction(g, gen.standard_normal(64))
        path = tmp_path / "profile.csv"
        u.to_csv(path)
        assert path.read_text().splitlines()[0] == "r,u"
        v = GridFunction.from_csv(path, g)
        assert np.array_equal(u.values, v.values)

    def test_rejects_mismatched_grid(self, tmp_path):
        g = make_grid(2, 5.0, 64)
        other = make_grid(2, 5.0, 65)
        u = GridFunction(g, np.ones(64))
        path = tmp_path / "profile.csv"
        u.to_csv(path)
        with pytest.raises(ConfigurationError):
            GridFunction.from_csv(path, other)

    def test_rejects_nonfinite_values(self):
        g = make_grid(1, 1.0, 32)
        bad = np.ones(32)
        bad[5] = math.inf
        with pytest.raises(ConfigurationError):
            GridFunction(g, bad)
