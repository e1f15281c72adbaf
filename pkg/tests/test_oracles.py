import math
from math import gamma, pi, sqrt

import numpy as np
import pytest

from nlsground.oracles import (
    Bubble,
    OracleTable,
    Soliton1D,
    critical_grad_norm_sq,
    gn_check,
)


def sech_moment(a):
    """int_R sech^a(y) dy = sqrt(pi) Gamma(a/2) / Gamma((a+1)/2)."""
    return sqrt(pi) * gamma(a / 2.0) / gamma((a + 1.0) / 2.0)


class TestSoliton1D:
    def test_mass_against_gamma_closed_form(self):
        # w = (4 mu)^{1/6} sech^{1/3}(3 sqrt(mu) x) for p = 8
        s = Soliton1D(8.0, 1.0)
        exact = 4.0 ** (1.0 / 3.0) / 3.0 * sech_moment(2.0 / 3.0)
        assert abs(s.mass - exact) < 1e-12

    def test_grad_norm_against_gamma_closed_form(self):
        s = Soliton1D(8.0, 1.0)
        exact = 4.0 ** (1.0 / 3.0) / 3.0 * (
            sech_moment(2.0 / 3.0) - sech_moment(8.0 / 3.0)
        )
        assert abs(s.grad_norm_sq - exact) < 1e-10

    def test_pde_residual_below_1e_10(self):
        for mu in (0.5, 1.0, 121.6):
            assert Soliton1D(8.0, mu).pde_residual(1000) < 1e-10

    def test_pohozaev_identity(self):
        for p, mu in ((7.0, 2.0), (8.0, 1.0), (10.0, 0.25)):
            s = Soliton1D(p, mu)
            assert abs(s.pohozaev) <= max(s.error_bounds["pohozaev"], 1e-10)

    def test_mass_scaling_law(self):
        p = 8.0
        gam = Soliton1D.mass_exponent(p)
        m1 = Soliton1D(p, 1.0).mass
        for mu in (0.3, 4.0, 50.0):
            assert Soliton1D(p, mu).mass == pytest.approx(
                mu**gam * m1, rel=1e-11
            )

    def test_energy_identity_p8(self):
        # at p = 8 the manifold identities force E = m/10 for every mu
        for mu in (1.0, 9.0):
            s = Soliton1D(8.0, mu)
            assert s.action == pytest.approx(s.mass * mu / 10.0, rel=1e-11)

    def test_inverse_mass_map(self):
        p = 8.0
        mu = Soliton1D.mu_for_mass(p, 1.0)
        assert Soliton1D(p, mu).mass == pytest.approx(1.0, rel=1e-11)

    def test_energy_mass_slope(self):
        assert Soliton1D.energy_mass_slope(8.0) == pytest.approx(-5.0)
        assert Soliton1D.energy_mass_slope(10.0) == pytest.approx(-3.0)

    def test_rejects_subcritical_exponent(self):
        with pytest.raises(ValueError):
            Soliton1D(5.0, 1.0)
        with pytest.raises(ValueError):
            Soliton1D(8.0, -1.0)

    def test_quadrature_refinement_shrinks_bounds(self):
        coarse = Soliton1D(8.0, 1.0, panels=40)
        fine = Soliton1D(8.0, 1.0, panels=80)
        for key in ("mass", "grad_norm_sq"):
            assert fine.error_bounds[key] <= coarse.error_bounds[key] / 3.0

    def test_table_shape(self):
        t = Soliton1D(8.0, 2.0).table()
        assert isinstance(t, OracleTable)
        d = t.as_dict()
        assert set(d["values"]) == {"mass", "action", "grad_norm_sq", "pohozaev"}
        assert all(k in d["error_bounds"] for k in d["values"])


class TestBubble:
    def test_unit_mass_closed_form_n5(self):
        # ||U||^2 = omega_4 [15]^{3/2} * 3 pi/16 = (pi^3/2) 15^{3/2}
        b = Bubble(5, 1.0)
        assert abs(b.unit_mass / ((pi**3 / 2.0) * 15.0**1.5) - 1) < 1e-12

    def test_sobolev_level_closed_form_n5(self):
        level, bound = critical_grad_norm_sq(5)
        exact = (8.0 / 3.0) * pi**2 * 15.0**1.5 * 9.0 * 5.0 * pi / 256.0
        assert abs(level - exact) < 1e-9
        assert bound < 1e-9

    def test_sobolev_level_closed_form_n3(self):
        level, _ = critical_grad_norm_sq(3)
        assert abs(level / (0.75 * sqrt(3.0) * pi**2) - 1) < 1e-12

    def test_mass_scales_linearly_in_eps(self):
        b1 = Bubble(5, 1.0)
        b9 = Bubble(5, 9.0)
        assert b9.mass == pytest.approx(9.0 * b1.mass, rel=1e-12)
        assert b9.mass == pytest.approx(9.0 * b9.unit_mass, rel=1e-12)

    def test_action_independent_of_eps(self):
        a = Bubble(5, 0.5).action
        b = Bubble(5, 40.0).action
        assert a == pytest.approx(b, rel=1e-12)
        assert a == pytest.approx(Bubble(5, 1.0).grad_norm_sq / 5.0, rel=1e-12)

    def test_profile_bounded_by_one_at_minimal_mass(self):
        m_N = Bubble.minimal_mass(5)
        eps = Bubble.eps_for_mass(5, m_N)
        assert eps == pytest.approx(5.0 * 3.0, rel=1e-12)  # eps = N(N-2)
        b = Bubble(5, eps)
        r = np.geomspace(1e-6, 1e4, 500)
        vals = b.profile(np.concatenate([[0.0], r]))
        assert np.all(vals > 0)
        assert np.all(vals <= 1.0 + 1e-12)

    def test_rejects_low_dimension(self):
        with pytest.raises(ValueError):
            Bubble(4, 1.0)
        with pytest.raises(ValueError):
            Bubble(3, 1.0)


class TestGagliardoNirenberg:
    def test_family_members_respect_estimate(self):
        # by construction the maximum dominates each member's quotient
        best = gn_check(1, 6.0)
        single = gn_check(1, 6.0, widths=[1.0], shapes=[2.0])
        assert single <= best + 1e-15

    def test_refinement_monotone(self):
        small = gn_check(3, 3.0, widths=np.geomspace(0.5, 2.0, 3))
        large = gn_check(3, 3.0, widths=np.geomspace(0.25, 4.0, 9))
        assert large >= small - 1e-15

    def test_stable_across_resolution(self):
        a = gn_check(1, 6.0)
        b = gn_check(1, 6.0, widths=np.geomspace(0.25, 4.0, 17))
        assert abs(a / b - 1) < 1e-3

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            gn_check(3, 2.0)
