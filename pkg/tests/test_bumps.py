import math

import numpy as np
import pytest
from scipy import integrate

from primedir import bumps
from primedir.errors import PrecisionError


def quad_oracle(f, a, b, **kw):
    re, _ = integrate.quad(lambda t: f(t).real, a, b, limit=400, **kw)
    im, _ = integrate.quad(lambda t: f(t).imag, a, b, limit=400, **kw)
    return re + 1j * im


class TestPhi:
    def test_outside_support(self):
        assert bumps.eval_phi(0.5) == 0.0
        assert bumps.eval_phi(2.5) == 0.0
        assert bumps.eval_phi(1.0) == 0.0 and bumps.eval_phi(2.0) == 0.0

    def test_center_value(self):
        c = bumps.DEFAULT_BUMP.normalization
        assert bumps.eval_phi(1.5) == pytest.approx(c * math.exp(-1), rel=1e-14)

    def test_quarter_point(self):
        # direct formula; c cross-checked by an independent quadrature oracle
        c_oracle = 1.0 / integrate.quad(
            lambda t: math.exp(-1.0 / (1.0 - (2 * t - 3) ** 2)) if 1 < t < 2 else 0.0, 1, 2,
            limit=200,
        )[0]
        assert bumps.eval_phi(1.25) == pytest.approx(c_oracle * math.exp(-4.0 / 3.0), rel=1e-10)

    def test_unit_mass(self):
        total, _ = integrate.quad(bumps.eval_phi, 1, 2, limit=200)
        assert abs(total - 1.0) < 1e-12

    def test_nonnegative(self):
        t = np.linspace(0, 3, 2001)
        assert np.all(bumps.eval_phi(t) >= 0)


class TestChi:
    def test_plateau_and_support_exact(self):
        assert bumps.eval_chi(0.0) == 1.0
        assert bumps.eval_chi(0.25) == 1.0
        assert bumps.eval_chi(0.5) == 0.0
        assert bumps.eval_chi(0.6) == 0.0

    def test_symmetry_point(self):
        assert bumps.eval_chi(0.375) == pytest.approx(0.5, abs=1e-15)

    def test_even_and_bounded(self):
        x = np.linspace(-1, 1, 1001)
        vals = bumps.eval_chi(x)
        assert np.allclose(vals, bumps.eval_chi(-x))
        assert np.all((0 <= vals) & (vals <= 1))


class TestChiS:
    def test_examples(self):
        assert bumps.chi_s(0, 0.0) == 1.0
        # plateau boundary: 2^40 * 2^-42 = 1/4
        assert bumps.chi_s(0, 2.0**-42) == 1.0
        # support boundary: 2^40 * 2^-41 = 1/2
        assert bumps.chi_s(0, 2.0**-41) == 0.0
        assert bumps.chi_s(2, 1.0) == 0.0

    def test_matches_direct_scaling(self):
        for s in (0, 1, 2):
            scale = 2.0 ** (10 * (s + 4))
            for alpha in (0.0, 2.0**-45, 3.0 * 2.0**-43, -(2.0**-42)):
                assert bumps.chi_s(s, alpha) == pytest.approx(bumps.eval_chi(scale * alpha), abs=1e-15)

    def test_huge_scale_no_overflow(self):
        assert bumps.chi_s(10**6, 1e-300) == 0.0
        assert bumps.chi_s(10**6, 0.0) == 1.0
        assert bumps.chi_s(10**5, 5e-301) in (0.0, 1.0)

    def test_nesting(self):
        # chi_s(s) * chi_s(s-1) == chi_s(s): the level-s support sits inside
        # the level-(s-1) plateau
        for s in (1, 2, 3):
            for alpha in np.linspace(-(2.0 ** (-10 * (s + 4))), 2.0 ** (-10 * (s + 4)), 41):
                a = bumps.chi_s(s, float(alpha))
                b = bumps.chi_s(s - 1, float(alpha))
                assert a * b == pytest.approx(a, abs=1e-15)


class TestVk:
    def test_zero_frequency(self):
        for k in (0, 5, 20):
            assert bumps.v_k(k, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_depends_only_on_product(self):
        assert bumps.v_k(10, 2.0**-5) == bumps.v_k(12, 2.0**-7)
        assert bumps.v_k(3, 0.125) == bumps.v_k(0, 1.0)

    def test_against_quadrature_oracle(self):
        # independent adaptive quadrature at X = 2^10 * 2^-5 = 32
        X = 32.0
        oracle = quad_oracle(
            lambda t: np.exp(2j * np.pi * X * t) * bumps.eval_phi(t), 1, 2, epsabs=1e-13
        )
        assert abs(bumps.v_k(10, 2.0**-5) - oracle) < 1e-10

    def test_against_denser_composite_rule(self):
        # same rule at 10x panels and higher order
        spec = bumps.BumpSpec(quadrature_points=24)
        for X in (0.3, 7.0, 129.5):
            dense = bumps._oscillatory_integral(X, bumps.BumpSpec(quadrature_points=32))
            assert abs(bumps.v_k(0, X, spec) - dense) < 1e-11

    def test_conjugate_symmetry(self):
        for alpha in (2.0**-5, 0.37, 3.25):
            assert bumps.v_k(6, -alpha) == bumps.v_k(6, alpha).conjugate()

    def test_decay_bound(self):
        l1_d1, _ = bumps.phi_deriv_l1()
        C = l1_d1 / (2 * math.pi) + 0.5
        for X in np.logspace(0, 6, 13):
            val = abs(bumps.v_k(0, float(X)))
            assert val <= C / X + 1e-12

    def test_budget_exhaustion_raises(self):
        tiny = bumps.BumpSpec(max_panels=64)
        with pytest.raises(PrecisionError):
            bumps.v_k(0, 1000.0, tiny)  # needs ~2000 panels, bound too large for 0

    def test_certified_zero_beyond_budget(self):
        tiny = bumps.BumpSpec(max_panels=64)
        assert bumps.v_k(0, 2.0**39, tiny) == 0.0

    def test_oscillation_cap(self):
        with pytest.raises(PrecisionError):
            bumps.v_k(0, 2.0**41)
