import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from sawsle import conformal
from sawsle.constants import SAW_EXPONENTS
from sawsle.estimators import default_grids

B = float(SAW_EXPONENTS.b)
BBAR = float(SAW_EXPONENTS.bbar)


class TestEndpointMap:
    def test_identity_when_endpoint_is_i(self):
        for z in (0.3 + 0.7j, 2j, -1.5 + 0.1j):
            assert conformal.endpoint_map(1j, z) == z

    def test_sends_endpoint_to_i(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            e = complex(rng.normal(0, 5), rng.uniform(0.1, 10))
            assert abs(conformal.endpoint_map(e, e) - 1j) < 1e-12

    def test_fixes_origin(self):
        assert conformal.endpoint_map(3 + 4j, 0j) == 0j

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            e = complex(rng.normal(0, 3), rng.uniform(0.5, 5))
            z = complex(rng.normal(0, 3), rng.uniform(0, 5))
            lam = rng.uniform(0.1, 20)
            a = conformal.endpoint_map(lam * e, lam * z)
            b = conformal.endpoint_map(e, z)
            assert abs(a - b) < 1e-12 * max(1.0, abs(b))

    def test_rejects_degenerate_endpoint(self):
        with pytest.raises(ValueError):
            conformal.endpoint_map(1 + 0j, 0.5j)
        with pytest.raises(ValueError):
            conformal.endpoint_map(1 - 2j, 0.5j)


class TestFactorAnchors:
    # frozen by exact substitution into the closed forms
    def test_x_half(self):
        d0, di = conformal.factors_X(0.5)
        assert d0 == pytest.approx(0.5, abs=1e-15)
        assert di == pytest.approx(math.sqrt(5), abs=1e-14)

    def test_y_two(self):
        d0, di = conformal.factors_Y(2.0)
        assert d0 == pytest.approx(math.pi / 4, abs=1e-14)
        assert di == pytest.approx(math.pi / 2, abs=1e-14)

    def test_r_sqrt2(self):
        d0, di = conformal.factors_R(math.sqrt(2))
        assert d0 == pytest.approx(0.5, abs=1e-14)
        assert di == pytest.approx(3.0, abs=1e-13)

    def test_s_point_mass_limit(self):
        assert conformal.factors_S(1.0) == (0.5, 2.0)

    def test_s_sqrt2(self):
        # l = 1: theta = 3 pi / 4, arrival angle 2 pi / 3
        d0, di = conformal.factors_S(math.sqrt(2))
        assert d0 == pytest.approx(4 * math.sqrt(3) / 9, abs=1e-14)
        assert di == pytest.approx(8 * math.sqrt(3) / 9, abs=1e-14)

    def test_domains(self):
        for fn, bad in (
            (conformal.factors_X, 0.0),
            (conformal.factors_X, -1.0),
            (conformal.factors_Y, 1.0),
            (conformal.factors_R, 0.5),
            (conformal.factors_S, 0.99),
        ):
            with pytest.raises(ValueError):
                fn(bad)

    def test_limits_toward_one(self):
        for fn in (conformal.factors_X, conformal.factors_Y, conformal.factors_R, conformal.factors_S):
            d0, di = fn(1e8)
            assert d0 == pytest.approx(1.0, abs=1e-10)
            assert di == pytest.approx(1.0, abs=1e-10)


class TestExactCdf:
    def test_edge_values(self):
        assert conformal.exact_cdf("R", 1.0) == 0.0
        assert conformal.exact_cdf("Y", 1.0) == 0.0
        assert conformal.exact_cdf("X", 0.0) == 0.0

    def test_s_point_mass(self):
        assert conformal.exact_cdf("S", 1.0) == pytest.approx(2.0 ** (-25 / 48), abs=1e-12)

    def test_monotone_in_threshold(self):
        assert conformal.exact_cdf("X", 10.0) < conformal.exact_cdf("X", 100.0) < 1.0

    def test_below_domain_raises(self):
        with pytest.raises(ValueError):
            conformal.exact_cdf("R", 0.999)
        with pytest.raises(ValueError):
            conformal.exact_cdf("X", -0.01)

    def test_unknown_statistic(self):
        with pytest.raises(ValueError):
            conformal.exact_cdf("Q", 2.0)

    @pytest.mark.parametrize("stat", conformal.STAT_NAMES)
    def test_nondecreasing_and_bounded_on_grid(self, stat):
        grid = default_grids()[stat]
        _, _, cdf = conformal.factor_table(stat, grid)
        assert np.all(np.diff(cdf) >= 0)
        assert np.all((cdf >= 0) & (cdf <= 1))

    @pytest.mark.parametrize("stat", conformal.STAT_NAMES)
    def test_limit_at_large_threshold(self, stat):
        assert conformal.exact_cdf(stat, 1e6) == pytest.approx(1.0, abs=1e-6)

    def test_factor_table_edge_rows(self):
        d0, di, cdf = conformal.factor_table("Y", np.array([1.0, 1.5]))
        assert d0[0] == 0.0 and math.isinf(di[0]) and cdf[0] == 0.0
        assert np.isfinite(d0[1]) and np.isfinite(di[1])


class TestMapsAgainstFactors:
    """The avoided-region maps must fix 0 and i, and their numerically
    differentiated derivative magnitudes must reproduce the closed forms."""

    @pytest.mark.parametrize("stat", conformal.STAT_NAMES)
    def test_fixed_points_and_derivatives(self, stat):
        rng = np.random.default_rng(hash(stat) % 2**32)
        lo = 0.05 if stat == "X" else 1.05
        h = 1e-6
        for w in np.exp(rng.uniform(math.log(lo), math.log(20.0), size=300)):
            assert abs(conformal.avoid_map(stat, w, 0j)) < 1e-12
            assert abs(conformal.avoid_map(stat, w, 1j) - 1j) < 1e-12
            d0, di = conformal.factors(stat, w)
            fd0 = abs(
                conformal.avoid_map(stat, w, h + 0j) - conformal.avoid_map(stat, w, -h + 0j)
            ) / (2 * h)
            fdi = abs(
                conformal.avoid_map(stat, w, 1j + h) - conformal.avoid_map(stat, w, 1j - h)
            ) / (2 * h)
            assert abs(fd0 - d0) <= 1e-8 * max(1.0, d0)
            assert abs(fdi - di) <= 1e-8 * max(1.0, di)

    def test_map_domains(self):
        with pytest.raises(ValueError):
            conformal.map_X(0.0, 0.5j)
        with pytest.raises(ValueError):
            conformal.map_S(1.0, 0.5j)


class TestAngularDensity:
    def test_zero_at_boundary(self):
        assert conformal.angular_density_reference(0.0) == 0.0
        assert conformal.angular_density_reference(math.pi) == pytest.approx(0.0, abs=1e-12)

    def test_symmetry(self):
        for t in np.linspace(0.05, math.pi / 2, 25):
            a = conformal.angular_density_reference(t)
            b = conformal.angular_density_reference(math.pi - t)
            assert a == pytest.approx(b, abs=1e-12)

    def test_integrates_to_one(self):
        total, _ = quad(conformal.angular_density_reference, 0.0, math.pi, epsabs=1e-12)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_normalizer_against_closed_form(self):
        # independent oracle: integral of sin^c over [0, pi] in terms of Gamma
        c = 25 / 48
        closed = math.sqrt(math.pi) * gamma_fn((c + 1) / 2) / gamma_fn(c / 2 + 1)
        value = math.sin(1.0) ** c / conformal.angular_density_reference(1.0)
        assert value == pytest.approx(closed, rel=1e-10)

    def test_domain(self):
        with pytest.raises(ValueError):
            conformal.angular_density_reference(-0.1)
        with pytest.raises(ValueError):
            conformal.angular_density_reference(3.5)
