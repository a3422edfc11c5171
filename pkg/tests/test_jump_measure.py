"""Closed forms of the jump-law functionals against direct quadrature."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from shotpricer import (
    ArrivalRate,
    ForceStatistics,
    GaussianJumpLaw,
    diffusion_moments,
    force_statistics,
    varsigma,
    xi,
)
from shotpricer.errors import ParameterError


def gauss_pdf(eta, nu, delta):
    return math.exp(-0.5 * ((eta - nu) / delta) ** 2) / (delta * math.sqrt(2.0 * math.pi))


def varsigma_by_quadrature(nu: float, delta: float) -> float:
    """Independent oracle: integrate (e^eta - 1) against the jump density."""
    lo, hi = nu - 12.0 * delta, nu + 12.0 * delta + delta * delta
    val, _ = quad(lambda e: gauss_pdf(e, nu, delta) * math.expm1(e), lo, hi, limit=200)
    return val


def xi_by_quadrature(nu: float, delta: float, k: float) -> complex:
    """Independent oracle: integrate (e^{ik eta} - 1) against the jump density."""
    lo, hi = nu - 12.0 * delta, nu + 12.0 * delta
    re, _ = quad(
        lambda e: gauss_pdf(e, nu, delta) * (math.cos(k * e) - 1.0), lo, hi, limit=400
    )
    im, _ = quad(lambda e: gauss_pdf(e, nu, delta) * math.sin(k * e), lo, hi, limit=400)
    return complex(re, im)


class TestVarsigma:
    def test_zero_law(self):
        assert varsigma(GaussianJumpLaw(0.0, 0.0)) == 0.0

    def test_exponent_cancellation(self):
        for delta in (0.1, 0.5, 1.0):
            assert varsigma(GaussianJumpLaw(-0.5 * delta**2, delta)) == pytest.approx(
                0.0, abs=1e-15
            )

    def test_example_value(self):
        # frozen from varsigma_by_quadrature(0.1, 0.2) = 0.12749685157937566
        assert varsigma(GaussianJumpLaw(0.1, 0.2)) == pytest.approx(
            0.12749685157937566, abs=1e-12
        )

    @pytest.mark.parametrize("nu", [-1.0, -0.3, 0.0, 0.4, 1.0])
    @pytest.mark.parametrize("delta", [0.05, 0.3, 1.0])
    def test_matches_quadrature(self, nu, delta):
        assert varsigma(GaussianJumpLaw(nu, delta)) == pytest.approx(
            varsigma_by_quadrature(nu, delta), abs=1e-10
        )


class TestXi:
    def test_zero_frequency(self):
        assert xi(GaussianJumpLaw(0.3, 0.7), 0.0) == 0.0

    def test_minus_i_gives_varsigma(self):
        for nu in (-0.5, 0.0, 0.25):
            for delta in (0.0, 0.2, 0.8):
                law = GaussianJumpLaw(nu, delta)
                val = xi(law, -1j)
                assert val.imag == pytest.approx(0.0, abs=1e-14)
                assert val.real == pytest.approx(varsigma(law), rel=1e-13, abs=1e-14)

    def test_example_value(self):
        # frozen from xi_by_quadrature(0, 1, 1) = exp(-1/2) - 1
        val = xi(GaussianJumpLaw(0.0, 1.0), 1.0)
        assert val == pytest.approx(-0.3934693402873666, abs=1e-12)

    @pytest.mark.parametrize("nu", [-1.0, 0.0, 0.6])
    @pytest.mark.parametrize("delta", [0.1, 0.5, 1.0])
    @pytest.mark.parametrize("k", [-20.0, -2.5, 0.7, 20.0])
    def test_matches_quadrature(self, nu, delta, k):
        law = GaussianJumpLaw(nu, delta)
        assert xi(law, k) == pytest.approx(xi_by_quadrature(nu, delta, k), abs=1e-10)

    def test_real_part_nonpositive(self):
        law = GaussianJumpLaw(0.2, 0.4)
        for k in np.linspace(-20, 20, 101):
            assert xi(law, k).real <= 1e-15


class TestMoments:
    def test_zero_rate(self):
        drift, var = diffusion_moments(ArrivalRate(0.0), GaussianJumpLaw(0.3, 0.4))
        assert drift == 0.0 and var == 0.0

    def test_example(self):
        drift, var = diffusion_moments(ArrivalRate(4.0), GaussianJumpLaw(0.1, 0.2))
        assert drift == pytest.approx(0.4)
        assert var == pytest.approx(0.2)

    def test_pure_width(self):
        drift, var = diffusion_moments(ArrivalRate(1.0), GaussianJumpLaw(0.0, 0.3))
        assert drift == 0.0
        assert var == pytest.approx(0.09)

    @pytest.mark.parametrize("nu,delta", [(0.1, 0.2), (-0.4, 0.7), (0.0, 1.0)])
    def test_second_moment_by_quadrature(self, nu, delta):
        lam = 3.0
        _, var = diffusion_moments(ArrivalRate(lam), GaussianJumpLaw(nu, delta))
        num, _ = quad(
            lambda e: gauss_pdf(e, nu, delta) * e * e, nu - 14 * delta, nu + 14 * delta,
            limit=200,
        )
        assert var == pytest.approx(lam * num, abs=1e-10)


class TestForceStatistics:
    def test_mean(self):
        fs = force_statistics(ArrivalRate(2.0), GaussianJumpLaw(0.5, 0.0))
        assert fs.mean == pytest.approx(1.0)

    def test_all_zero(self):
        fs = force_statistics(ArrivalRate(0.0), GaussianJumpLaw(0.5, 0.2))
        assert fs == ForceStatistics(0.0, 0.0, 0.0)

    def test_spike_weight(self):
        fs = force_statistics(ArrivalRate(3.0), GaussianJumpLaw(0.0, 0.1))
        assert fs.spike_weight == pytest.approx(0.03)
        assert fs.mean_product == 0.0


class TestValidation:
    def test_negative_delta_rejected(self):
        with pytest.raises(ParameterError):
            GaussianJumpLaw(0.0, -0.1)

    def test_negative_rate_rejected(self):
        with pytest.raises(ParameterError):
            ArrivalRate(-1.0)

    def test_negative_spike_rejected(self):
        with pytest.raises(ParameterError):
            ForceStatistics(0.0, -1.0, 0.0)
