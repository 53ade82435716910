import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iontomo.specfun import (
    NumericalError,
    QuadratureSpec,
    hermite,
    hermite_normalized,
    integrate_1d,
    integrate_3d,
    laguerre,
    laguerre_table,
)

# 256-bit mpmath evaluation of H_25(1.3)
H25_13 = 4052306015786387.227182252
# (-0.7)^2 * 3!/5! * L_3^2(0.7), L_3^2 summed from its series definition in mpmath
L5M2_07 = 0.1021119166666666666666667


def test_hermite_base_and_cubic():
    assert hermite(0, 3.7) == 1.0
    assert hermite(3, 2.0) == 40.0


def test_hermite_high_order_oracle():
    assert hermite(25, 1.3) == pytest.approx(H25_13, rel=1e-13)


def test_hermite_matches_live_mpmath():
    mp.mp.prec = 256
    for n in (7, 18, 30):
        for x in (-2.2, 0.4, 3.1):
            ref = float(mp.hermite(n, mp.mpf(x)))
            assert hermite(n, x) == pytest.approx(ref, rel=1e-11)


def test_hermite_vectorised_shape():
    x = np.linspace(-1, 1, 7).reshape(7, 1)
    assert hermite(4, x).shape == (7, 1)
    assert hermite_normalized(5, x).shape == (6, 7, 1)


def test_hermite_normalized_matches_definition():
    y = np.array([-1.1, 0.0, 0.9])
    table = hermite_normalized(12, y)
    for n in range(13):
        ref = hermite(n, y) / math.sqrt(2.0**n * math.factorial(n))
        np.testing.assert_allclose(table[n], ref, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("n", range(1, 21))
def test_hermite_derivative_identity(n):
    x = np.linspace(-5, 5, 41)
    h = 1e-3
    # relative to the size of H_n on the interval, which reaches ~1e17 for n=20
    scale = np.max(np.abs(hermite(n, x))) + 1
    fd = (hermite(n, x - 2 * h) - 8 * hermite(n, x - h) + 8 * hermite(n, x + h) - hermite(n, x + 2 * h)) / (12 * h)
    assert np.max(np.abs(fd - 2 * n * hermite(n - 1, x))) / scale <= 1e-8


def test_laguerre_examples():
    assert laguerre(0, 3, 1.7) == 1.0
    assert laguerre(2, 1, 3.0) == pytest.approx(-1.5, abs=1e-15)


def test_laguerre_negative_index_oracle():
    assert laguerre(5, -2, 0.7) == pytest.approx(L5M2_07, rel=1e-13)


def test_laguerre_negative_index_rejects_undefined_branch():
    with pytest.raises(ValueError):
        laguerre(1, -3, 0.5)
    with pytest.raises(ValueError):
        laguerre(-1, 0, 0.5)


@pytest.mark.parametrize("n", range(13))
def test_laguerre_at_zero_is_binomial(n):
    for k in range(13):
        assert laguerre(n, k, 0.0) == math.comb(n + k, n)


def test_laguerre_table_rows():
    x = np.array([0.2, 1.5, 4.0])
    table = laguerre_table(6, 3, x)
    for n in range(7):
        np.testing.assert_allclose(table[n], laguerre(n, 3, x), rtol=1e-13)


@given(n=st.integers(0, 25), k=st.integers(0, 6), x=st.floats(0.0, 20.0))
@settings(max_examples=80, deadline=None)
def test_laguerre_matches_scipy(n, k, x):
    from scipy.special import eval_genlaguerre

    ref = eval_genlaguerre(n, k, x)
    assert laguerre(n, k, x) == pytest.approx(ref, rel=1e-9, abs=1e-9 * math.comb(n + k, n))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec("midpoint")
    with pytest.raises(ValueError):
        QuadratureSpec("trapezoid", n_points=4)
    with pytest.raises(ValueError):
        QuadratureSpec("trapezoid", domain=-1.0)
    with pytest.raises(ValueError):
        QuadratureSpec("trapezoid", domain=float("inf"))


@pytest.mark.parametrize("scheme", ["trapezoid", "simpson", "gauss_hermite"])
def test_gaussian_integral(scheme):
    res = integrate_1d(lambda x: np.exp(-(x**2)), QuadratureSpec(scheme, 201, 8.0))
    assert res.value == pytest.approx(math.sqrt(math.pi), abs=1e-10)


@pytest.mark.parametrize("scheme", ["trapezoid", "simpson", "gauss_hermite"])
def test_odd_integral_vanishes(scheme):
    res = integrate_1d(lambda x: x * np.exp(-(x**2)), QuadratureSpec(scheme, 201, 8.0))
    assert abs(res.value) <= 1e-12


def test_hermite_orthogonality_integral():
    res = integrate_1d(lambda x: hermite(2, x) ** 2 * np.exp(-(x**2)), QuadratureSpec("trapezoid", 401, 8.0))
    assert res.value == pytest.approx(8 * math.sqrt(math.pi), abs=1e-8)


@pytest.mark.filterwarnings("ignore:divide by zero")
def test_non_finite_samples_raise():
    with pytest.raises(NumericalError):
        integrate_1d(lambda x: 1 / x, QuadratureSpec("trapezoid", 201, 1.0))


@pytest.mark.parametrize("scheme,order", [("trapezoid", 2), ("simpson", 4)])
def test_convergence_order(scheme, order):
    # a truncated Gaussian has nonzero end slopes, so the rules show their nominal order
    exact = math.sqrt(math.pi) * math.erf(1.0)
    errs = []
    for n in (17, 33, 65):
        errs.append(abs(integrate_1d(lambda x: np.exp(-(x**2)), QuadratureSpec(scheme, n, 1.0)).value - exact))
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(abs(r - order) < 0.2 for r in rates)


def test_richardson_error_estimate_is_honest():
    exact = math.sqrt(math.pi) * math.erf(1.0)
    res = integrate_1d(lambda x: np.exp(-(x**2)), QuadratureSpec("trapezoid", 33, 1.0))
    assert abs(res.value - exact) <= 2 * res.error


def test_integrate_3d_separable_gaussian():
    val = integrate_3d(lambda X, m, n: np.exp(-(X**2) - m**2 - n**2))
    assert abs(val - math.pi**1.5) <= 1e-8


def test_integrate_3d_odd_in_x():
    val = integrate_3d(lambda X, m, n: X * np.exp(-(X**2) - m**2 - n**2))
    assert abs(val) <= 1e-10


def test_integrate_3d_vacuum_density_entry():
    # rho_00 from the vacuum tomogram: e^{-s^2/4}/(2 pi) int w e^{iX}, with w(X, mu, nu) Gaussian of variance s^2/2
    def integrand(X, mu, nu):
        s2 = mu**2 + nu**2 + 1e-300
        w = np.exp(-(X**2) / s2) / np.sqrt(np.pi * s2)
        return w * np.exp(1j * X) * np.exp(-s2 / 4) / (2 * np.pi)

    spec = QuadratureSpec("trapezoid", (801, 100, 100), (40.0, 10.0, 10.0))
    assert abs(integrate_3d(integrand, spec) - 1) <= 1e-4
