import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

from iontomo import (
    DeformationSpec,
    NumericalError,
    f_value,
    f_values,
    ladder_matrices,
    make_state,
    moments,
    psi_number,
    psi_state,
    verify_eigenstate,
)
from iontomo.dynamics import epsilon_at

VOGEL_03 = DeformationSpec("vogel_lamb_dicke", 0.3)
C2_ALPHA1 = 0.42888194248035339  # e^{-1/2} / sqrt(2)
PSI_ALPHA1_ORIGIN = 0.076354757088582157  # pi^{-1/2} e^{-2}, coherent alpha=1 at x=0


# ---------------------------------------------------------------- deformation


def test_identity_and_vogel_at_zero_eta():
    for n in range(12):
        assert f_value(DeformationSpec(), n) == 1.0
        assert f_value(DeformationSpec("vogel_lamb_dicke", 0.0), n) == pytest.approx(1.0, abs=1e-15)


def test_printed_variant_at_zero_eta():
    assert f_value(DeformationSpec("paper_lamb_dicke", 0.0), 2) == pytest.approx(2.0, abs=1e-15)
    # its eta -> 0 limit is (n + 2) / n, not 1
    assert f_value(DeformationSpec("paper_lamb_dicke", 0.0), 5) == pytest.approx(7 / 5)


def test_f_zero_is_one_for_every_variant():
    for spec in (DeformationSpec(), VOGEL_03, DeformationSpec("paper_lamb_dicke", 0.4),
                 DeformationSpec("custom_table", table=(9.0, 2.0))):
        assert f_value(spec, 0) == 1.0


def test_vanishing_denominator_reports_n():
    # L_1^0(x) = 1 - x vanishes at eta = 1
    with pytest.raises(NumericalError, match="n=1"):
        f_value(DeformationSpec("vogel_lamb_dicke", 1.0), 1)


def test_custom_table():
    spec = DeformationSpec("custom_table", table=[1.0, 0.5, 2.0])
    np.testing.assert_array_equal(f_values(spec, 2), [1.0, 0.5, 2.0])
    with pytest.raises(ValueError):
        f_value(spec, 3)
    with pytest.raises(NumericalError):
        f_value(DeformationSpec("custom_table", table=[1.0, 0.0]), 1)


def test_deformation_validation():
    with pytest.raises(ValueError):
        DeformationSpec("quadratic")
    with pytest.raises(ValueError):
        DeformationSpec("vogel_lamb_dicke", -0.1)
    with pytest.raises(ValueError):
        DeformationSpec("custom_table")


# ---------------------------------------------------------------- coefficients


def test_vacuum_coefficients():
    st0 = make_state("coherent", 0.0)
    assert st0.coeffs[0] == 1 and not np.any(st0.coeffs[1:])


def test_coherent_coefficient_oracle():
    c = make_state("coherent", 1.0).coeffs
    assert c[2] == pytest.approx(C2_ALPHA1, abs=1e-15)
    np.testing.assert_allclose(np.abs(c) ** 2, poisson.pmf(np.arange(41), 1.0), atol=1e-15)


def test_number_state():
    st3 = make_state("number", level=3, truncation=6)
    np.testing.assert_array_equal(st3.coeffs, np.eye(7)[3])
    with pytest.raises(ValueError):
        make_state("number", level=7, truncation=6)


def test_linear_limit_coefficients():
    a = 0.8 + 0.2j
    coh = make_state("coherent", a).coeffs
    fco = make_state("f_coherent", a, deformation=DeformationSpec()).coeffs
    assert np.max(np.abs(coh - fco)) <= 1e-12


def test_tail_check_rejects_short_truncation():
    with pytest.raises(ValueError, match="tail"):
        make_state("coherent", 3.0, truncation=10)


def test_make_state_validation():
    with pytest.raises(ValueError):
        make_state("cat")
    with pytest.raises(ValueError):
        make_state("coherent", truncation=0)
    with pytest.raises(ValueError):
        make_state("coherent", complex(float("nan"), 0))


def test_coefficients_are_immutable():
    with pytest.raises(ValueError):
        make_state("coherent", 0.3).coeffs[0] = 0


@given(re=st.floats(-1.2, 1.2), im=st.floats(-1.2, 1.2), eta=st.floats(0, 0.3))
@settings(max_examples=40, deadline=None)
def test_normalisation_within_tail(re, im, eta):
    st_ = make_state("f_coherent", complex(re, im), deformation=DeformationSpec("vogel_lamb_dicke", eta))
    assert st_.tail_bound < 1e-8
    assert 1 - st_.tail_bound - 1e-14 <= st_.norm_sq <= 1 + 1e-14


# ---------------------------------------------------------------- wavefunctions


def test_ground_state_at_t0(traj):
    x = np.linspace(-4, 4, 17)
    np.testing.assert_allclose(psi_number(0, x, traj, 0.0), np.pi**-0.25 * np.exp(-(x**2) / 2), atol=1e-15)


def _gram(traj, t, mmax=6):
    e, _ = epsilon_at(traj, t)
    x = np.linspace(-14 * abs(e), 14 * abs(e), 6001)
    psis = np.array([psi_number(m, x, traj, t) for m in range(mmax + 1)])
    return np.trapezoid(psis[:, None, :] * psis[None, :, :].conj(), x, axis=2)


@pytest.mark.parametrize("t", [0.0, 1.3, 4.7, 9.9])
def test_number_states_orthonormal(traj, t):
    assert np.max(np.abs(_gram(traj, t) - np.eye(7))) <= 1e-8


def test_closed_form_matches_series(traj):
    st_ = make_state("coherent", 0.9 - 0.4j)
    x = np.array([-2.0, 0.0, 2.0])
    for t in (0.0, 2.2):
        a = psi_state(st_, x, traj, t)
        b = psi_state(st_, x, traj, t, closed_form=False)
        assert np.max(np.abs(a - b)) <= 1e-10


def test_vacuum_state_is_ground_state(traj):
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(psi_state(make_state("coherent", 0.0), x, traj, 3.1), psi_number(0, x, traj, 3.1))


def test_coherent_density_at_origin(traj):
    assert abs(psi_state(make_state("coherent", 1.0), 0.0, traj, 0.0)) ** 2 == pytest.approx(PSI_ALPHA1_ORIGIN,
                                                                                             rel=1e-14)


def test_time_range_is_checked(traj):
    with pytest.raises(ValueError):
        psi_number(0, 0.0, traj, 11.0)


# ---------------------------------------------------------------- moments


def test_moments_at_t0(traj):
    m = moments(make_state("coherent", 0.6 + 0.1j), traj, 0.0)
    assert (m.sigma_qq, m.sigma_pp, m.sigma_pq) == pytest.approx((0.5, 0.5, 0.0), abs=1e-15)
    m0 = moments(make_state("coherent", 0.0), traj, 4.0)
    assert m0.mean_q == 0 and m0.mean_p == 0


def _fft_moments(psi, x):
    """Position moments by trapezoid, momentum moments from the FFT momentum density."""
    dx = x[1] - x[0]
    dens = np.abs(psi) ** 2
    norm = np.sum(dens) * dx
    mq = np.sum(x * dens) * dx / norm
    sqq = np.sum((x - mq) ** 2 * dens) * dx / norm
    phi = np.fft.fftshift(np.fft.fft(psi))
    k = np.fft.fftshift(np.fft.fftfreq(x.size, dx)) * 2 * np.pi
    pd = np.abs(phi) ** 2
    pd /= pd.sum()
    mp_ = np.sum(k * pd)
    spp = np.sum((k - mp_) ** 2 * pd)
    # covariance from the symmetrised product: Re <(x - mq)(p - mp)>
    dpsi = np.fft.ifft(np.fft.ifftshift(1j * k * phi))
    cross = np.sum(np.conj(psi) * (x - mq) * (-1j) * dpsi).real * dx / norm
    return mq, mp_, sqq, spp, cross


def test_moments_against_independent_quadrature(traj):
    st_ = make_state("coherent", 1 + 1j)
    x = np.linspace(-30, 30, 8192, endpoint=False)
    psi = psi_state(st_, x, traj, 1.5)
    mq, mp_, sqq, spp, spq = _fft_moments(psi, x)
    m = moments(st_, traj, 1.5)
    got = (m.mean_q, m.mean_p, m.sigma_qq, m.sigma_pp, m.sigma_pq)
    assert np.max(np.abs(np.array(got) - [mq, mp_, sqq, spp, spq])) <= 1e-6


def test_numerical_moments_agree_with_closed_form(traj):
    st_ = make_state("coherent", 0.4 - 0.7j)
    a = moments(st_, traj, 6.3)
    b = moments(st_, traj, 6.3, method="quadrature")
    np.testing.assert_allclose(
        [a.mean_q, a.mean_p, a.sigma_qq, a.sigma_pp, a.sigma_pq],
        [b.mean_q, b.mean_p, b.sigma_qq, b.sigma_pp, b.sigma_pq],
        atol=1e-8,
    )


def test_f_coherent_moments_are_physical(traj):
    m = moments(make_state("f_coherent", 0.7, deformation=VOGEL_03), traj, 2.0)
    assert m.sigma_qq > 0 and m.sigma_pp > 0 and abs(m.correlation_r) < 1
    assert m.sigma_qq * m.sigma_pp - m.sigma_pq**2 >= 0.25 - 1e-9


@given(t=st.floats(0, 10), re=st.floats(-2, 2), im=st.floats(-2, 2))
@settings(max_examples=50, deadline=None)
def test_uncertainty_is_minimal(traj, t, re, im):
    m = moments(make_state("coherent", complex(re, im)), traj, t)
    assert abs(m.sigma_qq * m.sigma_pp - m.sigma_pq**2 - 0.25) <= 1e-9
    assert abs(m.correlation_r) < 1


# ---------------------------------------------------------------- algebra


def test_identity_deformation_gives_unit_commutator():
    _, _, F = ladder_matrices(DeformationSpec(), 10)
    np.testing.assert_array_equal(F, np.eye(11))


def test_commutator_matches_f_on_interior():
    N = 40
    _, B, F = ladder_matrices(VOGEL_03, N)
    comm = B @ B.conj().T - B.conj().T @ B
    assert np.max(np.abs((comm - F)[: N - 1, : N - 1])) <= 1e-10


def test_f_diagonal_formula():
    N = 12
    fv = f_values(VOGEL_03, N + 1)
    _, _, F = ladder_matrices(VOGEL_03, N)
    for n in range(N + 1):
        assert F[n, n] == pytest.approx((n + 1) * fv[n + 1] ** 2 - n * fv[n] ** 2, rel=1e-14)


def test_ladder_needs_two_levels():
    with pytest.raises(ValueError):
        ladder_matrices(DeformationSpec(), 1)


def test_eigenstate_residuals():
    assert verify_eigenstate(make_state("coherent", 0.8)) < 1e-10
    assert verify_eigenstate(make_state("f_coherent", 0.7, deformation=VOGEL_03, truncation=40)) < 1e-8
    with pytest.raises(ValueError):
        verify_eigenstate(make_state("number", level=2))


@given(b=st.floats(-1, 1), eta=st.floats(0, 0.3))
@settings(max_examples=30, deadline=None)
def test_eigenvalue_property(b, eta):
    st_ = make_state("f_coherent", b, deformation=DeformationSpec("vogel_lamb_dicke", eta))
    assert verify_eigenstate(st_) <= 1e-8
