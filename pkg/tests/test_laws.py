import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from _quadrature import (
    ac_mass_quadrature,
    second_moment_quadrature,
    stieltjes_quadrature,
    upper_half_plane_grid,
)
from mesospec import laws

MP_CASES = [laws.marchenko_pastur(2.0, 1.0), laws.marchenko_pastur(0.25, 1.0),
            laws.marchenko_pastur(1.0, 1.0), laws.marchenko_pastur(0.5, 2.0)]
SEMI_CASES = [laws.semicircle(1.0), laws.semicircle(2.0), laws.semicircle(0.5)]


# --- densities ------------------------------------------------------------------


def test_mp_density_bulk_center_value():
    assert laws.mp_density(2.0, 1.0, 1.0) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-15)


def test_mp_density_outside_support_is_zero():
    assert laws.mp_density(4.5, 1.0, 1.0) == 0.0
    assert laws.mp_density(-0.3, 2.0, 1.0) == 0.0


def test_semicircle_center_and_edges():
    assert laws.semicircle_density(0.0, 1.0) == pytest.approx(1.0 / math.pi, abs=1e-15)
    assert laws.semicircle_density(2.0, 1.0) == 0.0
    assert laws.semicircle_density(-2.0, 1.0) == 0.0


@given(lam=st.floats(min_value=-10, max_value=10), v=st.floats(min_value=0.1, max_value=3))
@settings(max_examples=60)
def test_semicircle_density_even_and_nonnegative(lam, v):
    assert laws.semicircle_density(lam, v) == laws.semicircle_density(-lam, v)
    assert laws.semicircle_density(lam, v) >= 0.0


@given(lam=st.floats(min_value=-2, max_value=8),
       c=st.floats(min_value=0.05, max_value=4), u=st.floats(min_value=0.2, max_value=2))
@settings(max_examples=60)
def test_mp_density_nonnegative(lam, c, u):
    assert laws.mp_density(lam, c, u) >= 0.0


def test_mp_density_vanishes_continuously_at_endpoints():
    # endpoints round in floating point, so demand continuity, not exact zero
    law = laws.marchenko_pastur(2.0, 1.0)
    lower, upper, _, _ = laws.support_and_mass(law)
    for edge in (lower, upper):
        assert laws.mp_density(edge, 2.0, 1.0) < 1e-7
        assert laws.mp_density(edge + math.copysign(1e-9, (lower + upper) / 2 - edge), 2.0, 1.0) < 1e-3


def test_density_normalization_by_quadrature():
    for law in MP_CASES + SEMI_CASES:
        _, _, ac_mass, _ = laws.support_and_mass(law)
        assert abs(ac_mass_quadrature(law) - ac_mass) < 1e-6


def test_semicircle_mass_tight():
    assert abs(ac_mass_quadrature(laws.semicircle(1.0)) - 1.0) < 1e-8


# --- support and mass -----------------------------------------------------------


def test_support_and_mass_mp_above_one():
    lower, upper, ac, atom = laws.support_and_mass(laws.marchenko_pastur(2.0, 1.0))
    assert lower == pytest.approx((1 - math.sqrt(2)) ** 2, abs=1e-12)
    assert upper == pytest.approx((1 + math.sqrt(2)) ** 2, abs=1e-12)
    assert (ac, atom) == (1.0, 0.0)


def test_support_and_mass_mp_below_one():
    lower, upper, ac, atom = laws.support_and_mass(laws.marchenko_pastur(0.25, 1.0))
    assert (lower, upper) == (pytest.approx(0.25), pytest.approx(2.25))
    assert (ac, atom) == (0.25, 0.75)


def test_support_and_mass_semicircle():
    assert laws.support_and_mass(laws.semicircle(2.0)) == (-4.0, 4.0, 1.0, 0.0)


def test_law_validation():
    with pytest.raises(ValueError):
        laws.marchenko_pastur(-1.0, 1.0)
    with pytest.raises(ValueError):
        laws.semicircle(0.0)
    with pytest.raises(ValueError):
        laws.LimitingLaw("lognormal")


# --- Stieltjes transforms --------------------------------------------------------


def test_semicircle_stieltjes_at_i():
    got = laws.stieltjes(laws.semicircle(1.0), 1j)
    assert got == pytest.approx(1j * (math.sqrt(5.0) - 1.0) / 2.0, abs=1e-14)


def test_stieltjes_behaves_like_minus_one_over_z():
    z = 1e3j
    # semicircle has zero mean, so the defect is m2/|z|^2
    assert abs(laws.stieltjes(laws.semicircle(1.0), z) * (-z) - 1.0) < 2e-6
    # MP has mean c u^2 = 2, so the defect is m1/|z| to leading order
    assert abs(laws.stieltjes(laws.marchenko_pastur(2.0, 1.0), z) * (-z) - 1.0) < 3e-3


def test_stieltjes_matches_quadrature():
    z_points = [0.5 + 0.5j, -1.0 + 0.2j, 2.0 + 1.0j, 0.1 + 0.05j, 3.0 + 2.5j, -4.0 + 0.8j]
    for law in MP_CASES + SEMI_CASES:
        for z in z_points:
            got = laws.stieltjes(law, z)
            ref = stieltjes_quadrature(law, z)
            assert abs(got - ref) < 1e-8, f"{law} at z={z}"


def test_stieltjes_herglotz_on_grid():
    for law in MP_CASES + SEMI_CASES:
        for z in upper_half_plane_grid(100):
            assert laws.stieltjes(law, z).imag > 0.0, f"{law} at z={z}"


def test_stieltjes_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        laws.stieltjes(laws.semicircle(1.0), 1.0 - 0.1j)


def test_mp_boundary_value_recovers_density():
    # Im g(lam + i 0) = pi rho(lam); at eta = 1e-3 the defect is O(eta)
    law = laws.marchenko_pastur(1.0, 1.0)
    got = laws.stieltjes(law, 2.0 + 1e-3j).imag
    assert abs(got - math.pi * laws.mp_density(2.0, 1.0, 1.0)) < 1e-3


def test_stieltjes_far_field_bounded_by_second_moment():
    for law in MP_CASES + SEMI_CASES:
        k = second_moment_quadrature(law)
        for z in (10.0 + 10.0j, -30.0 + 40.0j, 100.0j):
            g = laws.stieltjes(law, z)
            assert abs(g + 1.0 / z) <= k / abs(z) ** 2


# --- covariance kernel -----------------------------------------------------------


def test_kernel_reference_values():
    assert laws.covariance_kernel(0.0, 0.0) == 0.25
    assert laws.covariance_kernel(5.0, 3.0) == 0.0  # separation 2 is the zero crossing
    assert laws.covariance_kernel(0.0, 4.0) == -0.03
    assert laws.covariance_kernel(0.0, 1.0) == pytest.approx(0.12, abs=1e-15)
    assert laws.covariance_kernel(0.0, 3.0) == pytest.approx(-5.0 / 169.0, abs=1e-15)


@given(t1=st.floats(-50, 50), t2=st.floats(-50, 50), shift=st.floats(-10, 10))
@settings(max_examples=60)
def test_kernel_stationary_and_even(t1, t2, shift):
    base = laws.covariance_kernel(t1, t2)
    assert laws.covariance_kernel(t1 + shift, t2 + shift) == pytest.approx(base, rel=1e-12, abs=1e-15)
    assert laws.covariance_kernel(t2, t1) == base


def test_kernel_matrix_agrees_with_scalar():
    taus = (0.0, 1.0, 2.0, 4.0)
    k = laws.kernel_matrix(taus)
    for i, a in enumerate(taus):
        for j, b in enumerate(taus):
            assert k[i, j] == laws.covariance_kernel(a, b)


def test_kernel_integrates_to_zero():
    # eigenvalue-number conservation: the kernel has an exact antiderivative
    # x / (4 + x^2), so the line integral vanishes
    value, _ = quad(lambda x: laws.covariance_kernel(0.0, x), -np.inf, np.inf)
    assert abs(value) < 1e-6


def test_kernel_asymptote_values():
    assert laws.kernel_asymptote_check(2.0) == 1.0
    assert abs(laws.kernel_asymptote_check(20.0)) == pytest.approx(0.029506911087148424, abs=1e-15)
    assert abs(laws.kernel_asymptote_check(20.0)) <= 0.03
    assert abs(laws.kernel_asymptote_check(100.0)) < 0.002


@given(delta=st.floats(min_value=200, max_value=1e6))
@settings(max_examples=30)
def test_kernel_asymptote_tends_to_zero(delta):
    assert abs(laws.kernel_asymptote_check(delta)) < abs(laws.kernel_asymptote_check(150.0))
