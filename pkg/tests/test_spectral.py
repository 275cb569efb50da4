import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import (
    chi_direct,
    fd_moment,
    fourier_inversion,
    naive_expectation,
    naive_lattice,
    second_moment_work_coth_mp,
)
from strategies import engines
from swapengine import spectral
from swapengine.engine import EngineParams, mean_occupation_inverse, mean_work
from swapengine.spectral import (
    CountingPoint,
    characteristic_function,
    characteristic_function_sinh,
    joint_distribution,
    moment_set,
    moments_from_chi,
    second_moment_work,
    snr_f,
    snr_f_coth,
    snr_identity_rhs,
    verify_detailed_ft,
)

REF = EngineParams(5, 1.3, 0.7, 0.4, 1.1, 1.0)


def jarzynski_point(p):
    return 1j * p.beta_b, 1j * (p.beta_b - p.beta_a)


# ------------------------------------------------------------------- chi

def test_chi_normalised():
    assert characteristic_function(REF, 0, 0) == pytest.approx(1, abs=1e-15)


@given(engines())
def test_chi_fluctuation_theorem(p):
    assert abs(characteristic_function(p, *jarzynski_point(p)) - 1) < 1e-10


def test_chi_matches_direct_sum():
    rng = np.random.default_rng(7)
    for lam, mu in rng.normal(scale=2, size=(20, 2)):
        assert characteristic_function(REF, lam, mu) == pytest.approx(chi_direct(REF, lam, mu), abs=1e-13)


@given(engines(), st.floats(-5, 5), st.floats(-5, 5))
def test_chi_stronger_symmetry(p, lam, mu):
    lj, mj = jarzynski_point(p)
    a = characteristic_function(p, lam, mu)
    b = characteristic_function(p, lj - lam, mj - mu)
    assert abs(a - b) < 1e-10


@given(engines(), st.floats(-3, 3), st.floats(-3, 3))
def test_chi_periodicity(p, lam, mu):
    a = characteristic_function(p, lam, mu)
    assert abs(characteristic_function(p, lam, mu + 2 * math.pi / p.omega_a) - a) < 1e-10
    if abs(p.omega_a - p.omega_b) > 1e-3:
        shift = 2 * math.pi / abs(p.omega_a - p.omega_b)
        assert abs(characteristic_function(p, lam + shift, mu) - a) < 1e-10


def test_sinh_form_cross_check():
    rng = np.random.default_rng(3)
    for lam, mu in rng.uniform(-2, 2, size=(10, 2)):
        assert characteristic_function_sinh(REF, lam, mu) == pytest.approx(characteristic_function(REF, lam, mu), abs=1e-12)


def test_chi_at_removable_singularity():
    # x_a = x_b = x and xi = 0 gives G(x)G(x); no 0/0 in the geometric-sum form
    p = EngineParams(4, 1.0, 1.0, 0.7, 0.7, 1.0)
    assert characteristic_function(p, 0.0, 0.0) == pytest.approx(1.0)
    assert np.isfinite(characteristic_function(p, 1j * 0.7, 0.0))


def test_chi_accepts_arrays():
    lam = np.linspace(-1, 1, 5)
    vals = characteristic_function(REF, lam, 0.3)
    assert vals.shape == (5,)
    assert vals[2] == pytest.approx(characteristic_function(REF, 0.0, 0.3))


def test_counting_point_xi():
    cp = CountingPoint(0.5, 0.25)
    assert cp.xi(REF) == pytest.approx((REF.omega_a - REF.omega_b) * 0.5 - REF.omega_a * 0.25)


# ---------------------------------------------------------------- moments

def test_moments_first_order():
    assert moments_from_chi(REF, 1, 0) == mean_work(REF)
    assert moments_from_chi(REF, 0, 0) == 1.0


def test_heat_second_moment_relation():
    ratio = REF.omega_a**2 / (REF.omega_b - REF.omega_a) ** 2
    assert moments_from_chi(REF, 0, 2) == pytest.approx(ratio * moments_from_chi(REF, 2, 0), rel=1e-14)


def test_low_order_moments_match_enumeration():
    p = EngineParams(3, 1.0, 0.4, 0.3, 0.9, 0.8)
    for l, s in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        exact = naive_expectation(p, lambda w, q: w**l * q**s)
        assert moments_from_chi(p, l, s) == pytest.approx(exact, rel=1e-12)


def test_moments_match_finite_differences():
    chi = lambda lam, mu: characteristic_function(REF, lam, mu)  # noqa: E731
    for l, s in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        assert moments_from_chi(REF, l, s) == pytest.approx(fd_moment(chi, l, s), rel=1e-5)


def test_higher_orders_from_distribution():
    p = EngineParams(4, 1.0, 0.4, 0.3, 0.9, 0.8)
    for l, s in [(3, 0), (2, 2), (0, 4)]:
        exact = naive_expectation(p, lambda w, q: w**l * q**s)
        assert moments_from_chi(p, l, s) == pytest.approx(exact, rel=1e-12)
    with pytest.raises(OverflowError):
        moments_from_chi(p, 3, 2)
    with pytest.raises(ValueError):
        moments_from_chi(p, -1, 0)


def test_second_moment_examples():
    assert second_moment_work(REF.replace(theta=0.0)) == 0
    # qubit formula (omega_b - omega_a)^2 [N_A + N_B - 2 N_A N_B]
    n_a, n_b = 0.3, 0.1
    p = EngineParams(2, 1.0, 0.5, math.log((1 - n_a) / n_a), math.log((1 - n_b) / n_b) / 0.5, math.pi / 2)
    assert second_moment_work(p) == pytest.approx(0.085, rel=1e-12)


def test_second_moment_three_ways():
    p = EngineParams(6, 1.2, 0.5, 0.35, 1.3, 1.2)
    dist = joint_distribution(p)
    via_dist = dist.moment(2, 0)
    via_enum = naive_expectation(p, lambda w, q: w * w)
    assert second_moment_work(p) == pytest.approx(via_dist, rel=1e-12)
    assert second_moment_work(p) == pytest.approx(via_enum, rel=1e-12)


@given(engines())
def test_second_moment_matches_coth_form(p):
    assert second_moment_work(p) == pytest.approx(second_moment_work_coth_mp(p), rel=1e-10, abs=1e-300)


def test_snr_f_qubit():
    assert snr_f(0.5, 1.5, 2) == pytest.approx(1 / math.tanh(0.5), rel=1e-13)
    assert snr_f_coth(0.5, 1.5, 2) == pytest.approx(1 / math.tanh(0.5), rel=1e-13)


@given(engines(theta=st.floats(0.05, math.pi - 0.05)))
def test_snr_identity(p):
    ms = moment_set(p)
    if ms.mean_w == 0 or ms.entropy_production == 0:
        return
    assert snr_identity_rhs(p) == pytest.approx(ms.var_w / ms.mean_w**2, rel=1e-10)


def test_snr_identity_undefined_at_zero_work():
    with pytest.raises(ZeroDivisionError):
        snr_identity_rhs(REF.replace(theta=0.0))


@given(engines(theta=st.floats(0.05, math.pi - 0.05)))
def test_moment_set_consistent_with_distribution(p):
    ms = moment_set(p)
    dist = joint_distribution(p)
    w_mean, w_var = dist.mean_var(dist.work)
    scale = max(1.0, abs(ms.var_w))
    assert ms.mean_w == pytest.approx(w_mean, rel=1e-10, abs=1e-12)
    assert abs(ms.var_w - w_var) <= 1e-10 * scale
    qh_mean, qh_var = dist.mean_var(dist.heat_hot)
    assert abs(ms.var_qh - qh_var) <= 1e-10 * max(1.0, qh_var)


@given(engines())
def test_covariance_sign(p):
    from swapengine.engine import Regime, classify_regime

    ms = moment_set(p)
    regime = classify_regime(p)
    if ms.var_w == 0 or regime is Regime.BOUNDARY:
        return
    if regime is Regime.THERMAL_ACCELERATOR:
        assert ms.cov_w_qh > 0
    else:
        assert ms.cov_w_qh < 0


# ---------------------------------------------------------- distribution

def test_distribution_identity_coupling():
    dist = joint_distribution(REF.replace(theta=0.0))
    assert dist.p(0) == 1.0
    assert np.count_nonzero(dist.prob) == 1


def test_distribution_geometric_tail():
    p = EngineParams(8, 1.0, 0.5, 1.0, 4.0, math.pi / 2)  # beta*omega = 1 and 2
    dist = joint_distribution(p)
    for k in range(1, 4):
        # ratio differs from e^{x} only through the finite-d tail factor
        tail = (1 - math.exp(-(8 - k) * 3)) / (1 - math.exp(-(8 - k - 1) * 3))
        assert dist.p(k) / dist.p(k + 1) == pytest.approx(math.e * tail, rel=1e-12)


@given(engines())
def test_distribution_normalised_and_positive(p):
    dist = joint_distribution(p)
    assert dist.prob.sum() == pytest.approx(1, abs=1e-12)
    assert np.all(dist.prob >= 0)


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_distribution_matches_four_index_sum(d):
    p = EngineParams(d, 1.1, 0.6, 0.45, 1.2, 0.9)
    prob, off = naive_lattice(p)
    assert off < 1e-15
    np.testing.assert_allclose(joint_distribution(p).prob, prob, atol=1e-13)


def test_distribution_by_fourier_inversion():
    p = EngineParams(5, 1.0, 0.4, 0.3, 1.1, 1.2)
    chi_phi = lambda f: characteristic_function(p, 0.0, f / p.omega_a)  # noqa: E731
    inv = fourier_inversion(chi_phi, p.d)
    np.testing.assert_allclose(joint_distribution(p).prob, inv, atol=1e-8)


def test_joint_is_anti_diagonal():
    dist = joint_distribution(REF)
    assert dist.joint(-2, 2) == dist.p(2)
    assert dist.joint(1, 2) == 0.0
    assert dist.p(REF.d) == 0.0


# -------------------------------------------------------- fluctuation theorem

def test_detailed_ft_examples():
    assert verify_detailed_ft(EngineParams(2, 1.0, 0.5, 0.3, 1.0, math.pi / 2)).max_deviation < 1e-12
    p = EngineParams(8, 1.0, 0.5, 1.0, 4.0, math.pi / 4)
    check = verify_detailed_ft(p)
    assert check.max_deviation < 1e-12
    assert check.slope == pytest.approx(1.0)


@given(engines())
def test_detailed_ft_random(p):
    check = verify_detailed_ft(p)
    assert check.max_deviation < 1e-10


def test_detailed_ft_flags_underflow():
    p = EngineParams(16, 1.0, 0.5, 60.0, 200.0, 1.0)
    check = verify_detailed_ft(p)
    assert check.underflow and check.max_deviation < 1e-10


@given(engines())
def test_efficiency_non_fluctuating(p):
    assert spectral.efficiency_is_nonfluctuating(p)


def test_bosonic_limit_relaxed_tur():
    for x, y in [(0.5, 1.0), (1.0, 2.0), (0.1, 3.0), (2.0, 5.0)]:
        p = EngineParams(256, 1.0, 1.0 if x == y else 0.5, x, 2 * y, math.pi / 2)
        ms = moment_set(p)
        assert ms.var_w / ms.mean_w**2 - 2 / ms.entropy_production >= 0.95


def test_inverse_temperature_helper_used_in_qubit_example():
    assert mean_occupation_inverse(0.3, 2) == pytest.approx(math.log(7 / 3))
