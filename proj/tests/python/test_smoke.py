import math

import numpy as np
import pytest

import radarbias as rb

EXAMPLE_A = dict(
    relative_bias=[200.0, 500.0, 300.0],
    geometry1=(25000.0, 0.0, 0.78540),
    geometry2=(50000.0, 0.0, 2.3562),
    weights=[2, 1.25e9, 1.25e9, 2, 5e9, 5e9],
)


def test_coordinates():
    p = rb.spherical_to_cartesian(2.0, 0.3, -0.4)
    (r, psi, theta), pole = rb.cartesian_to_spherical(p)
    assert (r, psi, theta) == pytest.approx((2.0, 0.3, -0.4), abs=1e-12)
    assert not pole
    assert rb.cartesian_to_spherical([-1.0, 0.0, 0.0])[0][1] == pytest.approx(math.pi)

    face = rb.enu_to_face(0.7, 0.2)
    np.testing.assert_allclose(face @ rb.face_to_enu(0.7, 0.2), np.eye(3), atol=1e-15)
    t = rb.enu1_to_enu2((0.1, 0.6), (0.12, 0.58))
    np.testing.assert_allclose(t @ t.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(t, rb.eci_to_enu((0.12, 0.58)) @ rb.eci_to_enu((0.1, 0.6)).T, atol=1e-12)

    there = rb.enu1_to_enu2_position([1000.0, -2000.0, 300.0], (0.1, 0.6), (0.12, 0.58))
    back = rb.enu1_to_enu2_position(there, (0.12, 0.58), (0.1, 0.6))
    np.testing.assert_allclose(back, [1000.0, -2000.0, 300.0], atol=1e-9)
    assert rb.site_position_eci((0.0, 0.0), 6378137.0, 0.0)[0] == pytest.approx(6378137.0)

    with pytest.raises(rb.DomainError):
        rb.cartesian_to_spherical([0.0, 0.0, 0.0])


def test_registration_example_a():
    s = rb.solve_absolute_bias(**EXAMPLE_A)
    assert s["bias1"] == pytest.approx((-1.7678e2, -1.0000e-2, -1.4142e-3), rel=1e-3)
    assert s["bias2"] == pytest.approx((3.5355e1, 5.0000e-3, -3.5355e-3), rel=1e-3)
    assert s["unit_weight_cost"] == pytest.approx(1.6250e4, rel=1e-3)
    assert s["kkt_residual"] < 1e-9

    a1 = rb.build_A(EXAMPLE_A["geometry1"])
    a2 = rb.build_A(EXAMPLE_A["geometry2"])
    np.testing.assert_allclose(a2 @ s["bias2"] - a1 @ s["bias1"], EXAMPLE_A["relative_bias"], atol=1e-6)


def test_registration_errors():
    with pytest.raises(rb.SingularGeometry, match="sensor 2"):
        rb.solve_absolute_bias([1.0, 2.0, 3.0], (1e4, 0.0, 0.1), (0.0, 0.0, 0.1))
    with pytest.raises(ValueError):
        rb.solve_absolute_bias([1.0, 2.0, 3.0], (1e4, 0.0, 0.1), (1e4, 0.0, 0.1), weights=[1, 2])
    assert issubclass(rb.SingularGeometry, ArithmeticError)


def test_gains():
    beta = rb.solve_beta(0.2, 2.0)
    assert abs(beta - 0.04385) < 5e-5
    assert abs(rb.gain_polynomial(0.2, beta, 2.0)) < 1e-12
    assert rb.validate_gains(0.2, beta)["ok"]
    bad = rb.validate_gains(0.2, 3.6)
    assert not bad["ok"]
    assert any(f.startswith("condition 3") for f in bad["failures"])
    with pytest.raises(ValueError):
        rb.solve_beta(0.0, 2.0)

    pc = rb.predicted_covariances(0.2, beta, q22=2.0, Lambda=4.0)
    assert pc["Sdot"][0, 0] - pc["Mdot"][0, 0] == pytest.approx(4.0)


def test_monte_carlo():
    out = rb.run_monte_carlo(0.2, 0.04385, q22=2.0, Lambda=4.0, n_runs=4000, seed=1)
    assert out["relative_errors"][0, 0] < 0.05
    assert out["samples"] == 4000 * 100
    again = rb.run_monte_carlo(0.2, 0.04385, q22=2.0, Lambda=4.0, n_runs=4000, seed=1)
    np.testing.assert_array_equal(out["empirical_S"], again["empirical_S"])
    with pytest.raises(rb.InvalidGains):
        rb.run_monte_carlo(0.2, 0.0, q22=2.0)


def test_alpha_beta_filter_converges_to_steady_gain():
    z = np.zeros(2000)
    out = rb.run_alpha_beta_filter(z, q22=2.0, Lambda=4.0)
    alpha, beta_over_t = out["gains"][-1]
    assert beta_over_t == pytest.approx(rb.solve_beta(alpha, 2.0), abs=1e-8)

    fixed = rb.run_alpha_beta_filter(np.arange(10.0), q22=2.0, fixed_gains=(0.2, 0.04385))
    np.testing.assert_allclose(fixed["gains"][:, 0], 0.2)
    assert fixed["estimates"].shape == (10, 2)
