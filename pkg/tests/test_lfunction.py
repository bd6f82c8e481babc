import math

import numpy as np
import pytest

from contraction_lab.exceptions import InvalidInputError
from contraction_lab.lfunction import (
    b_discrete_vs_envelope,
    b_t_scaled,
    gamma_crossing_time,
    gamma_lower_eval,
    l_quadrature,
    l_series,
    ode_residual,
)


@pytest.mark.parametrize("alpha", [0.5, 0.75, 0.751, 0.753])
def test_quadrature_agrees_with_series(alpha):
    for theta in np.linspace(0.05, 5.0, 12):
        q = l_quadrature(alpha, theta)
        s = l_series(alpha, theta)
        assert q == pytest.approx(s, rel=1e-8)


def test_series_handles_large_theta():
    # Large-theta regime: L tends to 1/2 from above.
    for theta in (50.0, 500.0, 5e4):
        value = l_series(0.75, theta)
        assert 0.5 < value < 0.6
    assert l_series(0.75, 5e4) < l_series(0.75, 500.0)


def test_l_small_theta_linear_bound():
    # L_a(theta) <= theta/(1-a) for every theta.
    for alpha in (0.5, 0.75):
        for theta in (1e-4, 1e-2, 0.1):
            assert l_series(alpha, theta) <= theta / (1.0 - alpha) * (1.0 + 1e-12)


def test_l_validates_inputs():
    with pytest.raises(InvalidInputError):
        l_series(1.5, 1.0)
    with pytest.raises(InvalidInputError):
        l_quadrature(0.75, 0.0)


def test_ode_residual_small():
    assert ode_residual(0.75, np.linspace(0.1, 5.0, 10), h=1e-5) <= 1e-6
    assert ode_residual(0.5, [1.0], h=1e-5) <= 1e-6


def test_ode_residual_rejects_zero_step():
    with pytest.raises(InvalidInputError):
        ode_residual(0.75, [1.0], h=0.0)


def test_gamma_below_l():
    rng = np.random.default_rng(0)
    for _ in range(10):
        alpha = rng.uniform(0.3, 0.9)
        theta = rng.uniform(0.1, 3.0)
        t = int(rng.integers(1, 10_000))
        assert gamma_lower_eval(alpha, theta, t) <= l_series(alpha, theta) + 1e-12


def test_gamma_monotone_in_horizon():
    values = [gamma_lower_eval(0.753, 0.75, 2**k) for k in range(15)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_gamma_series_matches_quadrature():
    for t in (10.0, 1e3, 1e6):
        via_quad = gamma_lower_eval(0.753, 0.75, t, method="quad")
        via_series = gamma_lower_eval(0.753, 0.75, t, method="series")
        assert via_series == pytest.approx(via_quad, rel=1e-10)


def test_gamma_crossing_time_brackets_unity():
    t1 = gamma_crossing_time(0.753, 0.75)
    assert t1 is not None
    assert 1e9 < t1 < 1e10  # the crossing is far out but finite
    assert gamma_lower_eval(0.753, 0.75, t1, method="series") >= 1.0
    assert gamma_lower_eval(0.753, 0.75, t1 - 1, method="series") < 1.0


def test_gamma_crossing_gives_up_below_limit():
    # At alpha = 3/4 the envelope stays below 1, so no crossing exists.
    assert gamma_crossing_time(0.75, 0.75, limit=2**40) is None


def test_b_t_scaled_tiny_cases():
    # t = 1: single term rho * (1/1)^alpha = rho.
    for rho in (0.1, 0.37, 0.5):
        assert b_t_scaled(0.75, 1, rho) == pytest.approx(rho, rel=1e-15)


def test_b_t_endpoint_exact():
    for t in (1, 10, 1000):
        assert abs(b_t_scaled(0.75, t, 0.5) - 0.5) <= 1e-14 * 0.5


def test_b_t_validates():
    with pytest.raises(InvalidInputError):
        b_t_scaled(0.75, 0, 0.3)
    with pytest.raises(InvalidInputError):
        b_t_scaled(0.75, 10, 0.7)


def test_envelope_comparison_small_sweep():
    for t in (10, 100, 1000):
        for rho in np.logspace(-5, np.log10(0.5), 12):
            cmp_ = b_discrete_vs_envelope(0.75, t, min(rho, 0.5))
            assert cmp_.margin >= -1e-9


def test_envelope_comparison_endpoint():
    cmp_ = b_discrete_vs_envelope(0.75, 50, 0.5)
    assert cmp_.envelope == 0.5
    assert math.isinf(cmp_.theta)
    assert abs(cmp_.margin) <= 1e-14
