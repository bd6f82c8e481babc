import math
from fractions import Fraction

import numpy as np
import pytest

from contraction_lab.certificates import (
    ONE_POINT_751_FRACTION,
    Q_4_8,
    a_envelope_max,
    all_certificates,
    l_series_bounds,
    l_series_lower,
    l_series_upper,
    one_point_check,
    verify_asup_alpha751,
    verify_bsup_alpha34,
    verify_bsup_alpha751,
    verify_f300,
    verify_k_requirement,
    verify_lower_bound_chain,
    verify_onepoint_alpha34,
    verify_onepoint_alpha751,
)
from contraction_lab.exceptions import InvalidInputError, InvalidTruncationError
from contraction_lab.lfunction import l_quadrature
from contraction_lab.rational import parse_rational


def test_a_envelope_max_small_t():
    assert a_envelope_max(1) == (Fraction(1, 4), Fraction(1, 8))
    assert a_envelope_max(2) == (Fraction(1, 6), Fraction(2, 27))
    with pytest.raises(InvalidInputError):
        a_envelope_max(0)


def test_a_envelope_max_grid_oracle_t300():
    rho_star, value = a_envelope_max(300)
    assert rho_star == Fraction(1, 2 * 301)
    # Numeric oracle: 1e4-point log grid (the maximizer sits near 1/602, so
    # the grid must resolve that scale).
    grid = np.geomspace(1e-5, 0.5, 10_000)
    best = float(np.max(grid * (1.0 - 2.0 * grid) ** 300))
    assert abs(best - float(value)) <= 1e-9


def test_l_series_upper_reproduces_pinned_value():
    theta = Fraction(1491, 1976)
    assert l_series_upper(Fraction(3, 4), theta, N=4, m=8) == Q_4_8


def test_l_series_upper_tightens_with_truncation_orders():
    theta = Fraction(1491, 1976)
    alpha = Fraction(3, 4)
    base = l_series_upper(alpha, theta, N=4, m=8)
    assert l_series_upper(alpha, theta, N=5, m=8) <= base
    assert l_series_upper(alpha, theta, N=4, m=10) <= base
    assert l_series_upper(alpha, theta, N=6, m=12) <= base


def test_l_series_upper_small_theta_linear_sanity():
    # The exact upper bound inherits L <= theta/(1-alpha) for tiny theta.
    for theta in (Fraction(1, 1000), Fraction(1, 100)):
        upper = l_series_upper(Fraction(3, 4), theta)
        assert upper <= theta / (1 - Fraction(3, 4))


def test_l_series_upper_guards_tail_condition():
    with pytest.raises(InvalidTruncationError):
        l_series_upper(Fraction(3, 4), Fraction(3, 1), N=4, m=8)  # x = 6 >= N+2


def test_l_series_bounds_bracket_quadrature():
    for alpha, theta in ((Fraction(3, 4), Fraction(1, 2)), (Fraction(751, 1000), Fraction(3, 4))):
        bound = l_series_bounds(alpha, theta)
        assert bound.value_lower <= bound.value_upper
        numeric = l_quadrature(float(alpha), float(theta))
        assert float(bound.value_lower) - 1e-12 <= numeric <= float(bound.value_upper) + 1e-12


def test_l_series_lower_requires_odd_order():
    with pytest.raises(InvalidTruncationError):
        l_series_lower(Fraction(3, 4), Fraction(1, 2), m_lower=8)


def test_one_point_check_verifies_certified_levels():
    report = one_point_check(Fraction(3, 4), Fraction(497, 500))
    assert report.verified
    assert parse_rational(report.witness["theta_ell"]) == Fraction(1491, 1976)
    report = one_point_check(Fraction(751, 1000), Fraction(499, 500))
    assert report.verified


def test_one_point_check_inconclusive_below_peak():
    report = one_point_check(Fraction(3, 4), Fraction(3, 5))
    assert not report.verified
    assert "inconclusive" in report.detail or "refuted" in report.detail


def test_one_point_check_validates_range():
    with pytest.raises(InvalidInputError):
        one_point_check(Fraction(3, 4), Fraction(1, 3))  # ell below 1/2


@pytest.mark.parametrize(
    "verify",
    [
        verify_f300,
        verify_onepoint_alpha34,
        verify_bsup_alpha34,
        verify_asup_alpha751,
        verify_onepoint_alpha751,
        verify_bsup_alpha751,
        verify_lower_bound_chain,
    ],
)
def test_individual_certificates_verify(verify):
    report = verify()
    assert report.verified, report.detail


def test_k_requirement_variants():
    r34 = verify_k_requirement("alpha34")
    assert r34.verified
    assert parse_rational(r34.witness["ratio"]) == Fraction(5100, 103)
    r751 = verify_k_requirement("alpha751")
    assert r751.verified
    assert parse_rational(r751.witness["ratio"]) == Fraction(76255000000, 837052433)
    with pytest.raises(InvalidInputError):
        verify_k_requirement("alpha9000")


def test_pinned_witness_values():
    report = verify_onepoint_alpha34()
    assert parse_rational(report.witness["q_4_8"]) == Q_4_8
    report = verify_onepoint_alpha751()
    assert parse_rational(report.witness["product"]) == ONE_POINT_751_FRACTION
    assert parse_rational(report.witness["p8_at_301_200"]) == Fraction(
        66414558043759180589143, 14745600000000000000000
    )


def test_bsup_combination_values():
    report = verify_bsup_alpha34()
    assert parse_rational(report.witness["combination"]) == Fraction(99897, 100000)
    report = verify_bsup_alpha751()
    assert parse_rational(report.witness["combination"]) == Fraction(249874749, 250000000)


def test_lower_bound_chain_witnesses():
    report = verify_lower_bound_chain()
    assert parse_rational(report.witness["exp_lower"]) == Fraction(102355, 458752)
    assert parse_rational(report.witness["bound_sum"]) == Fraction(18685693, 3121875)
    assert parse_rational(report.witness["final_product"]) == Fraction(91812435, 91750400)
    assert parse_rational(report.witness["final_product"]) > 1


def test_tamper_fails_f300():
    report = verify_f300(tamper=True)
    assert not report.verified
    assert "final_threshold" in report.detail


def test_all_certificates_suite():
    reports = all_certificates()
    assert len(reports) == 9
    assert len({r.name for r in reports}) == 9
    assert all(r.verified for r in reports)
    tampered = all_certificates(tamper=True)
    assert sum(not r.verified for r in tampered) == 1


def test_certificates_thread_pool_matches_serial(monkeypatch):
    serial = [r.name for r in all_certificates()]
    monkeypatch.setenv("CONTRACTION_LAB_THREADS", "4")
    threaded = all_certificates()
    assert [r.name for r in threaded] == serial
    assert all(r.verified for r in threaded)


def test_exact_fractions_never_floats():
    # Witness strings parse back to the exact pinned rationals.
    for report in all_certificates():
        for key, value in report.witness.items():
            parsed = parse_rational(value)
            assert isinstance(parsed, Fraction)
            assert math.isfinite(float(parsed))
