"""Exact rational certificates for the closed-form inequality chains.

Every check in this module is an exact integer or rational comparison over
arbitrary-precision arithmetic; a report is marked verified only when each
step of its chain holds exactly, with truncation tails bounded on the
conservative side.  The floating-point evaluators in ``lfunction`` are a
physically separate code path and never feed a verdict here.

The certified chains bound the two scaled envelope terms

    A_t(rho) = rho (1-2 rho)^t,
    B_t(rho, a) = rho * sum_{i=1}^t (1-2 rho)^{t-i} / i^a,

via the envelope function L_a(theta) (see ``lfunction``), for the exponent
candidates a = 3/4 (with horizon t0 = 300) and a = 751/1000 (with horizon
t0 = 1000), and establish the complementary lower bound L_{753/1000}(3/4) > 1.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import InvalidInputError, InvalidTruncationError
from .rational import exp_taylor_partial, format_rational, rational

THREADS_ENV = "CONTRACTION_LAB_THREADS"


@dataclass(frozen=True)
class CertificateReport:
    name: str
    claim: str
    verified: bool
    witness: dict[str, str]
    detail: str = ""


@dataclass(frozen=True)
class SeriesBound:
    """Rigorous two-sided rational bracket for L_a(theta)."""

    alpha: Fraction
    theta: Fraction
    N: int
    m: int
    value_upper: Fraction
    value_lower: Fraction


class _Chain:
    """Collects exact checks; the first failing step is recorded by name."""

    def __init__(self, name: str, claim: str):
        self.name = name
        self.claim = claim
        self.witness: dict[str, str] = {}
        self.failed: str | None = None

    def note(self, key: str, value) -> None:
        self.witness[key] = format_rational(rational(value))

    def check(self, step: str, condition: bool) -> bool:
        if not condition and self.failed is None:
            self.failed = step
        return condition

    def pin(self, step: str, value, expected) -> Fraction:
        """Check value == expected exactly and record it."""
        value, expected = rational(value), rational(expected)
        self.check(step, value == expected)
        self.note(step, value)
        return value

    def report(self) -> CertificateReport:
        verified = self.failed is None
        return CertificateReport(
            name=self.name,
            claim=self.claim,
            verified=verified,
            witness=dict(self.witness),
            detail="" if verified else f"failed step: {self.failed}",
        )


def a_envelope_max(t: int) -> tuple[Fraction, Fraction]:
    """Exact maximizer and maximum of rho -> rho (1-2 rho)^t on (0, 1/2].

    The unique critical point is rho* = 1/(2(t+1)) with value
    (1/(2(t+1))) (t/(t+1))^t.
    """
    if t < 1:
        raise InvalidInputError("t must be >= 1")
    rho_star = Fraction(1, 2 * (t + 1))
    value = rho_star * Fraction(t, t + 1) ** t
    return rho_star, value


def _partial_series(x: Fraction, alpha: Fraction, N: int) -> Fraction:
    """S_N = sum_{n<=N} x^n / (n! (n+1-alpha)), exactly."""
    total = Fraction(0)
    term = Fraction(1)
    for n in range(N + 1):
        if n:
            term = term * x / n
        total += term / (n + 1 - alpha)
    return total


def l_series_upper(alpha, theta, N: int = 4, m: int = 8) -> Fraction:
    """Exact rational upper bound on L_alpha(theta).

    Uses e^{-x} <= 1/P_m(x) and bounds the series tail beyond N by a
    geometric sum, which requires x = 2 theta < N + 2.
    """
    alpha, theta = rational(alpha), rational(theta)
    if not 0 < alpha < 1:
        raise InvalidInputError("alpha must lie in (0, 1)")
    if theta <= 0:
        raise InvalidInputError("theta must be positive")
    x = 2 * theta
    if x >= N + 2:
        raise InvalidTruncationError(f"tail bound needs 2*theta < N+2; got {format_rational(x)}")
    p_m = exp_taylor_partial(x, m)
    head = _partial_series(x, alpha, N)
    x_pow = x ** (N + 1)
    fact = 1
    for k in range(2, N + 2):
        fact *= k
    tail = Fraction(1, 1) / (N + 2 - alpha) * x_pow / fact / (1 - x / (N + 2))
    return theta * (head + tail) / p_m


def l_series_lower(alpha, theta, N: int = 4, m_lower: int = 9) -> Fraction:
    """Exact rational lower bound on L_alpha(theta).

    Truncating the positive series lower-bounds the sum, and an odd-order
    alternating partial sum of e^{-x} has positive remainder, so it
    lower-bounds the exponential factor.
    """
    alpha, theta = rational(alpha), rational(theta)
    if m_lower % 2 == 0:
        raise InvalidTruncationError("m_lower must be odd for a positive remainder")
    x = 2 * theta
    exp_low = exp_taylor_partial(-x, m_lower)
    if exp_low <= 0:
        raise InvalidTruncationError("exponential lower bound not positive; increase m_lower")
    return theta * exp_low * _partial_series(x, alpha, N)


def l_series_bounds(alpha, theta, N: int = 4, m: int = 8, m_lower: int = 9) -> SeriesBound:
    upper = l_series_upper(alpha, theta, N=N, m=m)
    lower = l_series_lower(alpha, theta, N=N, m_lower=m_lower)
    if lower > upper:
        raise InvalidTruncationError("bracket inverted; truncation orders inconsistent")
    return SeriesBound(
        alpha=rational(alpha), theta=rational(theta), N=N, m=m,
        value_upper=upper, value_lower=lower,
    )


def one_point_check(alpha, ell, N: int = 4, m: int = 8) -> CertificateReport:
    """Certify sup_theta L_alpha(theta) <= ell by one evaluation at
    theta_ell = alpha / (2 - 1/ell).

    An upper bound below ell verifies the claim; an upper bound at or above
    ell is inconclusive (the truncation may simply be too loose).
    """
    alpha, ell = rational(alpha), rational(ell)
    if not 0 < alpha < 1:
        raise InvalidInputError("alpha must lie in (0, 1)")
    if not Fraction(1, 2) < ell < 1:
        raise InvalidInputError("ell must lie in (1/2, 1)")
    theta_ell = alpha / (2 - 1 / ell)
    name = f"one-point({format_rational(alpha)},{format_rational(ell)})"
    claim = (
        f"L_{format_rational(alpha)}({format_rational(theta_ell)}) < {format_rational(ell)} "
        f"certifies sup L <= {format_rational(ell)}"
    )
    witness = {"theta_ell": format_rational(theta_ell)}
    try:
        upper = l_series_upper(alpha, theta_ell, N=N, m=m)
    except InvalidTruncationError as exc:
        return CertificateReport(name, claim, False, witness, detail=f"inconclusive: {exc}")
    witness["upper_bound"] = format_rational(upper)
    if upper < ell:
        return CertificateReport(name, claim, True, witness)
    detail = f"inconclusive: upper bound >= ell at truncation N={N}, m={m}"
    try:
        lower = l_series_lower(alpha, theta_ell, N=N)
        witness["lower_bound"] = format_rational(lower)
        if lower >= ell:
            detail = "refuted: exact lower bound at theta_ell reaches ell"
    except InvalidTruncationError:
        pass
    return CertificateReport(name, claim, False, witness, detail=detail)


def verify_f300(tamper: bool = False) -> CertificateReport:
    """Scaled first-term envelope at the 3/4 exponent and horizon 300.

    Chain: (300/301)^300 <= 90601/225901, 302^(3/4)/301 <= 1207/4816,
    product = 363307/7228832 < 51/1000; every step an exact comparison.
    """
    c = _Chain(
        "a-envelope-300",
        "(302^(3/4)/602)(300/301)^300 <= 363307/7228832 < 51/1000",
    )
    power = Fraction(300, 301) ** 300
    quad_identity = 1 + Fraction(300, 301) + Fraction(300, 301) ** 2 / 2
    c.pin("quadratic_identity", quad_identity, Fraction(225901, 90601))
    c.check("power_bound", power <= Fraction(90601, 225901))
    c.note("power_upper", Fraction(90601, 225901))
    # 302^(3/4)/301 <= 1207/4816, raised to the 4th power.
    c.check("prefactor_bound", 302**3 * 4816**4 <= (301 * 1207) ** 4)
    c.note("prefactor_upper", Fraction(1207, 4816))
    c.check("fourth_root_base", 301 >= 4**4)
    # Bernoulli piece (1+1/301)^(3/4) <= 1207/1204, cubed vs fourth power.
    c.check("bernoulli_piece", 302**3 * 1204**4 <= (301 * 1207) ** 4)
    product = Fraction(1, 2) * Fraction(1207, 4816) * Fraction(90601, 225901)
    c.pin("product", product, Fraction(363307, 7228832))
    c.check("product_numerator", 1207 * 90601 == 109355407)
    c.check("common_factor", 109355407 == 301 * 363307 and 2 * 4816 * 225901 == 301 * 7228832)
    target = Fraction(50 if tamper else 51, 1000)
    c.note("target", target)
    c.check("final_threshold", product < target)
    c.note("cross_lhs", 363307 * target.denominator)
    c.note("cross_rhs", 7228832 * target.numerator)
    return c.report()


Q_4_8 = Fraction(
    1287675113562193776446577567744,
    1295590272667287121985809656211,
)

ONE_POINT_34_GAP = Fraction(
    70808734544811403658615264867,
    647795136333643560992904828105500,
)


def verify_onepoint_alpha34() -> CertificateReport:
    """One-point certificate at exponent 3/4, level 497/500."""
    c = _Chain(
        "one-point-34",
        "L_{3/4}(1491/1976) <= Q_{4,8} < 497/500, so sup L_{3/4} <= 497/500",
    )
    ell = Fraction(497, 500)
    theta = c.pin("theta_ell", Fraction(3, 4) / (2 - 1 / ell), Fraction(1491, 1976))
    q = l_series_upper(Fraction(3, 4), theta, N=4, m=8)
    c.pin("q_4_8", q, Q_4_8)
    c.pin("gap", ell - q, ONE_POINT_34_GAP)
    c.check("gap_positive", ell - q > 0)
    return c.report()


def verify_bsup_alpha34() -> CertificateReport:
    """Scaled second-term envelope at exponent 3/4: (201/200)(497/500) < 1."""
    c = _Chain(
        "b-sup-34",
        "(1+2/t)^(3/4) <= 201/200 for t >= 300 and level 497/500 give 99897/100000 < 1",
    )
    # Endpoint instance of the Bernoulli factor, cubed vs fourth power.
    c.check("bernoulli_endpoint", 151**3 * 200**4 <= 150**3 * 201**4)
    factor = c.pin("factor", 1 + 2 * Fraction(3, 4) / 300, Fraction(201, 200))
    combined = c.pin("combination", factor * Fraction(497, 500), Fraction(99897, 100000))
    c.check("below_one", combined < 1)
    return c.report()


def verify_asup_alpha751() -> CertificateReport:
    """Scaled first-term envelope at exponent 751/1000: below 15251/334150 < 0.046."""
    c = _Chain(
        "a-sup-751",
        "(151/301) 301^(-249/1000) (300/301)^300 < 15251/334150 < 46/1000",
    )
    c.check("fourth_power", 41**4 < 301 * 10**4)
    c.check("binomial_two", Fraction(101, 100) ** 100 > 2)
    c.check("two_to_ten", 2**10 == 1024 and 1024 > 301)
    c.check("thousandth_root", Fraction(101, 100) ** 1000 > 301)
    # 301^(249/1000) > 410/101, both sides to the 1000th power.
    c.check("power_249", 301**249 * 101**1000 > 410**1000)
    c.note("power_249_upper", Fraction(101, 410))
    # 302^(751/1000) <= 302 * 301^(-249/1000) reduces to 301^249 <= 302^249.
    c.check("monotone_base", 301**249 <= 302**249)
    c.pin("e_partial_sum", exp_taylor_partial(1, 5), Fraction(163, 60))
    c.check("power_300_bound", Fraction(300, 301) ** 300 < Fraction(301, 815))
    product = Fraction(151, 301) * Fraction(101, 410) * Fraction(301, 815)
    c.pin("product", product, Fraction(15251, 334150))
    c.check("final_threshold", product < Fraction(46, 1000))
    return c.report()


ONE_POINT_751_TERMS = (
    Fraction(1000, 249),
    Fraction(1506, 1249),
    Fraction(567009, 1124500),
    Fraction(15813251, 90250000),
    Fraction(107166402027, 2124500000000),
)

SERIES_BOUND_751 = Fraction(
    800429153543344037119501,
    134108154748420125000000,
)

P8_AT_301_200 = Fraction(
    66414558043759180589143,
    14745600000000000000000,
)

ONE_POINT_751_FRACTION = Fraction(
    23700038717989377538168622402764800000,
    23751290207147698032780270875855940541,
)

ONE_POINT_751_MARGIN = 1874454372012549273043965669714329959


def verify_onepoint_alpha751() -> CertificateReport:
    """One-point certificate at exponent 751/1000, level 499/500.

    The evaluation point is shifted up to x+ = 753/500 (the series terms are
    increasing in x), the tail beyond the fourth term is dominated by a
    geometric series with ratio < 1/4, and the exponential factor is bounded
    through the degree-8 partial sum at 301/200.
    """
    c = _Chain(
        "one-point-751",
        "L_{751/1000}(374749/498000) < 499/500, so sup L_{751/1000} <= 499/500",
    )
    alpha = Fraction(751, 1000)
    ell = Fraction(499, 500)
    theta = c.pin("theta_ell", alpha / (2 - 1 / ell), Fraction(374749, 498000))
    x = 2 * theta
    c.pin("x_minus_301_200", x - Fraction(301, 200), Fraction(1, 62250))
    c.check("x_above", x > Fraction(301, 200))
    x_plus = Fraction(753, 500)
    c.pin("x_plus_minus_x", x_plus - x, Fraction(49, 49800))
    c.check("x_below", x < x_plus)
    terms = []
    fact = 1
    for n in range(5):
        if n:
            fact *= n
        terms.append(x_plus**n / fact / (n + 1 - alpha))
    for n, (got, expected) in enumerate(zip(terms, ONE_POINT_751_TERMS)):
        c.pin(f"series_term_{n}", got, expected)
    ratio = c.pin("tail_ratio", x_plus / 5 * (5 - alpha) / (6 - alpha), Fraction(3199497, 13122500))
    c.check("tail_ratio_quarter", 4 * 3199497 < 13122500 and ratio < Fraction(1, 4))
    series_bound = sum(terms[:4]) + Fraction(4, 3) * terms[4]
    c.pin("series_bound", series_bound, SERIES_BOUND_751)
    p8 = c.pin("p8_at_301_200", exp_taylor_partial(Fraction(301, 200), 8), P8_AT_301_200)
    product = Fraction(753, 1000) / p8 * series_bound
    c.pin("product", product, ONE_POINT_751_FRACTION)
    margin = ell.numerator * product.denominator - ell.denominator * product.numerator
    c.check("integer_margin", margin == ONE_POINT_751_MARGIN and margin > 0)
    c.note("integer_margin", margin)
    c.check("final_threshold", product < ell)
    return c.report()


def verify_bsup_alpha751() -> CertificateReport:
    """Scaled second-term envelope at exponent 751/1000: 249874749/250000000 < 1."""
    c = _Chain(
        "b-sup-751",
        "(1+2/t)^(751/1000) <= 500751/500000 for t >= 1000 and level 499/500 stay below 1",
    )
    c.check("bernoulli_endpoint", Fraction(501, 500) ** 751 <= Fraction(500751, 500000) ** 1000)
    factor = c.pin("factor", 1 + 2 * Fraction(751, 1000) / 1000, Fraction(500751, 500000))
    combined = c.pin("combination", factor * Fraction(499, 500), Fraction(249874749, 250000000))
    c.check("below_one", combined < 1)
    c.pin("one_minus", 1 - combined, Fraction(125251, 250000000))
    return c.report()


def verify_k_requirement(variant: str) -> CertificateReport:
    """Combine the two envelope bounds into the admissible horizon constant.

    variant 'alpha34': (51/1000)/(103/100000) = 5100/103 < 50 < 300.
    variant 'alpha751': (15251/334150)/(125251/250000000) < 100 < 1000.
    """
    if variant == "alpha34":
        c = _Chain("k-requirement-34", "A/(1-B) <= 5100/103 < 50 < 300 at exponent 3/4")
        one_minus_b = c.pin("one_minus_b", 1 - Fraction(99897, 100000), Fraction(103, 100000))
        ratio = c.pin("ratio", Fraction(51, 1000) / one_minus_b, Fraction(5100, 103))
        c.check("below_50", ratio < 50)
        c.check("below_horizon", ratio < 300)
        return c.report()
    if variant == "alpha751":
        c = _Chain(
            "k-requirement-751",
            "A/(1-B) < 76255000000/837052433 < 100 < 1000 at exponent 751/1000",
        )
        one_minus_b = c.pin("one_minus_b", 1 - Fraction(249874749, 250000000), Fraction(125251, 250000000))
        ratio = c.pin("ratio", Fraction(15251, 334150) / one_minus_b, Fraction(76255000000, 837052433))
        c.check("below_100", ratio < 100)
        c.check("below_horizon", ratio < 1000)
        return c.report()
    raise InvalidInputError(f"unknown variant {variant!r}; expected 'alpha34' or 'alpha751'")


LOWER_CHAIN_TERMS = (
    Fraction(1000, 247),
    Fraction(1500, 1247),
    Fraction(375, 749),
    Fraction(1125, 6494),
    Fraction(3375, 67952),
    Fraction(225, 18656),
)

LOWER_CHAIN_BOUNDS = (
    Fraction(2024, 500),
    Fraction(601, 500),
    Fraction(500, 999),
    Fraction(433, 2500),
    Fraction(149, 3000),
    Fraction(301, 25000),
)


def verify_lower_bound_chain() -> CertificateReport:
    """L_{753/1000}(3/4) > 1: the exponent cannot be pushed to 753/1000.

    Chain: e^{-3/2} exceeds its degree-9 alternating partial sum
    102355/458752; six term-wise rational lower bounds sum above 299/50;
    the product (3/4)(102355/458752)(299/50) = 91812435/91750400 > 1.
    """
    c = _Chain(
        "lower-bound-chain",
        "L_{753/1000}(3/4) >= (3/4)(102355/458752)(299/50) = 91812435/91750400 > 1",
    )
    alpha = Fraction(753, 1000)
    x0 = Fraction(3, 2)
    p9 = c.pin("exp_lower", exp_taylor_partial(-x0, 9), Fraction(102355, 458752))
    c.check("exp_lower_unreduced", p9 == Fraction(511775, 2293760))
    c.check("exp_lower_positive", p9 > 0)
    terms = []
    fact = 1
    for n in range(6):
        if n:
            fact *= n
        terms.append(x0**n / fact / (n + 1 - alpha))
    for n, (got, expected) in enumerate(zip(terms, LOWER_CHAIN_TERMS)):
        c.pin(f"series_term_{n}", got, expected)
    cross_products = (
        (1000 * 500, 2024 * 247),
        (1500 * 500, 601 * 1247),
        (375 * 999, 500 * 749),
        (1125 * 2500, 433 * 6494),
        (3375 * 3000, 149 * 67952),
        (225 * 25000, 301 * 18656),
    )
    for n, ((lhs, rhs), bound) in enumerate(zip(cross_products, LOWER_CHAIN_BOUNDS)):
        c.check(f"termwise_bound_{n}", lhs > rhs and terms[n] > bound)
    total = sum(LOWER_CHAIN_BOUNDS)
    c.pin("bound_sum", total, Fraction(18685693, 3121875))
    c.check("sum_above", 18685693 * 50 > 3121875 * 299 and total > Fraction(299, 50))
    final = Fraction(3, 4) * p9 * Fraction(299, 50)
    c.pin("final_product", final, Fraction(91812435, 91750400))
    c.check("above_one", final > 1)
    return c.report()


def all_certificates(tamper: bool = False) -> list[CertificateReport]:
    """Run the full suite; independent chains may run on a small thread pool."""
    jobs = [
        lambda: verify_f300(tamper=tamper),
        verify_onepoint_alpha34,
        verify_bsup_alpha34,
        lambda: verify_k_requirement("alpha34"),
        verify_asup_alpha751,
        verify_onepoint_alpha751,
        verify_bsup_alpha751,
        lambda: verify_k_requirement("alpha751"),
        verify_lower_bound_chain,
    ]
    workers = 1
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        workers = max(1, int(raw))
    except ValueError:
        pass
    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            return list(pool.map(lambda job: job(), jobs))
    return [job() for job in jobs]
