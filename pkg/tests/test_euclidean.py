import math

import pytest

from rilab import euclidean as eu


def test_battery_passes_all_variants():
    for n in (3, 4):
        for test in eu.standard_battery(n):
            for variant in eu.VARIANTS:
                rep = eu.euclidean_lsi_check(variant, n, test)
                assert rep.slack >= -1e-6, (n, variant, test.label, rep.slack)


def test_gross_constant_equality():
    one = eu.RadialTestFunction(n=3, profile=lambda r: 1.0, dprofile=lambda r: 0.0, label="one")
    rep = eu.euclidean_lsi_check("GROSS", 3, one)
    assert abs(rep.lhs) < 1e-10 and abs(rep.rhs) < 1e-10


def test_entropy_gaussian_equality():
    # f = |x|^2/2 means u = c e^{-rho^2/4}: the integrand reduces to
    # (|x|^2 - n) dmu whose integral vanishes (Gaussian second moment)
    for n in (3, 4):
        rep = eu.euclidean_lsi_check("ENTROPY", n, eu.gaussian_profile(n, 0.25))
        assert abs(rep.rhs) < 1e-8


def test_loggrad_gaussians_extremal():
    # closed form: for u ~ e^{-lam rho^2}, both sides equal
    # (n/2) ln(2 lam / pi) - n/2, so the sweep bottoms out near zero
    min_slack, _ = eu.loggrad_gaussian_sweep(3)
    assert abs(min_slack) < 1e-4
    rep1 = eu.euclidean_lsi_check("LOGGRAD", 3, eu.gaussian_profile(3, 1.0))
    expect = 1.5 * math.log(2.0 / math.pi) - 1.5
    assert rep1.lhs == pytest.approx(expect, abs=1e-8)
    assert rep1.rhs == pytest.approx(expect, abs=1e-8)


def test_straight_beta_consistency():
    # at beta = (2 pi)^{n/2} e^n the additive term vanishes: A.3 == A.4
    n = 3
    beta0 = (2 * math.pi) ** 1.5 * math.exp(3)
    test = eu.gaussian_profile(n, 0.6)
    rep_default = eu.euclidean_lsi_check("STRAIGHT", n, test)
    rep_beta = eu.euclidean_lsi_check("STRAIGHT", n, test, beta=beta0)
    assert rep_default.slack == pytest.approx(rep_beta.slack)
    add_term = beta0 * math.log(beta0) - 1.5 * beta0 * math.log(2 * math.pi * math.e**2)
    assert abs(add_term) < 1e-9 * beta0


def test_gross_straight_transform():
    for n in (3, 4):
        for test in (eu.gaussian_profile(n, 0.7), eu.bump_profile(n)):
            for beta in (0.5, 2.5):
                got, want = eu.gross_straight_consistency(n, test, beta)
                assert got == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_zero_profile_rejected():
    zero = eu.RadialTestFunction(n=3, profile=lambda r: 0.0, dprofile=lambda r: 0.0)
    with pytest.raises(eu.EuclideanError):
        eu.euclidean_lsi_check("GROSS", 3, zero)
    with pytest.raises(eu.EuclideanError):
        eu.euclidean_lsi_check("BOGUS", 3, eu.gaussian_profile(3, 1.0))
