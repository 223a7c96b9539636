import math

import numpy as np
import pytest

from rilab import build_sphere
from rilab import functionals as fn
from rilab import noncollapse as nc
from rilab import semigroup as sg


@pytest.fixture(scope="module")
def thm_d_coefficient(unit_s3):
    fam = fn.sample_family(unit_s3, count=50, seed=0)
    consts = fn.metric_constants(unit_s3, fam)
    profile_c = fn.theorem_abc_profile(consts, "C", 0.0, 3)
    d3 = sg.d3_constants(profile_c.extras["uniform_c"], 3.0, 3, 4.0, 0.0)
    return sg.thm_d_constant(d3, consts.lambda0)


def test_dirichlet_lambda1_monotone(unit_s3):
    radii = np.linspace(0.4, 3.0, 8)
    vals = [nc.dirichlet_lambda1(unit_s3, r) for r in radii]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(nc.NoncollapseError):
        nc.dirichlet_lambda1(unit_s3, 4.0)


def test_dirichlet_lambda1_full_sphere_limit(unit_s3):
    # as r -> pi the removed cap loses capacity and the constant mode becomes
    # admissible: lambda_1 decreases toward the closed-sphere bottom 0
    vals = [nc.dirichlet_lambda1(unit_s3, math.pi - eps) for eps in (0.5, 0.1, 0.01)]
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] < 0.05


def test_flat_limit_trend(unit_s3):
    # lambda_1(B(r)) r^2 approaches the Euclidean unit-ball value; audit that
    # successive ratios approach 1 (trend only, no exact constant asserted)
    vals = [nc.dirichlet_lambda1(unit_s3, r) * r**2 for r in (0.8, 0.4, 0.2)]
    gaps = [abs(b / a - 1.0) for a, b in zip(vals, vals[1:])]
    assert gaps[1] < gaps[0]


def test_rayleigh_upper_bound(unit_s3, dumbbell):
    for g in (unit_s3, dumbbell):
        for r in (0.3, 0.9, 1.8, 2.8):
            rep = nc.rayleigh_check(g, r)
            assert rep.passed, (r, rep.lhs, rep.rhs)


def test_faber_krahn_audit(unit_s3, thm_d_coefficient):
    rep = nc.faber_krahn_audit(unit_s3, math.pi / 2, thm_d_coefficient)
    assert rep.name == "noncollapse/faber_krahn"
    assert rep.passed
    # doubling A halves the left-hand constant
    rep2 = nc.faber_krahn_audit(unit_s3, math.pi / 2, 2 * thm_d_coefficient)
    assert rep2.lhs == pytest.approx(rep.lhs / 2)
    # shrinking balls keep lambda_1 vol^{2/n} bounded below (flat scaling)
    products = [
        nc.dirichlet_lambda1(unit_s3, r) * unit_s3.ball_volume(r) ** (2.0 / 3.0)
        for r in (0.8, 0.4, 0.2, 0.1)
    ]
    assert min(products) > 1.0


def test_volume_iteration_identities():
    # geometric sums behind the closed form at n = 3
    theta = 3.0 / 5.0
    ls = np.arange(1, 400)
    assert np.sum(theta**ls) == pytest.approx(1.5, abs=1e-12)
    assert np.sum(ls * theta**ls) == pytest.approx(15.0 / 4.0, abs=1e-12)
    _, limit = nc.volume_iteration(1.0, 3, 1.0, lambda r: r**3, 5)
    assert limit == pytest.approx(2.0**-9)
    # closed form equals the explicit product expression for several (A, n, rho)
    for a in (0.5, 1.0, 7.0):
        for n in (3, 4, 5):
            for rho in (0.5, 1.0, 2.0):
                _, lim = nc.volume_iteration(a, n, rho, lambda r: r**n, 3)
                direct = (rho**2 / (2 * a)) ** (n / 2.0) * 4.0 ** (-n * (n + 2) / 4.0)
                assert lim == pytest.approx(direct, rel=1e-12)


def test_volume_iteration_convergence(unit_s3):
    bounds, limit = nc.volume_iteration(1.0, 3, 1.0, unit_s3.ball_volume, 30)
    assert len(bounds) == 30
    assert abs(bounds[-1] - limit) < 1e-6
    # a self-similar seed sits exactly on the fixed point
    for n in (3, 4, 5):
        kappa = (1.0 / 2.0 ** (n + 3)) ** (n / 2.0)
        bounds, limit = nc.volume_iteration(1.0, n, 1.0, lambda r: kappa * r**n, 30)
        assert abs(bounds[-1] - limit) < 1e-12 * limit
    with pytest.raises(nc.NoncollapseError):
        nc.volume_iteration(1.0, 3, 1.0, unit_s3.ball_volume, 0)


def test_kappa_check(unit_s3, thm_d_coefficient):
    # hypothesis R <= 1/r^2 on the unit 3-sphere needs r <= 1/sqrt(6)
    rep = nc.kappa_check(unit_s3, thm_d_coefficient, r=0.4)
    assert rep.hypothesis_ok and rep.passed
    rep_far = nc.kappa_check(unit_s3, thm_d_coefficient, r=1.0)
    assert not rep_far.hypothesis_ok
    assert rep.params["kappa"] == pytest.approx(
        (2.0**6 * thm_d_coefficient) ** -1.5
    )


def test_kappa_scale_invariance(unit_s3, thm_d_coefficient):
    c = 2.0
    g_scaled = build_sphere(3, c, m=512, k=8)
    rep1 = nc.kappa_check(unit_s3, thm_d_coefficient, r=0.4)
    rep2 = nc.kappa_check(g_scaled, thm_d_coefficient, r=c * 0.4)
    ratio1 = rep1.rhs / rep1.lhs
    ratio2 = rep2.rhs / rep2.lhs
    assert ratio2 == pytest.approx(ratio1, rel=1e-6)
    assert rep2.hypothesis_ok


def test_noncollapse_bound_monotonicity():
    b = nc.NoncollapseBound(3, 2.0)
    assert b.value(1.0) > nc.NoncollapseBound(3, 3.0).value(1.0)
    assert b.value(1.0) > nc.NoncollapseBound(3, 2.0, b_coeff=1.0, scale_cap=1.0).value(1.0)
    assert b.value(2.0) == pytest.approx(8.0 * b.value(1.0))
    # the L-capped form evaluates (1/(2^{n+3} A + 2 B L^2))^{n/2} r^n
    capped = nc.NoncollapseBound(3, 2.0, b_coeff=5.0, scale_cap=0.7)
    assert capped.value(0.5) == pytest.approx(
        (1.0 / (2.0**6 * 2.0 + 2.0 * 5.0 * 0.49)) ** 1.5 * 0.125
    )


def test_kappa_check_with_zero_order_term(unit_s3):
    # two-coefficient Sobolev data with a scale cap L >= r
    fam = fn.sample_family(unit_s3, count=30, seed=0)
    consts = fn.metric_constants(unit_s3, fam)
    uniform_c = fn.theorem_abc_profile(consts, "C", 0.0, 3).extras["uniform_c"]
    d3 = sg.d3_constants(uniform_c, 3.0, 3, 4.0, 0.0)
    rep = nc.kappa_check(
        unit_s3, d3.a_coeff, b_coeff=d3.b_coeff, scale_cap=0.4, r=0.4
    )
    assert rep.hypothesis_ok and rep.passed
    # the zero-order term can only weaken the bound
    rep_no_b = nc.kappa_check(unit_s3, d3.a_coeff, r=0.4)
    assert rep.lhs < rep_no_b.lhs
