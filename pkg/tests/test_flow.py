import math

import numpy as np
import pytest

from rilab import build_sphere, build_warped
from rilab.geometry import dumbbell_profile
from rilab.flow import (
    CflError,
    EntropyError,
    FlowError,
    conjugate_heat_solve,
    constant_terminal_f,
    entropy_w,
    entropy_wstar,
    export_trajectory,
    monotonicity_audit,
    mu_star_estimate,
    sphere_extinction_time,
    sphere_flow,
    sphere_trajectory,
    warped_flow_evolve,
)


@pytest.fixture(scope="module")
def numeric_sphere_traj():
    g0 = build_sphere(3, 1.0, m=256, k=16)
    return warped_flow_evolve(g0, dt=5e-4, steps=200)


@pytest.fixture(scope="module")
def exact_traj():
    return sphere_trajectory(3, 1.0, dt=1e-3, steps=100, m=256, eigen_count=16)


def test_sphere_flow_closed_form():
    g = sphere_flow(3, 1.0, 0.0, m=128, k=4)
    assert np.max(np.abs(g.R.values - 6.0)) < 1e-3
    g = sphere_flow(3, 1.0, 0.125, m=128, k=4)
    assert np.max(np.abs(g.R.values - 12.0)) < 1e-3
    # volume -> 0 at the extinction time
    t_max = sphere_extinction_time(3, 1.0)
    vols = [sphere_flow(3, 1.0, f * t_max, m=64, k=4).total_volume for f in (0.9, 0.99, 0.999)]
    assert vols[0] > vols[1] > vols[2]
    assert vols[2] < 1e-3
    with pytest.raises(FlowError):
        sphere_flow(3, 1.0, t_max)


def test_numeric_flow_matches_closed_form(numeric_sphere_traj):
    traj = numeric_sphere_traj
    exact = 6.0 / (1.0 - 4.0 * traj.times)
    assert np.max(np.abs(traj.r_hat - exact) / exact) < 1e-2
    assert np.max(np.abs(traj.min_r - exact) / exact) < 1e-2


def test_min_r_nondecreasing(numeric_sphere_traj):
    traj = numeric_sphere_traj
    assert np.all(np.diff(traj.min_r) >= -1e-6 * np.abs(traj.min_r[:-1]))


def test_snapshot_geometry(numeric_sphere_traj):
    g = numeric_sphere_traj.snapshot(200)
    r2 = 1.0 - 4.0 * 0.1
    assert abs(g.total_volume - 2 * math.pi**2 * r2**1.5) < 1e-3
    assert abs(g.eigenvalues[1] - 3.0 / r2) < 2e-2


def test_dumbbell_truncates_before_estimate():
    g0 = build_warped(dumbbell_profile(3, neck=0.3, m=256), k=8)
    traj = warped_flow_evolve(g0, dt=1e-3, steps=100)
    assert traj.truncated
    assert "neckpinch" in traj.truncation_reason
    # cylinder-rate estimate: neck^2 / (2 (n-2)) = 0.045; allow the slowdown
    # from diffusion off the bulbs but demand truncation well before 0.1
    assert traj.times[-1] < 0.1


def test_cfl_rejection():
    g0 = build_sphere(3, 1.0, m=128, k=4)
    with pytest.raises(CflError):
        warped_flow_evolve(g0, dt=0.05, steps=2, max_substeps=10)


def test_conjugate_zero_duration(exact_traj):
    g0 = exact_traj.snapshot(0)
    f = constant_terminal_f(g0, 0.05)
    out = conjugate_heat_solve(exact_traj, f, 0.0, 0.05)
    assert len(out) == 1
    assert np.array_equal(out[0].values, f.values)


def test_conjugate_constant_f_closed_form(exact_traj):
    # on the round sphere a constant terminal f stays constant and follows
    # f(t) = f(t*) + (n/2) ln(r^2(t)/r^2(t*)) - (n/2) ln(tau(t)/sigma)
    t_star, sigma = 0.1, 0.05
    g_star = exact_traj.snapshot(100)
    fields = conjugate_heat_solve(exact_traj, constant_terminal_f(g_star, sigma), t_star, sigma)
    f_star = math.log(g_star.total_volume) - 1.5 * math.log(4 * math.pi * sigma)
    for k in (0, 40, 99):
        vals = fields[k].values
        assert np.ptp(vals) < 1e-9
        t = exact_traj.times[k]
        tau = t_star + sigma - t
        expect = (
            f_star
            + 1.5 * math.log((1 - 4 * t) / (1 - 4 * t_star))
            - 1.5 * math.log(tau / sigma)
        )
        assert abs(vals[0] - expect) < 1e-10


def test_conjugate_normalization_preserved(exact_traj):
    t_star, sigma = 0.1, 0.05
    g_star = exact_traj.snapshot(100)
    fields = conjugate_heat_solve(exact_traj, constant_terminal_f(g_star, sigma), t_star, sigma)
    for k in (0, 50, 100):
        g = exact_traj.snapshot(k)
        tau = t_star + sigma - exact_traj.times[k]
        u_tilde = (4 * math.pi * tau) ** -1.5 * np.exp(-fields[k].values)
        assert abs(g.integrate(u_tilde) - 1.0) < 1e-10
        # vol-2 normalization of u = e^{-f/2} (4 pi tau)^{-n/4}
        assert abs(g.lp_norm(np.sqrt(u_tilde), 2) - 1.0) < 1e-10


def test_entropy_constant_value(unit_s3):
    # W*(const, tau) = tau * R_hat + ln vol on the unit 3-sphere
    u = unit_s3.constant_field()
    expect = 6.0 + math.log(2 * math.pi**2)
    assert abs(entropy_wstar(unit_s3, u, 1.0) - expect) < 1e-4


def test_entropy_identity_random_f(unit_s3):
    tau = 0.7
    f_raw = 0.3 * np.sin(unit_s3.s) + 0.1 * np.cos(2 * unit_s3.s)
    u_tilde = (4 * math.pi * tau) ** -1.5 * np.exp(-f_raw)
    f_adm = f_raw + math.log(unit_s3.integrate(u_tilde))
    w = entropy_w(unit_s3, f_adm, tau)
    u = np.sqrt((4 * math.pi * tau) ** -1.5 * np.exp(-f_adm))
    wstar = entropy_wstar(unit_s3, u, tau)
    resid = abs(w - (wstar - 1.5 * math.log(tau) - 1.5 * math.log(4 * math.pi) - 3))
    assert resid < 1e-8


def test_entropy_small_tau_branch(unit_s3):
    # tau -> 0 leaves only the -int u^2 ln u^2 term
    funcs = unit_s3.eigenfunctions
    u = funcs[:, 1] + 0.5 * funcs[:, 2]
    u = u / unit_s3.lp_norm(u, 2)
    ent = -unit_s3.integrate(np.where(u != 0, 2 * u**2 * np.log(np.abs(u)), 0.0))
    assert abs(entropy_wstar(unit_s3, u, 1e-12) - ent) < 1e-9


def test_entropy_normalization_errors(unit_s3):
    with pytest.raises(EntropyError):
        entropy_wstar(unit_s3, 2.0 * unit_s3.constant_field().values, 1.0)
    with pytest.raises(EntropyError):
        entropy_w(unit_s3, np.zeros(unit_s3.m), 1.0)


def test_w_monotonicity_and_soliton_identity():
    # tighter time grid so the centered dW/dt estimate resolves the identity
    traj = sphere_trajectory(3, 1.0, dt=1e-5, steps=200, m=256, eigen_count=8)
    t_star, sigma = 2e-3, 0.05
    records = monotonicity_audit(traj, t_star, sigma)
    ws = np.array([r.w for r in records])
    assert np.all(np.diff(ws) >= -1e-6 * (1 + np.abs(ws[:-1])))
    assert max(r.identity_residual for r in records) < 1e-8
    # oracle: 2 tau n ((n-1)/r^2 - 1/(2 tau))^2 from the curvature tensor norm
    for rec in records[3:-3:40]:
        r2 = 1.0 - 4.0 * rec.t
        rhs = 2.0 * rec.tau * 3.0 * (2.0 / r2 - 1.0 / (2.0 * rec.tau)) ** 2
        assert abs(rec.dw_dt - rhs) < 1e-6


def test_w_monotone_along_numeric_flow(numeric_sphere_traj):
    records = monotonicity_audit(numeric_sphere_traj, 0.05, 0.05)
    ws = np.array([r.w for r in records])
    assert np.all(np.diff(ws) >= -1e-6 * (1 + np.abs(ws[:-1])))
    assert max(r.normalization_drift for r in records) < 1e-10


def test_monotonicity_vacuous_at_zero(exact_traj):
    records = monotonicity_audit(exact_traj, 0.0, 0.05)
    assert len(records) == 1
    assert math.isnan(records[0].dw_dt)


def test_mu_star_estimate(unit_s3):
    u_const = unit_s3.constant_field()
    const_value = entropy_wstar(unit_s3, u_const, 1.0)
    value4, witness, info = mu_star_estimate(unit_s3, 1.0, multistarts=4)
    assert value4 <= const_value + 1e-12
    assert abs(unit_s3.lp_norm(witness, 2) - 1.0) < 1e-9
    value8, _, _ = mu_star_estimate(unit_s3, 1.0, multistarts=8)
    assert value8 <= value4 + 1e-12
    # R > 0 makes W* pointwise increasing in tau, so the inf is monotone
    values = [mu_star_estimate(unit_s3, tau, multistarts=3)[0] for tau in (0.25, 0.5, 1.0, 2.0)]
    assert all(b >= a - 1e-10 for a, b in zip(values, values[1:]))


def test_trajectory_export(tmp_path, exact_traj):
    csv_path, manifest_path = export_trajectory(exact_traj, tmp_path, stride=25)
    text = open(csv_path).read().splitlines()
    assert text[0] == "t,min_r,r_hat,lambda0,vol"
    assert len(text) == exact_traj.steps + 1
    import json

    manifest = json.load(open(manifest_path))
    assert manifest["truncated"] is False
    assert len(manifest["profiles"]) == math.ceil(exact_traj.steps / 25)
    for entry in manifest["profiles"]:
        assert (tmp_path / entry["file"]).exists()
