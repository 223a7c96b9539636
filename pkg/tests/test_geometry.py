import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rilab import build_sphere, build_warped
from rilab.geometry import (
    GeometryError,
    GridTooSmallError,
    InvalidDimensionError,
    WarpedProfile,
    dumbbell_profile,
    manifold_from_config,
    profile_from_csv,
    sphere_profile,
)

S3_VOLUME = 2.0 * math.pi**2  # omega_2 * int_0^pi sin^2 = 4 pi * pi / 2


def test_sphere_volume(unit_s3):
    assert abs(unit_s3.total_volume - S3_VOLUME) < 1e-4


def test_sphere_zonal_spectrum(unit_s3):
    # zonal eigenvalues l (l + n - 1) / r^2
    assert abs(unit_s3.eigenvalues[0]) < 1e-10
    assert abs(unit_s3.eigenvalues[1] - 3.0) < 1e-3
    for l in range(5):
        assert abs(unit_s3.eigenvalues[l] - l * (l + 2)) < 2e-2 * max(1, l * (l + 2))


def test_constant_is_kernel(unit_s3):
    const = unit_s3.constant_field()
    assert np.max(np.abs(unit_s3.laplacian(const).values)) < 1e-10


def test_eigen_residual_and_orthonormality(unit_s3):
    assert unit_s3.eigen_residual() < 1e-10
    funcs = unit_s3.eigenfunctions[:, :10]
    gram = funcs.T @ (unit_s3.vol_weights[:, None] * funcs)
    assert np.max(np.abs(gram - np.eye(10))) < 1e-10


def test_sphere_scalar_curvature(unit_s3):
    assert np.max(np.abs(unit_s3.R.values - 6.0)) < 1e-3
    g2 = build_sphere(3, 2.0, m=256, k=8)
    assert np.max(np.abs(g2.R.values - 1.5)) < 1e-3


def test_warped_sphere_profile_curvature():
    g = build_warped(sphere_profile(3, 1.0, m=512), k=8)
    assert np.max(np.abs(g.R.values - 6.0)) < 1e-3


def test_dumbbell_neck_curvature(dumbbell):
    # oracle: R at the neck from the curvature formula with exact derivatives
    # of phi = sin s - 0.7 sin^3 s: phi(pi/2) = 0.3, phi' = 0, phi'' = 1.1,
    # R = -4 * 1.1 / 0.3 + 2 / 0.09 = 68/9
    neck = np.argmin(np.abs(dumbbell.s - np.pi / 2))
    r_neck = dumbbell.R.values[neck]
    assert abs(r_neck - 68.0 / 9.0) < 1e-3
    assert r_neck > 6.0
    assert abs(dumbbell.s[np.argmin(dumbbell.R.values)] - np.pi / 2) < 0.02


def test_metric_rescaling_scales_eigenvalues():
    c = 2.0
    g1 = build_sphere(3, 1.0, m=256, k=12)
    g2 = build_sphere(3, c, m=256, k=12)
    assert np.max(np.abs(g2.eigenvalues[1:] * c**2 - g1.eigenvalues[1:])) < 1e-10 * c**2


def test_lp_norms(unit_s3):
    ones = unit_s3.field(np.ones(unit_s3.m))
    assert abs(unit_s3.lp_norm(ones, 2) - math.sqrt(S3_VOLUME)) < 1e-4
    assert unit_s3.lp_norm(unit_s3.field(np.zeros(unit_s3.m)), 3) == 0.0
    phi2 = unit_s3.eigenfunctions[:, 1]
    assert abs(unit_s3.lp_norm(phi2, 2) - 1.0) < 1e-6
    with pytest.raises(GeometryError):
        unit_s3.lp_norm(ones, 0.5)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_lp_norm_monotone_in_p(seed):
    g = build_sphere(3, 1.0, m=64, k=4)
    u = np.random.default_rng(seed).standard_normal(g.m)
    vol = g.total_volume
    ps = [1.0, 1.5, 2.0, 3.0, 6.0, 10.0]
    normalized = [vol ** (-1.0 / p) * g.lp_norm(u, p) for p in ps]
    assert all(b >= a * (1 - 1e-12) for a, b in zip(normalized, normalized[1:]))


def test_dirichlet_energy(unit_s3):
    const = unit_s3.constant_field(3.7)
    assert unit_s3.dirichlet_energy(const) == 0.0
    lam, funcs = unit_s3.eigenpairs
    for i in (1, 2, 5):
        assert abs(unit_s3.dirichlet_energy(funcs[:, i]) - lam[i]) < 1e-6 * (1 + lam[i])
    # bilinearity + weighted orthogonality make the energies add
    combo = funcs[:, 1] + funcs[:, 2]
    assert abs(unit_s3.dirichlet_energy(combo) - (lam[1] + lam[2])) < 1e-6


def test_self_adjointness(unit_s3, rng):
    for _ in range(5):
        u = rng.standard_normal(unit_s3.m)
        v = rng.standard_normal(unit_s3.m)
        u /= unit_s3.lp_norm(u, 2)
        v /= unit_s3.lp_norm(v, 2)
        lhs = unit_s3.inner(unit_s3.laplacian(u).values, v)
        rhs = unit_s3.inner(u, unit_s3.laplacian(v).values)
        assert abs(lhs - rhs) < 1e-10


def test_ball_volume(unit_s3):
    # oracle: 4 pi int_0^{pi/2} sin^2 = pi^2 by the exact antiderivative
    assert abs(unit_s3.ball_volume(math.pi / 2) - math.pi**2) < 1e-4
    assert abs(unit_s3.ball_volume(math.pi) - S3_VOLUME) < 1e-4
    assert abs(unit_s3.ball_volume(unit_s3.s_max) - unit_s3.total_volume) < 1e-12
    radii = np.linspace(1e-3, 0.2, 40)
    vols = [unit_s3.ball_volume(r) for r in radii]
    assert all(b > a for a, b in zip(vols, vols[1:]))
    assert vols[0] < 1e-5
    with pytest.raises(GeometryError):
        unit_s3.ball_volume(4.0)


def test_spectral_convergence_order():
    # doubling m shrinks the first 5 zonal eigenvalue errors ~4x (2nd order)
    exact = np.array([l * (l + 2) for l in range(1, 6)], dtype=float)
    errs = []
    for m in (128, 256, 512):
        g = build_sphere(3, 1.0, m=m, k=8)
        errs.append(np.abs(g.eigenvalues[1:6] - exact))
    for fine, coarse in zip(errs[1:], errs[:-1]):
        assert np.all(coarse / fine > 3.5)


def test_construction_errors():
    with pytest.raises(InvalidDimensionError):
        build_sphere(2, 1.0)
    with pytest.raises(GridTooSmallError):
        build_sphere(3, 1.0, m=8)
    with pytest.raises(GeometryError):
        WarpedProfile(3, np.pi, -np.sin((np.arange(64) + 0.5) * np.pi / 64))
    with pytest.raises(GeometryError):
        dumbbell_profile(3, neck=1.5)


def test_profile_csv_roundtrip(tmp_path, s3_small):
    path = tmp_path / "profile.csv"
    lines = ["s,phi"] + [f"{s},{p}" for s, p in zip(s3_small.s, s3_small.phi)]
    path.write_text("\n".join(lines) + "\n")
    prof = profile_from_csv(path, 3, m=256)
    g = build_warped(prof, k=8)
    assert abs(g.total_volume - S3_VOLUME) < 1e-4
    assert np.max(np.abs(g.R.values - 6.0)) < 5e-3


def test_manifold_from_config(s3_small):
    g = manifold_from_config({"kind": "sphere", "n": 3, "r": 1.0, "m": 128, "k": 8})
    assert abs(g.total_volume - S3_VOLUME) < 1e-3
    table = [[s, p] for s, p in zip(s3_small.s, s3_small.phi)]
    g2 = manifold_from_config({"kind": "warped", "n": 3, "m": 128, "k": 8, "profile": table})
    assert abs(g2.total_volume - S3_VOLUME) < 1e-3
    with pytest.raises(GeometryError):
        manifold_from_config({"kind": "torus"})
