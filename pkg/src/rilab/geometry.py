"""Discretized rotationally symmetric compact manifolds.

A closed warped product ds^2 + phi(s)^2 g_{S^{n-1}} over s in [0, s_max] is
modeled on the uniform midpoint grid s_j = (j + 1/2) ds, which keeps every
sample strictly inside the interval where phi > 0.  Zonal functions carry the
volume weights omega_{n-1} phi^{n-1} ds, and the Laplace-Beltrami operator
reduces to the Sturm-Liouville form phi^{1-n} d/ds (phi^{n-1} d/ds),
discretized conservatively with zero flux through the pole faces (exact for
smooth zonal functions since phi^{n-1} u' -> 0 there).

Scalar curvature uses the standard warped-product formula

    R = -2 (n-1) phi''/phi + (n-1)(n-2) (1 - phi'^2) / phi^2,

with profile derivatives taken in the sine basis (phi is odd about both
poles), so R stays accurate in the first and last cells where the formula
divides by phi ~ s.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate
from scipy.linalg import eigh_tridiagonal

from . import _spectral


class GeometryError(ValueError):
    """Invalid manifold construction input."""


class InvalidDimensionError(GeometryError):
    pass


class GridTooSmallError(GeometryError):
    pass


class EigensolverError(RuntimeError):
    pass


MIN_GRID = 16
DEFAULT_M = 512
DEFAULT_K = 64
EIGEN_RESIDUAL_TOL = 1e-10


def sphere_area(n):
    """Surface area omega_{n-1} of the unit (n-1)-sphere."""
    return 2.0 * np.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass
class WarpedProfile:
    """Sampled warping function of a closed rotationally symmetric metric.

    phi holds values at the m cell midpoints of [0, s_max].  The boundary
    behavior phi(0) = phi(s_max) = 0 with phi'(0) = 1, phi'(s_max) = -1 is
    implied, not sampled; it is what makes the odd extension about both
    endpoints smooth.
    """

    n: int
    s_max: float
    phi: np.ndarray

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        if self.n < 3:
            raise InvalidDimensionError(f"dimension n={self.n} < 3")
        if len(self.phi) < MIN_GRID:
            raise GridTooSmallError(f"grid size m={len(self.phi)} < {MIN_GRID}")
        if not np.isfinite(self.s_max) or self.s_max <= 0:
            raise GeometryError(f"s_max={self.s_max} must be positive")
        if not np.all(np.isfinite(self.phi)) or np.any(self.phi <= 0):
            raise GeometryError("phi must be finite and positive at all interior nodes")
        ds = self.s_max / len(self.phi)
        for label, edge in (("left", self.phi[0]), ("right", self.phi[-1])):
            slope = edge / (0.5 * ds)
            if not 0.5 <= slope <= 2.0:
                raise GeometryError(
                    f"phi does not vanish linearly with unit slope at the {label} pole "
                    f"(apparent slope {slope:.3g})"
                )

    @property
    def m(self):
        return len(self.phi)

    @property
    def ds(self):
        return self.s_max / self.m

    @property
    def s(self):
        return (np.arange(self.m) + 0.5) * self.ds


@dataclass
class ScalarField:
    """Grid function with weighted-L2 semantics on its ambient manifold."""

    values: np.ndarray
    manifold: "SpectralManifold"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != self.manifold.m:
            raise GeometryError("field length does not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise GeometryError("field values must be finite")


def _as_values(u):
    return u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)


class SpectralManifold:
    """Immutable discretized manifold with quadrature, curvature, and spectrum.

    Construction assembles volume weights, the scalar curvature field, and the
    conservative tridiagonal Laplacian; eigenpairs are computed lazily.  All
    queries are pure, so instances are safe to share read-only.
    """

    def __init__(self, profile, k=DEFAULT_K, scalar_curvature=None):
        if k < 2:
            raise GeometryError(f"eigen count k={k} < 2")
        self.profile = profile
        self.n = profile.n
        self.m = profile.m
        self.k = min(k, self.m)
        self.s_max = profile.s_max
        self.ds = profile.ds
        self.s = profile.s
        self.phi = profile.phi
        self.omega = sphere_area(self.n)

        self.vol_weights = self.omega * self.phi ** (self.n - 1) * self.ds
        self.total_volume = float(np.sum(self.vol_weights))

        b = _spectral.sine_coefficients(self.phi)
        self._phi_faces = _spectral.sine_values_at_faces(b, self.s_max)
        if scalar_curvature is None:
            dphi = _spectral.sine_derivative(b, self.s_max)
            d2phi = _spectral.sine_second_derivative(b, self.s_max)
            scalar_curvature = warped_scalar_curvature(self.n, self.phi, dphi, d2phi)
        self.R = ScalarField(np.asarray(scalar_curvature, dtype=float), self)

        # Quadratic-form conductances c_f = omega phi_f^{n-1} / ds at interior
        # faces; pole faces carry zero flux.  <-Delta u, v>_w = sum_f c_f du dv.
        self._cond = self.omega * self._phi_faces[1:-1] ** (self.n - 1) / self.ds
        self._tri_diag = np.zeros(self.m)
        self._tri_diag[:-1] += self._cond
        self._tri_diag[1:] += self._cond
        self._tri_off = -self._cond
        self._eigen = None

    # -- basic quadrature ------------------------------------------------

    def field(self, values):
        return ScalarField(np.asarray(values, dtype=float), self)

    def constant_field(self, value=None):
        """Constant field; defaults to the L2-normalized constant vol^{-1/2}."""
        if value is None:
            value = self.total_volume ** -0.5
        return self.field(np.full(self.m, value))

    def integrate(self, u):
        return float(np.dot(self.vol_weights, _as_values(u)))

    def inner(self, u, v):
        return float(np.dot(self.vol_weights, _as_values(u) * _as_values(v)))

    def lp_norm(self, u, p):
        """L^p norm (sum w |u|^p)^{1/p}; p = inf gives max |u|."""
        vals = np.abs(_as_values(u))
        if p == np.inf:
            return float(np.max(vals))
        if p < 1:
            raise GeometryError(f"p={p} < 1")
        peak = np.max(vals)
        if peak == 0.0:
            return 0.0
        return float(peak * np.dot(self.vol_weights, (vals / peak) ** p) ** (1.0 / p))

    def mean(self, u):
        return self.integrate(u) / self.total_volume

    # -- differential operators -------------------------------------------

    def laplacian(self, u):
        """Apply the (negative semidefinite) Laplace-Beltrami operator."""
        vals = _as_values(u)
        return self.field(-self._tridiag_apply(vals) / self.vol_weights)

    def _tridiag_apply(self, vals):
        out = self._tri_diag * vals
        out[:-1] += self._tri_off * vals[1:]
        out[1:] += self._tri_off * vals[:-1]
        return out

    def dirichlet_energy(self, u):
        """int |grad u|^2 dvol via the quadratic form of -Delta (nonnegative)."""
        vals = _as_values(u)
        return float(np.dot(self._cond, np.diff(vals) ** 2))

    def ball_volume(self, r):
        """Volume of the pole-centered geodesic ball of radius r."""
        if not 0 < r <= self.s_max + 1e-12:
            raise GeometryError(f"radius r={r} outside (0, s_max={self.s_max}]")
        r = min(r, self.s_max)
        cells = self.vol_weights
        full = int(r / self.ds)
        vol = float(np.sum(cells[:full]))
        if full < self.m:
            vol += cells[full] * (r - full * self.ds) / self.ds
        return vol

    # -- spectrum ----------------------------------------------------------

    def _symmetrized(self, potential=None):
        """Symmetric tridiagonal matrix of -Delta (+ potential) in the weighted basis."""
        w = self.vol_weights
        d = self._tri_diag / w
        if potential is not None:
            d = d + _as_values(potential)
        e = self._tri_off / np.sqrt(w[:-1] * w[1:])
        return d, e

    def _solve_modes(self, count, potential=None):
        d, e = self._symmetrized(potential)
        count = min(count, self.m)
        try:
            vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))
        except Exception as exc:  # pragma: no cover
            raise EigensolverError(f"tridiagonal eigensolver failed: {exc}") from exc
        funcs = vecs / np.sqrt(self.vol_weights)[:, None]
        return vals, funcs

    @property
    def eigenpairs(self):
        """First k eigenpairs (lambda_i, phi_i) of -Delta, weighted-orthonormal."""
        if self._eigen is None:
            self._eigen = self._solve_modes(self.k)
        return self._eigen

    @property
    def eigenvalues(self):
        return self.eigenpairs[0]

    @property
    def eigenfunctions(self):
        return self.eigenpairs[1]

    def eigen_residual(self):
        """Max operator residual of the retained eigenpairs (solver check)."""
        vals, funcs = self.eigenpairs
        scale = np.max(self._tri_diag / self.vol_weights)
        worst = 0.0
        for i in range(len(vals)):
            res = -self.laplacian(funcs[:, i]).values - vals[i] * funcs[:, i]
            worst = max(worst, self.lp_norm(res, 2) / scale)
        return worst


def warped_scalar_curvature(n, phi, dphi, d2phi):
    """Standard warped-product scalar curvature from profile derivatives."""
    return -2.0 * (n - 1) * d2phi / phi + (n - 1) * (n - 2) * (1.0 - dphi**2) / phi**2


def build_warped(profile, k=DEFAULT_K, scalar_curvature=None):
    """Assemble a SpectralManifold from a warping profile."""
    return SpectralManifold(profile, k=k, scalar_curvature=scalar_curvature)


def sphere_profile(n, r, m=DEFAULT_M):
    """Round n-sphere of radius r: phi(s) = r sin(s/r) on [0, pi r]."""
    if n < 3:
        raise InvalidDimensionError(f"dimension n={n} < 3")
    if r <= 0:
        raise GeometryError(f"radius r={r} must be positive")
    if m < MIN_GRID:
        raise GridTooSmallError(f"grid size m={m} < {MIN_GRID}")
    s_max = np.pi * r
    s = (np.arange(m) + 0.5) * (s_max / m)
    return WarpedProfile(n, s_max, r * np.sin(s / r))


def build_sphere(n, r, m=DEFAULT_M, k=DEFAULT_K):
    """Round n-sphere of radius r; R = n(n-1)/r^2, zonal spectrum l(l+n-1)/r^2."""
    return build_warped(sphere_profile(n, r, m), k=k)


def dumbbell_profile(n, neck=0.3, m=DEFAULT_M):
    """Symmetric dumbbell on [0, pi]: phi = sin s - (1 - neck) sin^3 s.

    The neck sits at s = pi/2 with phi = neck; the odd extension about both
    poles stays smooth, so the spectral curvature remains pole-accurate.
    """
    if not 0 < neck < 1:
        raise GeometryError(f"neck={neck} must lie in (0, 1)")
    s = (np.arange(m) + 0.5) * (np.pi / m)
    a = 1.0 - neck
    return WarpedProfile(n, np.pi, np.sin(s) - a * np.sin(s) ** 3)


def profile_from_samples(n, s, phi, m=DEFAULT_M):
    """Resample (s, phi) pairs onto the uniform midpoint grid of size m.

    The data are extended oddly about s = 0 and s = s_max before splining so
    the interpolant respects the pole behavior.  Endpoint samples with
    phi = 0 are allowed and dropped (they are implied).
    """
    s = np.asarray(s, dtype=float)
    phi = np.asarray(phi, dtype=float)
    order = np.argsort(s)
    s, phi = s[order], phi[order]
    s_max = s[-1] if phi[-1] == 0.0 else None
    keep = phi > 0
    s, phi = s[keep], phi[keep]
    if len(s) < 4:
        raise GeometryError("need at least 4 interior profile samples")
    if s_max is None:
        s_max = s[-1] + s[0]  # assume symmetric pole clearance
    s_ext = np.concatenate([-s[::-1], s, 2 * s_max - s[::-1]])
    phi_ext = np.concatenate([-phi[::-1], phi, -phi[::-1]])
    spline = interpolate.CubicSpline(s_ext, phi_ext)
    grid = (np.arange(m) + 0.5) * (s_max / m)
    return WarpedProfile(n, float(s_max), spline(grid))


def profile_from_csv(path, n, m=DEFAULT_M):
    """Load a profile from CSV columns (s, phi)."""
    ss, pp = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("s", ""):
                continue
            ss.append(float(row[0]))
            pp.append(float(row[1]))
    return profile_from_samples(n, ss, pp, m=m)


def manifold_from_config(cfg):
    """Build a manifold from a config mapping.

    Keys: kind = "sphere" | "warped"; n; m; k; and either r (sphere) or
    profile (inline [[s, phi], ...] table) / profile_csv (warped).
    """
    kind = cfg.get("kind")
    n = int(cfg.get("n", 3))
    m = int(cfg.get("m", DEFAULT_M))
    k = int(cfg.get("k", DEFAULT_K))
    if kind == "sphere":
        return build_sphere(n, float(cfg.get("r", 1.0)), m=m, k=k)
    if kind == "warped":
        if "profile_csv" in cfg:
            prof = profile_from_csv(cfg["profile_csv"], n, m=m)
        elif "profile" in cfg:
            table = np.asarray(cfg["profile"], dtype=float)
            prof = profile_from_samples(n, table[:, 0], table[:, 1], m=m)
        elif "dumbbell_neck" in cfg:
            prof = dumbbell_profile(n, neck=float(cfg["dumbbell_neck"]), m=m)
        else:
            raise GeometryError("warped manifold needs profile, profile_csv, or dumbbell_neck")
        return build_warped(prof, k=k)
    raise GeometryError(f"unknown manifold kind {kind!r}")
