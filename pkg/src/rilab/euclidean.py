"""Log-Sobolev inequalities on R^n for radial test functions.

Four classical displays are audited by 1D radial quadrature
(omega_{n-1} int rho^{n-1} ... d rho, adaptive, tolerance ~1e-10):

GROSS     int u^2 ln u^2 dmu <= 2 int |grad u|^2 dmu, Gaussian measure.
STRAIGHT  int u^2 ln u^2 dx <= 2 int |grad u|^2 dx + beta ln beta
          - (n/2) beta ln(2 pi e^2), Lebesgue with int u^2 = beta
          (beta = (2 pi)^{n/2} e^n makes the additive term vanish).
LOGGRAD   int u^2 ln u^2 dx <= (n/2) ln[(2/(pi n e)) int |grad u|^2 dx],
          unit Lebesgue norm.  Gaussians attain equality.
ENTROPY   int ((1/2)|grad f|^2 + f - n) e^{-f} dx >= 0 with
          int e^{-f} dx = (2 pi)^{n/2}; equality at f = |x|^2/2.

Test functions are radial profiles with analytic derivatives; normalization
is enforced by internal amplitude rescale (or additive shift of f).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .geometry import sphere_area
from .reports import InequalityReport

VARIANTS = ("GROSS", "STRAIGHT", "LOGGRAD", "ENTROPY")
RHO_MAX = 12.0
QUAD_OPTS = {"epsabs": 1e-12, "epsrel": 1e-10, "limit": 400}


class EuclideanError(ValueError):
    pass


@dataclass
class RadialTestFunction:
    """Radial profile u(rho) with its derivative, on [0, rho_max]."""

    n: int
    profile: callable
    dprofile: callable
    label: str = ""
    rho_max: float = RHO_MAX
    breakpoints: tuple = ()

    def _quad(self, fn):
        pts = [p for p in self.breakpoints if 0 < p < self.rho_max]
        total, _ = integrate.quad(fn, 0.0, self.rho_max, points=pts or None, **QUAD_OPTS)
        return sphere_area(self.n) * total


def _xlog2(v):
    return 0.0 if v == 0.0 else 2.0 * v * v * math.log(abs(v))


def gaussian_profile(n, lam, label=None):
    return RadialTestFunction(
        n=n,
        profile=lambda r: math.exp(-lam * r * r),
        dprofile=lambda r: -2.0 * lam * r * math.exp(-lam * r * r),
        label=label or f"gauss_{lam:g}",
    )


def bump_profile(n, radius=3.0):
    def prof(r):
        return 0.5 * (1.0 + math.cos(math.pi * r / radius)) if r < radius else 0.0

    def dprof(r):
        return (
            -0.5 * math.pi / radius * math.sin(math.pi * r / radius) if r < radius else 0.0
        )

    return RadialTestFunction(
        n=n, profile=prof, dprofile=dprof, label="bump", breakpoints=(radius,)
    )


def tent_profile(n, radius=4.0):
    def prof(r):
        return max(1.0 - r / radius, 0.0)

    def dprof(r):
        return -1.0 / radius if r < radius else 0.0

    return RadialTestFunction(
        n=n, profile=prof, dprofile=dprof, label="tent", breakpoints=(radius,)
    )


def standard_battery(n):
    """The fixed battery: Gaussians of 5 widths, a bump, and a tent."""
    members = [gaussian_profile(n, lam) for lam in (0.2, 0.5, 1.0, 2.0, 5.0)]
    members.append(bump_profile(n))
    members.append(tent_profile(n))
    return members


def _norm_gauss(test):
    """int u^2 dmu with dmu = (2 pi)^{-n/2} e^{-|x|^2/2} dx."""
    n = test.n
    coef = (2.0 * math.pi) ** (-n / 2.0)
    return coef * test._quad(
        lambda r: test.profile(r) ** 2 * math.exp(-r * r / 2.0) * r ** (n - 1)
    )


def _norm_lebesgue(test):
    return test._quad(lambda r: test.profile(r) ** 2 * r ** (test.n - 1))


def euclidean_lsi_check(variant, n, test, beta=None, tol=1e-10, witness=None):
    """Audit one Euclidean display for one radial test function.

    STRAIGHT takes the target squared norm `beta` (defaults to the
    additive-term-free value (2 pi)^{n/2} e^n).  Returns an InequalityReport;
    an unnormalizable profile (zero norm) is an error.
    """
    if variant not in VARIANTS:
        raise EuclideanError(f"unknown variant {variant!r}")
    witness = witness if witness is not None else test.label
    u, du = test.profile, test.dprofile

    if variant == "GROSS":
        norm = _norm_gauss(test)
        if norm <= 0:
            raise EuclideanError("profile has zero Gaussian norm")
        c = 1.0 / math.sqrt(norm)
        coef = (2.0 * math.pi) ** (-n / 2.0)
        lhs = coef * test._quad(
            lambda r: _xlog2(c * u(r)) * math.exp(-r * r / 2.0) * r ** (n - 1)
        )
        rhs = 2.0 * coef * test._quad(
            lambda r: (c * du(r)) ** 2 * math.exp(-r * r / 2.0) * r ** (n - 1)
        )
        params = {}

    elif variant in ("STRAIGHT", "LOGGRAD"):
        if variant == "LOGGRAD":
            beta = 1.0
        elif beta is None:
            beta = (2.0 * math.pi) ** (n / 2.0) * math.exp(n)
        norm = _norm_lebesgue(test)
        if norm <= 0:
            raise EuclideanError("profile has zero Lebesgue norm")
        c = math.sqrt(beta / norm)
        lhs = test._quad(lambda r: _xlog2(c * u(r)) * r ** (n - 1))
        grad = test._quad(lambda r: (c * du(r)) ** 2 * r ** (n - 1))
        if variant == "LOGGRAD":
            rhs = (n / 2.0) * math.log(2.0 / (math.pi * n * math.e) * grad)
        else:
            rhs = (
                2.0 * grad
                + beta * math.log(beta)
                - (n / 2.0) * beta * math.log(2.0 * math.pi * math.e**2)
            )
        params = {"beta": beta, "grad": grad}

    else:  # ENTROPY, stated through u^2 = const e^{-f} to stay quad-friendly
        norm = _norm_lebesgue(test)
        if norm <= 0:
            raise EuclideanError("profile has zero Lebesgue norm")
        c = (2.0 * math.pi) ** (n / 2.0) / norm

        def integrand(r):
            val = u(r)
            grad_part = 2.0 * c * du(r) ** 2
            if val * val == 0.0:
                return grad_part * r ** (n - 1)
            # log via 2 ln|val| so subnormal profile values stay finite
            f_part = c * val * val * (-math.log(c) - 2.0 * math.log(abs(val)) - n)
            return (grad_part + f_part) * r ** (n - 1)

        lhs = 0.0
        rhs = test._quad(integrand)
        params = {}

    return InequalityReport(
        name=f"euclidean/{variant}",
        lhs=lhs,
        rhs=rhs,
        tol=tol,
        witness=witness,
        params=params,
    )


def loggrad_gaussian_sweep(n, lams=None):
    """Slack of the log-gradient display along the Gaussian family.

    Gaussians are extremal, so the minimum slack probes the constant.
    Returns (min_slack, reports).
    """
    lams = lams if lams is not None else np.geomspace(0.25, 4.0, 9)
    reports = [euclidean_lsi_check("LOGGRAD", n, gaussian_profile(n, lam)) for lam in lams]
    return min(r.slack for r in reports), reports


def gross_straight_consistency(n, test, beta):
    """Slack ratio between the transported and native displays.

    Transforming a Gaussian-normalized u to w = sqrt(beta) (2 pi)^{-n/4}
    e^{-|x|^2/4} u turns the Gaussian display into the beta-normalized
    Lebesgue display with slack scaled exactly by beta; returns
    (slack_straight, beta * slack_gross).
    """
    gross = euclidean_lsi_check("GROSS", n, test)
    norm = math.sqrt(_norm_gauss(test))

    def w(r):
        return (
            math.sqrt(beta)
            * (2.0 * math.pi) ** (-n / 4.0)
            * math.exp(-r * r / 4.0)
            * test.profile(r)
            / norm
        )

    def dw(r):
        inner = test.dprofile(r) - 0.5 * r * test.profile(r)
        return math.sqrt(beta) * (2.0 * math.pi) ** (-n / 4.0) * math.exp(-r * r / 4.0) * inner / norm

    transported = RadialTestFunction(
        n=n, profile=w, dprofile=dw, label=f"{test.label}->straight",
        breakpoints=test.breakpoints,
    )
    straight = euclidean_lsi_check("STRAIGHT", n, transported, beta=beta)
    return straight.slack, beta * gross.slack
