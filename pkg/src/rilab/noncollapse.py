"""Faber-Krahn audit, the ball-volume iteration, and noncollapsing bounds.

Balls are pole-centered (the zonal model makes d(pole, .) = s exact).  The
volume iteration replays the doubling argument: a Faber-Krahn lower bound
lambda_1(Omega) vol(Omega)^{2/n} >= 1/(2A) combined with the linear test
function u = rho - d(x, .) yields

    vol(B(rho)) >= (rho^2 / 2A)^{n/(n+2)} 4^{-n/(n+2)} vol(B(rho/2))^{n/(n+2)},

whose fixed point after iterating across dyadic scales is the closed form
(1/(2^{n+3} A))^{n/2} rho^n.  The noncollapsing value with a zero-order
Sobolev term B and scale cap L is (1/(2^{n+3} A + 2 B L^2))^{n/2} r^n.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .reports import InequalityReport


class NoncollapseError(ValueError):
    pass


@dataclass(frozen=True)
class NoncollapseBound:
    """Ball-volume lower bound value for given Sobolev coefficients."""

    n: int
    a_coeff: float
    b_coeff: float = 0.0
    scale_cap: float = 0.0

    def value(self, r):
        denom = 2.0 ** (self.n + 3) * self.a_coeff
        if self.b_coeff:
            denom += 2.0 * self.b_coeff * self.scale_cap**2
        return (1.0 / denom) ** (self.n / 2.0) * r**self.n

    @property
    def kappa(self):
        return (2.0 ** (self.n + 3) * self.a_coeff) ** (-self.n / 2.0)


def dirichlet_lambda1(g, r):
    """First Dirichlet eigenvalue of -Delta on the pole-centered ball B(r).

    The ball boundary is snapped to the nearest interior cell face; the
    Dirichlet condition is imposed at that face through the ghost-cell
    reflection.
    """
    if not 0 < r < g.s_max:
        raise NoncollapseError(f"radius r={r} outside (0, s_max)")
    cells = int(round(r / g.ds))
    cells = min(max(cells, 2), g.m - 1)
    w = g.vol_weights[:cells]
    diag = g._tri_diag[:cells].copy()
    # boundary face conductance enters twice for the half-cell Dirichlet value
    diag[-1] += 2.0 * g._cond[cells - 1]
    off = g._tri_off[: cells - 1]
    vals = eigh_tridiagonal(
        diag / w, off / np.sqrt(w[:-1] * w[1:]), select="i", select_range=(0, 0)
    )[0]
    return float(vals[0])


def rayleigh_upper_bound(g, r):
    """The linear-test-function bound 4 vol(B(r)) / (r^2 vol(B(r/2)))."""
    return 4.0 * g.ball_volume(r) / (r**2 * g.ball_volume(r / 2.0))


def rayleigh_check(g, r, tol=1e-10, witness=""):
    bound = rayleigh_upper_bound(g, r)
    return InequalityReport(
        name="noncollapse/rayleigh_upper",
        lhs=dirichlet_lambda1(g, r),
        rhs=bound,
        tol=tol * bound,
        witness=witness,
        params={"r": r},
    )


def faber_krahn_audit(g, r, a_coeff, tol=0.0, witness=""):
    """Report lambda_1(B(r)) vol(B(r))^{2/n} against 1/(2A).

    The rescaled-ball hypotheses behind the bound are not assumed here; the
    audit reports the comparison as observed.
    """
    lam1 = dirichlet_lambda1(g, r)
    vol = g.ball_volume(r)
    return InequalityReport(
        name="noncollapse/faber_krahn",
        lhs=1.0 / (2.0 * a_coeff),
        rhs=lam1 * vol ** (2.0 / g.n),
        tol=tol,
        witness=witness,
        params={"r": r, "lambda1": lam1, "vol": vol, "A": a_coeff},
    )


def volume_iteration(a_coeff, n, rho, vol_fn, m):
    """Iterate the dyadic volume recursion m times up from radius rho/2^m.

    Returns (bounds, limit): bounds[j] is the lower bound for vol(B(rho))
    seeded at depth m - ... step j, i.e. bounds[-1] is the m-step bound, and
    limit is the closed-form fixed point (1/(2^{n+3} A))^{n/2} rho^n.
    """
    if m < 1:
        raise NoncollapseError("need at least one iteration step")
    exponent = n / (n + 2.0)
    bound = vol_fn(rho / 2.0**m)
    bounds = []
    for level in range(m, 0, -1):
        radius = rho / 2.0 ** (level - 1)
        bound = (radius**2 / (2.0 * a_coeff)) ** exponent * 4.0 ** (-exponent) * bound**exponent
        bounds.append(bound)
    limit = (1.0 / (2.0 ** (n + 3) * a_coeff)) ** (n / 2.0) * rho**n
    return np.array(bounds), limit


def kappa_check(g, a_coeff, b_coeff=0.0, scale_cap=0.0, r=None, tol=0.0, witness=""):
    """Noncollapsing report vol(B(r)) >= bound under R <= 1/r^2 on the ball.

    When the curvature hypothesis fails on the ball the report is marked
    hypothesis-failed rather than failed.
    """
    if r is None or not 0 < r <= g.s_max:
        raise NoncollapseError(f"radius r={r} outside (0, s_max]")
    bound = NoncollapseBound(g.n, a_coeff, b_coeff, scale_cap)
    inside = g.s <= r
    r_max_on_ball = float(np.max(g.R.values[inside])) if np.any(inside) else -np.inf
    hypothesis_ok = r_max_on_ball <= 1.0 / r**2 + 1e-12
    return InequalityReport(
        name="noncollapse/kappa",
        lhs=bound.value(r),
        rhs=g.ball_volume(r),
        tol=tol,
        hypothesis_ok=hypothesis_ok,
        witness=witness,
        params={
            "r": r,
            "A": a_coeff,
            "B": b_coeff,
            "L": scale_cap,
            "max_R_on_ball": r_max_on_ball,
            "kappa": bound.kappa,
        },
    )
