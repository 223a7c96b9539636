"""Heat semigroup e^{-tH} for H = -Delta + Psi and its quantitative bounds.

The semigroup acts spectrally through the full discrete eigensystem (sup-norm
checks keep every mode to avoid truncation bias).  A log-Sobolev budget
beta(sigma) valid on (0, sigma*) converts into ultracontractivity bounds via

    tau(t) = (1/2t) int_0^t beta(sigma) d sigma,
    ||e^{-tH}||_{2->inf} <= exp(tau(t) - (3t/4) inf Psi^-),
    ||e^{-tH}||_{1->inf} <= exp(2 tau(t/2) - (3t/4) inf Psi^-),

for 0 < t < sigma*/4, and the p(s) = 2t/(t-s) exponent schedule makes
exp(-N(s)) ||e^{-sH}u||_{p(s)} nonincreasing.  Fractional powers H^{1/2} and
H^{-1/2} are spectral, with an independent quadrature route for H^{-1/2}
through the half-power heat integral.  The constant calculators assemble the
explicit Sobolev constants from the heat bound: all of them are pure
functions of their numeric inputs.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .functionals import LsiProfile
from .geometry import ScalarField
from .reports import InequalityReport

SQRT_PI = math.sqrt(math.pi)


class SemigroupError(ValueError):
    pass


def _values(u):
    return u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)


class SchrodingerOperator:
    """H = -Delta + Psi on a SpectralManifold, with its full eigensystem."""

    def __init__(self, g, psi):
        self.manifold = g
        self.psi = _values(psi) if not np.isscalar(psi) else np.full(g.m, float(psi))
        if len(self.psi) != g.m:
            raise SemigroupError("potential length does not match the grid")
        self.inf_psi_minus = min(float(np.min(self.psi)), 0.0)
        self._eigen = None

    @property
    def eigenpairs(self):
        if self._eigen is None:
            self._eigen = self.manifold._solve_modes(self.manifold.m, potential=self.psi)
        return self._eigen

    @property
    def eigenvalues(self):
        return self.eigenpairs[0]

    @property
    def eigenfunctions(self):
        return self.eigenpairs[1]

    def require_nonneg_psi(self):
        j = int(np.argmin(self.psi))
        if self.psi[j] < 0:
            raise SemigroupError(f"Psi >= 0 violated at node {j} (Psi = {self.psi[j]})")

    def quadratic_form(self, u):
        """Q(u) = int (|grad u|^2 + Psi u^2) dvol."""
        vals = _values(u)
        g = self.manifold
        return g.dirichlet_energy(vals) + g.inner(self.psi * vals, vals)

    def coefficients(self, u):
        vals = _values(u)
        w = self.manifold.vol_weights
        return self.eigenfunctions.T @ (w * vals)

    def synthesize(self, coeffs, modes=None):
        funcs = self.eigenfunctions if modes is None else self.eigenfunctions[:, :modes]
        return self.manifold.field(funcs @ coeffs)

    def norm_2_to_inf(self, t):
        """Empirical ||e^{-tH}||_{2->inf} = max_x sqrt(sum e^{-2 lam t} phi^2)."""
        lam, funcs = self.eigenpairs
        diag = (funcs**2) @ np.exp(-2.0 * lam * t)
        return float(np.sqrt(np.max(diag)))

    def norm_1_to_2(self, t):
        """Empirical ||e^{-tH}||_{1->2} = max_y of the kernel-row L2 norm."""
        return self.norm_2_to_inf(t)


def heat_apply(op, u, t, modes=None):
    """Spectral e^{-tH} u over the retained modes (all by default)."""
    if t < 0:
        raise SemigroupError(f"t={t} must be nonnegative")
    lam, funcs = op.eigenpairs
    if modes is not None:
        lam, funcs = lam[:modes], funcs[:, :modes]
    coeffs = funcs.T @ (op.manifold.vol_weights * _values(u))
    return op.manifold.field(funcs @ (np.exp(-lam * t) * coeffs))


def contraction_audit(op, t, family, p_list, tol=1e-8):
    """L^p contraction and positivity reports for a nonneg-potential operator."""
    op.require_nonneg_psi()
    g = op.manifold
    reports = []
    for label, vals in family:
        out = heat_apply(op, vals, t).values
        for p in p_list:
            before = g.lp_norm(vals, p)
            reports.append(
                InequalityReport(
                    name="semigroup/contraction_lp",
                    lhs=g.lp_norm(out, p),
                    rhs=before,
                    tol=tol * max(1.0, before),
                    witness=f"{label}/p={p}",
                    params={"t": t, "p": float(p)},
                )
            )
        if np.all(vals >= 0):
            reports.append(
                InequalityReport(
                    name="semigroup/positivity",
                    lhs=-float(np.min(out)),
                    rhs=0.0,
                    tol=tol * max(1.0, float(np.max(np.abs(vals)))),
                    witness=label,
                    params={"t": t},
                )
            )
    return reports


# -- Davies machinery ----------------------------------------------------------


def _beta_callable(beta):
    if isinstance(beta, LsiProfile):
        return beta.beta
    return beta


def _beta_integral(beta, lo, hi):
    """int_lo^hi beta with the closed form for single-piece profiles."""
    if isinstance(beta, LsiProfile) and len(beta.pieces) == 1:
        piece = beta.pieces[0]
        mu = beta.mu

        def anti(x):
            if x == 0.0:
                return 0.0
            return piece.c0 * x + 0.5 * piece.c1 * x**2 - (mu / 2.0) * (x * math.log(x) - x)

        return anti(hi) - anti(lo)
    value, _ = integrate.quad(_beta_callable(beta), lo, hi, limit=200)
    return value


def davies_tau(beta, t):
    """tau(t) = (1/2t) int_0^t beta(sigma) d sigma."""
    if t <= 0:
        raise SemigroupError(f"t={t} must be positive")
    value = _beta_integral(beta, 0.0, t)
    if not np.isfinite(value):
        raise SemigroupError("beta integral diverges on (0, t)")
    return value / (2.0 * t)


def check_beta_nonincreasing(beta, sigma_star, samples=64):
    """Numeric precondition check on a log grid of (0, sigma_star)."""
    fn = _beta_callable(beta)
    grid = np.geomspace(1e-8 * sigma_star, sigma_star * (1 - 1e-12), samples)
    vals = np.array([fn(s) for s in grid])
    return bool(np.all(np.diff(vals) <= 1e-9 * np.maximum(1.0, np.abs(vals[:-1]))))


@dataclass
class DaviesSchedule:
    """Exponent schedule of the iteration: p(s) = 2t/(t-s), N(s), N* = tau(t)."""

    t: float
    beta: object

    def p(self, s):
        return 2.0 * self.t / (self.t - s)

    def n_of_s(self, s):
        if s == 0.0:
            return 0.0
        return _beta_integral(self.beta, self.t - s, self.t) / (2.0 * self.t)

    @property
    def n_star(self):
        return davies_tau(self.beta, self.t)


@dataclass
class UltracontractivityBound:
    t: float
    bound_2_inf: float
    bound_1_inf: float
    empirical_2_inf: float

    @property
    def report(self):
        return InequalityReport(
            name="semigroup/ultracontractive_2inf",
            lhs=self.empirical_2_inf,
            rhs=self.bound_2_inf,
            tol=1e-10 * self.bound_2_inf,
            params={"t": self.t},
        )


def ultracontractivity_bound(op, beta, t, sigma_star):
    """Heat bounds from a log-Sobolev budget valid on (0, sigma_star).

    Requires 0 < t < sigma_star/4 and beta nonincreasing there; returns the
    2->inf and 1->inf bounds together with the empirical 2->inf norm.
    """
    if not 0 < t < sigma_star / 4.0:
        raise SemigroupError(f"t={t} outside (0, sigma*/4) with sigma*={sigma_star}")
    if not check_beta_nonincreasing(beta, sigma_star):
        raise SemigroupError("beta is not nonincreasing on (0, sigma*)")
    correction = -0.75 * t * op.inf_psi_minus
    bound_2 = math.exp(davies_tau(beta, t) + correction)
    bound_1 = math.exp(2.0 * davies_tau(beta, t / 2.0) + correction)
    return UltracontractivityBound(
        t=t,
        bound_2_inf=bound_2,
        bound_1_inf=bound_1,
        empirical_2_inf=op.norm_2_to_inf(t),
    )


def davies_schedule_audit(op, u, t, beta, sigma_star, samples=12, tol=1e-6, witness=""):
    """Monotonicity of e^{-N(s)} ||e^{-sH} u||_{p(s)} plus the terminal bound.

    Returns (monotonicity report, terminal report).  Requires Psi >= 0 and a
    nonnegative, nonzero u.
    """
    op.require_nonneg_psi()
    vals = _values(u)
    if np.any(vals < 0) or not np.any(vals > 0):
        raise SemigroupError("u must be nonnegative and nonzero")
    if not 0 < t < sigma_star / 4.0:
        raise SemigroupError(f"t={t} outside (0, sigma*/4)")
    schedule = DaviesSchedule(t=t, beta=beta)
    g = op.manifold
    s_grid = np.linspace(0.0, 0.95 * t, samples)
    seq = []
    for s in s_grid:
        u_s = heat_apply(op, vals, s).values
        seq.append(math.exp(-schedule.n_of_s(s)) * g.lp_norm(u_s, schedule.p(s)))
    seq = np.array(seq)
    worst_rise = float(np.max(np.diff(seq) / np.maximum(seq[:-1], 1e-300)))
    mono = InequalityReport(
        name="semigroup/davies_schedule",
        lhs=worst_rise,
        rhs=0.0,
        tol=tol,
        witness=witness,
        params={"t": t, "samples": samples, "p_max": schedule.p(s_grid[-1])},
    )
    terminal_lhs = g.lp_norm(heat_apply(op, vals, t).values, np.inf)
    terminal_rhs = math.exp(schedule.n_star) * g.lp_norm(vals, 2)
    terminal = InequalityReport(
        name="semigroup/davies_terminal",
        lhs=terminal_lhs,
        rhs=terminal_rhs,
        tol=tol * max(1.0, terminal_rhs),
        witness=witness,
        params={"t": t},
    )
    return mono, terminal


# -- fractional powers ---------------------------------------------------------


ZERO_MODE_TOL = 1e-8


def h_power(op, u, exponent, project_zero=False):
    """Spectral H^exponent u; negative powers act on the positive modes.

    For negative exponents the component on (numerically) zero modes must be
    below tolerance unless project_zero is set, in which case it is removed
    per the zero-mode convention.
    """
    lam, funcs = op.eigenpairs
    vals = _values(u)
    coeffs = funcs.T @ (op.manifold.vol_weights * vals)
    scale = max(1.0, float(lam[-1]))
    zero = np.abs(lam) <= 1e-9 * scale
    if exponent < 0:
        weight = float(np.sqrt(np.sum(coeffs[zero] ** 2)))
        total = float(np.sqrt(np.sum(coeffs**2)))
        if weight > ZERO_MODE_TOL * max(total, 1e-300) and not project_zero:
            raise SemigroupError(
                f"u has zero-mode component {weight:.3g}; project it out first"
            )
        coeffs = np.where(zero, 0.0, coeffs)
        powered = np.where(zero, 0.0, np.maximum(lam, 1e-300) ** exponent)
    else:
        powered = np.maximum(lam, 0.0) ** exponent
    return op.manifold.field(funcs @ (powered * coeffs))


def default_t_grid(op, points=400):
    """Log grid covering [1e-6/lam_max, 40/lam_min+] for the half-power integral."""
    lam = op.eigenvalues
    lam_max = max(float(lam[-1]), 1e-12)
    positive = lam[lam > 1e-9 * max(1.0, lam_max)]
    lam_min = float(positive[0]) if len(positive) else 1.0
    return np.geomspace(1e-6 / lam_max, 40.0 / lam_min, points)


def gamma_half_quadrature(lam, t_grid):
    """Quadrature of int_0^inf t^{-1/2} e^{-lam t} dt on the given log grid.

    Trapezoid in log t plus the analytic short-time correction
    2 sqrt(t_min) (1 - lam t_min / 3); the long-time tail is below the grid's
    e^{-lam t_max} floor and is dropped.
    """
    lam = np.asarray(lam, dtype=float)
    v = np.log(t_grid)
    integrand = np.sqrt(t_grid)[None, :] * np.exp(-np.outer(lam, t_grid))
    body = np.trapezoid(integrand, v, axis=1)
    t_min = t_grid[0]
    head = 2.0 * math.sqrt(t_min) * (1.0 - lam * t_min / 3.0)
    out = body + head
    return float(out[0]) if out.shape == (1,) else out


def h_neg_half_quadrature(op, u, t_grid=None, project_zero=True):
    """H^{-1/2} u through the half-power heat integral (quadrature route).

    Zero modes are projected out first; each retained positive mode picks up
    the quadrature value of Gamma(1/2)^{-1} int t^{-1/2} e^{-lam t} dt, so the
    result matches the spectral route exactly to quadrature accuracy.
    """
    if t_grid is None:
        t_grid = default_t_grid(op)
    lam, funcs = op.eigenpairs
    vals = _values(u)
    coeffs = funcs.T @ (op.manifold.vol_weights * vals)
    scale = max(1.0, float(lam[-1]))
    zero = np.abs(lam) <= 1e-9 * scale
    if not project_zero:
        weight = float(np.sqrt(np.sum(coeffs[zero] ** 2)))
        total = float(np.sqrt(np.sum(coeffs**2)))
        if weight > ZERO_MODE_TOL * max(total, 1e-300):
            raise SemigroupError("u has zero-mode component; project it out first")
    coeffs = np.where(zero, 0.0, coeffs)
    factors = np.zeros_like(lam)
    keep = ~zero
    factors[keep] = gamma_half_quadrature(lam[keep], t_grid) / SQRT_PI
    return op.manifold.field(funcs @ (factors * coeffs))


# -- explicit constants ----------------------------------------------------------


def c1_constant(mu, p, c):
    if not (mu > 1 and 1 < p < mu and c > 0):
        raise SemigroupError(f"need mu > 1, 1 < p < mu, c > 0 (mu={mu}, p={p}, c={c})")
    return (2.0 * p / (mu - p)) / SQRT_PI * (2.0 ** (mu / 2.0) * c**2) ** (1.0 / p)


def c2_constant(mu, p, c):
    c1 = c1_constant(mu, p, c)
    return (
        2.0 ** (p * (2.0 * mu - p) / (mu - p))
        * c1 ** (p**2 / (mu - p))
        * SQRT_PI ** (-p)
    )


def marcinkiewicz_constant(q0, q1, q_mid):
    """Explicit interpolation constant at the midpoint exponent.

    K = 2 q^{1/q} (q/(q - q0) + q1/(q1 - q))^{1/q} with q the target exponent;
    the abstract statement only requires boundedness, so the classical
    explicit form is fixed here once for reproducibility.
    """
    if not q0 < q_mid < q1:
        raise SemigroupError("need q0 < q < q1")
    return 2.0 * q_mid ** (1.0 / q_mid) * (
        q_mid / (q_mid - q0) + q1 / (q1 - q_mid)
    ) ** (1.0 / q_mid)


@dataclass(frozen=True)
class C5Constants:
    """Explicit constant package of the weak-type interpolation route."""

    mu: float
    p: float
    c: float
    c1: float
    c2_p0: float
    c2_p1: float
    gamma: float
    p0: float
    p1: float
    q0: float
    q1: float
    q: float
    k_interp: float
    c_final: float


def c5_constants(mu, c, p):
    """All constants of the H^{-1/2} weak-type route for given (mu, c, p)."""
    c1 = c1_constant(mu, p, c)
    gamma = max(p / (p - 1.0), 2.0, (2.0 * mu - p) / (mu - p)) + 1.0
    p0 = (gamma - 1.0) / gamma * p
    p1 = (gamma - 1.0) / (gamma - 2.0) * p
    q0 = mu * p0 / (mu - p0)
    q1 = mu * p1 / (mu - p1)
    q = mu * p / (mu - p)
    c2_p0 = c2_constant(mu, p0, c)
    c2_p1 = c2_constant(mu, p1, c)
    k = marcinkiewicz_constant(q0, q1, q)
    c_final = k * c2_p0 ** (1.0 / (2.0 * q0)) * c2_p1 ** (1.0 / (2.0 * q1))
    return C5Constants(
        mu=mu, p=p, c=c, c1=c1, c2_p0=c2_p0, c2_p1=c2_p1, gamma=gamma,
        p0=p0, p1=p1, q0=q0, q1=q1, q=q, k_interp=k, c_final=c_final,
    )


@dataclass(frozen=True)
class D3Constants:
    """Sobolev coefficients assembled from a uniform log-Sobolev constant."""

    bar_c: float
    c_heat_to_sobolev: float
    a_coeff: float
    b_coeff: float
    mu: float
    sigma_star: float
    min_psi_minus: float


def d3_constants(c_lsi, mu, n, sigma_star, min_psi_minus):
    """Sobolev inequality coefficients from the budget sigma Q - (mu/2) ln sigma + C.

    bar_c = 2^{(mu-n)/2} sigma*^{(n-mu)/4} exp(mu/4 - (3 sigma*/16) min Psi^- + C/2)
    and the final inequality reads
    ||u||^2_{2mu/(mu-2)} <= A Q(u) + B ||u||_2^2 with
    A = (sigma*/4)^{1-n/mu} C(bar_c, mu) and B = A (4 - sigma* min Psi^-)/sigma*.
    """
    if sigma_star <= 0 or mu <= 2:
        raise SemigroupError("need sigma* > 0 and mu > 2")
    bar_c = (
        2.0 ** ((mu - n) / 2.0)
        * sigma_star ** ((n - mu) / 4.0)
        * math.exp(mu / 4.0 - (3.0 * sigma_star / 16.0) * min_psi_minus + c_lsi / 2.0)
    )
    c_d2 = c5_constants(mu, bar_c, 2.0).c_final ** 2
    scale = (sigma_star / 4.0) ** (1.0 - n / mu)
    a_coeff = scale * c_d2
    b_coeff = a_coeff * (4.0 - sigma_star * min_psi_minus) / sigma_star
    return D3Constants(
        bar_c=bar_c,
        c_heat_to_sobolev=c_d2,
        a_coeff=a_coeff,
        b_coeff=b_coeff,
        mu=mu,
        sigma_star=sigma_star,
        min_psi_minus=min_psi_minus,
    )


def thm_d_constant(d3, lambda0_g0):
    """Gradient-only Sobolev constant: A + B / lambda0(g0) (lambda0 > 0)."""
    if lambda0_g0 <= 0:
        raise SemigroupError("requires lambda0(g0) > 0")
    return d3.a_coeff + d3.b_coeff / lambda0_g0


def c7_constant(c_lsi, n, p, min_psi_minus_t):
    """Constant of the W^{1,p} route for H0 = H - inf Psi^- + 1, all t > 0.

    The short-time heat bound c t^{-n/4} with
    c = exp(n/4 + C/2 - (3/4) inf Psi^-) extends to all times against H0
    (whose potential is >= 1) at the price of the explicit factor
    e^{1 - n/4} 2^{n/4} (n/4)^{n/4}; the weak-type route then applies.
    """
    c_short = math.exp(n / 4.0 + c_lsi / 2.0 - 0.75 * min_psi_minus_t)
    extend = math.exp(1.0 - n / 4.0) * 2.0 ** (n / 4.0) * (n / 4.0) ** (n / 4.0)
    return c5_constants(n, c_short * max(1.0, extend), p).c_final


def sobolev_check(g, psi, a_coeff, b_coeff, p, u, tol=1e-10, witness="", op=None):
    """Sobolev inequality report.

    p = 2: ||u||^2_{2n/(n-2)} <= A Q(u) + B ||u||_2^2 with Q from Psi.
    1 < p < n, p != 2: ||u||_{np/(n-p)} <= A ||H^{1/2} u||_p with
    H = -Delta + Psi (spectral half power); B must be zero.  Pass a prebuilt
    operator through `op` to reuse its eigensystem across checks.
    """
    n = g.n
    if not 1 < p < n:
        raise SemigroupError(f"p={p} outside (1, n)")
    vals = _values(u)
    if op is None:
        op = SchrodingerOperator(g, psi)
    if p == 2:
        lhs = g.lp_norm(vals, 2.0 * n / (n - 2.0)) ** 2
        rhs = a_coeff * op.quadratic_form(vals) + b_coeff * g.lp_norm(vals, 2) ** 2
        name = "semigroup/sobolev_p2"
    else:
        if b_coeff != 0:
            raise SemigroupError("the p != 2 form has no zero-order term")
        lhs = g.lp_norm(vals, n * p / (n - p))
        rhs = a_coeff * g.lp_norm(h_power(op, vals, 0.5).values, p)
        name = "semigroup/sobolev_halfpower"
    return InequalityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        tol=tol * max(1.0, abs(rhs)),
        witness=witness,
        params={"p": float(p), "A": a_coeff, "B": b_coeff},
    )
