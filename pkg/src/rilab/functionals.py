"""Sobolev constants, scalar log lemmas, and log-Sobolev budget profiles.

Sampled lower estimates of the Sobolev constants feed explicit log-Sobolev
budgets of the form

    int u^2 ln u^2 dvol <= sigma * E(u) - (mu/2) ln sigma + const(sigma),

where E is either the plain Dirichlet integral or the curvature-augmented
int (|grad u|^2 + R u^2 / 4).  Budgets built from a manifold's own sampled
constants are lower-estimate based: the sampled C_S is inflated by a safety
factor (default 1.05) and every report records which constant fed it.  On the
zonal model class all sampled suprema are lower estimates of the true
constants.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ScalarField
from .reports import InequalityReport

E = math.e


class FunctionalsError(ValueError):
    pass


class SigmaRangeError(FunctionalsError):
    pass


DEFAULT_INFLATION = 1.05


def _values(u):
    return u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)


def _unit(g, u):
    vals = _values(u)
    norm = g.lp_norm(vals, 2)
    if norm == 0:
        raise FunctionalsError("zero field")
    return vals / norm


def entropy_integral(g, u):
    """int u^2 ln u^2 dvol for ||u||_2 = 1 (u renormalized internally)."""
    vals = _unit(g, u)
    out = np.zeros_like(vals)
    mask = vals != 0.0
    out[mask] = 2.0 * vals[mask] ** 2 * np.log(np.abs(vals[mask]))
    return float(np.dot(g.vol_weights, out))


def curvature_energy(g, u):
    """int (|grad u|^2 + (R/4) u^2) dvol."""
    vals = _values(u)
    return g.dirichlet_energy(vals) + 0.25 * g.inner(g.R.values * vals, vals)


def lambda0(g):
    """Smallest eigenvalue of -Delta + R/4."""
    vals, _ = g._solve_modes(1, potential=0.25 * g.R.values)
    return float(vals[0])


# -- sampled function families -----------------------------------------------


def sample_family(g, count=50, seed=0, include_constant=True):
    """Deterministic list of (label, values) test functions on g.

    Mix of the leading eigenfunctions, pole-centered bumps exp(-kappa s^2)
    for kappa in {1, 10, 100}, and random low-frequency eigenfunction
    combinations; all L2-normalized.  The list is a prefix sequence: larger
    counts extend, never reshuffle.
    """
    rng = np.random.default_rng(seed)
    members = []
    if include_constant:
        members.append(("const", np.full(g.m, g.total_volume**-0.5)))
    n_eig = min(g.k, 12)
    for i in range(1, min(n_eig, 6)):
        members.append((f"eig{i:02d}", g.eigenfunctions[:, i].copy()))
    for kappa in (1.0, 10.0, 100.0):
        bump = np.exp(-kappa * g.s**2)
        members.append((f"bump_k{kappa:g}", bump / g.lp_norm(bump, 2)))
    idx = 0
    while len(members) < count:
        coeff = rng.standard_normal(n_eig)
        vals = g.eigenfunctions[:, :n_eig] @ coeff
        members.append((f"mix{idx:03d}", vals / g.lp_norm(vals, 2)))
        idx += 1
    return members[:count]


# -- Sobolev constants ---------------------------------------------------------


@dataclass
class SobolevConstants:
    """Sampled lower estimates of the Sobolev constants of a manifold."""

    c_s_lower: float
    c_ps_lower: float
    vol: float
    family_id: str = ""

    @property
    def c_s_modified(self):
        return max(self.c_s_lower, 1.0)


def sobolev_constants(g, family, family_id=""):
    """Lower estimates of C_S and C_{P,S} over a sampled family.

    c_s_lower maximizes (||u||_q - vol^{-1/n} ||u||_2) / ||grad u||_2 with
    q = 2n/(n-2); c_ps_lower the same with ||u - mean(u)||_q.  Members with
    vanishing gradient are skipped; an all-constant family is an error.
    """
    q = 2.0 * g.n / (g.n - 2.0)
    vol_term = g.total_volume ** (-1.0 / g.n)
    best_s, best_ps = 0.0, 0.0
    usable = 0
    for _, vals in family:
        energy = g.dirichlet_energy(vals)
        if energy <= 1e-14 * g.lp_norm(vals, 2) ** 2:
            continue
        usable += 1
        grad = math.sqrt(energy)
        norm_q = g.lp_norm(vals, q)
        norm_2 = g.lp_norm(vals, 2)
        best_s = max(best_s, (norm_q - vol_term * norm_2) / grad)
        centered = vals - g.mean(vals)
        best_ps = max(best_ps, g.lp_norm(centered, q) / grad)
    if usable == 0:
        raise FunctionalsError("family contains no nonconstant member")
    return SobolevConstants(
        c_s_lower=max(best_s, 0.0),
        c_ps_lower=best_ps,
        vol=g.total_volume,
        family_id=family_id,
    )


@dataclass
class MetricConstants:
    """Initial-metric constants that feed the flow-time budgets.

    c_s is the effective Sobolev constant actually used (sampled lower
    estimate times the recorded inflation factor).
    """

    c_s: float
    vol: float
    min_r: float
    lambda0: float
    inflation: float = DEFAULT_INFLATION

    @property
    def c_s_modified(self):
        return max(self.c_s, 1.0)

    @property
    def min_r_neg(self):
        return min(self.min_r, 0.0)


def metric_constants(g, family=None, inflation=DEFAULT_INFLATION, count=50, seed=0):
    if family is None:
        family = sample_family(g, count=count, seed=seed)
    sampled = sobolev_constants(g, family)
    return MetricConstants(
        c_s=sampled.c_s_lower * inflation,
        vol=g.total_volume,
        min_r=float(np.min(g.R.values)),
        lambda0=lambda0(g),
        inflation=inflation,
    )


# -- scalar log lemmas ---------------------------------------------------------


def log1_gap(alpha, B, x):
    """Gap of ln(x+B) <= alpha x + alpha B - 1 - ln alpha (B >= 0, x > -B)."""
    alpha, B, x = map(np.asarray, (alpha, B, x))
    if np.any(B < 0) or np.any(alpha <= 0) or np.any(x <= -B):
        raise FunctionalsError("log1_gap requires B >= 0, alpha > 0, x > -B")
    gap = alpha * x + alpha * B - 1.0 - np.log(alpha) - np.log(x + B)
    return float(gap) if gap.ndim == 0 else gap


def log2_gap(A, B, gamma, x):
    """Gap of ln(x+B) <= A x - ln A + ln(gamma+B) - ln gamma - 1 for x >= gamma."""
    A, B, gamma, x = map(np.asarray, (A, B, gamma, x))
    if np.any(gamma <= 0) or np.any(B <= 0):
        raise FunctionalsError("log2_gap requires gamma > 0, B > 0")
    if np.any(A < 1.0 / (gamma + B)) or np.any(x < gamma):
        raise FunctionalsError("log2_gap requires A >= 1/(gamma+B) and x >= gamma")
    gap = A * x - np.log(A) + np.log(gamma + B) - np.log(gamma) - 1.0 - np.log(x + B)
    return float(gap) if gap.ndim == 0 else gap


def log_budget_min(a, b, n):
    """Minimum over sigma > 0 of a sigma - (n/2) ln sigma + b.

    Returns (value, alpha) with value = (n/2) ln(alpha a) and
    alpha = (2e/n) e^{2b/n}; the minimizer is sigma = n / (2a).
    """
    if a <= 0:
        raise FunctionalsError("requires a > 0")
    alpha = (2.0 * E / n) * math.exp(2.0 * b / n)
    return (n / 2.0) * math.log(alpha * a), alpha


# -- log-Sobolev budget profiles ----------------------------------------------


@dataclass(frozen=True)
class ProfilePiece:
    c0: float
    c1: float
    sigma_lo: float = 0.0
    sigma_hi: float = math.inf

    def valid(self, sigma):
        return self.sigma_lo <= sigma <= self.sigma_hi

    def constant(self, sigma):
        return self.c0 + self.c1 * sigma


@dataclass
class LsiProfile:
    """sigma-parametrized budget: sigma E(u) - (mu/2) ln sigma + const(sigma).

    `pieces` hold affine constant terms with validity windows; the budget at a
    given sigma is the smallest valid piece.  uses_curvature selects whether
    E(u) carries the R/4 term.  extras records provenance data such as the
    alpha coefficients and the uniform constant.
    """

    mu: float
    uses_curvature: bool
    pieces: list
    tag: str
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mu <= 0:
            raise FunctionalsError("mu must be positive")
        if not any(p.sigma_lo < p.sigma_hi for p in self.pieces):
            raise FunctionalsError("profile has empty validity range")

    @property
    def sigma_min(self):
        return min(p.sigma_lo for p in self.pieces)

    def valid(self, sigma):
        return sigma > 0 and any(p.valid(sigma) for p in self.pieces)

    def grad_coeff(self, sigma):
        return sigma

    def constant(self, sigma):
        vals = [p.constant(sigma) for p in self.pieces if p.valid(sigma)]
        if not vals:
            raise SigmaRangeError(f"sigma={sigma} outside {self.tag} validity range")
        return min(vals)

    def budget(self, sigma):
        """Non-energy part of the bound: -(mu/2) ln sigma + const(sigma)."""
        return -(self.mu / 2.0) * math.log(sigma) + self.constant(sigma)

    def rhs(self, sigma, energy):
        return self.grad_coeff(sigma) * energy + self.budget(sigma)

    def beta(self, sigma):
        """The budget as the beta function of the heat-bound machinery."""
        return self.budget(sigma)


@dataclass
class Rls1Bound:
    """Direct (non sigma-form) bound: n ln(C_S ||grad u||_2 + vol^{-1/n})."""

    c_s: float
    vol: float
    n: int

    def rhs(self, g, u):
        vals = _unit(g, u)
        grad = math.sqrt(g.dirichlet_energy(vals))
        return self.n * math.log(self.c_s * grad + self.vol ** (-1.0 / self.n))


def delta0_sigma0(c_s, vol, min_r_neg, lam0, n):
    """The threshold pair of the positive-eigenvalue budget.

    delta0 = (lambda0 C^2 + vol^{-2/n} - C^2 min R^-/4)^{-1} and sigma0 the
    matching log expression; sigma0 >= -n/2 always.
    """
    if lam0 <= 0:
        raise FunctionalsError("requires lambda0 > 0")
    gamma = lam0 * c_s**2
    total = gamma + vol ** (-2.0 / n) - c_s**2 * min_r_neg / 4.0
    delta0 = 1.0 / total
    sigma0 = (n / 2.0) * (math.log(total) - math.log(gamma) - 1.0)
    return delta0, sigma0


def lsi_fixed_metric(g, variant, c_s, lambda0_value=None):
    """Fixed-metric log-Sobolev budget of the requested variant.

    RLS1 returns the direct bound object; RLS2/RLS3/RLS4 return sigma-form
    LsiProfiles.  c_s is the (effective) Sobolev constant to use; RLS4
    additionally needs lambda0(g) > 0.
    """
    n = g.n
    vol = g.total_volume
    min_r_neg = min(float(np.min(g.R.values)), 0.0)
    if variant == "RLS1":
        return Rls1Bound(c_s=c_s, vol=vol, n=n)
    if variant == "RLS2":
        c0 = (n / 2.0) * (math.log(n) - 1.0) + n * math.log(c_s)
        c1 = vol ** (-2.0 / n) / c_s**2
        return LsiProfile(n, False, [ProfilePiece(c0, c1)], "RLS2")
    if variant == "RLS3":
        c0 = (n / 2.0) * (math.log(n) - 1.0) + n * math.log(c_s)
        c1 = vol ** (-2.0 / n) / c_s**2 - min_r_neg / 4.0
        return LsiProfile(n, True, [ProfilePiece(c0, c1)], "RLS3")
    if variant == "RLS4":
        lam0 = lambda0(g) if lambda0_value is None else lambda0_value
        if lam0 <= 0:
            raise FunctionalsError(f"RLS4 requires lambda0 > 0, got {lam0}")
        delta0, sigma0 = delta0_sigma0(c_s, vol, min_r_neg, lam0, n)
        c0 = (n / 2.0) * math.log(n) + n * math.log(c_s) + sigma0
        lo = (n / 2.0) * c_s**2 * delta0
        return LsiProfile(
            n,
            True,
            [ProfilePiece(c0, 0.0, sigma_lo=lo)],
            "RLS4",
            extras={"delta0": delta0, "sigma0": sigma0},
        )
    raise FunctionalsError(f"unknown variant {variant!r}")


def theorem_abc_profile(constants, variant, t, n):
    """Flow-time budget of variant A, B, or C from initial-metric constants.

    Variant A: constant A1 (t + sigma/4) + A2, valid for all sigma.
    Variant B: fixed constant, valid once t + sigma clears the threshold
    (n/8) C_S^2 delta0; requires lambda0 > 0.
    Variant C: pointwise minimum of the A and B budgets; also carries the
    t-uniform scalar constant (extras["uniform_c"]) and the alpha
    coefficients.  Only the lambda0 > 0 branch is implemented; the
    steady-soliton lambda0 = 0 branch is rejected.
    """
    if t < 0:
        raise FunctionalsError("t must be nonnegative")
    c_mod = constants.c_s_modified
    a1 = 4.0 / (c_mod**2 * constants.vol ** (2.0 / n)) - constants.min_r
    a2 = n * math.log(c_mod) + (n / 2.0) * (math.log(n) - 1.0)
    piece_a = ProfilePiece(a1 * t + a2, a1 / 4.0)
    alpha_i = (2.0 * E / n) * math.exp(2.0 * (a1 * t + a2) / n)
    if variant == "A":
        return LsiProfile(
            n, True, [piece_a], "THM_A", extras={"a1": a1, "a2": a2, "alpha_I": alpha_i}
        )

    if constants.lambda0 <= 0:
        raise FunctionalsError(
            f"variant {variant} requires lambda0(g0) > 0 "
            f"(lambda0 = {constants.lambda0}; the zero branch is not implemented)"
        )
    delta0, sigma0 = delta0_sigma0(
        constants.c_s, constants.vol, constants.min_r_neg, constants.lambda0, n
    )
    c0_b = (n / 2.0) * math.log(n) + n * math.log(constants.c_s) + sigma0
    threshold = (n / 8.0) * constants.c_s**2 * delta0
    piece_b = ProfilePiece(c0_b, 0.0, sigma_lo=max(0.0, threshold - t))
    alpha_ii = 2.0 * E * constants.c_s**2 * math.exp(2.0 * sigma0 / n)
    if variant == "B":
        return LsiProfile(
            n,
            True,
            [piece_b],
            "THM_B",
            extras={
                "delta0": delta0,
                "sigma0": sigma0,
                "threshold": threshold,
                "alpha_II": alpha_ii,
            },
        )
    if variant == "C":
        uniform_c = max(a2 + max(a1, 0.0) * threshold, c0_b)
        alpha_iii = (2.0 * E / n) * math.exp(2.0 * uniform_c / n)
        return LsiProfile(
            n,
            True,
            [piece_a, piece_b],
            "THM_C",
            extras={
                "a1": a1,
                "a2": a2,
                "threshold": threshold,
                "uniform_c": uniform_c,
                "alpha_I": alpha_i,
                "alpha_II": alpha_ii,
                "alpha_III": alpha_iii,
            },
        )
    raise FunctionalsError(f"unknown variant {variant!r}")


def uniform_profile(uniform_c, n):
    """Single-constant budget -(n/2) ln sigma + C, valid for all sigma."""
    return LsiProfile(n, True, [ProfilePiece(uniform_c, 0.0)], "UNIFORM_C")


def transport_profile(h, t):
    """Budget transport along the flow: sigma -> h(4 (t + sigma))."""
    if t < 0:
        raise FunctionalsError("t must be nonnegative")

    def transported(sigma):
        return h(4.0 * (t + sigma))

    return transported


# -- checks --------------------------------------------------------------------


def lsi_check(g, profile, sigma, u, tol=1e-8, witness=""):
    """Report int u^2 ln u^2 against a sigma-form budget at the given sigma."""
    if not profile.valid(sigma):
        raise SigmaRangeError(f"sigma={sigma} outside {profile.tag} validity range")
    vals = _unit(g, u)
    lhs = entropy_integral(g, vals)
    energy = curvature_energy(g, vals) if profile.uses_curvature else g.dirichlet_energy(vals)
    rhs = profile.rhs(sigma, energy)
    return InequalityReport(
        name=f"lsi/{profile.tag}",
        lhs=lhs,
        rhs=rhs,
        tol=tol,
        witness=witness,
        params={"sigma": sigma, "energy": energy},
    )


def rls1_check(g, bound, u, tol=1e-8, witness=""):
    """Report the direct Jensen-route bound for one test function."""
    vals = _unit(g, u)
    return InequalityReport(
        name="lsi/RLS1",
        lhs=entropy_integral(g, vals),
        rhs=bound.rhs(g, vals),
        tol=tol,
        witness=witness,
        params={"c_s": bound.c_s},
    )


def volume_corollary_bound(g_t, uniform_c):
    """Volume lower bound from the uniform budget constant.

    e^{-1/4 - C} when the average scalar curvature is nonpositive, otherwise
    e^{-1/4 - C} R_hat^{-n/2}.
    """
    r_hat = g_t.integrate(g_t.R.values) / g_t.total_volume
    base = math.exp(-0.25 - uniform_c)
    if r_hat <= 0:
        return base
    return base * r_hat ** (-g_t.n / 2.0)


def volume_corollary_check(g_t, uniform_c, tol=1e-10, witness=""):
    bound = volume_corollary_bound(g_t, uniform_c)
    return InequalityReport(
        name="lsi/volume_corollary",
        lhs=bound,
        rhs=g_t.total_volume,
        tol=tol,
        witness=witness,
        params={"uniform_c": uniform_c},
    )
