"""Verification suites over a shared run context.

Each suite returns a list of InequalityReports plus named artifacts (tables
and plot data).  Reports with hypothesis_ok = False are informational: the
curvature hypothesis of a noncollapsing check failed, or the check compares
estimator values whose direction is not guaranteed (the mu* transport audit
uses upper-bound estimates on both sides).
"""

import math

import numpy as np

from . import euclidean as eu
from . import flow as fl
from . import functionals as fn
from . import noncollapse as nc
from . import semigroup as sg
from .geometry import manifold_from_config
from .reports import InequalityReport


class RunContext:
    """Lazily built shared state: manifold, constants, trajectory."""

    def __init__(self, config):
        self.config = config
        self._manifold = None
        self._constants = None
        self._trajectory = None

    @property
    def manifold(self):
        if self._manifold is None:
            self._manifold = manifold_from_config(self.config.manifold)
        return self._manifold

    @property
    def constants(self):
        if self._constants is None:
            family = fn.sample_family(
                self.manifold, count=self.config.family["count"], seed=self.config.seed
            )
            self._constants = fn.metric_constants(
                self.manifold, family, inflation=self.config.inflation
            )
        return self._constants

    @property
    def trajectory(self):
        if self._trajectory is None:
            flow_cfg = self.config.flow
            self._trajectory = fl.warped_flow_evolve(
                self.manifold,
                flow_cfg["dt"],
                flow_cfg["steps"],
                max_substeps=flow_cfg["max_substeps"],
            )
        return self._trajectory

    def flow_time_indices(self):
        traj = self.trajectory
        count = min(self.config.family["flow_times"], traj.steps)
        return sorted(set(np.linspace(0, traj.steps - 1, count).astype(int).tolist()))

    def family_at(self, index):
        g = self.trajectory.snapshot(index)
        return g, fn.sample_family(
            g, count=self.config.family["count"], seed=self.config.seed + index
        )


def _monotone_reports(name, values, tols, extra=None):
    reports = []
    for k in range(len(values) - 1):
        reports.append(
            InequalityReport(
                name=name,
                lhs=float(values[k]),
                rhs=float(values[k + 1]),
                tol=float(tols[k]),
                witness=f"step{k:05d}",
                params=dict(extra or {}),
            )
        )
    return reports


def suite_lsi(ctx):
    """Flow diagnostics, entropy monotonicity, and the LSI check battery."""
    cfg = ctx.config
    tol_lsi = cfg.tolerances["lsi"]
    reports = []
    artifacts = {}
    traj = ctx.trajectory

    if traj.truncated:
        reports.append(
            InequalityReport(
                name="flow/completed",
                lhs=1.0,
                rhs=0.0,
                witness=traj.truncation_reason,
                params={"steps_done": traj.steps, "steps_requested": cfg.flow["steps"]},
            )
        )

    tols = cfg.tolerances["min_r_slack"] * np.maximum(np.abs(traj.min_r[:-1]), 1.0)
    reports += _monotone_reports("flow/min_r_monotone", traj.min_r, tols)

    if cfg.manifold.get("kind") == "sphere":
        n = ctx.manifold.n
        r0 = float(cfg.manifold.get("r", 1.0))
        exact = n * (n - 1) / (r0**2 - 2.0 * (n - 1) * traj.times)
        dev = float(np.max(np.abs(traj.r_hat - exact) / exact))
        reports.append(
            InequalityReport(
                name="flow/sphere_oracle", lhs=dev, rhs=0.01, params={"metric": "max_rel_R"}
            )
        )

    t_star, sigma = cfg.flow["t_star"], cfg.flow["sigma"]
    records = fl.monotonicity_audit(traj, min(t_star, float(traj.times[-1])), sigma)
    artifacts["entropy_records"] = records
    ws = np.array([r.w for r in records])
    tols = cfg.tolerances["entropy_slack"] * (1.0 + np.abs(ws[:-1]))
    reports += _monotone_reports("entropy/w_monotone", ws, tols)
    for rec in records[:: max(1, len(records) // 8)]:
        reports.append(
            InequalityReport(
                name="entropy/w_identity",
                lhs=rec.identity_residual,
                rhs=0.0,
                tol=1e-8,
                witness=f"t={rec.t:.6g}",
            )
        )

    # mu* transport: estimator upper bounds on both sides, direction not
    # guaranteed, so reported with hypothesis_ok = False
    g0 = traj.snapshot(0)
    k_last = ctx.flow_time_indices()[-1]
    if k_last > 0:
        t_k = float(traj.times[k_last])
        g_t = traj.snapshot(k_last)
        for sig in (sigma, 4 * sigma):
            mu_t, _, _ = fl.mu_star_estimate(g_t, sig, multistarts=4, seed=cfg.seed)
            mu_0, _, _ = fl.mu_star_estimate(g0, t_k + sig, multistarts=4, seed=cfg.seed)
            reports.append(
                InequalityReport(
                    name="entropy/mu_transport",
                    lhs=mu_0 + (g0.n / 2.0) * math.log(sig / (t_k + sig)),
                    rhs=mu_t,
                    hypothesis_ok=False,
                    witness=f"t={t_k:.6g}/sigma={sig:g}",
                    params={"estimator": "upper_bound"},
                )
            )

    # fixed-metric budgets at the initial metric
    consts = ctx.constants
    family0 = fn.sample_family(g0, count=cfg.family["count"], seed=cfg.seed)
    rls1 = fn.lsi_fixed_metric(g0, "RLS1", consts.c_s)
    for label, vals in family0:
        reports.append(fn.rls1_check(g0, rls1, vals, tol=tol_lsi, witness=label))
    for variant in ("RLS2", "RLS3", "RLS4"):
        profile = fn.lsi_fixed_metric(g0, variant, consts.c_s)
        for sig in cfg.family["sigmas"]:
            if not profile.valid(sig):
                continue
            for label, vals in family0:
                reports.append(
                    fn.lsi_check(g0, profile, sig, vals, tol=tol_lsi, witness=label)
                )

    # flow-time budgets from the initial-metric constants
    for index in ctx.flow_time_indices():
        g_t, family_t = ctx.family_at(index)
        t_k = float(traj.times[index])
        for variant in ("A", "B", "C"):
            profile = fn.theorem_abc_profile(consts, variant, t_k, g_t.n)
            for sig in cfg.family["sigmas"]:
                if not profile.valid(sig):
                    continue
                for label, vals in family_t:
                    reports.append(
                        fn.lsi_check(
                            g_t, profile, sig, vals, tol=tol_lsi,
                            witness=f"t={t_k:.6g}/{label}",
                        )
                    )
        profile_c = fn.theorem_abc_profile(consts, "C", t_k, g_t.n)
        reports.append(
            fn.volume_corollary_check(
                g_t, profile_c.extras["uniform_c"], witness=f"t={t_k:.6g}"
            )
        )
    return reports, artifacts


def _nonincreasing_window(profile, cap=4.0):
    """Largest sigma* <= cap on which the budget beta is nonincreasing."""
    c1 = max(p.c1 for p in profile.pieces)
    if c1 <= 0:
        return cap
    return min(cap, profile.mu / (2.0 * c1))


def suite_semigroup(ctx):
    """Heat-bound, Davies-schedule, fractional-power, and Sobolev checks."""
    cfg = ctx.config
    reports = []
    artifacts = {}
    g0 = ctx.trajectory.snapshot(0)
    consts = ctx.constants
    op = sg.SchrodingerOperator(g0, 0.25 * g0.R.values)

    profile = fn.lsi_fixed_metric(g0, "RLS2", consts.c_s)
    sigma_star = _nonincreasing_window(profile)
    ultra_rows = []
    for t in np.geomspace(sigma_star / 4000.0, sigma_star / 4.0 * 0.99, 20):
        bound = sg.ultracontractivity_bound(op, profile, float(t), sigma_star)
        reports.append(bound.report)
        reports.append(
            InequalityReport(
                name="semigroup/duality_1to2",
                lhs=op.norm_1_to_2(float(t)),
                rhs=bound.bound_2_inf,
                tol=1e-10 * bound.bound_2_inf,
                params={"t": float(t)},
            )
        )
        reports.append(
            InequalityReport(
                name="semigroup/duality_direction",
                lhs=bound.bound_2_inf * g0.total_volume**-0.5,
                rhs=bound.bound_1_inf,
                params={"t": float(t)},
            )
        )
        ultra_rows.append(
            (float(t), bound.empirical_2_inf, bound.bound_2_inf,
             bound.bound_2_inf - bound.empirical_2_inf)
        )
    artifacts["ultracontractivity_rows"] = ultra_rows

    family = fn.sample_family(g0, count=max(12, cfg.family["count"] // 2), seed=cfg.seed)
    nonneg = [("abs_" + label, np.abs(vals) + 1e-3) for label, vals in family[:10]]
    nonneg.append(("const", np.full(g0.m, 1.0)))
    reports += sg.contraction_audit(op, 0.05, family[:8] + nonneg[:4], [1, 2, 3, np.inf])

    t_dav = min(0.1, sigma_star / 8.0)
    for label, vals in nonneg:
        mono, term = sg.davies_schedule_audit(
            op, vals, t_dav, profile, sigma_star,
            tol=cfg.tolerances["davies"], witness=label,
        )
        reports += [mono, term]

    rng = np.random.default_rng(cfg.seed + 17)
    for i in range(6):
        vals = rng.standard_normal(g0.m)
        diff = abs(
            g0.lp_norm(sg.h_power(op, vals, 0.5).values, 2) ** 2 - op.quadratic_form(vals)
        )
        scale = max(1.0, op.quadratic_form(vals))
        reports.append(
            InequalityReport(
                name="semigroup/hq_identity", lhs=diff / scale, rhs=0.0, tol=1e-8,
                witness=f"rand{i}",
            )
        )
        spec = sg.h_power(op, vals, -0.5).values
        quad = sg.h_neg_half_quadrature(op, vals).values
        rel = float(np.max(np.abs(spec - quad)) / max(np.max(np.abs(spec)), 1e-300))
        reports.append(
            InequalityReport(
                name="semigroup/half_power_quadrature", lhs=rel, rhs=0.0, tol=1e-6,
                witness=f"rand{i}",
            )
        )

    profile_c = fn.theorem_abc_profile(consts, "C", 0.0, g0.n)
    uniform_c = profile_c.extras["uniform_c"]
    d3 = sg.d3_constants(uniform_c, float(g0.n), g0.n, 4.0, min(consts.min_r_neg / 4.0, 0.0))
    a_thm_d = sg.thm_d_constant(d3, consts.lambda0)
    c7 = sg.c7_constant(uniform_c, g0.n, 1.5, min(consts.min_r_neg / 4.0, 0.0))
    artifacts["constant_package"] = {
        "mu": float(g0.n),
        "p": 2.0,
        "c1": sg.c5_constants(float(g0.n), d3.bar_c, 2.0).c1,
        "c2": sg.c5_constants(float(g0.n), d3.bar_c, 2.0).c2_p0,
        "C_final": sg.c5_constants(float(g0.n), d3.bar_c, 2.0).c_final,
        "barC": d3.bar_c,
        "A": d3.a_coeff,
        "B": d3.b_coeff,
        "A_thm_d": a_thm_d,
        "C_p32": c7,
        "uniform_c": uniform_c,
    }

    for index in ctx.flow_time_indices():
        g_t, family_t = ctx.family_at(index)
        t_k = float(ctx.trajectory.times[index])
        psi_t = 0.25 * g_t.R.values
        psi_c7_t = psi_t - consts.min_r_neg / 4.0 + 1.0
        op_t = sg.SchrodingerOperator(g_t, psi_t)
        op_c7 = sg.SchrodingerOperator(g_t, psi_c7_t)
        for label, vals in family_t:
            witness = f"t={t_k:.6g}/{label}"
            reports.append(
                sg.sobolev_check(g_t, psi_t, a_thm_d, 0.0, 2, vals, witness=witness, op=op_t)
            )
            reports.append(
                sg.sobolev_check(
                    g_t, psi_t, d3.a_coeff, d3.b_coeff, 2, vals,
                    witness=witness + "/Dstar", op=op_t,
                )
            )
            reports.append(
                sg.sobolev_check(g_t, psi_c7_t, c7, 0.0, 1.5, vals, witness=witness, op=op_c7)
            )
    return reports, artifacts


def suite_noncollapse(ctx):
    """Faber-Krahn, volume iteration, and kappa noncollapsing checks."""
    cfg = ctx.config
    reports = []
    g0 = ctx.trajectory.snapshot(0)
    consts = ctx.constants
    uniform_c = fn.theorem_abc_profile(consts, "C", 0.0, g0.n).extras["uniform_c"]
    d3 = sg.d3_constants(uniform_c, float(g0.n), g0.n, 4.0, min(consts.min_r_neg / 4.0, 0.0))
    a_thm_d = sg.thm_d_constant(d3, consts.lambda0)

    bounds, limit = nc.volume_iteration(1.0, g0.n, 1.0, g0.ball_volume, 30)
    reports.append(
        InequalityReport(
            name="noncollapse/volume_iteration",
            lhs=abs(float(bounds[-1]) - limit),
            rhs=0.0,
            tol=1e-6,
            params={"A": 1.0, "rho": 1.0, "limit": limit},
        )
    )

    kappa_rows = []
    for index in ctx.flow_time_indices():
        g_t = ctx.trajectory.snapshot(index)
        t_k = float(ctx.trajectory.times[index])
        r_max = float(np.max(g_t.R.values))
        r_hyp = 0.95 / math.sqrt(max(r_max, 1e-12))
        radii = [f * r_hyp for f in (0.25, 0.5, 1.0)] + [min(2.5 * r_hyp, 0.9 * g_t.s_max)]
        for r in radii:
            reports.append(nc.rayleigh_check(g_t, r, witness=f"t={t_k:.6g}/r={r:.4g}"))
            reports.append(
                nc.faber_krahn_audit(g_t, r, a_thm_d, witness=f"t={t_k:.6g}/r={r:.4g}")
            )
            rep = nc.kappa_check(g_t, a_thm_d, r=r, witness=f"t={t_k:.6g}/r={r:.4g}")
            reports.append(rep)
            kappa_rows.append(
                (t_k, r, rep.rhs, rep.lhs, rep.slack, rep.hypothesis_ok)
            )
    return reports, {"kappa_rows": kappa_rows}


def suite_euclidean(ctx):
    """The fixed battery on R^3 and R^4 plus the sweep and consistency audits."""
    reports = []
    for n in (3, 4):
        for test in eu.standard_battery(n):
            for variant in eu.VARIANTS:
                rep = eu.euclidean_lsi_check(variant, n, test, tol=1e-6)
                rep.params["n"] = n
                reports.append(rep)
        min_slack, _ = eu.loggrad_gaussian_sweep(n)
        reports.append(
            InequalityReport(
                name="euclidean/loggrad_sweep",
                lhs=min_slack,
                rhs=1e-4,
                params={"n": n},
            )
        )
        for beta in (0.5, 2.0):
            got, want = eu.gross_straight_consistency(n, eu.gaussian_profile(n, 0.8), beta)
            reports.append(
                InequalityReport(
                    name="euclidean/gross_straight",
                    lhs=abs(got - want),
                    rhs=0.0,
                    tol=1e-8 * max(1.0, abs(want)),
                    witness=f"n={n}/beta={beta:g}",
                )
            )
    return reports, {}


SUITE_RUNNERS = {
    "lsi": suite_lsi,
    "semigroup": suite_semigroup,
    "noncollapse": suite_noncollapse,
    "euclidean": suite_euclidean,
}
