"""Static SVG figure emission for run artifacts."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "rilab"

_SAVE_OPTS = {"format": "svg", "metadata": {"Date": None}, "bbox_inches": "tight"}


def entropy_figure(records, path):
    """W and W* against flow time."""
    ts = [rec.t for rec in records]
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(ts, [rec.w for rec in records], label="W", color="tab:blue")
    ax.plot(ts, [rec.wstar for rec in records], label="W*", color="tab:orange", ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("entropy")
    ax.legend(frameon=False)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def ultracontractivity_figure(rows, path):
    """Empirical 2->inf norm against its bound on a log-log grid."""
    ts = [row[0] for row in rows]
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.loglog(ts, [row[1] for row in rows], "o-", ms=3, label="empirical")
    ax.loglog(ts, [row[2] for row in rows], "s--", ms=3, label="bound")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|e^{-tH}\|_{2\to\infty}$")
    ax.legend(frameon=False)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def kappa_figure(rows, path):
    """Noncollapsing slack against ball radius, split by hypothesis status."""
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ok = [(r, s) for _, r, _, _, s, hyp in rows if hyp]
    failed = [(r, s) for _, r, _, _, s, hyp in rows if not hyp]
    if ok:
        ax.semilogy(*zip(*ok), "o", ms=4, label="hypothesis ok")
    if failed:
        ax.semilogy(*zip(*failed), "x", ms=4, label="hypothesis failed")
    ax.set_xlabel("r")
    ax.set_ylabel("vol(B(r)) - bound")
    ax.legend(frameon=False)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path
