"""Matplotlib renderings of the report tables.

matplotlib is imported lazily so the numerical modules never need it.
"""
from __future__ import annotations

from collections import defaultdict


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _by_scale(rows):
    groups = defaultdict(lambda: ([], []))
    for row in rows:
        xs, vs = groups[row.scale]
        xs.append(row.x)
        vs.append(row.value)
    return groups


def _save(fig, path):
    # Fixed metadata keeps repeated renders byte-identical.
    fig.savefig(path, dpi=120, metadata={"Software": None})
    fig.clf()


def plot_weights(kernel, stationary, path, r: float, x0: float = 0.0, xlim=(-6.0, 0.0)) -> None:
    """Weighting curves ``p_t(x0, y)`` at several scales, with the exponential
    limit dashed when it exists."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    cmap = plt.get_cmap("viridis")
    groups = _by_scale(kernel)
    for i, (t, (ys, vs)) in enumerate(sorted(groups.items())):
        ax.plot(ys, vs, color=cmap(i / max(1, len(groups) - 1)), lw=1.4, label=f"t = {t:g}")
    if stationary:
        ys = [row.x for row in stationary]
        vs = [row.value for row in stationary]
        ax.plot(ys, vs, "k--", lw=1.0, label=r"$2re^{2ry}$")
    ax.set_xlim(*xlim)
    top = max((row.value for row in kernel if xlim[0] <= row.x <= xlim[1]), default=1.0)
    ax.set_ylim(0.0, min(top, 3.0) * 1.05)
    ax.set_xlabel("y (past time)")
    ax.set_ylabel(f"weight  p_t({x0:g}, y)")
    ax.set_title(f"r = {r:g}")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_smoothed(rows, series, path, r: float) -> None:
    """Raw income as steps and the smoothed profile at each scale."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.step(series.times, series.incomes, where="post", color="0.6", lw=0.8, label="income")
    cmap = plt.get_cmap("plasma")
    groups = _by_scale(rows)
    for i, (t, (xs, vs)) in enumerate(sorted(groups.items())):
        ax.plot(xs, vs, color=cmap(0.85 * i / max(1, len(groups) - 1)), lw=1.4, label=f"t = {t:g}")
    ax.set_xlabel("x (time, present at 0)")
    ax.set_ylabel("smoothed income u(t, x)")
    ax.set_title(f"r = {r:g}")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_comparison(rows, path, r: float) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ts = [row.scale for row in rows]
    ax.semilogx(ts, [row.kernel for row in rows], "o-", label="reflected-drift kernel")
    ax.axhline(rows[0].exponential, color="k", ls="--", label="exponential")
    ax.axhline(rows[0].flat_window, color="0.5", ls=":", label=f"flat window {1 / (2 * r):g}")
    ax.set_xlabel("scale t")
    ax.set_ylabel("present-time average g(0)")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
