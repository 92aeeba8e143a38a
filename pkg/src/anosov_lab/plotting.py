"""Static SVG figures for the ``report`` command."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "anosov-lab"
_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def plot_t2bar(times, t2bar, lam, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(times, t2bar, "o", label=r"$\bar t_2(t)$")
    tt = np.linspace(min(times), max(times), 50)
    ax.plot(tt, lam * tt, "-", label=rf"$\lambda t$, $\lambda$={lam:.6g}")
    ax.axhline(0, color="0.8", lw=0.5)
    ax.axvline(0, color="0.8", lw=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel("flow time")
    ax.legend()
    _save(fig, path)


def plot_tau_curve(T, gap, rate, path):
    """Remaining distance ``|tau(x,T) - tau(x,T*)|`` on a log scale."""
    T = np.asarray(T)
    gap = np.asarray(gap)
    fig, ax = plt.subplots(figsize=(5, 4))
    mask = gap > 0
    ax.semilogy(T[mask], gap[mask], "o", label=r"$|\tau(x,T)-\tau(x,T^*)|$")
    if mask.any():
        T0 = T[mask][0]
        ax.semilogy(T[mask], gap[mask][0] * np.exp(-rate * (T[mask] - T0)), "-",
                    label=rf"$e^{{-{rate:.4g} T}}$")
    ax.set_xlabel("T")
    ax.legend()
    _save(fig, path)


def plot_surfaces(clouds, path):
    """Scatter projections of sampled surfaces; ``clouds`` maps tag -> (n, k) array."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for tag, pts in sorted(clouds.items()):
        pts = np.asarray(pts)
        axes[0].plot(pts[:, 0], pts[:, 1], ".", ms=3, label=tag)
        axes[1].plot(pts[:, 1], pts[:, -1], ".", ms=3, label=tag)
    axes[0].set_xlabel("x0")
    axes[0].set_ylabel("x1")
    axes[1].set_xlabel("x1")
    axes[1].set_ylabel("x-last")
    axes[0].legend()
    _save(fig, path)
