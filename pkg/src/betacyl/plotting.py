"""PNG figures for traces, zero-run tables and constructions (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .expansion import ZeroRunTable  # noqa: E402
from .irregular import ConstructionSchedule, DensityTrace  # noqa: E402


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_trace(trace: DensityTrace, path: str | Path, sched: ConstructionSchedule | None = None,
               lambda_hat: float | None = None) -> Path:
    """d_n against n with the bracket ceiling (n + Gamma_n + 1)/n."""
    ns = [r.n for r in trace.records]
    ds = [float(r.d.mid) for r in trace.records]
    ceiling = [(r.n + r.gamma + 1) / r.n for r in trace.records]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(ns, ceiling, color="0.7", lw=1, label="(n + Gamma_n + 1)/n")
    ax.plot(ns, ds, lw=1, label="d_n")
    full = [(r.n, 1.0) for r in trace.records if r.full]
    if full and len(full) <= 200:
        ax.scatter(*zip(*full), s=8, color="k", zorder=3, label="full")
    if sched is not None:
        spikes = [(n, float(trace.at(n).d.mid)) for n in sched.n if n <= trace.N]
        if spikes:
            ax.scatter(*zip(*spikes), s=30, marker="^", color="tab:red", zorder=4, label="n_k")
    if lambda_hat is not None:
        ax.axhline(1 + lambda_hat, ls="--", color="tab:green", lw=1, label="1 + lambda_hat")
    if trace.N > 200:
        ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("-log_beta |I_n| / n")
    ax.set_title(f"{trace.beta}: {trace.source}", fontsize=9)
    ax.legend(fontsize=8)
    return _save(fig, path)


def plot_zero_runs(table: ZeroRunTable, path: str | Path, beta: str = "") -> Path:
    ns = [n for n, _, _ in table.records]
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 5.5), sharex=True)
    top.step(ns, [t for _, t, _ in table.records], where="mid", lw=1, label="t_n")
    top.step(ns, [g for _, _, g in table.records], where="post", lw=1, label="Gamma_n")
    top.legend(fontsize=8)
    bottom.plot(ns, [float(r) for r in table.gamma_ratio], lw=1)
    bottom.axhline(float(table.lambda_hat), ls="--", color="tab:green", lw=1,
                   label=f"lambda_hat = {float(table.lambda_hat):.4g}")
    bottom.set_xlabel("n")
    bottom.set_ylabel("Gamma_n / n")
    bottom.legend(fontsize=8)
    top.set_title(beta, fontsize=9)
    return _save(fig, path)
