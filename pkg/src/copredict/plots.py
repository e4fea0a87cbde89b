"""Figure rendering for run reports.

Figures land next to the trace CSV and JSON report: the cumulative cost
trajectory against the 3/2 reference rate, the per-phase ledger scatter, and
the cost-vs-benchmark bars. All rendering uses the Agg backend.
"""

from __future__ import annotations

import math
from pathlib import Path


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_run_figures(result, rows, out_dir, stem: str) -> list[Path]:
    """Render up to three PNGs from a RunResult and its trace CSV rows."""
    plt = _plt()
    out_dir = Path(out_dir)
    written: list[Path] = []

    durations = [r[2] for r in rows]
    cum_cost = [r[3] for r in rows]
    if durations:
        times = []
        t = 0.0
        for d in durations:
            t += d
            times.append(t)
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        ax.step([0.0] + times, [0.0] + cum_cost, where="post", label="internal cost")
        t_end = times[-1]
        ax.plot([0.0, t_end], [0.0, 1.5 * t_end], "--", color="gray",
                label="rate 3/2 reference")
        ax.set_xlabel("phase time")
        ax.set_ylabel("cumulative internal cost")
        ax.legend(loc="upper left", fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{stem}_cost_rate.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    potentials = [r[4] for r in rows]
    if potentials and all(p != "" for p in potentials) and result.ledger is not None:
        drops = []
        incs = []
        prev = result.ledger.phi_initial
        for r in rows:
            drops.append(3.0 * (prev - r[4]))
            prev = r[4]
        cum = 0.0
        for r in rows:
            incs.append(r[3] - cum)
            cum = r[3]
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        ax.scatter(drops, incs, s=14)
        lim = max([1e-12] + drops + incs)
        ax.plot([0, lim], [0, lim], "--", color="gray", label="cost = 3 x drop")
        ax.set_xlabel("3 x potential drop")
        ax.set_ylabel("phase cost increment")
        ax.legend(loc="upper left", fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{stem}_ledger.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    labels = ["output"]
    values = [result.output_cost]
    if result.static_cost is not None:
        labels.append("static")
        values.append(result.static_cost)
    if result.certificate is not None:
        labels.append("dynamic")
        values.append(result.certificate.cost)
        labels.append("6 ln(k+1) dyn")
        values.append(6.0 * math.log(result.k + 1.0) * result.certificate.cost)
    elif result.dynamic_upper_bound is not None:
        labels.append("dyn upper bd")
        values.append(result.dynamic_upper_bound)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.bar(labels, values, color=["#4878d0", "#ee854a", "#6acc64", "#d65f5f"][:len(labels)])
    ax.set_ylabel("cost")
    ax.tick_params(axis="x", labelsize=8)
    fig.tight_layout()
    path = out_dir / f"{stem}_benchmark.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    return written
