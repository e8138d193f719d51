"""Figure rendering for experiment outputs (PNG files next to the CSVs)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .grid import GridSpec

_COLORS = {
    "sqhd": "tab:blue",
    "qhd": "tab:green",
    "adaptive-sqhd": "tab:purple",
    "sgdm": "tab:orange",
}

_LOSS_FLOOR = 1e-12


def _color(run_id, algorithm):
    return _COLORS.get(algorithm, "tab:gray")


def render_benchmark_figures(exp, out_dir, results):
    """Expected-loss and success curves plus final-distribution maps."""
    fig_dir = out_dir / "figures"
    fig_dir.mkdir(exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    for spec, res in results:
        loss = np.maximum(res.expected_loss, _LOSS_FLOOR)
        ax.semilogy(res.times, loss, label=spec.run_id,
                    color=_color(spec.run_id, spec.algorithm),
                    alpha=0.9 if spec.algorithm != "sgdm" else 0.7)
        if res.stderr_loss is not None:
            ax.fill_between(res.times,
                            np.maximum(loss - res.stderr_loss, _LOSS_FLOOR),
                            loss + res.stderr_loss,
                            color=_color(spec.run_id, spec.algorithm), alpha=0.15)
    ax.set_xlabel("time")
    ax.set_ylabel("expected loss")
    ax.set_title(f"{exp.name}: {exp.objective.name}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = fig_dir / "expected_loss.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(str(path.relative_to(out_dir)))

    fig, ax = plt.subplots(figsize=(6, 4))
    for spec, res in results:
        ax.plot(res.times, res.success_prob, label=spec.run_id,
                color=_color(spec.run_id, spec.algorithm))
        if res.stderr_succ is not None:
            ax.fill_between(res.times,
                            res.success_prob - res.stderr_succ,
                            res.success_prob + res.stderr_succ,
                            color=_color(spec.run_id, spec.algorithm), alpha=0.15)
    ax.set_xlabel("time")
    ax.set_ylabel(f"success probability (delta = {exp.delta:g})")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"{exp.name}: {exp.objective.name}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = fig_dir / "success_prob.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(str(path.relative_to(out_dir)))

    for spec, res in results:
        if spec.algorithm == "sgdm":
            continue
        written.append(_render_distribution(exp, fig_dir, out_dir, spec, res))
    return written


def _render_distribution(exp, fig_dir, out_dir, spec, res):
    grid = GridSpec(exp.objective.d, spec.n_r)
    fig, ax = plt.subplots(figsize=(5, 4))
    if grid.d == 2:
        img = res.final_distribution.reshape(grid.shape)
        im = ax.imshow(img.T, origin="lower", extent=(-1, 1, -1, 1), cmap="viridis")
        fig.colorbar(im, ax=ax, label="probability")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    else:
        x = grid.axis_coords()
        dist = res.final_distribution
        if grid.d > 1:
            dist = res.final_distribution.reshape(grid.shape).sum(
                axis=tuple(range(1, grid.d))
            )
        ax.bar(x, dist, width=grid.s * 0.9)
        ax.set_xlabel("x1")
        ax.set_ylabel("probability")
    ax.set_title(f"{spec.run_id}: final distribution")
    fig.tight_layout()
    path = fig_dir / f"{spec.run_id}_distribution.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path.relative_to(out_dir))


def render_weak_approx_figure(out_dir, report):
    fig_dir = out_dir / "figures"
    fig_dir.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, style in (("eta", "-"), ("eta_half", "--")):
        per = report["per_checkpoint"][label]
        ax.plot(per["times"], per["distances"], style,
                label=f"{label} = {report[label]:g}")
    ax.set_xlabel("time")
    ax.set_ylabel("trace distance")
    ax.set_title(f"continuous vs discrete channel "
                 f"(order {report['empirical_order']:.2f})")
    ax.legend()
    fig.tight_layout()
    path = fig_dir / "trace_distance.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path.relative_to(out_dir))
