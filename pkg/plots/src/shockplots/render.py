"""Figure builders: each figN analog reads run artifacts and writes one image.

Every renderer is a pure function of the files under input_dir; re-rendering
produces identical bytes (PNG via the Agg backend carries no timestamps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import MissingInputError, angle_label, load_cases, load_trajectories, select

__all__ = ["FigureSpec", "FIGURES", "render"]


@dataclass(frozen=True)
class FigureSpec:
    """What one figure consumes and shows."""

    figure_id: str
    description: str
    needs_trajectories: bool = False
    options: dict = field(default_factory=dict)


FIGURES = {
    "fig2": FigureSpec("fig2", "f, fdot and W_C panels per attack angle, smallest N"),
    "fig3": FigureSpec("fig3", "f, fdot and W_C panels per attack angle, largest N"),
    "fig4": FigureSpec("fig4", "overlay of f, fdot and W_C across truncation orders"),
    "fig5": FigureSpec("fig5", "residual curves and quasi-L1 norms versus N"),
    "fig6": FigureSpec("fig6", "semi-vertex-angle sweeps at fixed attack angles"),
    "fig7": FigureSpec("fig7", "attack-angle sweep of f and W_C at fixed theta0"),
    "fig8": FigureSpec("fig8", "W_C extrema against the sin^2(theta0 +- alpha0) envelope"),
    "fig9": FigureSpec("fig9", "recovered layer fields u^t, w, w_rho per attack angle"),
    "fig10": FigureSpec("fig10", "particle trajectories on the cone", needs_trajectories=True),
}


def _require(cases, what: str, command: str):
    if not cases:
        raise MissingInputError(f"no cases with {what}; produce them with\n  {command}")
    return cases


def _sweep_hint(theta0="pi/6", alpha0="pi/36,pi/24,pi/18,pi/12,pi/9", n="5,10"):
    return f"shocklayer sweep --theta0 {theta0} --alpha0 {alpha0} --N {n} --out <input-dir>"


def _dominant_theta0(cases):
    values = sorted({round(c.theta0, 12) for c in cases})
    counts = {t: sum(1 for c in cases if round(c.theta0, 12) == t) for t in values}
    return max(counts, key=counts.get)


def _panel_cases(cases, N):
    theta0 = _dominant_theta0(cases)
    chosen = select(cases, theta0=theta0, N=N)
    by_alpha = {}
    for c in chosen:
        by_alpha.setdefault(round(c.alpha0, 12), c)
    return [by_alpha[a] for a in sorted(by_alpha)]


def _masked(fields, name):
    vals = np.array(fields[name], dtype=float)
    vals[fields["valid"] < 0.5] = np.nan
    return vals


def _fig_panels_per_alpha(cases, N, output_path):
    panel = _require(
        _panel_cases(cases, N), f"N={N}", _sweep_hint(n=str(N))
    )
    rows = len(panel)
    fig, axes = plt.subplots(rows, 2, figsize=(9.0, 2.6 * rows), squeeze=False)
    for ax_pair, case in zip(axes, panel):
        f = case.fields()
        ax_pair[0].plot(f["phi"], f["f"], lw=1.2, label="f")
        ax_pair[0].plot(f["phi"], f["fdot"], lw=1.2, ls="--", label="df/dphi")
        ax_pair[0].set_ylabel(f"alpha0 = {angle_label(case.alpha0)}")
        ax_pair[0].legend(fontsize=7, loc="upper right")
        ax_pair[1].plot(f["phi"], f["Wc"], lw=1.2, color="tab:red")
        ax_pair[1].axhline(0.0, color="gray", lw=0.6)
        ax_pair[1].set_ylabel("W_C")
        for ax in ax_pair:
            ax.set_xlim(-math.pi, math.pi)
    for ax in axes[-1]:
        ax.set_xlabel("phi")
    fig.suptitle(
        f"layer energy and surface pressure, theta0 = {angle_label(panel[0].theta0)}, N = {N}"
    )
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig2(cases, output_path):
    n_min = min(c.N for c in cases)
    _fig_panels_per_alpha(cases, n_min, output_path)


def fig3(cases, output_path):
    n_max = max(c.N for c in cases)
    _fig_panels_per_alpha(cases, n_max, output_path)


def fig4(cases, output_path):
    theta0 = _dominant_theta0(cases)
    alphas = sorted({round(c.alpha0, 12) for c in select(cases, theta0=theta0) if c.alpha0 > 0})
    _require(alphas, "alpha0 > 0", _sweep_hint())
    chosen = select(cases, theta0=theta0, alpha0=alphas[0])
    _require(len(chosen) > 1 and chosen or [], "several N at one alpha0", _sweep_hint(n="5,6,7,8,9,10"))
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 3.6))
    for case in sorted(chosen, key=lambda c: c.N):
        f = case.fields()
        axes[0].plot(f["phi"], f["f"], lw=1.0, label=f"f, N={case.N}")
        axes[0].plot(f["phi"], f["fdot"], lw=1.0, ls="--", label=f"df/dphi, N={case.N}")
        axes[1].plot(f["phi"], f["Wc"], lw=1.0, label=f"N={case.N}")
    axes[0].set_xlabel("phi")
    axes[0].set_title("f and df/dphi for different N")
    axes[0].legend(fontsize=6)
    axes[1].set_xlabel("phi")
    axes[1].set_title("W_C for different N")
    axes[1].legend(fontsize=6)
    fig.suptitle(
        f"truncation coincidence at theta0 = {angle_label(theta0)}, "
        f"alpha0 = {angle_label(alphas[0])}"
    )
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig5(cases, output_path):
    theta0 = _dominant_theta0(cases)
    alphas = sorted({round(c.alpha0, 12) for c in select(cases, theta0=theta0) if c.alpha0 > 0})
    _require(alphas, "alpha0 > 0", _sweep_hint())
    chosen = sorted(select(cases, theta0=theta0, alpha0=alphas[0]), key=lambda c: c.N)
    _require(chosen, "residual data", _sweep_hint(n="5,6,7,8,9,10"))
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.4))
    first = chosen[0]
    r = first.residual()
    axes[0].plot(r["phi"], r["e_n"], lw=0.9)
    axes[0].set_title(f"E_N for N={first.N}")
    for case in chosen[1:]:
        r = case.residual()
        axes[1].plot(r["phi"], r["e_n"], lw=0.9, label=f"N={case.N}")
    axes[1].set_title(f"E_N for N={', '.join(str(c.N) for c in chosen[1:])}")
    if len(chosen) > 1:
        axes[1].legend(fontsize=6)
    ns = [c.N for c in chosen]
    axes[2].bar([str(n) for n in ns], [c.quasi_l1 for c in chosen], color="tab:blue")
    axes[2].set_yscale("log")
    axes[2].set_title("quasi-L1 norm of E_N")
    axes[2].set_xlabel("N")
    for ax in axes[:2]:
        ax.set_xlabel("phi")
        ax.set_xlim(-math.pi, math.pi)
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig6(cases, output_path):
    n_max = max(c.N for c in cases)
    alphas = sorted({round(c.alpha0, 12) for c in cases if c.alpha0 > 0})[:2]
    _require(alphas, "alpha0 > 0", _sweep_hint(theta0="pi/9,pi/6,pi/4", alpha0="pi/36,pi/18"))
    fig, axes = plt.subplots(len(alphas), 2, figsize=(10.0, 3.2 * len(alphas)), squeeze=False)
    for row, alpha0 in zip(axes, alphas):
        sub = sorted(select(cases, alpha0=alpha0, N=n_max), key=lambda c: c.theta0)
        _require(
            len(sub) > 1 and sub or [],
            "several theta0 at one alpha0",
            _sweep_hint(theta0="pi/9,pi/6,pi/4", alpha0="pi/36,pi/18"),
        )
        for case in sub:
            f = case.fields()
            row[0].plot(f["phi"], f["f"], lw=1.0, label=f"theta0={angle_label(case.theta0)}")
            row[1].plot(f["phi"], f["Wc"], lw=1.0, label=f"theta0={angle_label(case.theta0)}")
        row[0].set_ylabel(f"alpha0 = {angle_label(alpha0)}")
        row[0].set_title("f")
        row[1].set_title("W_C")
        for ax in row:
            ax.set_xlim(-math.pi, math.pi)
            ax.legend(fontsize=6)
    for ax in axes[-1]:
        ax.set_xlabel("phi")
    fig.suptitle("semi-vertex-angle sweeps at fixed attack angle")
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig7(cases, output_path):
    theta0 = _dominant_theta0(cases)
    n_max = max(c.N for c in select(cases, theta0=theta0))
    sub = _panel_cases(cases, n_max)
    _require(len(sub) > 1 and sub or [], "several alpha0", _sweep_hint())
    fig, axes = plt.subplots(1, 2, figsize=(10.0, 3.6))
    for case in sub:
        f = case.fields()
        axes[0].plot(f["phi"], f["f"], lw=1.0, label=f"alpha0={angle_label(case.alpha0)}")
        axes[1].plot(f["phi"], f["Wc"], lw=1.0, label=f"alpha0={angle_label(case.alpha0)}")
    axes[0].set_title("f")
    axes[1].set_title("W_C")
    for ax in axes:
        ax.set_xlabel("phi")
        ax.set_xlim(-math.pi, math.pi)
        ax.legend(fontsize=6)
    fig.suptitle(f"attack-angle sweep at theta0 = {angle_label(theta0)}")
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig8(cases, output_path):
    theta0 = _dominant_theta0(cases)
    n_max = max(c.N for c in select(cases, theta0=theta0))
    sub = _panel_cases(cases, n_max)
    sub = [c for c in sub if c.alpha0 >= 0.0]
    _require(len(sub) > 1 and sub or [], "several alpha0", _sweep_hint())
    alphas = np.array([c.alpha0 for c in sub])
    wc_max = np.array([c.summary["metrics"]["wc_max"] for c in sub])
    wc_min = np.array([c.summary["metrics"]["wc_min"] for c in sub])
    dense = np.linspace(0.0, alphas.max() * 1.05, 256)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(dense, np.sin(theta0 + dense) ** 2, color="tab:blue", lw=1.2,
            label="sin^2(theta0 + alpha0)")
    ax.plot(dense, np.sin(theta0 - dense) ** 2, color="tab:red", lw=1.2,
            label="sin^2(theta0 - alpha0)")
    ax.plot(alphas, wc_max, "o", color="tab:blue", ms=6, mfc="none", label="max W_C")
    ax.plot(alphas, wc_min, "s", color="tab:red", ms=6, mfc="none", label="min W_C")
    ax.set_xlabel("alpha0")
    ax.set_ylabel("W_C extrema")
    ax.set_title(f"pressure extrema on the envelope, theta0 = {angle_label(theta0)}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig9(cases, output_path):
    theta0 = _dominant_theta0(cases)
    n_max = max(c.N for c in select(cases, theta0=theta0))
    sub = [c for c in _panel_cases(cases, n_max) if c.alpha0 > 0]
    _require(sub, "alpha0 > 0 with recovered fields", _sweep_hint())
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.4))
    for case in sub:
        f = case.fields()
        label = f"alpha0={angle_label(case.alpha0)}"
        axes[0].plot(f["phi"], _masked(f, "ut"), lw=1.0, label=label)
        axes[1].plot(f["phi"], _masked(f, "w"), lw=1.0, label=label)
        axes[2].plot(f["phi"], _masked(f, "w_rho"), lw=1.0, label=label)
    for ax, title in zip(axes, ("u^t", "w", "w_rho")):
        ax.set_title(title)
        ax.set_xlabel("phi")
        ax.set_xlim(-math.pi, math.pi)
        ax.legend(fontsize=6)
    fig.suptitle(
        f"layer fields at theta0 = {angle_label(theta0)} "
        "(blank near phi = 0, +-pi where y -> 0)"
    )
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def fig10(cases, output_path, input_dir=None):
    trajectories = load_trajectories(input_dir)
    theta0 = _dominant_theta0(cases) if cases else math.pi / 6
    r_max = max(t["r"].max() for t in trajectories)
    fig = plt.figure(figsize=(10.0, 8.0))
    ax3d = fig.add_subplot(2, 2, 1, projection="3d")
    # cone wireframe up to the largest radius reached
    phi_c = np.linspace(-math.pi, math.pi, 73)
    r_c = np.linspace(0.0, r_max, 12)
    P, R = np.meshgrid(phi_c, r_c)
    ax3d.plot_wireframe(
        R * math.cos(theta0),
        R * math.sin(theta0) * np.cos(P),
        R * math.sin(theta0) * np.sin(P),
        color="lightgray",
        lw=0.3,
    )
    views = [
        (fig.add_subplot(2, 2, 2), "x1", "x2", "view along x3"),
        (fig.add_subplot(2, 2, 3), "x1", "x3", "view along x2"),
        (fig.add_subplot(2, 2, 4), "x2", "x3", "view along x1"),
    ]
    colors = ("tab:blue", "tab:red", "tab:orange", "tab:green")
    for k, t in enumerate(trajectories):
        color = colors[k % len(colors)]
        label = f"phi0 = {t['phi'][0]:.3f}"
        ax3d.plot(t["x1"], t["x2"], t["x3"], color=color, lw=1.4, label=label)
        for ax, xc, yc, _ in views:
            ax.plot(t[xc], t[yc], color=color, lw=1.2, label=label)
    ax3d.set_title("trajectories on the cone")
    ax3d.legend(fontsize=6)
    for ax, xc, yc, title in views:
        ax.set_xlabel(xc)
        ax.set_ylabel(yc)
        ax.set_title(title)
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(output_path)
    plt.close(fig)


def render(figure_id: str, input_dir, output_path) -> Path:
    """Render one figure analog from run artifacts; returns the output path."""
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure id {figure_id!r}; choose from {sorted(FIGURES)}")
    input_dir = Path(input_dir)
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    if figure_id == "fig10":
        try:
            cases = load_cases(input_dir)
        except MissingInputError:
            cases = []
        fig10(cases, output_path, input_dir=input_dir)
        return output_path
    cases = load_cases(input_dir)
    {
        "fig2": fig2,
        "fig3": fig3,
        "fig4": fig4,
        "fig5": fig5,
        "fig6": fig6,
        "fig7": fig7,
        "fig8": fig8,
        "fig9": fig9,
    }[figure_id](cases, output_path)
    return output_path
