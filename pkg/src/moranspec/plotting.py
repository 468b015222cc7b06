"""Figure rendering for the CLI report paths (Agg backend, file output only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_transform_grid(rows, path: str, title: str = "level transform"):
    """rows: (xi, re, im, abs, bound) tuples from the transform-grid command."""
    xs = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(xs, [r[3] for r in rows], lw=1.0, label="|transform|")
    ax.plot(xs, [r[4] for r in rows], lw=0.8, ls="--", label="mask product bound")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("magnitude")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_dimension_quotients(rows, path: str, title: str = "dimension quotients"):
    """rows: (k, hausdorff_q, packing_q)."""
    ks = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(ks, [r[2] for r in rows], lw=1.0, label="packing quotient")
    ax.plot(ks, [r[1] for r in rows], lw=1.0, label="hausdorff quotient")
    ax.set_xscale("log")
    ax.set_xlabel("k")
    ax.set_ylabel("log-ratio quotient")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_tail_bound(rows, epsilon: float, bound: float, path: str, title: str):
    """rows: (xi, direct |tail transform|) plus the certified horizontal levels."""
    xs = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(xs, [r[1] for r in rows], lw=1.0, label="|tail transform| (direct)")
    ax.axhline(bound, color="tab:orange", ls="--", lw=0.9, label="product bound")
    ax.axhline(epsilon, color="tab:red", ls=":", lw=0.9, label="epsilon")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel("magnitude")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
