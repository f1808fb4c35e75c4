"""Figure rendering for experiment tables.

The CSV is the contract; figures are a convenience layer behind the CLI
``--plot`` flag and this module, one PNG per table.
"""

from __future__ import annotations

import json

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

plt.rcParams.update(
    {
        "figure.figsize": (6.4, 4.0),
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "lines.linewidth": 1.2,
    }
)


def _column(table, name: str) -> np.ndarray:
    idx = table.columns.index(name)
    return np.array([row[idx] for row in table.rows], dtype=float)


def _plot_fig5(table, ax):
    gt = _column(table, "gt")
    thetas = json.loads(table.metadata.get("thetas", "[]")) if isinstance(
        table.metadata.get("thetas"), str
    ) else table.metadata.get("thetas", [])
    n_curves = sum(1 for c in table.columns if c.startswith("y_theta_"))
    for i in range(1, n_curves + 1):
        label = f"theta = {thetas[i - 1]:.4f}" if i <= len(thetas) else f"curve {i}"
        ax.plot(gt, _column(table, f"y_theta_{i}"), label=label)
    ax.set_xlabel("g t")
    ax.set_ylabel("overlap exponent y")
    ax.legend()


def _plot_cat(table, ax):
    t = _column(table, "t")
    ax.plot(t, _column(table, "fidelity"), label="fidelity")
    ax.plot(t, _column(table, "pop_e"), label="pop e")
    ax.plot(t, _column(table, "y") / max(_column(table, "y").max(), 1e-12), label="y (scaled)")
    ax.set_xlabel("t")
    ax.set_ylabel("fidelity / population")
    ax.legend()


def _plot_coherent(table, ax):
    t = _column(table, "t")
    ax.plot(t, _column(table, "N_analytic"), label="N analytic")
    ax.plot(t, _column(table, "N_exact"), "--", label="N exact")
    ax.plot(t, _column(table, "r_derivative"), label="rate |dN/dt|")
    ax.plot(t, _column(table, "r_paper"), ":", label="rate, simple prefactor")
    ax.set_xlabel("t")
    ax.set_ylabel("photon number / rate")
    ax.legend()


def _plot_selection_rules(table, ax):
    f = _column(table, "f")
    for name in ("|t_bc|", "|t_ce|", "|t_eb|", "|product|"):
        ax.semilogy(f, np.maximum(_column(table, name), 1e-18), label=name)
    ax.set_xlabel("reduced flux f")
    ax.set_ylabel("flux-drive matrix elements (E_J)")
    ax.legend()


def _plot_spectrum(table, ax):
    f = _column(table, "f")
    for name in ("E_b", "E_c", "E_e"):
        ax.plot(f, _column(table, name), label=name)
    ax.set_xlabel("reduced flux f")
    ax.set_ylabel("energy (E_J)")
    ax.legend()


def _plot_fnt_check(table, ax):
    ax.semilogy(_column(table, "instance"), _column(table, "residual"), ".", label="residual")
    ax.semilogy(
        _column(table, "instance"), _column(table, "energy_error"), ".", label="energy error"
    )
    ax.set_xlabel("instance")
    ax.set_ylabel("error")
    ax.legend()


_PLOTTERS = {
    "fig5": _plot_fig5,
    "cat": _plot_cat,
    "coherent": _plot_coherent,
    "selection-rules": _plot_selection_rules,
    "spectrum": _plot_spectrum,
    "fnt-check": _plot_fnt_check,
}


def render(table, path: str) -> None:
    """Render the table's figure to ``path`` (format from the extension)."""
    fig, ax = plt.subplots()
    _PLOTTERS[table.metadata["experiment"]](table, ax)
    ax.set_title(table.metadata["experiment"])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
