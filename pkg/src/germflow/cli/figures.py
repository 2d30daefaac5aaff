"""Matplotlib figures written next to the CSV tables.

Uses the object-oriented API with the Agg canvas so rendering never touches
global pyplot state.
"""

import os

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

RC = {"figsize": (6.0, 4.0), "dpi": 120}


def _new():
    fig = Figure(figsize=RC["figsize"], dpi=RC["dpi"])
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(111)


def _save(fig, outdir, stem):
    path = os.path.join(outdir, stem + ".png")
    fig.tight_layout()
    fig.savefig(path)
    return path


def _positive(v):
    v = np.asarray(v, float)
    return np.where(v > 0, v, np.nan)


def _germ_delta(data, outdir, base, g):
    fig, ax = _new()
    rows = data["rows"]
    ax.semilogy([r[0] for r in rows], _positive([r[2] for r in rows]), "o-")
    ax.set_xlabel("L")
    ax.set_ylabel("p(q(x), q(y))")
    ax.set_title("germ overlap along the schedule")
    return [_save(fig, outdir, base)]


def _germ_equiv(data, outdir, base, g):
    fig, ax = _new()
    for k, rows in enumerate(data["reports"]):
        ax.plot([r[0] for r in rows], [1.0 - r[2] for r in rows], "o-", label=f"point {k}")
    ax.set_xlabel("L")
    ax.set_ylabel("1 - overlap")
    ax.set_yscale("symlog", linthresh=1e-12)
    if len(data["reports"]) <= 8:
        ax.legend(fontsize=8)
    return [_save(fig, outdir, base)]


def _loglog(rows, label, ax):
    ax.loglog([r[1] for r in rows], _positive([r[2] for r in rows]), "o-", label=label)


def _residuals(data, outdir, base, g):
    fig, ax = _new()
    _loglog(data["rows"], "residual", ax)
    ax.set_xlabel("hbar")
    ax.set_ylabel("operator-norm residual")
    return [_save(fig, outdir, base)]


def _funnel(data, outdir, base, g):
    fig, ax = _new()
    rows = data["rows"]
    ax.plot([r[0] for r in rows], [r[2] for r in rows], "o-", label="pullback")
    ax.axhline(rows[0][3], color="k", lw=0.8, ls="--", label="limit")
    ax.set_xlabel("L")
    ax.set_ylabel("A_hbar(q_hbar(x))")
    ax.legend()
    paths = [_save(fig, outdir, base)]
    if "bracket" in data:
        fig, ax = _new()
        _loglog(data["bracket"], "bracket residual", ax)
        ax.set_xlabel("hbar")
        ax.set_ylabel("sup residual")
        paths.append(_save(fig, outdir, base + "_bracket"))
    return paths


def _meanfield(data, outdir, base, g):
    trajs = data["trajectories"]
    fig, ax = _new()
    for tr in trajs:
        ax.plot(tr.times, tr.fidelity, label=f"L={tr.L}")
    ax.set_xlabel("t")
    ax.set_ylabel("fidelity")
    ax.legend(fontsize=8)
    paths = [_save(fig, outdir, base)]

    fig, ax = _new()
    ref = trajs[0]
    for a in range(ref.classical_expectations.shape[1]):
        line, = ax.plot(ref.times, ref.classical_expectations[:, a], "k-", lw=0.8)
        for tr in trajs:
            ax.plot(tr.times, tr.quantum_expectations[:, a], ls=":", lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("<X_a> (dotted) vs x_a (solid)")
    paths.append(_save(fig, outdir, base + "_expectations"))
    return paths


def _ground_state(data, outdir, base, g):
    fig, ax = _new()
    rows = data["rows"]
    ax.loglog([r[0] for r in rows], _positive([r[-2] for r in rows]), "o-")
    ax.set_xlabel("L")
    ax.set_ylabel("distance to classical minimizer")
    return [_save(fig, outdir, base)]


_RENDER = {
    "germ_delta": _germ_delta,
    "germ_equiv": _germ_equiv,
    "residuals": _residuals,
    "funnel": _funnel,
    "meanfield": _meanfield,
    "ground_state": _ground_state,
}


def render(study, outdir, base, data, g):
    return _RENDER[study](data, outdir, base, g)
