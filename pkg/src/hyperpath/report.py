"""Figures for sweeps and transition curves.

Every figure is written as SVG next to a whitespace-separated ``.dat`` file
with the plotted columns, so gnuplot or a spreadsheet can redraw it.
"""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no date stamp, so reruns give the same bytes
matplotlib.rcParams["svg.hashsalt"] = "hyperpath"
_SVG_META = {"Date": None}


def _save(fig, path: Path):
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def write_dat(path, columns: dict[str, list]):
    names = list(columns)
    rows = zip(*(columns[n] for n in names))
    lines = ["# " + " ".join(names)]
    for row in rows:
        lines.append(" ".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def plot_sweep(cells: list[dict], out_dir) -> list[Path]:
    """P(ℓ=d) and P(ℓ>=d-2) against d, one line per alpha, with ±2 SE bands
    and the ζ² / ζ²+2ζ(1-ζ) reference levels."""
    out = Path(out_dir)
    by_alpha = defaultdict(list)
    for c in cells:
        if c.get("n"):
            by_alpha[c["alpha"]].append(c)
    if not by_alpha:
        return []
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    cols = {"alpha": [], "d": [], "P_full": [], "se_full": [], "P_ge_d_minus_2": [], "se_ge_d_minus_2": []}
    for alpha, group in sorted(by_alpha.items()):
        group.sort(key=lambda c: c["d"])
        ds = [c["d"] for c in group]
        for ax, key, se, pred in (
            (axes[0], "P_full", "se_full", "pred_full"),
            (axes[1], "P_ge_d_minus_2", "se_ge_d_minus_2", "pred_ge_d_minus_2"),
        ):
            y = [c[key] for c in group]
            s = [c[se] for c in group]
            (line,) = ax.plot(ds, y, "o-", label=f"α={alpha:g}")
            ax.fill_between(ds, [a - 2 * b for a, b in zip(y, s)], [a + 2 * b for a, b in zip(y, s)],
                            color=line.get_color(), alpha=0.2, lw=0)
            ax.axhline(group[0][pred], color=line.get_color(), ls=":", lw=1)
        for c in group:
            for k in cols:
                cols[k].append(c[k])
    axes[0].set_title("P(ℓ = d)")
    axes[1].set_title("P(ℓ ≥ d − 2)")
    for ax in axes:
        ax.set_xlabel("d")
        ax.set_ylim(-0.02, 1.02)
    axes[0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    paths = [out / "classification.svg", out / "classification.dat"]
    _save(fig, paths[0])
    write_dat(paths[1], cols)

    markov = [c for c in cells if "markov" in c]
    if markov:
        fig, ax = plt.subplots(figsize=(5, 3.6))
        cols = {"alpha": [], "d": [], "m": [], "P_ge_m": [], "bound": []}
        for c in markov:
            ms = [r["m"] for r in c["markov"]]
            emp = [r["P_ge_m"] for r in c["markov"]]
            bound = [min(r["bound"], 1.0) for r in c["markov"]]
            (line,) = ax.semilogy(ms, [max(e, 1e-6) for e in emp], "o", ms=3,
                                  label=f"d={c['d']}, α={c['alpha']:g}")
            ax.semilogy(ms, [max(b, 1e-12) for b in bound], "-", color=line.get_color(), lw=1)
            for r in c["markov"]:
                cols["alpha"].append(c["alpha"])
                cols["d"].append(c["d"])
                cols["m"].append(r["m"])
                cols["P_ge_m"].append(r["P_ge_m"])
                cols["bound"].append(r["bound"])
        ax.set_xlabel("m")
        ax.set_ylabel("P(ℓ ≥ m)  (line: E[X_m])")
        ax.set_ylim(1e-6, 2)
        ax.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        _save(fig, out / "markov.svg")
        write_dat(out / "markov.dat", cols)
        paths += [out / "markov.svg", out / "markov.dat"]
    return paths


def plot_curve(curve: list[tuple[float, int]], d: int, path) -> list[Path]:
    path = Path(path)
    ps = [p for p, _ in curve]
    ls = [l for _, l in curve]
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.step([p * d for p in ps], ls, where="post")
    ax.axvline(math.e, color="grey", ls=":", lw=1)
    ax.set_xlabel("α = p·d")
    ax.set_ylabel("ℓ")
    ax.set_ylim(-0.5, d + 0.5)
    fig.tight_layout()
    svg = path.with_suffix(".svg")
    dat = path.with_suffix(".dat")
    _save(fig, svg)
    write_dat(dat, {"p": ps, "alpha": [p * d for p in ps], "length": ls})
    return [svg, dat]
