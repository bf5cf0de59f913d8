"""Regenerate the four figures from the CSV artifacts.

fig1  payoff histograms with analytic mean/VaR/ES verticals
fig2  bound curves against the L1 radius, with reference horizontals
fig3  the same against the L-infinity radius
fig4  the transformed value curves m -> r_m per comparison copula

Invoked as ``render --fig fig2 --in <dir> --out <dir>``.  Output is a vector
PDF plus a PNG per figure.  Rendering is deterministic for identical inputs
(the embedded document dates are pinned), and the row-ordering assertions in
:mod:`jointlife_plots.tables` run before anything is drawn.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

os.environ.setdefault("SOURCE_DATE_EPOCH", "946684800")  # pinned: 2000-01-01

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import (SchemaError, assert_row_ordering, group_by, hline_value,
                     load_samples, load_table)

CONTRACTS = ("f2da", "s2da", "f2di", "s2di")
MEASURE_ORDER = ("mean", "var0.99", "es0.975")
MEASURE_TITLES = {"mean": "expectation", "var0.99": "99% VaR",
                  "es0.975": "97.5% ES"}
HLINE_STYLES = {
    "cref": dict(color="tab:red", label="reference copula"),
    "pi": dict(color="darkgreen", label="independence"),
    "tau": dict(color="tab:blue", label="Kendall-tau band"),
    "tankov": dict(color="tab:orange", label="value-matched band"),
    "fh": dict(color="purple", label="Frechet-Hoeffding"),
}
RCURVE_STYLES = {
    "cref": dict(color="tab:red"), "pi": dict(color="darkgreen"),
    "w": dict(color="purple", linestyle="--"),
    "m": dict(color="purple", linestyle="-"),
    "tau_lower": dict(color="tab:blue", linestyle="--"),
    "tau_upper": dict(color="tab:blue", linestyle="-"),
    "tankov_lower": dict(color="tab:orange", linestyle="--"),
    "tankov_upper": dict(color="tab:orange", linestyle="-"),
}


def _save(fig, outdir: Path, stem: str) -> list:
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for ext in ("pdf", "png"):
        path = outdir / f"{stem}.{ext}"
        fig.savefig(path, metadata={"CreationDate": None} if ext == "pdf" else None)
        paths.append(path)
    plt.close(fig)
    return paths


def render_fig1(indir: Path, outdir: Path) -> list:
    hlines = load_table(indir / "hlines.csv", "hlines")
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, contract in zip(axes.ravel(), CONTRACTS):
        payoffs = load_samples(indir / f"samples_{contract}.csv")
        ax.hist(payoffs, bins=60, color="steelblue", alpha=0.8)
        for measure, style in (("mean", "-"), ("var0.99", "--"),
                               ("es0.975", ":")):
            value = hline_value(hlines, contract, measure, "cref")
            ax.axvline(value, color="black", linestyle=style,
                       label=MEASURE_TITLES[measure])
        ax.set_title(contract.upper())
        ax.set_xlabel("payoff")
    axes[0, 0].legend(fontsize=8)
    fig.suptitle("Simulated payoffs under the reference copula")
    fig.tight_layout()
    return _save(fig, outdir, "fig1")


def _render_sweep(indir: Path, outdir: Path, norm: str, stem: str) -> list:
    sweep = [r for r in load_table(indir / "sweep.csv", "sweep")
             if r["norm"] == norm]
    if not sweep:
        raise SchemaError(f"sweep: no rows for norm {norm!r}")
    hlines = load_table(indir / "hlines.csv", "hlines")
    assert_row_ordering(sweep, hlines)
    groups = group_by(sweep, "measure", "contract")
    fig, axes = plt.subplots(3, 4, figsize=(15, 9), sharex="col")
    for i, measure in enumerate(MEASURE_ORDER):
        for j, contract in enumerate(CONTRACTS):
            ax = axes[i, j]
            rows = sorted(groups.get((measure, contract), []),
                          key=lambda r: r["epsilon"])
            if not rows:
                raise SchemaError(f"sweep: no rows for ({measure}, {contract})")
            eps = [r["epsilon"] for r in rows]
            ax.plot(eps, [r["lower"] for r in rows], color="black")
            ax.plot(eps, [r["upper"] for r in rows], color="black")
            for label, style in HLINE_STYLES.items():
                if label in ("cref", "pi"):
                    values = [hline_value(hlines, contract, measure, label)]
                else:
                    values = [hline_value(hlines, contract, measure, f"{label}_lower"),
                              hline_value(hlines, contract, measure, f"{label}_upper")]
                for k, value in enumerate(values):
                    ax.axhline(value, linestyle="--", linewidth=0.9,
                               color=style["color"],
                               label=style["label"] if k == 0 and i == 0 and j == 0 else None)
            if i == 0:
                ax.set_title(contract.upper())
            if j == 0:
                ax.set_ylabel(MEASURE_TITLES[measure])
            if i == 2:
                ax.set_xlabel("radius")
    handles, labels = axes[0, 0].get_legend_handles_labels()
    fig.legend(handles, labels, loc="lower center", ncol=5, fontsize=8)
    fig.suptitle(f"Risk bounds against the {norm} radius")
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    return _save(fig, outdir, stem)


def render_fig2(indir: Path, outdir: Path) -> list:
    return _render_sweep(indir, outdir, "l1", "fig2")


def render_fig3(indir: Path, outdir: Path) -> list:
    return _render_sweep(indir, outdir, "linf", "fig3")


def render_fig4(indir: Path, outdir: Path) -> list:
    rcurve = load_table(indir / "rcurve.csv", "rcurve")
    groups = group_by(rcurve, "contract", "copula")
    fig, axes = plt.subplots(2, 2, figsize=(11, 7))
    for ax, contract in zip(axes.ravel(), CONTRACTS):
        copulas = sorted({c for (ct, c) in groups if ct == contract})
        if not copulas:
            raise SchemaError(f"rcurve: no rows for contract {contract!r}")
        for copula in copulas:
            rows = sorted(groups[(contract, copula)], key=lambda r: r["m"])
            style = RCURVE_STYLES.get(copula, {})
            ax.plot([r["m"] for r in rows], [r["r_m"] for r in rows],
                    label=copula, linewidth=1.1, **style)
        ax.axhline(0.01, color="gray", linestyle="-", linewidth=0.8)
        ax.axhline(0.025, color="gray", linestyle="--", linewidth=0.8)
        ax.set_title(contract.upper())
        ax.set_xlabel("m")
        ax.set_ylabel("transformed value")
    axes[0, 0].legend(fontsize=7, ncol=2)
    fig.suptitle("Transformed copula values along the grid")
    fig.tight_layout()
    return _save(fig, outdir, "fig4")


RENDERERS = {"fig1": render_fig1, "fig2": render_fig2, "fig3": render_fig3,
             "fig4": render_fig4}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render",
                                     description="Regenerate figures from CSVs")
    parser.add_argument("--fig", required=True,
                        choices=[*RENDERERS.keys(), "all"])
    parser.add_argument("--in", dest="indir", required=True)
    parser.add_argument("--out", dest="outdir", required=True)
    args = parser.parse_args(argv)
    names = list(RENDERERS) if args.fig == "all" else [args.fig]
    try:
        for name in names:
            for path in RENDERERS[name](Path(args.indir), Path(args.outdir)):
                print(path)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
