"""Figure rendering for experiment reports.

Renders PNG files next to the delimited output, one or two figures per
report kind.  Matplotlib runs on the Agg backend so this works headless.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _fig_path(base_path, suffix: str) -> str:
    root, _ = os.path.splitext(str(base_path))
    return f"{root}_{suffix}.png"


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_report_figures(report, base_path) -> list[str]:
    """Render the figures for one report; returns the written paths."""
    fn = _RENDERERS.get(report.kind)
    if fn is None:
        return []
    if report.status in ("refused", "error"):
        return []
    return fn(report, base_path)


def _selectability(report, base_path):
    r = report.results
    n = len(r["estimates"])
    xs = np.arange(n)
    est = np.array([v if not math.isnan(v) else 0.0 for v in r["estimates"]])
    lo = est - np.array(r["wilson_low"])
    hi = np.array(r["wilson_high"]) - est
    fig, ax = plt.subplots(figsize=(max(6, n * 0.35), 4))
    ax.bar(xs, est, color="tab:blue", alpha=0.8)
    ax.errorbar(xs, est, yerr=[lo, hi], fmt="none", ecolor="black", capsize=2)
    if r.get("min_selectability") is not None:
        ax.axhline(r["min_selectability"], color="tab:red", linestyle="--",
                   label=f"min = {r['min_selectability']:.3f}")
        ax.legend()
    ax.set_xlabel("element")
    ax.set_ylabel("Pr[accepted | active]")
    ax.set_title("Per-element selectability with Wilson intervals")
    return [_save(fig, _fig_path(base_path, "selectability"))]


def _ratio(report, base_path):
    r = report.results
    ratios = r["policy_ratios"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(np.arange(len(ratios)), ratios, color="tab:green", alpha=0.8)
    ax.axhline(r["ratio"], color="tab:red", linestyle="--",
               label=f"pooled = {r['ratio']:.3f}")
    ax.set_xlabel("policy")
    ax.set_ylabel("online / offline value")
    ax.set_title("Competitive ratio per trained policy")
    ax.legend()
    return [_save(fig, _fig_path(base_path, "ratio"))]


def _diagnostic(report, base_path):
    r = report.results
    est = np.asarray(r["last_estimates"])
    lo = np.asarray(r["band_low"])
    hi = np.asarray(r["band_high"])
    levels = est.shape[1] if est.ndim == 2 else 0
    fig, ax = plt.subplots(figsize=(6, 4))
    ks = np.arange(levels)
    ax.fill_between(ks, lo, hi, color="tab:orange", alpha=0.3, label="target band")
    for i in range(est.shape[0]):
        ax.plot(ks, est[i], marker="o", linewidth=0.8, alpha=0.7)
    ax.set_xlabel("threshold level k")
    ax.set_ylabel("estimated quantile")
    ax.set_title(f"Threshold quantiles (fraction in band: {r['fraction_in_band']:.2f})")
    ax.legend()
    return [_save(fig, _fig_path(base_path, "diagnostic"))]


def _lower_bound(report, base_path):
    r = report.results
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(r["s_values"], r["worst_case_balancedness"], marker="o")
    ax.set_xlabel("samples per layer")
    ax.set_ylabel("worst-case balancedness")
    ax.set_title("Sample-complexity trend on the bipartite family")
    ax.set_xscale("symlog")
    return [_save(fig, _fig_path(base_path, "lower_bound"))]


def _decomposition(report, base_path):
    r = report.results
    hist = {int(k): v for k, v in r["depth_histogram"].items()}
    depths = sorted(hist)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(depths, [hist[d] for d in depths], color="tab:purple", alpha=0.8)
    ax.set_xlabel("chain depth")
    ax.set_ylabel("count")
    ax.set_title(f"Chain depth distribution (failure rate {r['failure_rate']:.3f})")
    return [_save(fig, _fig_path(base_path, "depths"))]


_RENDERERS = {
    "selectability": _selectability,
    "prophet-ratio": _ratio,
    "thresholds-diagnostic": _diagnostic,
    "lower-bound": _lower_bound,
    "decomposition-stats": _decomposition,
}
