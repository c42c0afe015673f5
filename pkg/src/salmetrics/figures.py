"""Static figure rendering for report documents.

Figures are a convenience view of a report, written as PNGs next to the
delimited output. Rendering always goes through the Agg backend so it works
headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .report_io import ReportDocument


def _accuracy_figures(doc: ReportDocument, out_dir, stem: str) -> list:
    live = [r for r in doc.records if not r.degenerate]
    if not live:
        return []
    summary = doc.summary_dict()
    paths = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist([r.weighting_accuracy for r in live], bins=20, range=(0.0, 1.0), color="#4878cf")
    ax.axvline(summary["mean_weighting_accuracy"], color="#b04030", label="mean")
    if summary["mean_uniform_baseline"] is not None:
        ax.axvline(
            summary["mean_uniform_baseline"], color="#666666", linestyle="--", label="uniform"
        )
    ax.set_xlabel("weighting accuracy")
    ax.set_ylabel("records")
    ax.legend(loc="upper right")
    fig.tight_layout()
    p = out_dir / f"{stem}_accuracy_hist.png"
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.scatter(
        [r.mask_area_fraction for r in live],
        [r.weighting_accuracy for r in live],
        s=12,
        alpha=0.6,
        color="#4878cf",
    )
    ax.set_xlabel("mask area fraction")
    ax.set_ylabel("weighting accuracy")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.05)
    fig.tight_layout()
    p = out_dir / f"{stem}_accuracy_vs_area.png"
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)
    return paths


def _stability_figures(doc: ReportDocument, out_dir, stem: str) -> list:
    live = [r for r in doc.records if not r.degenerate]
    if not live:
        return []
    summary = doc.summary_dict()
    paths = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist([r.correlation for r in live], bins=20, range=(-1.0, 1.0), color="#4878cf")
    ax.axvline(summary["mean_correlation"], color="#b04030", label="mean")
    ax.set_xlabel("rank correlation")
    ax.set_ylabel("pairs")
    ax.legend(loc="upper left")
    fig.tight_layout()
    p = out_dir / f"{stem}_stability_hist.png"
    fig.savefig(p)
    plt.close(fig)
    paths.append(p)

    per_subject = summary["per_subject"]
    if per_subject:
        fig, ax = plt.subplots(figsize=(max(6.4, 0.4 * len(per_subject)), 4.2))
        labels = [f"{e['subject_id']}/{e['class_id']}" for e in per_subject]
        ax.bar(range(len(per_subject)), [e["mean_correlation"] for e in per_subject],
               color="#4878cf")
        ax.set_xticks(range(len(per_subject)))
        ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
        ax.set_ylabel("mean rank correlation")
        ax.set_ylim(-1.0, 1.05)
        fig.tight_layout()
        p = out_dir / f"{stem}_stability_subjects.png"
        fig.savefig(p)
        plt.close(fig)
        paths.append(p)
    return paths


def render_figures(doc: ReportDocument, out_dir, stem: str) -> list:
    """Render the figures for a report; returns the written paths.

    Reports whose records are all degenerate produce no figures.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    if doc.kind == "accuracy":
        return _accuracy_figures(doc, out_dir, stem)
    return _stability_figures(doc, out_dir, stem)
