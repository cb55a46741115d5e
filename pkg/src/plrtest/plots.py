"""Optional SVG plots: per-kind ROC panels and the index-vs-class scatter.

matplotlib is imported lazily; install the ``plots`` extra to use these.
"""

from __future__ import annotations

from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_roc_curves(reports, out_dir: Path) -> None:
    """One SVG per dissimilarity kind, eight configuration curves each."""
    plt = _pyplot()
    by_kind: dict[str, list] = {}
    for cfg, rep in reports:
        by_kind.setdefault(cfg.kind.value, []).append((cfg, rep))
    for kind, items in by_kind.items():
        fig, ax = plt.subplots(figsize=(5, 5))
        for cfg, rep in items:
            fprs = [p.fpr for p in rep.roc]
            tprs = [p.tpr for p in rep.roc]
            ax.plot(fprs, tprs, label=f"{cfg.config_id} (auc={rep.auc:.2f})")
        ax.plot([0, 1], [0, 1], "k:", linewidth=0.8)
        ax.set_xlabel("false positive rate")
        ax.set_ylabel("true positive rate")
        ax.set_title(f"dissimilarity: 1-{kind.upper()}")
        ax.legend(fontsize=6, loc="lower right")
        fig.tight_layout()
        fig.savefig(out_dir / f"roc_{kind}.svg")
        plt.close(fig)


def plot_index_scatter(rows, config_id: str, path: Path) -> None:
    """Index value per case against its ground-truth class."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    xs = [score for _, score, _ in rows]
    ys = [int(label) for _, _, label in rows]
    ax.scatter(xs, ys, s=18, alpha=0.7)
    ax.set_yticks([0, 1], ["no RAPD", "RAPD"])
    ax.set_xlabel(f"index ({config_id})")
    ax.set_ylabel("ground truth")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
