"""Histogram figure rendering for the report path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

MAX_BARS = 64


def save_histogram_figure(path, counts: dict[str, int], shots: int,
                          exact: dict[str, float] | None = None,
                          title: str = "") -> Path:
    """Render sampled frequencies, and exact probabilities when given, as a bar chart.

    At most MAX_BARS outcomes are drawn; when truncated the most frequent
    outcomes are kept. Figure bytes are deterministic for identical inputs
    (no embedded timestamps or version strings).
    """
    items = sorted(counts.items())
    truncated = len(items) > MAX_BARS
    if truncated:
        kept = sorted(items, key=lambda kv: (-kv[1], kv[0]))[:MAX_BARS]
        items = sorted(kept)
    labels = [bits for bits, _ in items]
    freqs = [count / shots for _, count in items]
    positions = range(len(labels))

    fig, ax = plt.subplots(figsize=(max(6.0, 0.18 * len(labels) + 2.0), 4.0))
    ax.bar(positions, freqs, color="#4878cf", label="sampled frequency")
    if exact is not None:
        ax.plot(positions, [exact.get(bits, 0.0) for bits in labels], "k_",
                markersize=12, label="exact probability")
    ax.set_xticks(list(positions))
    ax.set_xticklabels(labels, rotation=90, fontsize=7, family="monospace")
    xlabel = "measured bitstring"
    if truncated:
        xlabel += f" (top {MAX_BARS} of {len(counts)} outcomes)"
    ax.set_xlabel(xlabel)
    ax.set_ylabel("frequency")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()

    path = Path(path)
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return path
