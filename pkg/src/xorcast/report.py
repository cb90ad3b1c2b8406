"""Figure rendering for batch reports.

Renders the usual comparison charts (gain vs. node count per protocol,
forwarder counts, transmission totals) next to the CSV output.  Uses
the Agg backend so it works headless.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_PROTO_ORDER = ("flood", "dp", "tdp", "pdp")


def _series(rows: Sequence[Mapping], value_key: str,
            coding: str | None = None):
    """Per-protocol (nodes, value) series from aggregate rows."""
    out: dict[str, list[tuple[int, float]]] = {}
    for row in rows:
        if coding is not None and row.get("coding") != coding:
            continue
        proto = row["protocol"]
        out.setdefault(proto, []).append((int(row["nodes"]), row[value_key]))
    for proto in out:
        out[proto].sort()
    return {p: out[p] for p in _PROTO_ORDER if p in out} | {
        p: v for p, v in out.items() if p not in _PROTO_ORDER}


def _plot_lines(series: dict, ylabel: str, title: str, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for proto, points in series.items():
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        ax.plot(xs, ys, marker="o", label=proto.upper())
    ax.set_xlabel("number of nodes")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_figures(summary_rows: Sequence[Mapping], out_dir: Path) -> list[Path]:
    """Write the standard report figures; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []

    codings = {row.get("coding") for row in summary_rows}
    gain_rows = [r for r in summary_rows if r.get("coding") == "on"] \
        if "on" in codings else list(summary_rows)
    if gain_rows:
        path = out_dir / "coding_gain.png"
        _plot_lines(_series(gain_rows, "mean_gain_overall"),
                    "mean coding gain", "Coding gain by protocol", path)
        created.append(path)

    off_rows = [r for r in summary_rows if r.get("coding") == "off"] \
        if "off" in codings else list(summary_rows)
    if off_rows:
        path = out_dir / "forwarders.png"
        _plot_lines(_series(off_rows, "mean_forwarder_count"),
                    "mean forward nodes", "Forward-node comparison", path)
        created.append(path)

    if summary_rows:
        path = out_dir / "transmissions.png"
        fig, ax = plt.subplots(figsize=(6, 4))
        for coding in sorted(codings, key=str):
            rows = [r for r in summary_rows if r.get("coding") == coding]
            for proto, points in _series(rows, "mean_total_sends").items():
                label = proto.upper() + (f" ({coding})" if coding else "")
                ax.plot([p[0] for p in points], [p[1] for p in points],
                        marker="s", label=label)
        ax.set_xlabel("number of nodes")
        ax.set_ylabel("mean transmissions")
        ax.set_title("Total transmissions")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
        created.append(path)
    return created
