"""Report emission: JSON + aligned text + CSV, with rendered figures.

Every eval/sweep result lands as machine-readable filesplus a PNG figure
rendered next to them (bar chart for scheme tables, line chart for
sweep curves).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .evaluate import EvalReport


def _ensure_dir(outdir) -> Path:
    path = Path(outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _text_table(rows: list[dict], columns: list[str]) -> str:
    def fmt(value):
        if isinstance(value, float):
            return "%.4f" % value
        return str(value)

    table = [[fmt(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in table)) if table else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in table:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def write_eval_report(outdir, name: str, report: EvalReport, figures: bool = True) -> dict:
    """Write <name>.json/.txt/.csv (+ .png) for a scheme table."""
    out = _ensure_dir(outdir)
    payload = report.to_dict()
    (out / f"{name}.json").write_text(json.dumps(payload, indent=2) + "\n", "utf-8")
    columns = ["scheme", "acc", "samples", "budget", "overhead_pct", "runtime_s"]
    (out / f"{name}.txt").write_text(_text_table(payload["rows"], columns), "utf-8")
    with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=columns)
        writer.writeheader()
        for row in payload["rows"]:
            writer.writerow({c: row[c] for c in columns})
    written = {
        "json": str(out / f"{name}.json"),
        "txt": str(out / f"{name}.txt"),
        "csv": str(out / f"{name}.csv"),
    }
    if figures:
        written["png"] = _render_bar_chart(
            out / f"{name}.png",
            [r["scheme"] for r in payload["rows"]],
            [r["acc"] for r in payload["rows"]],
            title=name,
        )
    return written


def write_curve(outdir, name: str, xlabel: str, points: list[tuple], ylabel: str = "acc",
                figures: bool = True, extra_columns: dict | None = None) -> dict:
    """Write one curve as CSV/JSON (+ line chart). points: [(x, y), ...]."""
    out = _ensure_dir(outdir)
    rows = [{xlabel: x, ylabel: y} for x, y in points]
    if extra_columns:
        for row, extras in zip(rows, extra_columns.get("rows", [])):
            row.update(extras)
    (out / f"{name}.json").write_text(json.dumps(rows, indent=2) + "\n", "utf-8")
    fieldnames = list(rows[0].keys()) if rows else [xlabel, ylabel]
    with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    written = {"json": str(out / f"{name}.json"), "csv": str(out / f"{name}.csv")}
    if figures:
        written["png"] = _render_line_chart(
            out / f"{name}.png",
            [p[0] for p in points],
            [p[1] for p in points],
            xlabel=xlabel,
            ylabel=ylabel,
            title=name,
        )
    return written


def _render_bar_chart(path, labels, values, title="") -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(range(len(labels)), values, color="#4878a8")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("ACC")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, "%.3f" % v, ha="center", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def _render_line_chart(path, xs, ys, xlabel="", ylabel="", title="") -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(xs, ys, marker="o", color="#a85048")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)
