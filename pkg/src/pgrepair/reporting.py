"""File outputs for the command line: report JSON, error queries,
hypergraph dump, deletion CSV, and a summary figure."""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .constraints import emit_error_query  # noqa: E402


def write_report(report, constraints, path, include_timings=False) -> None:
    """Deterministic report JSON: sorted keys, fixed field set."""
    data = report.to_json(constraints, include_timings=include_timings)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_queries(constraints, path) -> None:
    text = "\n\n".join(emit_error_query(c) for c in constraints)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")


def write_hypergraph(hypergraphs, path) -> None:
    """One JSON list of hyperedges, iterations concatenated in order."""
    rows = []
    for hypergraph in hypergraphs:
        rows.extend(hypergraph.to_json())
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(rows, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_deletions_csv(report, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["kind", "id", "label"])
        for node in sorted(report.deletions.node_deletions):
            writer.writerow(["node", node, ""])
        for edge in sorted(report.deletions.edge_deletions):
            writer.writerow(["edge", edge, ""])
        for obj, label in sorted(report.deletions.label_deletions):
            writer.writerow(["label", obj, label])


def render_figure(report, path) -> None:
    """Bar chart: errors per constraint next to the deletion breakdown."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))

    counts = report.error_counts or [0]
    left.bar(range(len(counts)), counts, color="#4878a8")
    left.set_xticks(range(len(counts)))
    left.set_xlabel("constraint")
    left.set_ylabel("errors")
    left.set_title("errors per constraint")

    deletions = report.deletions
    kinds = ["nodes", "edges", "labels"]
    sizes = [
        len(deletions.node_deletions),
        len(deletions.edge_deletions),
        len(deletions.label_deletions),
    ]
    right.bar(kinds, sizes, color=["#a85048", "#48a860", "#a8a048"])
    right.set_ylabel("deletions")
    right.set_title(f"repair (status: {report.solver_status})")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
