"""Report rendering: delimited summaries plus matplotlib figures on disk.

Every report path writes a CSV next to its figures so results stay
greppable; figures use the Agg backend only.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path


def cube_growth_figure(entries, path, title="Cube counts by dimension"):
    """entries: [(name, [counts per dimension])] -> log-scale line chart."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, counts in entries:
        ax.plot(range(len(counts)), counts, marker="o", label=name)
    ax.set_yscale("log")
    ax.set_xlabel("cube dimension")
    ax.set_ylabel("|C^l|")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if entries:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def verdict_figure(rows, path, title="Check verdicts"):
    """rows: [(name, check, ok)] -> pass/fail matrix."""
    names = sorted({r[0] for r in rows})
    checks = sorted({r[1] for r in rows})
    grid = [[None] * len(checks) for _ in names]
    for name, check, ok in rows:
        grid[names.index(name)][checks.index(check)] = bool(ok)
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(checks)), max(3, 0.4 * len(names))))
    for i, name in enumerate(names):
        for j, _ in enumerate(checks):
            val = grid[i][j]
            if val is None:
                continue
            color = "#2a9d2a" if val else "#cc3333"
            ax.add_patch(plt.Rectangle((j, len(names) - 1 - i), 1, 1, color=color))
    ax.set_xlim(0, len(checks))
    ax.set_ylim(0, len(names))
    ax.set_xticks([j + 0.5 for j in range(len(checks))])
    ax.set_xticklabels(checks, rotation=45, ha="right", fontsize=7)
    ax.set_yticks([len(names) - 1 - i + 0.5 for i in range(len(names))])
    ax.set_yticklabels(names, fontsize=7)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_cubespace_report(name, space, out_dir, extra_rows=None):
    """One artifact: counts CSV + growth figure; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    counts = space.counts()
    csv_path = os.path.join(out_dir, f"{name}_summary.csv")
    rows = [[name, space.npoints, space.lmax] + counts]
    header = ["name", "points", "lmax"] + [f"cubes_dim_{i}" for i in range(len(counts))]
    write_csv(csv_path, header, rows)
    fig_path = os.path.join(out_dir, f"{name}_cubes.png")
    cube_growth_figure([(name, counts)], fig_path, title=f"{name}: cube counts")
    written = [csv_path, fig_path]
    if extra_rows:
        verdict_csv = os.path.join(out_dir, f"{name}_verdicts.csv")
        write_csv(verdict_csv, ["check", "ok", "detail"], extra_rows)
        written.append(verdict_csv)
    return written


def render_corpus_report(results, out_dir):
    """results: [{name, space, degree, ergodic_level, structure, ok}] ->
    corpus_summary.csv + growth figure + verdict matrix."""
    os.makedirs(out_dir, exist_ok=True)
    max_dim = max(len(r["space"].counts()) for r in results)
    header = (
        ["name", "points", "lmax", "degree", "ergodic_level", "structure_groups", "all_checks_ok"]
        + [f"cubes_dim_{i}" for i in range(max_dim)]
    )
    rows = []
    for r in results:
        counts = r["space"].counts()
        rows.append(
            [
                r["name"],
                r["space"].npoints,
                r["space"].lmax,
                r["degree"],
                r["ergodic_level"],
                r["structure"],
                r["ok"],
            ]
            + counts
            + [""] * (max_dim - len(counts))
        )
    csv_path = os.path.join(out_dir, "corpus_summary.csv")
    write_csv(csv_path, header, rows)
    growth = cube_growth_figure(
        [(r["name"], r["space"].counts()) for r in results],
        os.path.join(out_dir, "corpus_cube_growth.png"),
        title="Corpus cube-count growth",
    )
    verdict_rows = []
    for r in results:
        for check, ok in r["verdicts"]:
            verdict_rows.append((r["name"], check, ok))
    marks = verdict_figure(
        verdict_rows, os.path.join(out_dir, "corpus_verdicts.png"), title="Corpus verdicts"
    )
    return [csv_path, growth, marks]
