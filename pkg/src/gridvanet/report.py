"""Figure rendering for finished runs: PNGs written next to the CSV tables."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIG_SIZE = (7.0, 4.3)
GRID_ALPHA = 0.3


def _read_columns(path: Path) -> dict[str, list[float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        cols: dict[str, list[float]] = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for name, value in row.items():
                cols[name].append(float(value))
    return cols


def render_steps_figure(steps_csv: Path, out_png: Path) -> None:
    """Three stacked panels: population, sensed density, protocol traffic."""
    cols = _read_columns(steps_csv)
    t = cols["time"]
    fig, (ax1, ax2, ax3) = plt.subplots(3, 1, sharex=True,
                                        figsize=(FIG_SIZE[0], FIG_SIZE[1] * 1.7))
    ax1.plot(t, cols["active"], label="active", color="#1f77b4")
    ax1.plot(t, cols["arrived"], label="arrived", color="#2ca02c")
    ax1.set_ylabel("vehicles")
    ax1.legend(fontsize=8)
    ax2.plot(t, cols["mean_density"], color="#d62728")
    ax2.set_ylabel("mean density\n(veh/m/lane)")
    ax3.plot(t, cols["gossip_records"], label="gossip records", color="#9467bd")
    ax3.plot(t, cols["sssp_msgs_local"], label="sssp local", color="#8c564b")
    ax3.plot(t, cols["sssp_msgs_remote"], label="sssp remote", color="#e377c2")
    ax3.set_ylabel("messages / step")
    ax3.set_xlabel("time (s)")
    ax3.legend(fontsize=8)
    for ax in (ax1, ax2, ax3):
        ax.grid(True, alpha=GRID_ALPHA)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def render_trips_figure(trips_csv: Path, out_png: Path) -> None:
    """Trip-time distribution and route-change counts of completed trips."""
    cols = _read_columns(trips_csv)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=FIG_SIZE)
    if cols.get("trip_time"):
        ax1.hist(cols["trip_time"], bins=20, color="#1f77b4", edgecolor="black")
    ax1.set_xlabel("trip time (s)")
    ax1.set_ylabel("trips")
    if cols.get("route_changes"):
        changes = [int(x) for x in cols["route_changes"]]
        ax2.hist(changes, bins=range(0, max(changes) + 2), color="#ff7f0e",
                 edgecolor="black", align="left")
    ax2.set_xlabel("route changes per trip")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=GRID_ALPHA)
    fig.tight_layout()
    fig.savefig(out_png, dpi=150)
    plt.close(fig)


def render_report(prefix: str | Path) -> list[Path]:
    """Render all figures for a run written under the given output prefix."""
    prefix = Path(prefix)
    steps_csv = prefix.with_name(prefix.name + ".steps.csv")
    trips_csv = prefix.with_name(prefix.name + ".trips.csv")
    written = []
    steps_png = prefix.with_name(prefix.name + ".steps.png")
    trips_png = prefix.with_name(prefix.name + ".trips.png")
    render_steps_figure(steps_csv, steps_png)
    written.append(steps_png)
    render_trips_figure(trips_csv, trips_png)
    written.append(trips_png)
    return written
