"""Figures for detection runs, written to files with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .detector import PacketDetection, SymbolEvent  # noqa: E402
from .modem_tx import PACKET_CHIPS  # noqa: E402

plt.rcParams.update({"font.size": 10, "axes.grid": True, "grid.alpha": 0.3})


def plot_trace(power_db, outputs, path, scheduled_starts=(), title=None, max_samples=4000):
    """RSSI trace with scheduled packets shaded and detected symbols marked.

    Long traces are cut to the first ``max_samples`` samples.
    """
    power_db = np.asarray(power_db)
    n = min(power_db.size, max_samples)
    fig, ax = plt.subplots(figsize=(10, 3.5))
    ax.plot(np.arange(n), power_db[:n], lw=0.6, color="0.3", label="RSSI")
    for i, s in enumerate(scheduled_starts):
        if s < n:
            ax.axvspan(s, min(s + PACKET_CHIPS, n), color="tab:orange", alpha=0.15,
                       label="scheduled packet" if i == 0 else None)
    events = [o for o in outputs if isinstance(o, SymbolEvent) and o.sample_index < n]
    if events:
        top = float(np.max(power_db[:n])) + 2
        ax.scatter([e.sample_index for e in events], [top] * len(events), marker="v", s=14,
                   color="tab:blue", label="symbol event")
        for e in events:
            ax.annotate(str(e.symbol), (e.sample_index, top), fontsize=6, xytext=(0, 4),
                        textcoords="offset points", ha="center")
    for j, p in enumerate(o for o in outputs if isinstance(o, PacketDetection) and o.emitted_index < n):
        ax.axvline(p.emitted_index, color="tab:green", lw=1.0, label="packet decoded" if j == 0 else None)
    ax.set_xlim(0, n)
    ax.set_xlabel("sample (5 ms chips)")
    ax.set_ylabel("RSSI (dB)")
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_latency(latencies_us, path, title=None):
    lat = np.asarray(latencies_us, dtype=float) / 1000.0
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if lat.size:
        ax.hist(lat, bins=max(5, min(40, int(np.sqrt(lat.size)))), color="tab:blue")
    ax.set_xlabel("decode latency after last chip (ms)")
    ax.set_ylabel("packets")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_counts(report: dict, path, title=None):
    keys = ["tx", "rx", "false_positives", "false_negatives"]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    bars = ax.bar(["TX", "RX", "FP", "FN"], [report[k] for k in keys],
                  color=["0.5", "tab:green", "tab:red", "tab:orange"])
    ax.bar_label(bars)
    ax.set_ylabel("packets")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def write_mc_figures(run, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    report = run.report.as_dict()
    starts = np.searchsorted(run.src_index, [p.start_sample for p in run.scenario.packet_schedule])
    return [
        plot_trace(run.trace.power_db, run.outputs, outdir / "mc_trace.png", starts.tolist(),
                   title=f"seed {run.report.seed}: first samples"),
        plot_latency(run.report.per_packet_latency_us, outdir / "mc_latency.png"),
        plot_counts(report, outdir / "mc_counts.png"),
    ]
