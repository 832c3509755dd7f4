"""Files written for a finished (or failed) run."""
from __future__ import annotations

import json
import math
from pathlib import Path

from .metrics import ChannelMetrics
from .trace import Trace, write_csv

METRIC_UNITS = {
    "settling_time": "s",
    "overshoot_pct": "%",
    "reverse_response": "flag",
    "reverse_pct": "%",
    "steady_state_error": "SI",
}

PLOT_SCRIPT = '''\
"""Velocity and attitude panels for {csv}. Needs matplotlib."""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
with open(here / "{csv}", newline="") as fh:
    rows = list(csv.DictReader(fh))
col = lambda name: [float(r[name]) for r in rows]
t = col("t_s")

fig, axes = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
for name, target, label in [("vxb_mps", "vxd_mps", "v_x"), ("vyb_mps", "vyd_mps", "v_y"),
                            ("vz_mps", "vzd_mps", "v_z")]:
    line, = axes[0].plot(t, col(name), label=label)
    axes[0].plot(t, col(target), "--", color=line.get_color(), lw=0.8)
axes[0].set_ylabel("velocity [m/s]")
axes[0].legend()
for name, label in [("phi_rad", "phi"), ("theta_rad", "theta"), ("psi_rad", "psi")]:
    axes[1].plot(t, col(name), label=label)
axes[1].plot(t, col("psid_rad"), "k--", lw=0.8)
axes[1].set_ylabel("attitude [rad]")
axes[1].set_xlabel("time [s]")
axes[1].legend()
fig.suptitle("{title}")
fig.tight_layout()
if "--show" in sys.argv:
    plt.show()
else:
    fig.savefig(here / "{png}", dpi=150)
'''


def metrics_lines(metrics: dict[str, ChannelMetrics]) -> list[str]:
    """One ``channel metric value unit`` line per channel and metric."""
    lines = []
    for ch, m in metrics.items():
        for key, value in m.as_dict().items():
            text = str(value).lower() if isinstance(value, bool) else f"{value:.6g}"
            lines.append(f"{ch:<4s} {key:<19s} {text} {METRIC_UNITS[key]}")
    return lines


def _jsonable(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def metrics_json(metrics: dict[str, ChannelMetrics], extra: dict | None = None) -> str:
    doc = {ch: {k: _jsonable(v) for k, v in m.as_dict().items()} for ch, m in metrics.items()}
    if extra:
        doc = {**extra, "channels": doc}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _write(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def emit_outputs(trace: Trace, metrics: dict[str, ChannelMetrics], out_dir, *,
                 title: str = "run", plot: bool = True, extra: dict | None = None) -> list[Path]:
    """Write ``trace.csv``, ``metrics.txt``, ``metrics.json`` and optionally ``plot_trace.py``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    written = [write_csv(trace, out / "trace.csv"),
               _write(out / "metrics.txt", "\n".join(metrics_lines(metrics)) + "\n"),
               _write(out / "metrics.json", metrics_json(metrics, extra))]
    if plot:
        script = PLOT_SCRIPT.format(csv="trace.csv", png="trace.png", title=title)
        written.append(_write(out / "plot_trace.py", script))
    return written


def comparison_table(results: dict) -> str:
    """Side-by-side table of the metrics of several runs keyed by label."""
    labels = list(results)
    channels = list(next(iter(results.values())).metrics)
    head = f"{'channel':<8s}{'metric':<20s}" + "".join(f"{lb:>14s}" for lb in labels)
    lines = [head, "-" * len(head)]
    for ch in channels:
        for key in METRIC_UNITS:
            cells = []
            for lb in labels:
                v = getattr(results[lb].metrics[ch], key)
                cells.append(f"{str(v).lower():>14s}" if isinstance(v, bool) else f"{v:>14.4g}")
            lines.append(f"{ch:<8s}{key:<20s}" + "".join(cells))
    return "\n".join(lines) + "\n"
