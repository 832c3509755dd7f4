"""Per-tick telemetry records and their CSV form."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .metrics import ChannelMetrics, step_metrics


class TraceRecord(NamedTuple):
    t_s: float
    x_m: float
    y_m: float
    z_m: float
    vx_mps: float
    vy_mps: float
    vz_mps: float
    vxb_mps: float
    vyb_mps: float
    phi_rad: float
    theta_rad: float
    psi_rad: float
    wx_radps: float
    wy_radps: float
    wz_radps: float
    vxd_mps: float
    vyd_mps: float
    vzd_mps: float
    zd_m: float
    phid_rad: float
    thetad_rad: float
    psid_rad: float
    s_omega_x_radps2: float
    s_omega_y_radps2: float
    s_omega_z_radps2: float
    s_z_mps2: float
    tau_o_hat_x_Nm: float
    tau_o_hat_y_Nm: float
    tau_o_hat_z_Nm: float
    f_oz_hat_N: float
    f_dz_N: float
    tau_d_x_Nm: float
    tau_d_y_Nm: float
    tau_d_z_Nm: float
    f_wd_1_N: float
    f_wd_2_N: float
    f_wd_3_N: float
    f_wd_4_N: float
    v_d_1_V: float
    v_d_2_V: float
    v_d_3_V: float
    v_d_4_V: float
    f_o_x_N: float
    f_o_y_N: float
    f_o_z_N: float
    tau_o_x_Nm: float
    tau_o_y_Nm: float
    tau_o_z_Nm: float


COLUMNS = TraceRecord._fields

# metric channel -> (signal column, target column)
CHANNELS = {
    "v_x": ("vxb_mps", "vxd_mps"),
    "v_y": ("vyb_mps", "vyd_mps"),
    "v_z": ("vz_mps", "vzd_mps"),
    "z": ("z_m", "zd_m"),
    "psi": ("psi_rad", "psid_rad"),
}


class Trace:
    """Sequence of :class:`TraceRecord` with column access."""

    def __init__(self, records=()):
        self.records = [r if isinstance(r, TraceRecord) else TraceRecord(*r) for r in records]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __eq__(self, other):
        if not isinstance(other, Trace) or len(self) != len(other):
            return False
        return all(_same(a, b) for r1, r2 in zip(self, other) for a, b in zip(r1, r2))

    def column(self, name: str) -> np.ndarray:
        i = COLUMNS.index(name)
        return np.array([r[i] for r in self.records], dtype=float)

    def append(self, record: TraceRecord):
        self.records.append(record)

    def metrics(self, channels=("v_x", "v_y", "v_z", "psi")) -> dict[str, ChannelMetrics]:
        out = {}
        for ch in channels:
            sig, tgt = CHANNELS[ch]
            if not self.records:
                out[ch] = ChannelMetrics.undefined()
                continue
            out[ch] = step_metrics(self.column("t_s"), self.column(sig), self.column(tgt)[-1])
        return out


def _same(a: float, b: float) -> bool:
    return a == b or (math.isnan(a) and math.isnan(b))


def write_csv(trace: Trace, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(to_csv_text(trace))
    except OSError as exc:
        raise OSError(f"cannot write trace CSV {path}: {exc.strerror}") from exc
    return path


def to_csv_text(trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for rec in trace:
        # repr() round-trips float64 exactly
        w.writerow([repr(float(v)) for v in rec])
    return buf.getvalue()


def read_csv(path) -> Trace:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != COLUMNS:
            raise ValueError(f"{path}: header does not match the trace columns")
        return Trace(TraceRecord(*(float(v) for v in row)) for row in reader)
