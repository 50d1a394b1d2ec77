"""Trajectory records and their on-disk formats (CSV + JSON sidecars)."""

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .model import ModelParams

__all__ = ["JumpEvent", "TrajectoryRecord", "write_record_csv", "write_events_json", "write_metadata_json"]

TIME_UNIT_COMMENT = "# time unit: 1/eta (inverse two-photon loss rate)"


@dataclass(frozen=True)
class JumpEvent:
    time: float
    channel: str  # "1ph" or "2ph"


@dataclass
class TrajectoryRecord:
    """Sampled observables along one quantum trajectory.

    ``events`` is populated for the counting protocol; ``currents`` (one
    column per channel, bin-averaged over each sampling interval) and the
    pre-renormalization norm-drift statistics for the homodyne protocol.
    """

    protocol: str
    sample_times: np.ndarray
    x: np.ndarray
    p: np.ndarray
    parity: np.ndarray
    n: np.ndarray
    seed: int
    dt: float
    params: ModelParams
    events: list = field(default_factory=list)
    currents: np.ndarray | None = None
    max_norm_drift: float = 0.0
    mean_norm_drift: float = 0.0

    def __post_init__(self):
        n_s = len(self.sample_times)
        for name in ("x", "p", "parity", "n"):
            if len(getattr(self, name)) != n_s:
                raise ValueError(f"series {name!r} length does not match sample_times")
        if np.max(np.abs(self.parity)) > 1.0 + 1e-9:
            raise ValueError("parity expectation exceeds 1 beyond tolerance")
        times = [ev.time for ev in self.events]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("event times must be strictly increasing")


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_record_csv(record: TrajectoryRecord, path):
    """CSV columns t,x,p,parity,n (+ I1,I2,... for homodyne), 17 significant digits."""
    n_ch = 0 if record.currents is None else record.currents.shape[1]
    header = "t,x,p,parity,n" + "".join(f",I{c + 1}" for c in range(n_ch))
    lines = [TIME_UNIT_COMMENT, header]
    for i, t in enumerate(record.sample_times):
        row = [_fmt(t), _fmt(record.x[i]), _fmt(record.p[i]), _fmt(record.parity[i]), _fmt(record.n[i])]
        for c in range(n_ch):
            row.append(_fmt(record.currents[i, c]))
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_events_json(record: TrajectoryRecord, path):
    """Sidecar event log: [{"t": ..., "channel": "1ph"|"2ph"}, ...]."""
    payload = [{"t": ev.time, "channel": ev.channel} for ev in record.events]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def write_metadata_json(record: TrajectoryRecord, path):
    payload = {
        "protocol": record.protocol,
        "seed": record.seed,
        "dt": record.dt,
        "params": asdict(record.params),
        "n_samples": int(len(record.sample_times)),
        "n_events": len(record.events),
        "max_norm_drift": record.max_norm_drift,
        "mean_norm_drift": record.mean_norm_drift,
        "time_unit": "1/eta",
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
