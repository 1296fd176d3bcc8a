"""Time-stamped sample paths of Z(t) (and, for the full process, xi(t))."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Trajectory", "write_atomic"]


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-constant sample path.

    times are strictly increasing with times[-1] <= horizon; absorbed_at is
    None while the path is alive at the horizon, otherwise Z is 0 from that
    time on. xi is None for birth-death chains (no edge structure).
    """

    times: np.ndarray
    z: np.ndarray
    xi: np.ndarray | None
    horizon: float
    absorbed_at: float | None
    event_count: int
    seed: int
    truncated: bool = field(default=False)

    def __post_init__(self):
        if self.times.size == 0:
            raise ValueError("trajectory needs at least one sample")

    @property
    def final_z(self) -> float:
        return float(self.z[-1])

    def value_at(self, t):
        """Z at time t (piecewise constant, constant after the last sample)."""
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, None)
        return self.z[idx]

    def xi_at(self, t):
        if self.xi is None:
            raise ValueError("this trajectory has no active-edge samples")
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, None)
        return self.xi[idx]

    def to_csv_text(self) -> str:
        lines = ["t,Z,xi"]
        if self.xi is None:
            lines += [f"{float(t)!r},{float(z)!r},"
                      for t, z in zip(self.times, self.z)]
        else:
            lines += [f"{float(t)!r},{float(z)!r},{float(x)!r}"
                      for t, z, x in zip(self.times, self.z, self.xi)]
        return "\n".join(lines) + "\n"

    def to_csv(self, path, metadata: dict | None = None) -> None:
        """Write the sample CSV and, when metadata is given, a JSON sidecar
        next to it (same name + ".meta.json")."""
        write_atomic(path, self.to_csv_text())
        if metadata is not None:
            meta = dict(metadata)
            meta.setdefault("seed", self.seed)
            meta["absorbed_at"] = self.absorbed_at
            meta["event_count"] = self.event_count
            meta["horizon"] = self.horizon
            write_atomic(str(path) + ".meta.json", json.dumps(meta, indent=2) + "\n")


def write_atomic(path, text: str) -> None:
    """Write via temp file + rename so partial outputs never appear."""
    path = str(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
