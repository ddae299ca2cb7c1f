"""Timestamped power samples and their CSV / packed binary file forms.

CSV: header ``t_us,rssi_db`` then one ``int,float`` sample per line.
Binary: records of little-endian ``u64`` microseconds followed by ``f32`` dB.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

log = logging.getLogger(__name__)

CSV_HEADER = "t_us,rssi_db"
BINARY_DTYPE = np.dtype([("t_us", "<u8"), ("rssi_db", "<f4")])


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trace:
    t_us: np.ndarray
    power_db: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t_us, dtype=np.int64)
        p = np.asarray(self.power_db, dtype=np.float64)
        if t.ndim != 1 or t.shape != p.shape:
            raise ValueError("timestamps and powers must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "t_us", t)
        object.__setattr__(self, "power_db", p)

    @classmethod
    def uniform(cls, power_db, spacing_us: int = 5000, t0_us: int = 0) -> "Trace":
        power_db = np.asarray(power_db, dtype=np.float64)
        return cls(t0_us + spacing_us * np.arange(power_db.size, dtype=np.int64), power_db)

    def __len__(self) -> int:
        return int(self.t_us.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return bool(np.array_equal(self.t_us, other.t_us) and np.array_equal(self.power_db, other.power_db))


PowerTrace = Trace
RssiTrace = Trace


def format_csv(trace: Trace) -> str:
    lines = [CSV_HEADER]
    lines += [f"{t},{float(p)!r}" for t, p in zip(trace.t_us.tolist(), trace.power_db.tolist())]
    return "\n".join(lines) + "\n"


def write_csv(trace: Trace, path) -> None:
    Path(path).write_text(format_csv(trace))


def iter_csv_samples(lines: Iterable[str], stats: dict | None = None) -> Iterator[tuple[int, float]]:
    """Yield ``(t_us, rssi_db)`` from CSV lines, skipping malformed ones.

    A line is malformed if it does not parse, is non-finite, or its
    timestamp does not increase. ``stats`` receives ``good`` and ``bad`` counts.
    """
    stats = stats if stats is not None else {}
    stats.setdefault("good", 0)
    stats.setdefault("bad", 0)
    last_t = None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.replace(" ", "") == CSV_HEADER:
            continue
        try:
            t_text, p_text = line.split(",")
            t, p = int(t_text), float(p_text)
            if not math.isfinite(p):
                raise ValueError("non-finite power")
            if last_t is not None and t <= last_t:
                raise ValueError("timestamp not increasing")
        except ValueError as exc:
            stats["bad"] += 1
            log.warning("trace line %d skipped (%s): %r", lineno, exc, line)
            continue
        last_t = t
        stats["good"] += 1
        yield t, p


def read_csv(source, max_bad_fraction: float = 0.01) -> Trace:
    """Read a whole CSV trace; too many malformed lines raise TraceFormatError."""
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            return read_csv(fh, max_bad_fraction)
    stats: dict = {}
    samples = list(iter_csv_samples(source, stats))
    check_bad_fraction(stats, max_bad_fraction)
    if not samples:
        return Trace(np.empty(0, np.int64), np.empty(0))
    t, p = zip(*samples)
    return Trace(np.array(t), np.array(p))


def check_bad_fraction(stats: dict, max_bad_fraction: float = 0.01) -> None:
    total = stats["good"] + stats["bad"]
    if total and stats["bad"] / total > max_bad_fraction:
        raise TraceFormatError(f"{stats['bad']} of {total} trace lines malformed")


def write_binary(trace: Trace, path) -> None:
    rec = np.empty(len(trace), dtype=BINARY_DTYPE)
    rec["t_us"] = trace.t_us
    rec["rssi_db"] = trace.power_db
    Path(path).write_bytes(rec.tobytes())


def read_binary(source) -> Trace:
    data = Path(source).read_bytes() if isinstance(source, (str, Path)) else source.read()
    if len(data) % BINARY_DTYPE.itemsize:
        raise TraceFormatError(f"binary trace size {len(data)} is not a multiple of {BINARY_DTYPE.itemsize}")
    rec = np.frombuffer(data, dtype=BINARY_DTYPE)
    try:
        return Trace(rec["t_us"].astype(np.int64), rec["rssi_db"].astype(np.float64))
    except ValueError as exc:
        raise TraceFormatError(str(exc)) from exc


def is_binary_path(path) -> bool:
    return str(path).endswith((".bin", ".dat"))
