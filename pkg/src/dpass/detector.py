"""Streaming DPASS receiver.

Every accepted RSSI sample updates a 63-sample ring buffer. The window is
mean-normalized and correlated against all 12 symbols; the best symbol
becomes a candidate when its score clears ``k * std * sqrt(63)``. Candidates
are debounced to a local maximum, and the resulting symbol events are
assembled into packets by slot timing.

Work per sample is fixed (one 12 x 63 product plus a bounded number of
partial-packet checks), so a trace of N samples costs O(N).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .pn_codes import ALL_SYMBOLS, SEQUENCE_LENGTH, ChipSequence, SymbolId, alphabet_matrix, canonical_alphabet
from .protocol import PACKET_SYMBOLS, PREAMBLE, PacketDecodeError, PacketFields, decode_symbols

log = logging.getLogger(__name__)

N = SEQUENCE_LENGTH
SQRT_N = math.sqrt(N)
# exact resync of the running sums, bounds float drift on non-integer traces
_RESYNC_EVERY = 64 * N


@dataclass(frozen=True)
class DetectorConfig:
    window_len_chips: int = N
    threshold_k: float = 4.0
    debounce_chips: int = 3
    symbol_spacing_chips: int = N
    spacing_tolerance_chips: int = 2
    assembly_timeout_chips: int = 10 * N
    min_std_db: float = 0.01
    max_partials: int = 8

    def __post_init__(self):
        if self.window_len_chips != N:
            raise ValueError(f"window must be {N} chips to match the alphabet")
        for name in ("threshold_k", "debounce_chips", "symbol_spacing_chips",
                     "spacing_tolerance_chips", "assembly_timeout_chips", "max_partials"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.spacing_tolerance_chips >= self.symbol_spacing_chips:
            raise ValueError("spacing tolerance must be smaller than the symbol spacing")
        if self.min_std_db < 0:
            raise ValueError("min_std_db must be non-negative")


@dataclass(frozen=True)
class SymbolEvent:
    symbol: SymbolId
    sample_index: int  # first sample of the symbol window
    score: float  # correlation of the mean-normalized window, dB units
    threshold: float

    @property
    def end_index(self) -> int:
        return self.sample_index + N - 1

    def as_dict(self) -> dict:
        return {
            "type": "event",
            "symbol": str(self.symbol),
            "sample_index": self.sample_index,
            "score": round(self.score, 6),
            "threshold": round(self.threshold, 6),
        }


@dataclass(frozen=True)
class PacketDetection:
    fields: PacketFields
    events: tuple[SymbolEvent, ...]
    emitted_index: int  # sample count at which the packet was reported

    @property
    def start_index(self) -> int:
        return self.events[0].sample_index

    @property
    def end_index(self) -> int:
        return self.events[-1].end_index

    def as_dict(self) -> dict:
        return {
            "type": "packet",
            "packet": str(self.fields),
            **self.fields.as_dict(),
            "start_index": self.start_index,
            "end_index": self.end_index,
            "emitted_index": self.emitted_index,
        }


def mean_normalize(window) -> np.ndarray:
    w = np.asarray(window, dtype=np.float64)
    if w.shape != (N,):
        raise ValueError(f"window must hold {N} samples, got {w.shape}")
    return w - w.mean()


def correlate_all(window_normalized, alphabet: dict[SymbolId, ChipSequence] | None = None) -> dict[SymbolId, float]:
    w = np.asarray(window_normalized, dtype=np.float64)
    scores = alphabet_matrix(alphabet) @ w
    return dict(zip(ALL_SYMBOLS, scores.tolist()))


def dynamic_threshold(window_std: float, cfg: DetectorConfig = DetectorConfig()) -> float:
    """Detection threshold for a window: ``k * std * sqrt(63)``.

    A +/-1 chip sequence dotted with white noise of standard deviation
    ``std`` has standard deviation ``std * sqrt(63)``.
    """
    if window_std < 0:
        raise ValueError("window std must be non-negative")
    return cfg.threshold_k * window_std * SQRT_N


@dataclass
class _Partial:
    events: list[SymbolEvent] = field(default_factory=list)

    @property
    def first_end(self) -> int:
        return self.events[0].end_index

    @property
    def last_end(self) -> int:
        return self.events[-1].end_index


class Assembler:
    """Groups symbol events into packets.

    A partial packet opens on every preamble-lead symbol. Each following slot
    must be filled by an event ``spacing +/- tolerance`` samples after the
    previous one; events earlier than that window are ignored, a missed window
    discards the partial.
    """

    def __init__(self, cfg: DetectorConfig = DetectorConfig(), expiry_margin: int = 0):
        self.cfg = cfg
        self.expiry_margin = expiry_margin
        self.partials: list[_Partial] = []
        self.discarded = 0
        self.rejected = 0
        self.ops = 0

    def _window(self, part: _Partial) -> tuple[int, int]:
        c = self.cfg
        return (part.last_end + c.symbol_spacing_chips - c.spacing_tolerance_chips,
                part.last_end + c.symbol_spacing_chips + c.spacing_tolerance_chips)

    def _drop(self, part: _Partial, why: str) -> None:
        self.partials.remove(part)
        self.discarded += 1
        log.debug("partial packet of %d symbols discarded: %s", len(part.events), why)

    def expire(self, now: int) -> None:
        c = self.cfg
        for part in list(self.partials):
            self.ops += 1
            if now > self._window(part)[1] + self.expiry_margin:
                self._drop(part, "slot deadline missed")
            elif now - part.first_end > c.assembly_timeout_chips:
                self._drop(part, "assembly timeout")

    def offer(self, ev: SymbolEvent, emitted_index: int | None = None) -> PacketDetection | None:
        done = None
        for part in list(self.partials):
            self.ops += 1
            lo, hi = self._window(part)
            end = ev.end_index
            if end < lo:
                continue
            if end > hi:
                self._drop(part, "slot deadline missed")
                continue
            if len(part.events) == 1 and ev.symbol != PREAMBLE[1]:
                self._drop(part, f"preamble broken by {ev.symbol}")
                continue
            part.events.append(ev)
            if len(part.events) == PACKET_SYMBOLS:
                self.partials.remove(part)
                symbols = [e.symbol for e in part.events]
                try:
                    fields = decode_symbols(symbols)
                except PacketDecodeError as exc:
                    self.rejected += 1
                    log.info("packet rejected (%s): %s", exc, " ".join(map(str, symbols)))
                    continue
                emitted = emitted_index if emitted_index is not None else end
                done = PacketDetection(fields, tuple(part.events), emitted)
                break
        if done is not None:
            self.partials.clear()
            return done
        if ev.symbol == PREAMBLE[0]:
            self.partials.append(_Partial([ev]))
            if len(self.partials) > self.cfg.max_partials:
                self._drop(self.partials[0], "too many open partials")
        return None

    def reset(self) -> None:
        self.partials.clear()


def assemble(events: Iterable[SymbolEvent], cfg: DetectorConfig = DetectorConfig()) -> list[PacketDetection]:
    """Assemble an index-ordered event stream into decoded packets."""
    asm = Assembler(cfg)
    packets = []
    last = None
    for ev in events:
        if last is not None and ev.end_index < last:
            raise ValueError("events must be in sample-index order")
        last = ev.end_index
        asm.expire(ev.end_index)
        pkt = asm.offer(ev)
        if pkt is not None:
            packets.append(pkt)
    return packets


class Detector:
    """Per-sample DPASS detector state. Not thread-safe; use one per stream."""

    def __init__(self, cfg: DetectorConfig = DetectorConfig(), alphabet: dict[SymbolId, ChipSequence] | None = None):
        self.cfg = cfg
        self.alphabet = alphabet or canonical_alphabet()
        self._chips = alphabet_matrix(self.alphabet)
        self._chip_sums = self._chips.sum(axis=1)
        # inverse symbols score as the negation of their base symbol, so only
        # the six base rows need correlating
        self._paired = bool(np.array_equal(self._chips[6:], -self._chips[:6]))
        self._base = N * self._chips[:6] if self._paired else N * self._chips
        self._buf = np.zeros(2 * N)
        self._sum = 0.0
        self._sumsq = 0.0
        self._pending: SymbolEvent | None = None
        self._pending_t = 0.0
        self.assembler = Assembler(cfg, expiry_margin=cfg.debounce_chips + 1)
        self.n_samples = 0
        self.rejected_samples = 0
        self.n_events = 0
        self.n_packets = 0
        self._corr_ops = self._base.size
        self._ops = 0

    @property
    def ops(self) -> int:
        """Operation count: correlation multiply-adds plus assembler checks."""
        return self._ops + self.assembler.ops

    def push_sample(self, rssi_db: float) -> list[SymbolEvent | PacketDetection]:
        """Feed one sample; returns the events and packets it completes (often none)."""
        x = float(rssi_db)
        if not math.isfinite(x):
            self.rejected_samples += 1
            return []
        i = self.n_samples
        pos = i % N
        if i >= N:
            old = self._buf[pos]
            self._sum -= old
            self._sumsq -= old * old
        self._buf[pos] = x
        self._buf[pos + N] = x
        self._sum += x
        self._sumsq += x * x
        self.n_samples += 1

        out: list = []
        self._advance(i, out)
        if i < N - 1:
            return out

        window = self._buf[pos + 1:pos + 1 + N]
        if i % _RESYNC_EVERY == 0:
            self._sum = float(window.sum())
            self._sumsq = float(np.dot(window, window))
        s = self._sum
        spread = N * self._sumsq - s * s  # N^2 * variance
        self._ops += self._corr_ops
        if spread <= 0.0 or math.sqrt(spread) / N < self.cfg.min_std_db:
            return out
        # N * (mean-normalized correlation), exact for integer-valued windows
        t_thr = self.cfg.threshold_k * math.sqrt(N * spread)
        if self._paired:
            t = self._base @ window
            t -= s
            hi, lo = t.max(), t.min()
            if hi >= -lo:
                if hi < t_thr:
                    return out
                best, t_best = int(t.argmax()), float(hi)
            else:
                if -lo < t_thr:
                    return out
                best, t_best = int(t.argmin()) + 6, float(-lo)
        else:
            t = self._base @ window - self._chip_sums * s
            best = int(t.argmax())
            t_best = float(t[best])
            if t_best < t_thr:
                return out
        if self._pending is None or t_best > self._pending_t:
            self._pending = SymbolEvent(ALL_SYMBOLS[best], i - N + 1, t_best / N, t_thr / N)
            self._pending_t = t_best
        return out

    def _advance(self, i: int, out: list) -> None:
        p = self._pending
        if p is not None and i - p.end_index > self.cfg.debounce_chips:
            self._pending = None
            self._emit(p, i, out)
        self.assembler.expire(i)

    def _emit(self, ev: SymbolEvent, i: int, out: list) -> None:
        self.n_events += 1
        out.append(ev)
        pkt = self.assembler.offer(ev, emitted_index=i)
        if pkt is not None:
            self.n_packets += 1
            out.append(pkt)

    def flush(self) -> list[SymbolEvent | PacketDetection]:
        """End of stream: release a pending event and drop open partials."""
        out: list = []
        if self._pending is not None:
            p, self._pending = self._pending, None
            self._emit(p, self.n_samples, out)
        self.assembler.reset()
        return out

    def process(self, samples: Iterable[float], flush: bool = True) -> list[SymbolEvent | PacketDetection]:
        out: list = []
        push = self.push_sample
        for x in samples:
            r = push(x)
            if r:
                out.extend(r)
        if flush:
            out.extend(self.flush())
        return out


def detect_packets(samples: Sequence[float], cfg: DetectorConfig = DetectorConfig()) -> list[PacketDetection]:
    return [o for o in Detector(cfg).process(np.asarray(samples, dtype=np.float64).tolist())
            if isinstance(o, PacketDetection)]
