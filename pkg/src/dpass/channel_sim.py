"""RSSI trace synthesis and Monte-Carlo detection experiments.

Power adds in the linear domain: noise floor, interferer bursts and DPASS
on-chips. Noise is gamma-distributed linear power with unit mean scaled to
the floor; ``awgn_std_db_equivalent`` is the standard deviation of that noise
in dB (5.57 dB is the exponential energy-detector case, 0 is a flat floor).
SNR is on-chip power over mean noise power.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import polygamma

from .detector import Detector, DetectorConfig, PacketDetection, SymbolEvent
from .modem_tx import DEFAULT_CHIP_US, PACKET_CHIPS, chip_pattern
from .protocol import BANDWIDTHS_MHZ, DURATIONS_MIN, MAX_CENTER_MHZ, PacketFields, encode_fields
from .trace import RssiTrace

log = logging.getLogger(__name__)

DB_PER_NEPER = 10.0 / math.log(10.0)
EXPONENTIAL_STD_DB = DB_PER_NEPER * math.pi / math.sqrt(6.0)  # 5.57 dB
_MIN_LINEAR = 1e-12  # relative to the floor, keeps dB finite


@dataclass(frozen=True)
class InterfererModel:
    power_db: float
    duty_cycle: float
    burst_len_samples: int = 1
    defers_to_busy_channel: bool = True

    def __post_init__(self):
        if not 0.0 <= self.duty_cycle <= 1.0:
            raise ValueError(f"duty cycle {self.duty_cycle} outside [0, 1]")
        if self.burst_len_samples < 1:
            raise ValueError("burst length must be at least one sample")


@dataclass(frozen=True)
class ScheduledPacket:
    """A packet request placed at ``start_sample``; fields are rounded like the encoder does."""

    start_sample: int
    duration_min: int
    center_freq_mhz: int
    bandwidth_mhz: int
    rx_power_db: float

    @classmethod
    def of(cls, start_sample: int, fields: PacketFields, rx_power_db: float) -> "ScheduledPacket":
        return cls(start_sample, fields.duration_min, fields.center_freq_mhz, fields.bandwidth_mhz, rx_power_db)

    @property
    def fields(self) -> PacketFields:
        return PacketFields.from_request(self.duration_min, self.center_freq_mhz, self.bandwidth_mhz)

    @property
    def end_sample(self) -> int:
        return self.start_sample + PACKET_CHIPS - 1


@dataclass(frozen=True)
class ChannelScenario:
    noise_floor_db: float = -95.0
    awgn_std_db_equivalent: float = EXPONENTIAL_STD_DB
    packet_schedule: tuple[ScheduledPacket, ...] = ()
    interferers: tuple[InterfererModel, ...] = ()
    deaf_periods: tuple[tuple[int, int], ...] = ()
    quantization_step_db: float = 1.0
    jitter_chips_std: float = 0.0
    rng_seed: int = 0
    chip_duration_us: int = DEFAULT_CHIP_US
    len_samples: int | None = None
    # used only when the scenario is a Monte-Carlo template
    rx_power_db: float = -75.0
    gap_min_samples: int = 2 * 63
    gap_max_samples: int = 10 * 63
    deaf_duty_cycle: float = 0.0
    deaf_len_samples: int = 20
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "packet_schedule", tuple(self.packet_schedule))
        object.__setattr__(self, "interferers", tuple(self.interferers))
        object.__setattr__(self, "deaf_periods", tuple(tuple(d) for d in self.deaf_periods))
        if self.awgn_std_db_equivalent < 0 or self.quantization_step_db < 0 or self.jitter_chips_std < 0:
            raise ValueError("noise spread, quantization step and jitter must be non-negative")
        if not 0.0 <= self.deaf_duty_cycle < 1.0:
            raise ValueError("deaf duty cycle must be in [0, 1)")
        if not 0 <= self.gap_min_samples <= self.gap_max_samples:
            raise ValueError("need 0 <= gap_min_samples <= gap_max_samples")
        starts = sorted(p.start_sample for p in self.packet_schedule)
        for a, b in zip(starts, starts[1:]):
            if b - a < PACKET_CHIPS:
                raise ValueError(f"scheduled packets at {a} and {b} overlap")
        if starts and starts[0] < 0:
            raise ValueError("packet start must be non-negative")

    def natural_length(self) -> int:
        """Trace length: explicit ``len_samples`` or the schedule end plus a two-symbol margin."""
        if self.len_samples is not None:
            return self.len_samples
        if not self.packet_schedule:
            return 0
        return max(p.end_sample for p in self.packet_schedule) + 1 + 2 * 63


def gamma_shape_for_db_std(std_db: float) -> float:
    """Shape k with std of 10*log10(Gamma(k, 1/k)) equal to ``std_db``."""
    target = (std_db / DB_PER_NEPER) ** 2  # trigamma(k)
    return math.exp(brentq(lambda lk: float(polygamma(1, math.exp(lk))) - target, -30.0, 40.0, xtol=1e-12))


def noise_power(n: int, std_db: float, rng: np.random.Generator) -> np.ndarray:
    """Unit-mean linear noise power samples with the given spread in dB."""
    if std_db == 0.0:
        return np.ones(n)
    k = gamma_shape_for_db_std(std_db)
    return np.maximum(rng.gamma(k, 1.0 / k, size=n), _MIN_LINEAR)


def interferer_mask(model: InterfererModel, n: int, busy: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Boolean burst occupancy for ``n`` samples.

    Bursts of fixed length alternate with geometric idle gaps whose mean
    gives the requested duty cycle. A deferring interferer postpones a burst
    start while ``busy`` (the DPASS on-chips) is set.
    """
    mask = np.zeros(n, dtype=bool)
    d, blen = model.duty_cycle, model.burst_len_samples
    if d <= 0.0 or n == 0:
        return mask
    if d >= 1.0:
        mask[:] = True
        return mask
    mean_gap = blen * (1.0 - d) / d
    p = 1.0 / (1.0 + mean_gap)
    n_draw = int(n / (blen + mean_gap) * 1.2) + 16
    t = 0
    if not model.defers_to_busy_channel:
        while t < n:
            gaps = rng.geometric(p, size=n_draw) - 1
            starts = t + np.cumsum(gaps + blen) - blen
            for s in starts[starts < n]:
                mask[s:s + blen] = True
            t = int(starts[-1]) + blen
        return mask
    idle = np.flatnonzero(~busy)
    while t < n:
        gaps = rng.geometric(p, size=n_draw) - 1
        for g in gaps:
            t += int(g)
            if t >= n:
                break
            if busy[t]:
                j = np.searchsorted(idle, t)
                if j == idle.size:
                    return mask
                t = int(idle[j])
            mask[t:t + blen] = True
            t += blen
    return mask


def slip_index(n_out: int, jitter_std: float, rng: np.random.Generator) -> np.ndarray:
    """Map observed sample k to the ideal sample it reports.

    Receiver timing error is a random walk with per-sample std ``jitter_std``
    chips; each half-chip crossing drops or duplicates one sample.
    """
    if jitter_std == 0.0 or n_out == 0:
        return np.arange(n_out, dtype=np.int64)
    steps = rng.normal(0.0, jitter_std, size=n_out)
    src = np.empty(n_out, dtype=np.int64)
    pos, off = 0, 0.0
    for k in range(n_out):
        src[k] = pos
        off += steps[k]
        if off > 0.5:
            pos += 2
            off -= 1.0
        elif off < -0.5:
            off += 1.0
        else:
            pos += 1
    return src


def _streams(seed: int, n_interferers: int) -> tuple[np.random.Generator, np.random.Generator, list[np.random.Generator]]:
    root = np.random.SeedSequence(seed)
    noise_ss, jitter_ss, intf_ss = root.spawn(3)
    return (np.random.default_rng(noise_ss), np.random.default_rng(jitter_ss),
            [np.random.default_rng(s) for s in intf_ss.spawn(n_interferers)])


def synthesize(scenario: ChannelScenario, len_samples: int | None = None) -> tuple[RssiTrace, np.ndarray]:
    """Like :func:`synthesize_trace` but also returns the observed-to-ideal index map."""
    n = scenario.natural_length() if len_samples is None else len_samples
    for start, length in scenario.deaf_periods:
        if start < 0 or length < 0 or start + length > n:
            raise ValueError(f"deaf period ({start}, {length}) outside a {n}-sample trace")
    noise_rng, jitter_rng, intf_rngs = _streams(scenario.rng_seed, len(scenario.interferers))

    src = slip_index(n, scenario.jitter_chips_std, jitter_rng)
    n_ideal = int(src[-1]) + 1 if n else 0

    floor_lin = 10.0 ** (scenario.noise_floor_db / 10.0)
    linear = floor_lin * noise_power(n_ideal, scenario.awgn_std_db_equivalent, noise_rng)

    busy = np.zeros(n_ideal, dtype=bool)
    for pkt in scenario.packet_schedule:
        on = chip_pattern(encode_fields(pkt.fields))
        seg = slice(pkt.start_sample, min(pkt.start_sample + on.size, n_ideal))
        on = on[:seg.stop - seg.start]
        busy[seg] |= on
        linear[seg] += on * 10.0 ** (pkt.rx_power_db / 10.0)

    for model, rng in zip(scenario.interferers, intf_rngs):
        linear += interferer_mask(model, n_ideal, busy, rng) * 10.0 ** (model.power_db / 10.0)

    db = 10.0 * np.log10(linear[src])
    step = scenario.quantization_step_db
    if step > 0:
        db = np.round(db / step) * step

    for start, length in scenario.deaf_periods:
        if length == 0:
            continue
        if start > 0:
            hold = db[start - 1]
        else:
            hold = scenario.noise_floor_db if step == 0 else round(scenario.noise_floor_db / step) * step
        db[start:start + length] = hold

    return RssiTrace.uniform(db, scenario.chip_duration_us), src


def synthesize_trace(scenario: ChannelScenario, len_samples: int | None = None) -> RssiTrace:
    """Deterministic RSSI trace for a scenario (same seed, same samples)."""
    return synthesize(scenario, len_samples)[0]


def duty_cycle_deaf_periods(n: int, duty: float, length: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Deaf periods of ``length`` samples recurring so that ``duty`` of the trace is deaf."""
    if duty <= 0 or length <= 0 or n <= 0:
        return []
    period = length / duty
    periods = []
    t = rng.uniform(0, period)
    while t < n:
        start = int(t)
        periods.append((start, min(length, n - start)))
        t += period * rng.uniform(0.9, 1.1)
    return [p for p in periods if p[1] > 0]


@dataclass
class DetectionReport:
    tx: int = 0
    rx: int = 0
    false_pos: int = 0
    false_neg: int = 0
    per_packet_latency_us: list[int] = field(default_factory=list)
    samples: int = 0
    symbol_events: int = 0
    rejected_packets: int = 0
    seed: int | None = None

    def as_dict(self) -> dict:
        lat = np.asarray(self.per_packet_latency_us, dtype=np.float64) / 1000.0
        stats = ({"mean": float(lat.mean()), "min": float(lat.min()), "median": float(np.median(lat)),
                  "max": float(lat.max())} if lat.size else {"mean": None, "min": None, "median": None, "max": None})
        return {
            "tx": self.tx,
            "rx": self.rx,
            "false_positives": self.false_pos,
            "false_negatives": self.false_neg,
            "latency_ms": stats,
            "samples": self.samples,
            "symbol_events": self.symbol_events,
            "rejected_packets": self.rejected_packets,
            "seed": self.seed,
        }


def random_fields(rng: np.random.Generator) -> PacketFields:
    return PacketFields(
        int(rng.choice(DURATIONS_MIN)),
        int(rng.integers(0, MAX_CENTER_MHZ + 1)),
        int(rng.choice(BANDWIDTHS_MHZ)),
    )


def schedule_packets(template: ChannelScenario, n_packets: int, rng: np.random.Generator) -> tuple[list[ScheduledPacket], int]:
    """Random grid-point packets separated by uniform gaps; returns the schedule and trace length."""
    sched = []
    t = int(rng.integers(template.gap_min_samples, template.gap_max_samples + 1))
    for _ in range(n_packets):
        sched.append(ScheduledPacket.of(t, random_fields(rng), template.rx_power_db))
        t += PACKET_CHIPS + int(rng.integers(template.gap_min_samples, template.gap_max_samples + 1))
    return sched, t


def score_detections(
    schedule: list[ScheduledPacket],
    detections: list[PacketDetection],
    src: np.ndarray,
    chip_us: int,
    match_tol: int,
) -> tuple[int, int, list[int]]:
    """Match detections to scheduled packets by start sample; returns (rx, false_pos, latencies)."""
    obs_start = np.searchsorted(src, [p.start_sample for p in schedule])
    obs_end = np.searchsorted(src, [p.end_sample for p in schedule])
    matched = set()
    rx = fp = 0
    latencies = []
    for det in detections:
        hit = None
        if schedule:
            j = int(np.argmin(np.abs(obs_start - det.start_index)))
            if abs(int(obs_start[j]) - det.start_index) <= match_tol and j not in matched \
                    and schedule[j].fields == det.fields:
                hit = j
        if hit is None:
            fp += 1
            log.info("false positive %s at sample %d", det.fields, det.start_index)
            continue
        matched.add(hit)
        rx += 1
        latencies.append(int(det.emitted_index - obs_end[hit]) * chip_us)
    return rx, fp, latencies


@dataclass
class MonteCarloRun:
    report: DetectionReport
    scenario: ChannelScenario
    trace: RssiTrace
    src_index: np.ndarray
    outputs: list

    @property
    def packets(self) -> list[PacketDetection]:
        return [o for o in self.outputs if isinstance(o, PacketDetection)]


def simulate_monte_carlo(
    template: ChannelScenario,
    n_packets: int,
    seed: int,
    detector_cfg: DetectorConfig = DetectorConfig(),
    len_samples: int | None = None,
) -> MonteCarloRun:
    """Schedule ``n_packets`` random packets, synthesize, detect and score.

    ``len_samples`` extends the trace, e.g. for a noise-only run with no packets.
    """
    if n_packets < 0:
        raise ValueError("n_packets must be non-negative")
    rng = np.random.default_rng(seed)
    schedule, n = schedule_packets(template, n_packets, rng)
    if n_packets == 0:
        n = 0
    n = max(n, len_samples or 0, template.len_samples or 0)
    deaf = list(template.deaf_periods) + duty_cycle_deaf_periods(
        n, template.deaf_duty_cycle, template.deaf_len_samples, rng)
    scenario = replace(template, packet_schedule=tuple(schedule), deaf_periods=tuple(deaf),
                       rng_seed=int(rng.integers(2**63)), len_samples=n)
    report = DetectionReport(tx=n_packets, seed=seed, samples=n)
    if n == 0:
        return MonteCarloRun(report, scenario, RssiTrace.uniform([]), np.zeros(0, np.int64), [])
    trace, src = synthesize(scenario, n)

    det = Detector(detector_cfg)
    outputs = det.process(trace.power_db.tolist())
    packets = [o for o in outputs if isinstance(o, PacketDetection)]
    match_tol = detector_cfg.spacing_tolerance_chips + detector_cfg.debounce_chips
    rx, fp, lat = score_detections(schedule, packets, src, scenario.chip_duration_us, match_tol)

    report.rx, report.false_pos, report.false_neg = rx, fp, n_packets - rx
    report.per_packet_latency_us = lat
    report.symbol_events = sum(isinstance(o, SymbolEvent) for o in outputs)
    report.rejected_packets = det.assembler.rejected
    return MonteCarloRun(report, scenario, trace, src, outputs)


def run_monte_carlo(
    template: ChannelScenario,
    n_packets: int,
    seed: int,
    detector_cfg: DetectorConfig = DetectorConfig(),
    len_samples: int | None = None,
) -> DetectionReport:
    """Detection counts for ``n_packets`` random packets through ``template``'s channel."""
    return simulate_monte_carlo(template, n_packets, seed, detector_cfg, len_samples).report


_BASELINE = ChannelScenario(
    noise_floor_db=-95.0,
    rx_power_db=-75.0,
    quantization_step_db=1.0,
    description="short-range link: 20 dB SNR, 1 dB RSSI steps, no other traffic",
)

PRESETS: dict[str, ChannelScenario] = {
    "baseline": _BASELINE,
    "clean": replace(_BASELINE, awgn_std_db_equivalent=0.0, quantization_step_db=0.0,
                     description="noise-free floor, unquantized"),
    # WiFi-like traffic: 50% airtime, 20 ms bursts, carrier sense, 3 dB under the beacon
    "interference": replace(
        _BASELINE,
        interferers=(InterfererModel(power_db=-78.0, duty_cycle=0.5, burst_len_samples=4,
                                     defers_to_busy_channel=True),),
        description="50% duty CSMA interferer 3 dB below the DPASS signal",
    ),
    # LoRa class-A node: 100 ms own transmissions at 1% duty, receiver deaf meanwhile
    "lora-deaf": replace(_BASELINE, deaf_duty_cycle=0.01, deaf_len_samples=20,
                         description="receiver deaf for its own 1% duty-cycle transmissions"),
}
