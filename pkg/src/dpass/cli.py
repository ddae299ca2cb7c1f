"""``dpass`` command line: encode, synth, detect, mc.

Exit codes: 0 success, 2 argument error, 3 input-format error.
Set ``DPASS_LOG`` (DEBUG, INFO, WARNING, ...) for log verbosity on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import deque
from dataclasses import replace
from pathlib import Path

from . import trace as tracefmt
from .channel_sim import PRESETS, simulate_monte_carlo, synthesize_trace
from .config import ConfigError, load_profile, load_scenario
from .coordinator import Device, action_dict
from .detector import Detector, DetectorConfig, PacketDetection, SymbolEvent
from .protocol import ProtocolError, encode_fields, PacketFields

log = logging.getLogger("dpass")

EXIT_ARGS = 2
EXIT_INPUT = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(obj: dict, out) -> None:
    out.write(json.dumps(obj) + "\n")
    out.flush()


def cmd_encode(args, out) -> int:
    try:
        fields = PacketFields.from_request(args.duration, args.center, args.bw)
    except ProtocolError as exc:
        raise CliError(f"unencodable request: {exc}", EXIT_ARGS) from exc
    symbols = encode_fields(fields)
    if args.json:
        _emit({"packet": str(fields), **fields.as_dict(), "symbols": [str(s) for s in symbols]}, out)
        return 0
    roles = ["preamble", "preamble", "duration", "freq digit", "freq digit", "freq digit", "freq digit", "bandwidth"]
    for i, (sym, role) in enumerate(zip(symbols, roles)):
        out.write(f"{i}  {sym}  {role}\n")
    out.write(f"duration {fields.duration_min} min, center {fields.center_freq_mhz} MHz, "
              f"bandwidth {fields.bandwidth_mhz} MHz\n")
    out.write(f"{fields}\n")
    return 0


def _scenario(args):
    if args.preset:
        scenario = PRESETS[args.preset]
    elif args.scenario:
        try:
            scenario = load_scenario(args.scenario)
        except ConfigError as exc:
            raise CliError(f"bad scenario: {exc}", EXIT_INPUT) from exc
    else:
        raise CliError("one of --scenario or --preset is required", EXIT_ARGS)
    if args.seed is not None:
        scenario = replace(scenario, rng_seed=args.seed)
    return scenario


def cmd_synth(args, out) -> int:
    scenario = _scenario(args)
    try:
        trace = synthesize_trace(scenario, args.samples)
    except (ProtocolError, ValueError) as exc:
        raise CliError(f"bad scenario: {exc}", EXIT_INPUT) from exc
    if args.out is None or str(args.out) == "-":
        out.write(tracefmt.format_csv(trace))
    elif tracefmt.is_binary_path(args.out):
        tracefmt.write_binary(trace, args.out)
    else:
        tracefmt.write_csv(trace, args.out)
    log.info("wrote %d samples", len(trace))
    return 0


def _samples(args, stats: dict):
    src = args.trace
    if src not in (None, "-") and tracefmt.is_binary_path(src):
        try:
            tr = tracefmt.read_binary(src)
        except (OSError, tracefmt.TraceFormatError) as exc:
            raise CliError(f"bad trace: {exc}", EXIT_INPUT) from exc
        stats["good"], stats["bad"] = len(tr), 0
        yield from zip(tr.t_us.tolist(), tr.power_db.tolist())
        return
    if src in (None, "-"):
        yield from tracefmt.iter_csv_samples(sys.stdin, stats)
        return
    try:
        fh = open(src)
    except OSError as exc:
        raise CliError(f"cannot read trace: {exc}", EXIT_INPUT) from exc
    with fh:
        yield from tracefmt.iter_csv_samples(fh, stats)


def cmd_detect(args, out) -> int:
    device = None
    if args.profile:
        try:
            device = Device(load_profile(args.profile))
        except ConfigError as exc:
            raise CliError(f"bad profile: {exc}", EXIT_INPUT) from exc
    det = Detector(DetectorConfig(threshold_k=args.threshold_k))
    times: deque = deque(maxlen=4096)
    keep = [] if args.figure else None
    stats: dict = {}

    def handle(outputs):
        for o in outputs:
            if keep is not None:
                keep.append(o)
            if isinstance(o, SymbolEvent):
                if args.events:
                    _emit(o.as_dict(), out)
                continue
            rec = o.as_dict()
            t_start = _time_at(times, det.n_samples, o.start_index)
            if t_start is not None:
                rec["t_us"] = t_start
            _emit(rec, out)
            if device is not None:
                now_min = (t_start or 0) / 60e6
                _emit({**action_dict(device.handle(o.fields, now_min)), "packet": str(o.fields)}, out)

    powers = [] if args.figure else None
    for t, p in _samples(args, stats):
        times.append(t)
        if powers is not None:
            powers.append(p)
        r = det.push_sample(p)
        if r:
            handle(r)
    handle(det.flush())

    if args.figure:
        from .report import plot_trace
        plot_trace(powers, keep, args.figure, max_samples=len(powers) or 1)
    try:
        tracefmt.check_bad_fraction(stats)
    except tracefmt.TraceFormatError as exc:
        raise CliError(f"bad trace: {exc}", EXIT_INPUT) from exc
    return 0


def _time_at(times: deque, n_seen: int, index: int):
    k = index - (n_seen - len(times))
    return times[k] if 0 <= k < len(times) else None


def cmd_mc(args, out) -> int:
    scenario = _scenario(args)
    seed = args.seed if args.seed is not None else scenario.rng_seed
    run = simulate_monte_carlo(scenario, args.packets, seed, DetectorConfig(threshold_k=args.threshold_k),
                               len_samples=args.samples)
    report = run.report.as_dict()
    text = json.dumps(report) if args.json else json.dumps(report, indent=2)
    out.write(text + "\n")
    if args.figures:
        from .report import write_mc_figures
        outdir = Path(args.figures)
        paths = write_mc_figures(run, outdir)
        (outdir / "mc_report.json").write_text(json.dumps(report, indent=2) + "\n")
        for p in paths:
            log.info("figure %s", p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpass", description="DPASS beacon encoder, channel simulator and detector")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="print the symbol sequence for a spectrum request")
    p.add_argument("--duration", type=int, required=True, help="requested minutes (rounded up)")
    p.add_argument("--center", type=int, required=True, help="center frequency, MHz")
    p.add_argument("--bw", type=int, required=True, help="requested bandwidth, MHz (rounded up)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_encode)

    def scenario_args(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--scenario", type=Path, help="scenario file")
        g.add_argument("--preset", choices=sorted(PRESETS), help="built-in scenario")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--samples", type=int, help="trace length in samples")

    p = sub.add_parser("synth", help="write a simulated RSSI trace")
    scenario_args(p)
    p.add_argument("--out", "-o", help="output file (.csv, or .bin for packed binary); default stdout")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("detect", help="detect packets in a trace file or stdin")
    p.add_argument("trace", nargs="?", default="-", help="trace file, '-' for stdin")
    p.add_argument("--profile", type=Path, help="device profile; adds one action line per packet")
    p.add_argument("--events", action="store_true", help="also print symbol events")
    p.add_argument("--threshold-k", type=float, default=DetectorConfig.threshold_k)
    p.add_argument("--figure", type=Path, help="write a trace/detection plot to this file")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON lines")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("mc", help="Monte-Carlo detection experiment")
    scenario_args(p)
    p.add_argument("--packets", type=int, default=104)
    p.add_argument("--threshold-k", type=float, default=DetectorConfig.threshold_k)
    p.add_argument("--json", action="store_true", help="single-line JSON")
    p.add_argument("--figures", type=Path, help="directory for report figures")
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None, out=None) -> int:
    logging.basicConfig(level=os.environ.get("DPASS_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "packets", 0) is not None and getattr(args, "packets", 0) < 0:
        print("dpass: --packets must be non-negative", file=sys.stderr)
        return EXIT_ARGS
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"dpass: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        # downstream closed early (e.g. `| head`); silence the interpreter's final flush
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
