"""Scenario and device-profile files.

Both use flat ``key = value`` sections (INI syntax)::

    [channel]
    preset = baseline          ; optional base scenario
    noise_floor_db = -95
    awgn_std_db = 5.57
    quantization_step_db = 1
    jitter_chips_std = 0
    seed = 7
    len_samples = 1200
    rx_power_db = -75          ; default packet power, also the Monte-Carlo power
    gap_min_samples = 126
    gap_max_samples = 630
    deaf_duty_cycle = 0.01
    deaf_len_samples = 20
    chip_duration_us = 5000

    [packet.1]
    start_sample = 100
    duration_min = 50
    center_mhz = 5890
    bw_mhz = 10
    rx_power_db = -75          ; optional

    [interferer.1]
    power_db = -78
    duty_cycle = 0.5
    burst_len_samples = 4
    defers_to_busy_channel = yes

    [deaf.1]
    start_sample = 2000
    len_samples = 20

    [device]
    kind = wifi
    center_mhz = 2412
    channel_bw_mhz = 20
    alternates_mhz = 5180, 5500
    can_sleep = no
"""

from __future__ import annotations

import configparser
from dataclasses import replace
from pathlib import Path

from .channel_sim import PRESETS, ChannelScenario, InterfererModel, ScheduledPacket
from .coordinator import DeviceProfile


class ConfigError(ValueError):
    pass


_CHANNEL_KEYS = {
    "noise_floor_db": ("noise_floor_db", float),
    "awgn_std_db": ("awgn_std_db_equivalent", float),
    "quantization_step_db": ("quantization_step_db", float),
    "jitter_chips_std": ("jitter_chips_std", float),
    "seed": ("rng_seed", int),
    "len_samples": ("len_samples", int),
    "rx_power_db": ("rx_power_db", float),
    "gap_min_samples": ("gap_min_samples", int),
    "gap_max_samples": ("gap_max_samples", int),
    "deaf_duty_cycle": ("deaf_duty_cycle", float),
    "deaf_len_samples": ("deaf_len_samples", int),
    "chip_duration_us": ("chip_duration_us", int),
    "description": ("description", str),
}


def _parser(text: str, source: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    return cp


def _read(path) -> tuple[str, str]:
    try:
        return Path(path).read_text(), str(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _get(section, key: str, conv, where: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"[{where}] missing {key}")
        return default
    try:
        if conv is bool:
            return section.getboolean(key)
        return conv(section[key])
    except ValueError as exc:
        raise ConfigError(f"[{where}] bad {key}: {section[key]!r}") from exc


def _check_keys(section, allowed, where: str) -> None:
    extra = set(section) - set(allowed)
    if extra:
        raise ConfigError(f"[{where}] unknown keys: {', '.join(sorted(extra))}")


def parse_scenario(text: str, source: str = "<scenario>") -> ChannelScenario:
    cp = _parser(text, source)
    ch = cp["channel"] if cp.has_section("channel") else {}
    _check_keys(ch, set(_CHANNEL_KEYS) | {"preset"}, "channel")
    base = ChannelScenario()
    if "preset" in ch:
        try:
            base = PRESETS[ch["preset"]]
        except KeyError:
            raise ConfigError(f"unknown preset {ch['preset']!r}; choose from {', '.join(PRESETS)}") from None
    kw = {}
    for key, (attr, conv) in _CHANNEL_KEYS.items():
        if key in ch:
            kw[attr] = _get(ch, key, conv, "channel")
    base = replace(base, **kw) if kw else base

    packets, interferers, deaf = list(base.packet_schedule), list(base.interferers), list(base.deaf_periods)
    for name in cp.sections():
        sec = cp[name]
        kind = name.split(".", 1)[0]
        if kind == "channel":
            continue
        if kind == "packet":
            _check_keys(sec, {"start_sample", "duration_min", "center_mhz", "bw_mhz", "rx_power_db"}, name)
            packets.append(ScheduledPacket(
                _get(sec, "start_sample", int, name),
                _get(sec, "duration_min", int, name),
                _get(sec, "center_mhz", int, name),
                _get(sec, "bw_mhz", int, name),
                _get(sec, "rx_power_db", float, name, base.rx_power_db),
            ))
        elif kind == "interferer":
            _check_keys(sec, {"power_db", "duty_cycle", "burst_len_samples", "defers_to_busy_channel"}, name)
            try:
                interferers.append(InterfererModel(
                    _get(sec, "power_db", float, name),
                    _get(sec, "duty_cycle", float, name),
                    _get(sec, "burst_len_samples", int, name, 1),
                    _get(sec, "defers_to_busy_channel", bool, name, True),
                ))
            except ValueError as exc:
                raise ConfigError(f"[{name}] {exc}") from exc
        elif kind == "deaf":
            _check_keys(sec, {"start_sample", "len_samples"}, name)
            deaf.append((_get(sec, "start_sample", int, name), _get(sec, "len_samples", int, name)))
        else:
            raise ConfigError(f"unknown section [{name}]")
    try:
        return replace(base, packet_schedule=tuple(packets), interferers=tuple(interferers),
                       deaf_periods=tuple(deaf))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(path) -> ChannelScenario:
    return parse_scenario(*_read(path))


def parse_profile(text: str, source: str = "<profile>") -> DeviceProfile:
    cp = _parser(text, source)
    if not cp.has_section("device"):
        raise ConfigError(f"{source}: missing [device] section")
    sec = cp["device"]
    _check_keys(sec, {"kind", "center_mhz", "channel_bw_mhz", "alternates_mhz", "can_sleep"}, "device")
    alts_text = sec.get("alternates_mhz", "").strip()
    try:
        alts = tuple(int(a) for a in alts_text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"[device] bad alternates_mhz: {alts_text!r}") from exc
    try:
        return DeviceProfile(
            _get(sec, "center_mhz", int, "device"),
            _get(sec, "channel_bw_mhz", int, "device"),
            alts,
            _get(sec, "can_sleep", bool, "device", False),
            sec.get("kind", ""),
        )
    except ValueError as exc:
        raise ConfigError(f"[device] {exc}") from exc


def load_profile(path) -> DeviceProfile:
    return parse_profile(*_read(path))
