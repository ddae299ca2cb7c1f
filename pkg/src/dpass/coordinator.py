"""Spectrum-sharing decisions for a device that decoded a DPASS packet."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

from .protocol import PacketFields

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeviceProfile:
    current_center_mhz: int
    channel_bw_mhz: int
    alternate_channels_mhz: tuple[int, ...] = ()
    can_sleep: bool = False
    device_kind: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alternate_channels_mhz", tuple(self.alternate_channels_mhz))
        if self.channel_bw_mhz <= 0:
            raise ValueError("channel bandwidth must be positive")
        if self.current_center_mhz in self.alternate_channels_mhz:
            raise ValueError("alternate channels must exclude the current channel")


@dataclass(frozen=True)
class SwitchChannel:
    target_mhz: int
    kind = "switch_channel"


@dataclass(frozen=True)
class Sleep:
    duration_min: int
    kind = "sleep"


@dataclass(frozen=True)
class NoAction:
    warning: bool = False
    kind = "no_action"


SpectrumAction = Union[SwitchChannel, Sleep, NoAction]


def action_dict(action: SpectrumAction) -> dict:
    d = {"type": "action", "action": action.kind}
    if isinstance(action, SwitchChannel):
        d["target_mhz"] = action.target_mhz
    elif isinstance(action, Sleep):
        d["duration_min"] = action.duration_min
    else:
        d["warning"] = action.warning
    return d


def bands_overlap(center_a: int, bw_a: int, center_b: int, bw_b: int) -> bool:
    """Half-open ``[c - bw/2, c + bw/2)`` intersection, computed on doubled integers."""
    lo_a, hi_a = 2 * center_a - bw_a, 2 * center_a + bw_a
    lo_b, hi_b = 2 * center_b - bw_b, 2 * center_b + bw_b
    return lo_a < hi_b and lo_b < hi_a


def overlaps(packet: PacketFields, profile: DeviceProfile) -> bool:
    return bands_overlap(packet.center_freq_mhz, packet.bandwidth_mhz,
                         profile.current_center_mhz, profile.channel_bw_mhz)


def decide_action(packet: PacketFields, profile: DeviceProfile) -> SpectrumAction:
    if not overlaps(packet, profile):
        return NoAction()
    for alt in profile.alternate_channels_mhz:
        if not bands_overlap(packet.center_freq_mhz, packet.bandwidth_mhz, alt, profile.channel_bw_mhz):
            return SwitchChannel(alt)
    if profile.can_sleep:
        return Sleep(packet.duration_min)
    log.warning("%s device on %d MHz can neither switch nor sleep for %s",
                profile.device_kind or "unnamed", profile.current_center_mhz, packet)
    return NoAction(warning=True)


@dataclass
class Device:
    """A device applying decisions over time. Overlapping sleeps extend to the later deadline."""

    profile: DeviceProfile
    sleep_until_min: float | None = None
    history: list = field(default_factory=list)

    def handle(self, packet: PacketFields, now_min: float = 0.0) -> SpectrumAction:
        action = decide_action(packet, self.profile)
        if isinstance(action, SwitchChannel):
            self.profile = DeviceProfile(
                action.target_mhz,
                self.profile.channel_bw_mhz,
                tuple(c for c in self.profile.alternate_channels_mhz if c != action.target_mhz)
                + (self.profile.current_center_mhz,),
                self.profile.can_sleep,
                self.profile.device_kind,
            )
        elif isinstance(action, Sleep):
            deadline = now_min + action.duration_min
            if self.sleep_until_min is not None and self.sleep_until_min > now_min:
                log.info("already asleep until %.1f min; extending to %.1f",
                         self.sleep_until_min, max(deadline, self.sleep_until_min))
                deadline = max(deadline, self.sleep_until_min)
            self.sleep_until_min = deadline
        self.history.append((now_min, action))
        return action

    def is_asleep(self, now_min: float) -> bool:
        return self.sleep_until_min is not None and now_min < self.sleep_until_min


# example profiles: an access-point client that can move to 5 GHz, and a LoRa node
WIFI_24_PROFILE = DeviceProfile(2412, 20, (5180, 5500), can_sleep=False, device_kind="wifi")
WIFI_5_PROFILE = DeviceProfile(5885, 20, (5180, 5500), can_sleep=False, device_kind="wifi")
LORA_PROFILE = DeviceProfile(915, 2, (), can_sleep=True, device_kind="lora")
