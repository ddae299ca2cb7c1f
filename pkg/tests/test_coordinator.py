import pytest
from hypothesis import given, strategies as st

from dpass.coordinator import (
    LORA_PROFILE,
    WIFI_24_PROFILE,
    Device,
    DeviceProfile,
    NoAction,
    Sleep,
    SwitchChannel,
    action_dict,
    bands_overlap,
    decide_action,
    overlaps,
)
from dpass.protocol import BANDWIDTHS_MHZ, DURATIONS_MIN, PacketFields

EXAMPLE = PacketFields(60, 5890, 10)


def test_overlap_examples():
    assert overlaps(EXAMPLE, DeviceProfile(5885, 20))
    assert not overlaps(EXAMPLE, DeviceProfile(2412, 20))
    # request [5885, 5895) against device [5895, 5915): touching edges do not overlap
    assert not overlaps(EXAMPLE, DeviceProfile(5905, 20))
    assert not overlaps(EXAMPLE, DeviceProfile(5875, 20))
    assert overlaps(EXAMPLE, DeviceProfile(5904, 20))


def test_wifi_switches_to_5ghz():
    pkt = PacketFields(60, 2437, 80)  # wideband beacon across 2.4 GHz
    assert decide_action(pkt, WIFI_24_PROFILE) == SwitchChannel(5180)


def test_first_fit_skips_overlapping_alternate():
    prof = DeviceProfile(5885, 20, (5890, 5180, 5500))
    assert decide_action(EXAMPLE, prof) == SwitchChannel(5180)


def test_lora_sleeps():
    prof = DeviceProfile(915, 2, (), can_sleep=True, device_kind="lora")
    assert decide_action(PacketFields(60, 915, 10), prof) == Sleep(60)
    assert decide_action(EXAMPLE, LORA_PROFILE) == NoAction()


def test_stuck_device_warns():
    action = decide_action(EXAMPLE, DeviceProfile(5890, 20, (5885,)))
    assert action == NoAction(warning=True)
    assert action_dict(action) == {"type": "action", "action": "no_action", "warning": True}


def test_action_dicts():
    assert action_dict(SwitchChannel(5180)) == {"type": "action", "action": "switch_channel", "target_mhz": 5180}
    assert action_dict(Sleep(60)) == {"type": "action", "action": "sleep", "duration_min": 60}


def test_profile_validation():
    with pytest.raises(ValueError):
        DeviceProfile(2412, 0)
    with pytest.raises(ValueError):
        DeviceProfile(2412, 20, (2412,))


def test_sleep_extends_to_later_deadline():
    dev = Device(DeviceProfile(915, 2, (), can_sleep=True))
    dev.handle(PacketFields(60, 915, 10), now_min=0)
    dev.handle(PacketFields(10, 915, 10), now_min=5)
    assert dev.sleep_until_min == 60
    dev.handle(PacketFields(120, 915, 10), now_min=30)
    assert dev.sleep_until_min == 150
    assert dev.is_asleep(149) and not dev.is_asleep(150)


def test_switch_updates_device_channel():
    dev = Device(WIFI_24_PROFILE)
    dev.handle(PacketFields(60, 2437, 80))
    assert dev.profile.current_center_mhz == 5180
    assert 2412 in dev.profile.alternate_channels_mhz


fields = st.builds(PacketFields, st.sampled_from(DURATIONS_MIN), st.integers(0, 9999), st.sampled_from(BANDWIDTHS_MHZ))
profiles = st.builds(
    lambda c, bw, alts, sleep: DeviceProfile(c, bw, tuple(a for a in alts if a != c), sleep),
    st.integers(0, 9999), st.integers(1, 160), st.lists(st.integers(0, 9999), max_size=5), st.booleans(),
)


@given(fields, profiles)
def test_switch_target_never_overlaps(pkt, prof):
    action = decide_action(pkt, prof)
    if isinstance(action, SwitchChannel):
        assert not bands_overlap(pkt.center_freq_mhz, pkt.bandwidth_mhz, action.target_mhz, prof.channel_bw_mhz)
    if isinstance(action, Sleep):
        assert action.duration_min == pkt.duration_min
    if not overlaps(pkt, prof):
        assert action == NoAction()


@given(st.integers(0, 9999), st.integers(1, 700), st.integers(0, 9999), st.integers(1, 700))
def test_overlap_symmetric(c1, b1, c2, b2):
    assert bands_overlap(c1, b1, c2, b2) == bands_overlap(c2, b2, c1, b1)
    lo1, hi1, lo2, hi2 = c1 - b1 / 2, c1 + b1 / 2, c2 - b2 / 2, c2 + b2 / 2
    assert bands_overlap(c1, b1, c2, b2) == (lo1 < hi2 and lo2 < hi1)
