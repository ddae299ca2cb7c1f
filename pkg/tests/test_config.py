import textwrap

import pytest

from dpass.channel_sim import PRESETS, InterfererModel, ScheduledPacket
from dpass.config import ConfigError, parse_profile, parse_scenario

SCENARIO = textwrap.dedent("""
    [channel]
    noise_floor_db = -92
    awgn_std_db = 3
    seed = 9
    len_samples = 1500

    [packet.1]
    start_sample = 100
    duration_min = 50
    center_mhz = 5890
    bw_mhz = 10
    rx_power_db = -70

    [interferer.wifi]
    power_db = -80
    duty_cycle = 0.5
    burst_len_samples = 4
    defers_to_busy_channel = no

    [deaf.1]
    start_sample = 1000
    len_samples = 20
""")


def test_parse_scenario():
    sc = parse_scenario(SCENARIO)
    assert sc.noise_floor_db == -92 and sc.awgn_std_db_equivalent == 3 and sc.rng_seed == 9
    assert sc.len_samples == 1500
    assert sc.packet_schedule == (ScheduledPacket(100, 50, 5890, 10, -70.0),)
    assert sc.interferers == (InterfererModel(-80, 0.5, 4, False),)
    assert sc.deaf_periods == ((1000, 20),)


def test_preset_base():
    sc = parse_scenario("[channel]\npreset = interference\nseed = 4\n")
    assert sc.interferers == PRESETS["interference"].interferers and sc.rng_seed == 4


def test_packet_power_defaults_to_channel():
    sc = parse_scenario("[channel]\nrx_power_db = -60\n[packet.a]\nstart_sample=0\nduration_min=5\ncenter_mhz=1\nbw_mhz=10\n")
    assert sc.packet_schedule[0].rx_power_db == -60


@pytest.mark.parametrize("text", [
    "[channel]\nbogus = 1\n",
    "[channel]\nseed = many\n",
    "[weird]\nx = 1\n",
    "[channel]\npreset = nope\n",
    "[packet.1]\nstart_sample = 0\n",
    "[interferer.1]\npower_db = 0\nduty_cycle = 2\n",
    "not an ini file",
])
def test_bad_scenarios(text):
    with pytest.raises(ConfigError):
        parse_scenario(text)


def test_profile():
    prof = parse_profile("[device]\nkind = wifi\ncenter_mhz = 2412\nchannel_bw_mhz = 20\n"
                         "alternates_mhz = 5180, 5500\ncan_sleep = no\n")
    assert prof.alternate_channels_mhz == (5180, 5500) and not prof.can_sleep and prof.device_kind == "wifi"
    with pytest.raises(ConfigError):
        parse_profile("[device]\ncenter_mhz = 2412\n")
    with pytest.raises(ConfigError):
        parse_profile("[other]\n")
