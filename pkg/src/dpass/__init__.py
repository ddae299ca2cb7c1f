"""DPASS: on-off-keyed m-sequence spectrum-sharing beacons decoded from RSSI."""

from .channel_sim import (
    ChannelScenario,
    DetectionReport,
    InterfererModel,
    ScheduledPacket,
    run_monte_carlo,
    synthesize_trace,
)
from .coordinator import DeviceProfile, NoAction, Sleep, SwitchChannel, decide_action, overlaps
from .detector import Detector, DetectorConfig, PacketDetection, SymbolEvent
from .modem_tx import TxConfig, modulate, packet_airtime
from .pn_codes import ChipSequence, SymbolId, canonical_alphabet, generate_m_sequence
from .protocol import PacketFields, decode_symbols, encode_packet

__version__ = "0.1.0"

__all__ = [
    "ChannelScenario", "ChipSequence", "DetectionReport", "Detector", "DetectorConfig", "DeviceProfile",
    "InterfererModel", "NoAction", "PacketDetection", "PacketFields", "ScheduledPacket", "Sleep",
    "SwitchChannel", "SymbolEvent", "SymbolId", "TxConfig", "canonical_alphabet", "decide_action",
    "decode_symbols", "encode_packet", "generate_m_sequence", "modulate", "overlaps", "packet_airtime",
    "run_monte_carlo", "synthesize_trace",
]
