"""DPASS packet grammar: preamble, duration, four frequency digits, bandwidth.

Each payload position reads the same 12 symbols through a different column
of the symbol table. ``S5-`` is the pilot and carries no value anywhere.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import Sequence

from .pn_codes import SymbolId

PILOT = SymbolId(5, True)
PREAMBLE: tuple[SymbolId, SymbolId] = (SymbolId(5, True), SymbolId(5, False))
PACKET_SYMBOLS = 8
FREQ_DIGITS = 4
MAX_CENTER_MHZ = 10**FREQ_DIGITS - 1

# table order: S0+ .. S5+, S0- .. S4-  (S5- is the pilot)
DURATIONS_MIN = (5, 10, 20, 40, 60, 90, 120, 180, 240, 300, 360)
FREQ_DIGIT_VALUES = tuple(range(11))
BANDWIDTHS_MHZ = (10, 20, 40, 80, 160, 320, 640)

COLUMNS = {
    "duration": DURATIONS_MIN,
    "freq_digit": FREQ_DIGIT_VALUES,
    "bandwidth": BANDWIDTHS_MHZ,
}


class ProtocolError(ValueError):
    pass


class UnencodableError(ProtocolError):
    pass


class ReservedSymbolError(ProtocolError):
    """The pilot symbol was read as a value."""


class UndefinedSymbolError(ProtocolError):
    """The symbol has no meaning in this column (a '-' table entry)."""


class PacketDecodeError(ProtocolError):
    pass


class NotAPacketError(PacketDecodeError):
    pass


class InvalidDurationError(PacketDecodeError):
    pass


class InvalidDigitError(PacketDecodeError):
    pass


class InvalidBandwidthError(PacketDecodeError):
    pass


def table_lookup(column: str, symbol: SymbolId) -> int:
    """Value of ``symbol`` in a protocol column."""
    values = COLUMNS[column]
    if symbol == PILOT:
        raise ReservedSymbolError(f"{symbol} is the pilot and has no {column} value")
    if symbol.row >= len(values):
        raise UndefinedSymbolError(f"{symbol} has no {column} value")
    return values[symbol.row]


def table_symbol(column: str, value: int) -> SymbolId:
    """Inverse of :func:`table_lookup`."""
    try:
        row = COLUMNS[column].index(value)
    except ValueError:
        raise UnencodableError(f"{value} is not a {column} table value") from None
    return SymbolId.from_row(row)


def _round_up(values: Sequence[int], requested: int, what: str) -> int:
    if requested < 1 or requested > values[-1]:
        raise UnencodableError(f"{what} {requested} outside 1..{values[-1]}")
    return values[bisect.bisect_left(values, requested)]


def quantize_duration(duration_min: int) -> int:
    return _round_up(DURATIONS_MIN, duration_min, "duration")


def quantize_bandwidth(bandwidth_mhz: int) -> int:
    return _round_up(BANDWIDTHS_MHZ, bandwidth_mhz, "bandwidth")


_CANONICAL = re.compile(r"DPASS\{dur=(\d+)min,center=(\d+)MHz,bw=(\d+)MHz\}")


@dataclass(frozen=True)
class PacketFields:
    duration_min: int
    center_freq_mhz: int
    bandwidth_mhz: int

    def __post_init__(self):
        if self.duration_min not in DURATIONS_MIN:
            raise ValueError(f"duration {self.duration_min} min is not a table value")
        if not 0 <= self.center_freq_mhz <= MAX_CENTER_MHZ:
            raise ValueError(f"center frequency {self.center_freq_mhz} MHz outside 0..{MAX_CENTER_MHZ}")
        if self.bandwidth_mhz not in BANDWIDTHS_MHZ:
            raise ValueError(f"bandwidth {self.bandwidth_mhz} MHz is not a table value")

    @classmethod
    def from_request(cls, duration_min: int, center_freq_mhz: int, bandwidth_mhz: int) -> "PacketFields":
        """Round duration and bandwidth up to the next table value."""
        if not 0 <= center_freq_mhz <= MAX_CENTER_MHZ:
            raise UnencodableError(f"center frequency {center_freq_mhz} MHz outside 0..{MAX_CENTER_MHZ}")
        return cls(quantize_duration(duration_min), center_freq_mhz, quantize_bandwidth(bandwidth_mhz))

    @classmethod
    def parse(cls, text: str) -> "PacketFields":
        m = _CANONICAL.fullmatch(text.strip())
        if not m:
            raise ValueError(f"not a canonical packet: {text!r}")
        return cls(*(int(g) for g in m.groups()))

    def __str__(self) -> str:
        return f"DPASS{{dur={self.duration_min}min,center={self.center_freq_mhz}MHz,bw={self.bandwidth_mhz}MHz}}"

    def as_dict(self) -> dict:
        return {
            "duration_min": self.duration_min,
            "center_freq_mhz": self.center_freq_mhz,
            "bandwidth_mhz": self.bandwidth_mhz,
        }


def encode_fields(fields: PacketFields) -> tuple[SymbolId, ...]:
    digits = f"{fields.center_freq_mhz:0{FREQ_DIGITS}d}"
    return (
        *PREAMBLE,
        table_symbol("duration", fields.duration_min),
        *(table_symbol("freq_digit", int(d)) for d in digits),
        table_symbol("bandwidth", fields.bandwidth_mhz),
    )


def encode_packet(duration_min: int, center_freq_mhz: int, bandwidth_mhz: int) -> tuple[SymbolId, ...]:
    """Encode a spectrum request as the 8-symbol packet.

    >>> [str(s) for s in encode_packet(50, 5890, 10)]
    ['S5-', 'S5+', 'S4+', 'S5+', 'S2-', 'S3-', 'S0+', 'S0+']
    """
    return encode_fields(PacketFields.from_request(duration_min, center_freq_mhz, bandwidth_mhz))


def decode_symbols(symbols: Sequence[SymbolId]) -> PacketFields:
    if len(symbols) != PACKET_SYMBOLS:
        raise NotAPacketError(f"a packet has {PACKET_SYMBOLS} symbols, got {len(symbols)}")
    if tuple(symbols[:2]) != PREAMBLE:
        raise NotAPacketError(f"bad preamble {' '.join(map(str, symbols[:2]))}")
    dur_sym, *digit_syms, bw_sym = symbols[2:]

    try:
        duration = table_lookup("duration", dur_sym)
    except ProtocolError as exc:
        raise InvalidDurationError(str(exc)) from exc

    center = 0
    for sym in digit_syms:
        try:
            digit = table_lookup("freq_digit", sym)
        except ProtocolError as exc:
            raise InvalidDigitError(str(exc)) from exc
        if digit > 9:
            raise InvalidDigitError(f"{sym} carries digit value {digit}, not a decimal digit")
        center = center * 10 + digit

    try:
        bandwidth = table_lookup("bandwidth", bw_sym)
    except ProtocolError as exc:
        raise InvalidBandwidthError(str(exc)) from exc

    return PacketFields(duration, center, bandwidth)
