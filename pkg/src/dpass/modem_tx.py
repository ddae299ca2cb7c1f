"""On-off keying of symbol chips into a power trace, one sample per chip."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pn_codes import SEQUENCE_LENGTH, ChipSequence, SymbolId, canonical_alphabet
from .protocol import PACKET_SYMBOLS
from .trace import PowerTrace

DEFAULT_CHIP_US = 5000


@dataclass(frozen=True)
class TxConfig:
    chip_duration_us: int = DEFAULT_CHIP_US
    on_power_db: float = 0.0
    off_power_db: float = -math.inf  # no added energy

    def __post_init__(self):
        if self.chip_duration_us <= 0:
            raise ValueError(f"chip duration must be positive, got {self.chip_duration_us} us")
        if not self.on_power_db > self.off_power_db:
            raise ValueError("on power must exceed off power")


def chip_pattern(symbols: Sequence[SymbolId], alphabet: dict[SymbolId, ChipSequence] | None = None) -> np.ndarray:
    """Concatenated chips of ``symbols`` as a boolean on/off mask, no guard gaps."""
    alphabet = alphabet or canonical_alphabet()
    if not symbols:
        return np.zeros(0, dtype=bool)
    return np.concatenate([alphabet[s].on_mask for s in symbols])


def modulate(
    symbols: Sequence[SymbolId],
    cfg: TxConfig = TxConfig(),
    t0_us: int = 0,
    alphabet: dict[SymbolId, ChipSequence] | None = None,
) -> PowerTrace:
    on = chip_pattern(symbols, alphabet)
    power = np.where(on, cfg.on_power_db, cfg.off_power_db)
    return PowerTrace.uniform(power, cfg.chip_duration_us, t0_us)


def packet_airtime(cfg: TxConfig | int = TxConfig()) -> int:
    """Air time of one packet in microseconds; ``cfg`` may be a chip duration in us."""
    if not isinstance(cfg, TxConfig):
        cfg = TxConfig(chip_duration_us=int(cfg))
    return PACKET_SYMBOLS * SEQUENCE_LENGTH * cfg.chip_duration_us


PACKET_CHIPS = PACKET_SYMBOLS * SEQUENCE_LENGTH
