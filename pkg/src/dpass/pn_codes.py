"""Degree-6 m-sequences and the 12-symbol DPASS alphabet.

Polynomials are given as bitmasks over the full polynomial, so
``x^6 + x + 1`` is ``0b1000011`` (0x43). Bit 6 and bit 0 must be set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

DEGREE = 6
SEQUENCE_LENGTH = (1 << DEGREE) - 1  # 63
ALL_ONES_SEED = SEQUENCE_LENGTH


class SymbolId(NamedTuple):
    index: int
    inverted: bool = False

    def __str__(self) -> str:
        return f"S{self.index}{'-' if self.inverted else '+'}"

    @classmethod
    def parse(cls, text: str) -> "SymbolId":
        text = text.strip()
        if len(text) != 3 or text[0] != "S" or text[2] not in "+-" or not text[1].isdigit():
            raise ValueError(f"not a symbol name: {text!r}")
        return cls(int(text[1]), text[2] == "-")

    @property
    def row(self) -> int:
        """Position in the symbol table: S0+..S5+ are 0..5, S0-..S5- are 6..11."""
        return self.index + (6 if self.inverted else 0)

    @classmethod
    def from_row(cls, row: int) -> "SymbolId":
        if not 0 <= row < 12:
            raise ValueError(f"symbol row out of range: {row}")
        return cls(row % 6, row >= 6)


ALL_SYMBOLS: tuple[SymbolId, ...] = tuple(SymbolId.from_row(r) for r in range(12))


@dataclass(frozen=True, eq=False)
class ChipSequence:
    """A 63-chip bipolar sequence. ``chips`` is a read-only int8 array."""

    chips: np.ndarray

    def __post_init__(self):
        chips = np.array(self.chips, dtype=np.int8)
        if chips.shape != (SEQUENCE_LENGTH,):
            raise ValueError(f"chip sequence must have {SEQUENCE_LENGTH} chips, got shape {chips.shape}")
        if not np.all(np.abs(chips) == 1):
            raise ValueError("chips must be +1 or -1")
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)

    def __len__(self) -> int:
        return SEQUENCE_LENGTH

    def __iter__(self):
        return iter(self.chips.tolist())

    def __getitem__(self, i):
        return self.chips[i]

    def __neg__(self) -> "ChipSequence":
        return ChipSequence(-self.chips)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChipSequence):
            return NotImplemented
        return bool(np.array_equal(self.chips, other.chips))

    def __hash__(self) -> int:
        return hash(self.chips.tobytes())

    def __array__(self, dtype=None, copy=None):
        return self.chips if dtype is None else self.chips.astype(dtype)

    def __repr__(self) -> str:
        bits = "".join("1" if c > 0 else "0" for c in self.chips)
        return f"ChipSequence({bits})"

    @property
    def on_mask(self) -> np.ndarray:
        return self.chips > 0


def _check_taps(taps: int) -> None:
    if taps >> DEGREE != 1 or not taps & 1:
        raise ValueError(f"taps {taps:#x} is not a degree-{DEGREE} polynomial with nonzero constant term")


def lfsr_bits(taps: int, seed: int, n: int) -> tuple[list[int], int]:
    """Run the Fibonacci LFSR for ``n`` steps.

    The register holds ``a[k] .. a[k+5]`` with ``a[k]`` in bit 0; the output
    is ``a[k]`` and the feedback is ``a[k+6] = sum(c_i * a[k+i])`` over the
    lower coefficients of ``taps``. Returns the output bits and the final state.
    """
    feedback_mask = taps & SEQUENCE_LENGTH
    state = seed
    out = []
    for _ in range(n):
        out.append(state & 1)
        fb = bin(state & feedback_mask).count("1") & 1
        state = (state >> 1) | (fb << (DEGREE - 1))
    return out, state


def lfsr_period(taps: int, seed: int = ALL_ONES_SEED) -> int:
    """Number of steps until the register returns to ``seed``."""
    _check_taps(taps)
    if not 0 < seed <= SEQUENCE_LENGTH:
        raise ValueError(f"seed must be a nonzero {DEGREE}-bit state, got {seed}")
    state = seed
    for period in range(1, SEQUENCE_LENGTH + 1):
        _, state = lfsr_bits(taps, state, 1)
        if state == seed:
            return period
    # only reachable for taps whose state map is not a permutation
    raise ValueError(f"taps {taps:#x} does not cycle back to the seed")


def generate_m_sequence(taps: int, seed: int = ALL_ONES_SEED) -> ChipSequence:
    """Return the 63-chip bipolar output of the LFSR (bit 1 -> +1, bit 0 -> -1).

    Raises ``ValueError`` for a zero seed or a polynomial whose period is not 63.
    """
    if seed == 0:
        raise ValueError("LFSR seed must be nonzero")
    period = lfsr_period(taps, seed)
    if period != SEQUENCE_LENGTH:
        raise ValueError(f"taps {taps:#x} is not primitive (period {period}, expected {SEQUENCE_LENGTH})")
    bits, _ = lfsr_bits(taps, seed, SEQUENCE_LENGTH)
    return ChipSequence(2 * np.array(bits, dtype=np.int8) - 1)


@lru_cache(maxsize=None)
def primitive_polynomials() -> tuple[int, ...]:
    """All primitive degree-6 tap masks, ascending, found by period search."""
    found = []
    for middle in range(1 << (DEGREE - 1)):
        taps = (1 << DEGREE) | (middle << 1) | 1
        if lfsr_period(taps) == SEQUENCE_LENGTH:
            found.append(taps)
    return tuple(found)


@lru_cache(maxsize=None)
def canonical_alphabet() -> dict[SymbolId, ChipSequence]:
    """The 12 DPASS symbols: m-sequence ``i`` (ascending tap order, all-ones seed) and its negation."""
    alphabet = {}
    polys = primitive_polynomials()
    for i, taps in enumerate(polys):
        seq = generate_m_sequence(taps, ALL_ONES_SEED)
        alphabet[SymbolId(i, False)] = seq
        alphabet[SymbolId(i, True)] = -seq
    return {s: alphabet[s] for s in ALL_SYMBOLS}


def alphabet_matrix(alphabet: dict[SymbolId, ChipSequence] | None = None) -> np.ndarray:
    """12 x 63 float matrix of chips, rows in table order."""
    alphabet = alphabet or canonical_alphabet()
    return np.stack([alphabet[s].chips for s in ALL_SYMBOLS]).astype(np.float64)


def circular_cross_correlation(a, b) -> np.ndarray:
    """``out[k] = sum_i a[i] * b[(i + k) % 63]``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != (SEQUENCE_LENGTH,) or b.shape != (SEQUENCE_LENGTH,):
        raise ValueError(f"both sequences must have length {SEQUENCE_LENGTH}, got {a.shape} and {b.shape}")
    return np.array([int(np.dot(a, np.roll(b, -k))) for k in range(SEQUENCE_LENGTH)])


def circular_autocorrelation(a) -> np.ndarray:
    return circular_cross_correlation(a, a)


def cross_talk_bound(alphabet: dict[SymbolId, ChipSequence] | None = None) -> int:
    """Worst |circular cross-correlation| between two symbols that are neither equal nor inverse."""
    alphabet = alphabet or canonical_alphabet()
    worst = 0
    for s, a in alphabet.items():
        for t, b in alphabet.items():
            if s.index == t.index:
                continue
            worst = max(worst, int(np.max(np.abs(circular_cross_correlation(a, b)))))
    return worst
