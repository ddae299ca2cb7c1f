import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dpass.pn_codes import (
    ALL_SYMBOLS,
    ChipSequence,
    SymbolId,
    alphabet_matrix,
    canonical_alphabet,
    circular_autocorrelation,
    circular_cross_correlation,
    cross_talk_bound,
    generate_m_sequence,
    lfsr_period,
    primitive_polynomials,
)


def gf2_mulmod(a, b, mod):
    deg = mod.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= mod
    return r


def poly_order(p):
    """Smallest k with x^k = 1 mod p, by repeated multiplication in GF(2)[x]/p."""
    x = acc = 0b10
    for k in range(1, 64):
        if acc == 1:
            return k
        acc = gf2_mulmod(acc, x, p)
    return None


def recurrence_bits(taps, n):
    """a[k+6] = sum_i c_i a[k+i] over GF(2), with a[0..5] = 1."""
    a = [1] * 6
    coeffs = [(taps >> i) & 1 for i in range(6)]
    while len(a) < n:
        k = len(a) - 6
        a.append(sum(c * a[k + i] for i, c in enumerate(coeffs)) % 2)
    return a[:n]


# primitive degree-6 masks from the polynomial-order oracle above
PRIMITIVE = (0x43, 0x5B, 0x61, 0x67, 0x6D, 0x73)
# polynomial order 21; the LFSR period from the all-ones seed is 21 for the
# two irreducible ones (x^6+x^4+x^2+x+1 and its reciprocal)
ORDER_21 = (0x53, 0x57, 0x65, 0x75)
PERIOD_21 = (0x57, 0x75)


def test_oracle_agrees_with_frozen_values():
    degree6 = [0x41 | (m << 1) for m in range(32)]
    assert tuple(p for p in degree6 if poly_order(p) == 63) == PRIMITIVE
    assert tuple(p for p in degree6 if poly_order(p) == 21) == ORDER_21


def test_primitive_search_finds_six():
    assert primitive_polynomials() == PRIMITIVE


def brute_cycle_length(taps, seed=63):
    """Cycle length by stepping the register as a 6-bit state set."""
    seen = {}
    state = seed
    for step in range(100):
        if state in seen:
            return step - seen[state]
        seen[state] = step
        fb = bin(state & taps & 63).count("1") & 1
        state = (state >> 1) | (fb << 5)
    return None


@pytest.mark.parametrize("taps", ORDER_21)
def test_order_21_polys_rejected(taps):
    assert brute_cycle_length(taps) == lfsr_period(taps) != 63
    with pytest.raises(ValueError, match="not primitive"):
        generate_m_sequence(taps)


def test_x6_x_1_balance():
    seq = generate_m_sequence(0x43, 0b111111)
    assert int(np.sum(seq.chips == 1)) == 32


@pytest.mark.parametrize("taps", PRIMITIVE)
def test_matches_recurrence(taps):
    bits = recurrence_bits(taps, 63)
    assert list(generate_m_sequence(taps)) == [2 * b - 1 for b in bits]


@pytest.mark.parametrize("taps", PERIOD_21)
def test_period_21_rejected(taps):
    assert lfsr_period(taps) == 21
    with pytest.raises(ValueError, match="not primitive"):
        generate_m_sequence(taps)


def test_bad_inputs():
    with pytest.raises(ValueError):
        generate_m_sequence(0x43, 0)
    with pytest.raises(ValueError):
        generate_m_sequence(0x42)  # no constant term
    with pytest.raises(ValueError):
        generate_m_sequence(0x83)  # degree 7


@pytest.mark.parametrize("taps", PRIMITIVE)
@pytest.mark.parametrize("seed", [1, 0b101010, 63])
def test_period_visits_all_states(taps, seed):
    assert lfsr_period(taps, seed) == 63


def test_alphabet_shape_and_inverses():
    alpha = canonical_alphabet()
    assert list(alpha) == list(ALL_SYMBOLS)
    assert sum(not s.inverted for s in alpha) == 6
    assert sum(s.inverted for s in alpha) == 6
    for i in range(6):
        assert alpha[SymbolId(i, True)] == -alpha[SymbolId(i, False)]
    assert len(set(alpha.values())) == 12


@pytest.mark.parametrize("sym", ALL_SYMBOLS, ids=str)
def test_autocorrelation_and_balance(sym):
    seq = canonical_alphabet()[sym]
    ac = circular_autocorrelation(seq)
    assert ac[0] == 63
    assert np.all(ac[1:] == -1)
    assert int(seq.chips.sum()) == (-1 if sym.inverted else 1)


def brute_cross(a, b):
    return [sum(a[i] * b[(i + k) % 63] for i in range(63)) for k in range(63)]


def test_cross_correlation_definition():
    alpha = canonical_alphabet()
    a, b = list(alpha[SymbolId(0)]), list(alpha[SymbolId(3, True)])
    assert circular_cross_correlation(a, b).tolist() == brute_cross(a, b)


def test_cross_talk_bound():
    alpha = canonical_alphabet()
    worst = max(
        max(abs(v) for v in brute_cross(list(alpha[s]), list(alpha[t])))
        for s, t in itertools.product(ALL_SYMBOLS, repeat=2)
        if s.index != t.index
    )
    assert worst == 23
    assert cross_talk_bound() == worst < 63


def test_inverse_pair_peak():
    s = canonical_alphabet()[SymbolId(2)]
    assert circular_cross_correlation(s, s)[0] == 63
    assert circular_cross_correlation(s, -s)[0] == -63


def test_length_mismatch():
    with pytest.raises(ValueError):
        circular_cross_correlation([1] * 63, [1] * 62)


def test_chip_sequence_validation():
    with pytest.raises(ValueError):
        ChipSequence([1] * 62)
    with pytest.raises(ValueError):
        ChipSequence([1] * 62 + [0])
    seq = canonical_alphabet()[SymbolId(0)]
    with pytest.raises(ValueError):
        seq.chips[0] = -1


def test_symbol_names_roundtrip():
    for s in ALL_SYMBOLS:
        assert SymbolId.parse(str(s)) == s
        assert SymbolId.from_row(s.row) == s
    with pytest.raises(ValueError):
        SymbolId.parse("S7")


def test_alphabet_matrix_rows():
    m = alphabet_matrix()
    assert m.shape == (12, 63)
    assert np.array_equal(m[6:], -m[:6])


bipolar = st.lists(st.sampled_from([-1, 1]), min_size=63, max_size=63)


@given(bipolar, bipolar, st.integers(0, 62))
def test_cross_correlation_shift(a, b, shift):
    cc = circular_cross_correlation(a, b)
    shifted = circular_cross_correlation(a, np.roll(b, shift))
    assert np.array_equal(shifted, np.roll(cc, shift))
    # sum over lags factorizes
    assert cc.sum() == sum(a) * sum(b)
