import pytest
from hypothesis import given, strategies as st

from dpass.pn_codes import ALL_SYMBOLS, SymbolId
from dpass.protocol import (
    BANDWIDTHS_MHZ,
    DURATIONS_MIN,
    PILOT,
    PREAMBLE,
    InvalidBandwidthError,
    InvalidDigitError,
    InvalidDurationError,
    NotAPacketError,
    PacketFields,
    ReservedSymbolError,
    UndefinedSymbolError,
    UnencodableError,
    decode_symbols,
    encode_fields,
    encode_packet,
    quantize_bandwidth,
    quantize_duration,
    table_lookup,
    table_symbol,
)


def S(name):
    return SymbolId.parse(name)


EXAMPLE_PAYLOAD = [S("S4+"), S("S5+"), S("S2-"), S("S3-"), S("S0+"), S("S0+")]


def test_worked_example_encodes():
    assert list(encode_packet(50, 5890, 10)) == [*PREAMBLE, *EXAMPLE_PAYLOAD]


def test_worked_example_decodes():
    assert decode_symbols([*PREAMBLE, *EXAMPLE_PAYLOAD]) == PacketFields(60, 5890, 10)


def test_all_minimum():
    assert list(encode_packet(5, 0, 10)) == [*PREAMBLE] + [S("S0+")] * 6


@pytest.mark.parametrize("args", [(361, 100, 10), (0, 100, 10), (60, 10000, 10), (60, -1, 10), (60, 100, 641), (60, 100, 0)])
def test_unencodable(args):
    with pytest.raises(UnencodableError):
        encode_packet(*args)


@pytest.mark.parametrize("column,sym,value", [
    ("duration", "S3-", 300),
    ("duration", "S0+", 5),
    ("duration", "S4-", 360),
    ("bandwidth", "S0-", 640),
    ("bandwidth", "S0+", 10),
    ("freq_digit", "S4-", 10),
    ("freq_digit", "S3-", 9),
])
def test_table_values(column, sym, value):
    assert table_lookup(column, S(sym)) == value
    assert table_symbol(column, value) == S(sym)


@pytest.mark.parametrize("column", ["duration", "freq_digit", "bandwidth"])
def test_pilot_reserved(column):
    with pytest.raises(ReservedSymbolError):
        table_lookup(column, PILOT)


@pytest.mark.parametrize("sym", ["S1-", "S2-", "S3-", "S4-"])
def test_bandwidth_dash_entries(sym):
    with pytest.raises(UndefinedSymbolError):
        table_lookup("bandwidth", S(sym))


def test_decode_errors():
    with pytest.raises(NotAPacketError):
        decode_symbols([S("S5+"), S("S5-"), *EXAMPLE_PAYLOAD])
    with pytest.raises(NotAPacketError):
        decode_symbols([*PREAMBLE, *EXAMPLE_PAYLOAD[:-1]])
    with pytest.raises(InvalidDurationError):
        decode_symbols([*PREAMBLE, PILOT, *EXAMPLE_PAYLOAD[1:]])
    for bad in ("S4-", "S5-"):
        with pytest.raises(InvalidDigitError):
            decode_symbols([*PREAMBLE, S("S4+"), S(bad), *EXAMPLE_PAYLOAD[2:]])
    for bad in ("S1-", "S2-", "S3-", "S4-", "S5-"):
        with pytest.raises(InvalidBandwidthError):
            decode_symbols([*PREAMBLE, *EXAMPLE_PAYLOAD[:-1], S(bad)])


def test_quantize_minimal_round_up():
    for req in range(1, 361):
        q = quantize_duration(req)
        assert q >= req
        assert all(d < req for d in DURATIONS_MIN if d < q)
    for req in range(1, 641):
        q = quantize_bandwidth(req)
        assert q >= req
        assert all(b < req for b in BANDWIDTHS_MHZ if b < q)


def test_canonical_text():
    f = PacketFields(60, 5890, 10)
    assert str(f) == "DPASS{dur=60min,center=5890MHz,bw=10MHz}"
    assert PacketFields.parse(str(f)) == f


def test_fields_validate():
    with pytest.raises(ValueError):
        PacketFields(50, 5890, 10)
    with pytest.raises(ValueError):
        PacketFields(60, 5890, 30)


grid_fields = st.builds(PacketFields, st.sampled_from(DURATIONS_MIN), st.integers(0, 9999),
                        st.sampled_from(BANDWIDTHS_MHZ))


@given(grid_fields)
def test_round_trip(f):
    syms = encode_fields(f)
    assert len(syms) == 8 and tuple(syms[:2]) == PREAMBLE
    assert decode_symbols(syms) == f


@given(st.integers(1, 360), st.integers(0, 9999), st.integers(1, 640))
def test_any_request_decodes(d, c, b):
    f = decode_symbols(encode_packet(d, c, b))
    assert f.duration_min >= d and f.bandwidth_mhz >= b and f.center_freq_mhz == c


@given(st.lists(st.sampled_from(ALL_SYMBOLS), min_size=6, max_size=6))
def test_decode_total(payload):
    """Every payload either decodes to valid fields or raises a decode error."""
    try:
        f = decode_symbols([*PREAMBLE, *payload])
    except (InvalidDurationError, InvalidDigitError, InvalidBandwidthError):
        return
    assert encode_fields(f) == (*PREAMBLE, *payload)
